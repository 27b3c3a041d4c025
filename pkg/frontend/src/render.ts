// Canvas rendering: front view (what the operator's video feed shows),
// an optional side view supplying the missing depth cue, the confidence
// gauge, and the force arrow. All numbers drawn here come from the last
// state message, untouched.

import {
  Arrow,
  Panel,
  boundarySilhouette,
  confidenceGauge,
  forceArrow,
  toPanel,
} from "./geometry.js";
import { StateMessage, Vec3 } from "./protocol.js";
import { ViewModel } from "./viewmodel.js";

export interface Layout {
  front: Panel;
  side: Panel;
  sideVisible: boolean;
  gauge: { x: number; y: number; width: number; height: number };
}

export function defaultLayout(width: number, height: number, sideVisible: boolean): Layout {
  const pad = 16;
  const panelW = sideVisible ? (width - 3 * pad) / 2 : width - 2 * pad;
  const panelH = height - 2 * pad - 40;
  return {
    front: { x: pad, y: pad, width: panelW, height: panelH, hAxis: 0, vAxis: 2, vUp: true },
    side: {
      x: sideVisible ? 2 * pad + panelW : pad,
      y: pad,
      width: panelW,
      height: panelH,
      hAxis: 1,
      vAxis: 2,
      vUp: true,
    },
    sideVisible,
    gauge: { x: pad, y: height - 36, width: width - 2 * pad, height: 18 },
  };
}

function drawPanelFrame(ctx: CanvasRenderingContext2D, panel: Panel, label: string): void {
  ctx.strokeStyle = "#44506a";
  ctx.lineWidth = 1;
  ctx.strokeRect(panel.x, panel.y, panel.width, panel.height);
  ctx.fillStyle = "#8fa0c5";
  ctx.font = "12px sans-serif";
  ctx.fillText(label, panel.x + 6, panel.y + 16);
}

function drawCross(ctx: CanvasRenderingContext2D, p: { x: number; y: number }, size: number, color: string): void {
  ctx.strokeStyle = color;
  ctx.lineWidth = 2;
  ctx.beginPath();
  ctx.moveTo(p.x - size, p.y);
  ctx.lineTo(p.x + size, p.y);
  ctx.moveTo(p.x, p.y - size);
  ctx.lineTo(p.x, p.y + size);
  ctx.stroke();
}

function drawBoundary(ctx: CanvasRenderingContext2D, panel: Panel, state: StateMessage): void {
  const boundary = state.boundary;
  if (boundary === null) return;
  const silhouette = boundarySilhouette(boundary);
  ctx.strokeStyle = "#e0b341";
  ctx.lineWidth = 2;
  ctx.beginPath();
  silhouette.points.forEach((p, i) => {
    const point: Vec3 = [...boundary.center] as Vec3;
    point[panel.hAxis] = boundary.center[panel.hAxis] + p.r;
    point[panel.vAxis] = boundary.center[panel.vAxis] + p.h;
    const q = toPanel(panel, point);
    if (i === 0) ctx.moveTo(q.x, q.y);
    else ctx.lineTo(q.x, q.y);
  });
  ctx.stroke();
}

function drawArrow(ctx: CanvasRenderingContext2D, arrow: Arrow | null): void {
  if (arrow === null) return;
  ctx.strokeStyle = "#5fd068";
  ctx.lineWidth = 2.5;
  ctx.beginPath();
  ctx.moveTo(arrow.from.x, arrow.from.y);
  ctx.lineTo(arrow.to.x, arrow.to.y);
  ctx.stroke();
  const angle = Math.atan2(arrow.to.y - arrow.from.y, arrow.to.x - arrow.from.x);
  ctx.beginPath();
  ctx.moveTo(arrow.to.x, arrow.to.y);
  ctx.lineTo(arrow.to.x - 8 * Math.cos(angle - 0.4), arrow.to.y - 8 * Math.sin(angle - 0.4));
  ctx.moveTo(arrow.to.x, arrow.to.y);
  ctx.lineTo(arrow.to.x - 8 * Math.cos(angle + 0.4), arrow.to.y - 8 * Math.sin(angle + 0.4));
  ctx.stroke();
}

function drawGauge(ctx: CanvasRenderingContext2D, layout: Layout, ci: number): void {
  const g = layout.gauge;
  const model = confidenceGauge(ci);
  ctx.fillStyle = "#222a3d";
  ctx.fillRect(g.x, g.y, g.width, g.height);
  ctx.fillStyle = model.active ? "#5fd068" : "#7a86a8";
  ctx.fillRect(g.x, g.y, g.width * model.fraction, g.height);
  const knot = g.x + g.width * model.threshold;
  ctx.strokeStyle = "#e0b341";
  ctx.lineWidth = 2;
  ctx.beginPath();
  ctx.moveTo(knot, g.y - 3);
  ctx.lineTo(knot, g.y + g.height + 3);
  ctx.stroke();
  ctx.fillStyle = "#c6cfe6";
  ctx.font = "12px sans-serif";
  ctx.fillText(`ci ${ci.toFixed(2)}`, g.x + g.width + -64, g.y + 13);
}

export function renderFrame(
  ctx: CanvasRenderingContext2D,
  vm: ViewModel,
  layout: Layout,
  nowMs: number,
): void {
  ctx.fillStyle = "#141923";
  ctx.fillRect(0, 0, ctx.canvas.width, ctx.canvas.height);
  drawPanelFrame(ctx, layout.front, "front view (x/z)  -  wheel moves depth");
  if (layout.sideVisible) drawPanelFrame(ctx, layout.side, "side view (y/z)  -  the depth cue");
  const state = vm.latest;
  if (state === null) return;
  const panels = layout.sideVisible ? [layout.front, layout.side] : [layout.front];
  for (const panel of panels) {
    drawBoundary(ctx, panel, state);
    if (state.target !== null) {
      drawCross(ctx, toPanel(panel, state.target), 6, "#e05f5f");
    }
    drawCross(ctx, toPanel(panel, state.effector), 5, "#6fb3e0");
    drawArrow(ctx, forceArrow(panel, state.effector, state.gf));
  }
  drawGauge(ctx, layout, state.ci);
  if (vm.isStale(nowMs)) {
    ctx.fillStyle = "#e05f5f";
    ctx.font = "bold 14px sans-serif";
    ctx.fillText("connection degraded: no state for >500 ms", layout.front.x, layout.front.y - 2);
  }
}
