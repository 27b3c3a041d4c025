// Pure drawing geometry: panel transforms, the boundary silhouette, and
// the force arrow. Everything here is a plain function so the tests can
// probe it without a canvas.

import { BoundaryMsg, Vec3 } from "./protocol.js";

export interface Panel {
  // canvas rectangle
  x: number;
  y: number;
  width: number;
  height: number;
  // which workspace axes the panel shows (indices into Vec3)
  hAxis: 0 | 1 | 2;
  vAxis: 0 | 1 | 2;
  // vertical axis grows upward on screen when true
  vUp: boolean;
}

export const WORKSPACE_LO: Vec3 = [0, 0, 0.0];
export const WORKSPACE_HI: Vec3 = [0.5, 0.5, 0.5];

export function toPanel(panel: Panel, p: Vec3): { x: number; y: number } {
  const h = (p[panel.hAxis] - WORKSPACE_LO[panel.hAxis]) /
    (WORKSPACE_HI[panel.hAxis] - WORKSPACE_LO[panel.hAxis]);
  const v = (p[panel.vAxis] - WORKSPACE_LO[panel.vAxis]) /
    (WORKSPACE_HI[panel.vAxis] - WORKSPACE_LO[panel.vAxis]);
  return {
    x: panel.x + h * panel.width,
    y: panel.vUp ? panel.y + (1 - v) * panel.height : panel.y + v * panel.height,
  };
}

export function fromPanel(panel: Panel, x: number, y: number): { h: number; v: number } {
  const h = (x - panel.x) / panel.width;
  const vRaw = (y - panel.y) / panel.height;
  return { h: clamp01(h), v: clamp01(panel.vUp ? 1 - vRaw : vRaw) };
}

export function clamp01(v: number): number {
  return Math.min(1, Math.max(0, v));
}

export interface Silhouette {
  // polyline through the funnel cross-section as (radial offset, height)
  // pairs in scene meters: plane lip, cone wall, bottom disc, cone wall,
  // plane lip; the funnel is rotationally symmetric so the section is
  // the same in any vertical plane through the axis
  points: Array<{ r: number; h: number }>;
  planeHeight: number; // meters above the center along the axis
}

// Cross-section of the funnel. Uses the message values as-is: S and H
// arrive in centimeters, never recomputed locally.
export function boundarySilhouette(b: BoundaryMsg, lipMeters = 0.12): Silhouette {
  const sM = b.S / 100;
  const hM = b.H / 100;
  const rim = sM + (b.theta >= 89.999 ? 0 : hM / Math.tan((b.theta * Math.PI) / 180));
  return {
    points: [
      { r: -(rim + lipMeters), h: hM },
      { r: -rim, h: hM },
      { r: -sM, h: 0 },
      { r: sM, h: 0 },
      { r: rim, h: hM },
      { r: rim + lipMeters, h: hM },
    ],
    planeHeight: hM,
  };
}

export interface Arrow {
  from: { x: number; y: number };
  to: { x: number; y: number };
  magnitude: number;
}

// Arrow for the normalized force in a panel; length scales linearly with
// the component magnitude, hidden (null) when there is nothing to show.
export function forceArrow(
  panel: Panel,
  at: Vec3,
  gf: Vec3,
  pixelsPerUnitForce = 60,
): Arrow | null {
  const mag = Math.hypot(gf[0], gf[1], gf[2]);
  if (mag === 0) return null;
  const from = toPanel(panel, at);
  const dh = gf[panel.hAxis] * pixelsPerUnitForce;
  const dv = gf[panel.vAxis] * pixelsPerUnitForce * (panel.vUp ? -1 : 1);
  return { from, to: { x: from.x + dh, y: from.y + dv }, magnitude: mag };
}

export interface GaugeModel {
  fraction: number; // ci in [0, 1]
  threshold: number; // the adjustment knot
  active: boolean; // ci at or above the threshold
}

export function confidenceGauge(ci: number, ithresh = 0.6): GaugeModel {
  const fraction = clamp01(ci);
  return { fraction, threshold: ithresh, active: fraction >= ithresh };
}
