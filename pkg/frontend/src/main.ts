// Entry point: wire input capture, the WebSocket client, rendering, and
// the HUD into one animation loop. Configuration comes from the URL
// query: host, port, task, mode, intent (0/1), seed.

import { SessionClient } from "./client.js";
import { fromPanel } from "./geometry.js";
import { InputCapture } from "./input.js";
import { SessionConfig } from "./protocol.js";
import { defaultLayout, renderFrame } from "./render.js";
import { ViewModel } from "./viewmodel.js";
import { renderHud } from "./hud.js";

const params = new URLSearchParams(window.location.search);
const host = params.get("host") ?? "127.0.0.1";
const port = params.get("port") ?? "8765";
const config: SessionConfig = {
  task: params.get("task") ?? "grasping",
  mode: {
    kind: params.get("mode") ?? "safety_boundary",
    intent_adjusted: (params.get("intent") ?? "1") === "1",
  },
  seed: Number(params.get("seed") ?? "3"),
};

const canvas = document.getElementById("view") as HTMLCanvasElement | null;
if (!canvas) throw new Error("canvas #view not found");
const ctx = canvas.getContext("2d");
if (!ctx) throw new Error("2D canvas context unavailable");
const hudEl = document.getElementById("hud");
if (!hudEl) throw new Error("#hud not found");

const vm = new ViewModel();
const capture = new InputCapture();
const client = new SessionClient(`ws://${host}:${port}`, vm, config);
client.connect();

let sideVisible = true;
let layout = defaultLayout(canvas.width, canvas.height, sideVisible);

canvas.addEventListener("pointermove", (ev: PointerEvent) => {
  const rect = canvas.getBoundingClientRect();
  const x = ((ev.clientX - rect.left) / rect.width) * canvas.width;
  const y = ((ev.clientY - rect.top) / rect.height) * canvas.height;
  const { h, v } = fromPanel(layout.front, x, y);
  capture.onPointerMove(h, v);
});
canvas.addEventListener("wheel", (ev: WheelEvent) => {
  ev.preventDefault();
  capture.onWheel(ev.deltaY);
}, { passive: false });
canvas.addEventListener("pointerdown", () => capture.onButton(true));
canvas.addEventListener("pointerup", () => capture.onButton(false));

window.addEventListener("keydown", (ev: KeyboardEvent) => {
  switch (ev.key) {
    case "g":
      capture.toggleGazeDecoupled();
      break;
    case "s":
      sideVisible = !sideVisible; // hide the depth cue to feel the problem
      layout = defaultLayout(canvas.width, canvas.height, sideVisible);
      break;
    case "r":
      client.sendReset();
      break;
    case "ArrowLeft":
      capture.onGazeKey(-1, 0);
      break;
    case "ArrowRight":
      capture.onGazeKey(1, 0);
      break;
    case "ArrowUp":
      capture.onGazeKey(0, -1);
      break;
    case "ArrowDown":
      capture.onGazeKey(0, 1);
      break;
  }
});

function frame(): void {
  const now = performance.now();
  client.sendInput(capture.frame(now / 1000));
  renderFrame(ctx!, vm, layout, now);
  renderHud(vm, hudEl!);
  requestAnimationFrame(frame);
}

requestAnimationFrame(frame);
