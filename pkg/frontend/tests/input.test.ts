import assert from "node:assert/strict";
import { test } from "node:test";

import { GAZE_SCREEN_H, GAZE_SCREEN_W, InputCapture } from "../src/input.js";

test("at most one message per animation frame, events notwithstanding", () => {
  const capture = new InputCapture();
  let messages = 0;
  const frames = 1000;
  for (let f = 0; f < frames; f++) {
    // a burst of pointer events between frames
    for (let e = 0; e < 7; e++) capture.onPointerMove(Math.random(), Math.random());
    capture.frame(f / 60);
    messages += 1;
  }
  assert.equal(messages, frames);
  assert.ok(capture.sentToFrameRatio <= 1.0);
});

test("idle frames heartbeat the unchanged pose", () => {
  const capture = new InputCapture();
  capture.onPointerMove(0.3, 0.7);
  const a = capture.frame(0);
  const b = capture.frame(0.016);
  assert.deepEqual(a.pointer, b.pointer);
  assert.deepEqual(a.gaze_px, b.gaze_px);
});

test("wheel notches move depth by the gain", () => {
  const capture = new InputCapture({ depthGain: 0.02 });
  const before = capture.pointer.y;
  capture.onWheel(-300); // three notches up = deeper
  assert.ok(Math.abs(capture.pointer.y - (before + 3 * 0.02)) < 1e-12);
  capture.onWheel(100); // one notch back
  assert.ok(Math.abs(capture.pointer.y - (before + 2 * 0.02)) < 1e-12);
});

test("depth stays inside the workspace", () => {
  const capture = new InputCapture();
  capture.onWheel(-1e6);
  assert.equal(capture.pointer.y, 1);
  capture.onWheel(1e6);
  assert.equal(capture.pointer.y, 0);
});

test("hover doubles as gaze until decoupled", () => {
  const capture = new InputCapture();
  capture.onPointerMove(0.25, 0.5);
  assert.deepEqual(capture.gaze, { x: 0.25 * GAZE_SCREEN_W, y: 0.5 * GAZE_SCREEN_H });
  capture.toggleGazeDecoupled();
  capture.onPointerMove(0.9, 0.9);
  assert.deepEqual(capture.gaze, { x: 0.25 * GAZE_SCREEN_W, y: 0.5 * GAZE_SCREEN_H });
  capture.onGazeKey(1, 0);
  assert.ok(capture.gaze.x > 0.25 * GAZE_SCREEN_W);
});

test("button state rides along", () => {
  const capture = new InputCapture();
  assert.equal(capture.frame(0).button, false);
  capture.onButton(true);
  assert.equal(capture.frame(0.016).button, true);
  capture.onButton(false);
  assert.equal(capture.frame(0.033).button, false);
});
