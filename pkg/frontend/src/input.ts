// Pointer, wheel, and button capture with a strict one-message-per-frame
// budget. Events only mutate local state; frame() builds the message, so
// the send rate can never exceed the animation frame rate.

import { ClientInputMessage, inputMessage } from "./protocol.js";

export const GAZE_SCREEN_W = 640;
export const GAZE_SCREEN_H = 480;
export const DEFAULT_DEPTH_GAIN = 0.02; // workspace units per wheel notch
export const GAZE_KEY_STEP = 12; // px per arrow key press in decoupled mode

export interface CaptureOptions {
  depthGain?: number;
  startPointer?: { x: number; y: number; z: number };
}

export class InputCapture {
  pointer: { x: number; y: number; z: number };
  gaze: { x: number; y: number };
  button = false;
  gazeDecoupled = false;
  readonly depthGain: number;
  private framesSeen = 0;
  private messagesSent = 0;

  constructor(opts: CaptureOptions = {}) {
    this.depthGain = opts.depthGain ?? DEFAULT_DEPTH_GAIN;
    this.pointer = opts.startPointer ?? { x: 0.5, y: 0.2, z: 0.4 };
    this.gaze = { x: GAZE_SCREEN_W / 2, y: GAZE_SCREEN_H / 2 };
  }

  // fractional position inside the front-view panel: h right, v up
  onPointerMove(h: number, v: number): void {
    this.pointer.x = h;
    this.pointer.z = v;
    if (!this.gazeDecoupled) {
      this.gaze.x = h * GAZE_SCREEN_W;
      this.gaze.y = (1 - v) * GAZE_SCREEN_H;
    }
  }

  // wheel up (negative deltaY) pushes deeper into the scene
  onWheel(deltaY: number): void {
    const notches = -deltaY / 100;
    this.pointer.y = Math.min(1, Math.max(0, this.pointer.y + notches * this.depthGain));
  }

  onButton(down: boolean): void {
    this.button = down;
  }

  toggleGazeDecoupled(): void {
    this.gazeDecoupled = !this.gazeDecoupled;
  }

  onGazeKey(dx: number, dy: number): void {
    if (!this.gazeDecoupled) return;
    this.gaze.x = Math.min(GAZE_SCREEN_W - 1, Math.max(0, this.gaze.x + dx * GAZE_KEY_STEP));
    this.gaze.y = Math.min(GAZE_SCREEN_H - 1, Math.max(0, this.gaze.y + dy * GAZE_KEY_STEP));
  }

  // one message per animation frame, unconditionally (idle frames are
  // heartbeats with the unchanged pose)
  frame(t: number): ClientInputMessage {
    this.framesSeen += 1;
    this.messagesSent += 1;
    return inputMessage(
      t,
      { x: this.pointer.x, y: this.pointer.y, z: this.pointer.z },
      { x: this.gaze.x, y: this.gaze.y },
      this.button,
    );
  }

  get sentToFrameRatio(): number {
    return this.framesSeen === 0 ? 0 : this.messagesSent / this.framesSeen;
  }
}
