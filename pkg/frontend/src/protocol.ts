// Wire types for the live control-loop bridge (proto 1).
// The server is authoritative for every fixture number; the client only
// renders what arrives here.

export const PROTO_VERSION = 1;
export const TICK_PERIOD = 0.05; // the bridge runs at 20 Hz

export type Vec3 = [number, number, number];
export type Pixel = [number, number];

export interface BoundaryMsg {
  S: number; // flat-bottom radius, cm
  H: number; // cone height limit, cm
  theta: number; // cone angle from the bottom plane, degrees
  center: Vec3; // scene meters
  axis: Vec3;
}

export interface InputEcho {
  pointer: Vec3;
  gaze_px: Pixel | null;
  button: boolean;
}

export interface StateMessage {
  type: "state";
  proto: number;
  t: number;
  effector: Vec3;
  target: Vec3 | null;
  ci: number;
  sci: number;
  gf: Vec3;
  boundary: BoundaryMsg | null;
  outcome: string | null;
  input: InputEcho | null;
}

export interface ErrorMessage {
  type: "error";
  proto: number;
  code: string;
  detail: string;
}

export type ServerMessage = StateMessage | ErrorMessage;

export interface ClientInputMessage {
  type: "input";
  t: number;
  pointer: { x: number; y: number; z: number };
  gaze_px: { x: number; y: number } | null;
  button: boolean;
}

export interface SessionConfig {
  task?: string;
  mode?: { kind: string; intent_adjusted: boolean };
  fixture?: Record<string, unknown>;
  seed?: number;
}

export class ProtocolViolation extends Error {}

function isVec3(v: unknown): v is Vec3 {
  return Array.isArray(v) && v.length === 3 && v.every((x) => typeof x === "number");
}

function isPixel(v: unknown): v is Pixel {
  return Array.isArray(v) && v.length === 2 && v.every((x) => typeof x === "number");
}

function parseBoundary(doc: unknown): BoundaryMsg | null {
  if (doc === null || doc === undefined) return null;
  const b = doc as Record<string, unknown>;
  if (
    typeof b.S !== "number" ||
    typeof b.H !== "number" ||
    typeof b.theta !== "number" ||
    !isVec3(b.center) ||
    !isVec3(b.axis)
  ) {
    throw new ProtocolViolation("malformed boundary in state message");
  }
  return { S: b.S, H: b.H, theta: b.theta, center: b.center, axis: b.axis };
}

export function parseServerMessage(raw: string): ServerMessage {
  let doc: unknown;
  try {
    doc = JSON.parse(raw);
  } catch {
    throw new ProtocolViolation("server message is not JSON");
  }
  const msg = doc as Record<string, unknown>;
  if (msg.type === "error") {
    if (typeof msg.code !== "string" || typeof msg.detail !== "string") {
      throw new ProtocolViolation("malformed error message");
    }
    return { type: "error", proto: Number(msg.proto ?? PROTO_VERSION), code: msg.code, detail: msg.detail };
  }
  if (msg.type !== "state") {
    throw new ProtocolViolation(`unknown server message type ${String(msg.type)}`);
  }
  if (msg.proto !== PROTO_VERSION) {
    throw new ProtocolViolation(`unsupported proto ${String(msg.proto)}`);
  }
  if (typeof msg.t !== "number" || !isVec3(msg.effector) || !isVec3(msg.gf)) {
    throw new ProtocolViolation("malformed state message");
  }
  if (typeof msg.ci !== "number" || typeof msg.sci !== "number") {
    throw new ProtocolViolation("state message missing confidence fields");
  }
  const target = msg.target === null || msg.target === undefined ? null : msg.target;
  if (target !== null && !isVec3(target)) {
    throw new ProtocolViolation("malformed target in state message");
  }
  let input: InputEcho | null = null;
  if (msg.input !== null && msg.input !== undefined) {
    const inp = msg.input as Record<string, unknown>;
    const gaze = inp.gaze_px === null || inp.gaze_px === undefined ? null : inp.gaze_px;
    if (!isVec3(inp.pointer) || (gaze !== null && !isPixel(gaze)) || typeof inp.button !== "boolean") {
      throw new ProtocolViolation("malformed input echo in state message");
    }
    input = { pointer: inp.pointer, gaze_px: gaze, button: inp.button };
  }
  return {
    type: "state",
    proto: msg.proto,
    t: msg.t,
    effector: msg.effector,
    target: target,
    ci: msg.ci,
    sci: msg.sci,
    gf: msg.gf,
    boundary: parseBoundary(msg.boundary),
    outcome: (msg.outcome as string | null) ?? null,
    input,
  };
}

export function inputMessage(
  t: number,
  pointer: { x: number; y: number; z: number },
  gazePx: { x: number; y: number } | null,
  button: boolean,
): ClientInputMessage {
  return { type: "input", t, pointer, gaze_px: gazePx, button };
}
