import assert from "node:assert/strict";
import { test } from "node:test";

import {
  ProtocolViolation,
  StateMessage,
  inputMessage,
  parseServerMessage,
} from "../src/protocol.js";

export function stateFixture(overrides: Partial<StateMessage> = {}): StateMessage {
  return {
    type: "state",
    proto: 1,
    t: 0.05,
    effector: [0.25, 0.1, 0.2],
    target: [0.25, 0.3, 0.095],
    ci: 0.8,
    sci: 0.5,
    gf: [0.0, 0.1, -0.05],
    boundary: { S: 3, H: 5, theta: 60, center: [0.25, 0.285, 0.095], axis: [0, 0, 1] },
    outcome: null,
    input: { pointer: [0.5, 0.2, 0.4], gaze_px: [320, 240], button: false },
    ...overrides,
  };
}

test("round-trips a full state message", () => {
  const msg = stateFixture();
  const parsed = parseServerMessage(JSON.stringify(msg));
  assert.deepEqual(parsed, msg);
});

test("accepts nulls where the protocol allows them", () => {
  const msg = stateFixture({ target: null, boundary: null, input: null, outcome: "success" });
  const parsed = parseServerMessage(JSON.stringify(msg));
  assert.equal(parsed.type, "state");
  if (parsed.type === "state") {
    assert.equal(parsed.target, null);
    assert.equal(parsed.boundary, null);
    assert.equal(parsed.outcome, "success");
  }
});

test("parses error messages", () => {
  const parsed = parseServerMessage(
    JSON.stringify({ type: "error", proto: 1, code: "bad_input", detail: "nope" }),
  );
  assert.equal(parsed.type, "error");
});

test("rejects garbage and wrong proto", () => {
  assert.throws(() => parseServerMessage("not json"), ProtocolViolation);
  assert.throws(() => parseServerMessage(JSON.stringify({ type: "??" })), ProtocolViolation);
  assert.throws(
    () => parseServerMessage(JSON.stringify(stateFixture({ proto: 2 }))),
    ProtocolViolation,
  );
  const bad = stateFixture() as unknown as Record<string, unknown>;
  bad.effector = [1, 2];
  assert.throws(() => parseServerMessage(JSON.stringify(bad)), ProtocolViolation);
});

test("input message shape matches the wire contract", () => {
  const msg = inputMessage(1.5, { x: 0.1, y: 0.2, z: 0.3 }, { x: 320, y: 240 }, true);
  assert.deepEqual(JSON.parse(JSON.stringify(msg)), {
    type: "input",
    t: 1.5,
    pointer: { x: 0.1, y: 0.2, z: 0.3 },
    gaze_px: { x: 320, y: 240 },
    button: true,
  });
});
