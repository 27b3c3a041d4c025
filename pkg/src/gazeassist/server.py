"""Live WebSocket bridge running the control loop at 20 Hz wall clock.

Each connection owns one isolated session. Clients stream `input`
messages (pointer pose, hover gaze pixel, gripper button); the server
applies the latest input every tick (stale inputs are dropped,
latest-wins) and emits one `state` message per tick. State messages echo
the applied input so a recorded session replays bitwise through the
offline simulator.

Protocol (proto 1)
  client -> server:
    {"type": "configure", "config": {...}}
    {"type": "input", "t": float, "pointer": {"x","y","z"},
     "gaze_px": {"x","y"} | null, "button": bool}
    {"type": "reset" | "pause" | "resume"}
  server -> client:
    {"type": "state", "proto": 1, "t", "effector": [3], "target": [3]|null,
     "ci", "sci", "gf": [3],
     "boundary": {"S","H","theta","center","axis"} | null,
     "outcome": str|null, "input": {...applied input echo...}}
    {"type": "error", "proto": 1, "code": str, "detail": str}
"""

from __future__ import annotations

import asyncio
import json
import logging
from typing import Optional

import numpy as np

from .fixtures import FixtureConfigError, fixture_config_from_dict
from .intent import IntentModel
from .sim import (
    TASKS,
    AssistMode,
    ControlLoop,
    LoopConfig,
    OperatorInput,
    SimConfigError,
    StateRow,
    make_task_scene,
)

log = logging.getLogger(__name__)

PROTO_VERSION = 1
TICK_PERIOD = 0.05
MAX_SESSIONS = 16

_SESSION_FIELDS = {"proto", "task", "mode", "fixture", "seed", "scene_seed"}


class ProtocolError(ValueError):
    def __init__(self, code: str, detail: str):
        super().__init__(detail)
        self.code = code
        self.detail = detail


def session_loop_from_config(doc: dict, model: IntentModel | None = None) -> ControlLoop:
    """Build the control loop a session runs; shared with the offline
    replay path so live and offline runs use identical construction."""
    unknown = set(doc) - _SESSION_FIELDS
    if unknown:
        raise ProtocolError("bad_config", f"unknown config fields: {sorted(unknown)}")
    if doc.get("proto", PROTO_VERSION) != PROTO_VERSION:
        raise ProtocolError("bad_proto", f"unsupported proto {doc.get('proto')!r}")
    task = doc.get("task", "grasping")
    if task not in TASKS:
        raise ProtocolError("bad_config", f"task must be one of {TASKS}, got {task!r}")
    mode_doc = doc.get("mode", {})
    try:
        mode = AssistMode(
            kind=mode_doc.get("kind", "none"),
            intent_adjusted=bool(mode_doc.get("intent_adjusted", False)),
        )
        fixture = fixture_config_from_dict(doc.get("fixture", {}), task)
        seed = int(doc.get("seed", 0))
        scene = make_task_scene(task, np.random.default_rng(np.random.SeedSequence([seed, TASKS.index(task)])))
        loop_cfg = LoopConfig(task=task, mode=mode, fixture=fixture)
        return ControlLoop(scene, loop_cfg, model)
    except (SimConfigError, FixtureConfigError, ValueError) as exc:
        raise ProtocolError("bad_config", str(exc)) from exc


def parse_input_message(doc: dict) -> OperatorInput:
    try:
        pointer = doc["pointer"]
        gaze = doc.get("gaze_px")
        return OperatorInput(
            pointer=(float(pointer["x"]), float(pointer["y"]), float(pointer["z"])),
            gaze_px=(float(gaze["x"]), float(gaze["y"])) if gaze is not None else None,
            button=bool(doc.get("button", False)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ProtocolError("bad_input", f"malformed input message: {exc}") from exc


def state_message(row: StateRow) -> dict:
    boundary = None
    if row.boundary is not None:
        boundary = {
            "S": row.boundary.s_cm,
            "H": row.boundary.h_cm,
            "theta": row.boundary.theta_deg,
            "center": list(row.boundary.center),
            "axis": list(row.boundary.axis),
        }
    return {
        "type": "state",
        "proto": PROTO_VERSION,
        "t": row.t,
        "effector": list(row.effector),
        "target": list(row.target) if row.target is not None else None,
        "ci": row.ci,
        "sci": row.sci,
        "gf": list(row.gf),
        "boundary": boundary,
        "outcome": None,
        "input": row.applied_input.to_dict() if row.applied_input is not None else None,
    }


class Session:
    """One client's live loop: a control loop plus a latest-wins input
    mailbox. Message handling and ticking run on the event loop, so no
    further locking is needed."""

    def __init__(self, model: IntentModel | None = None):
        self.model = model
        self.loop: Optional[ControlLoop] = None
        self.latest_input: Optional[OperatorInput] = None
        self.paused = False

    @property
    def configured(self) -> bool:
        return self.loop is not None

    def configure(self, doc: dict) -> None:
        self.loop = session_loop_from_config(doc, self.model)
        self.latest_input = None
        self.paused = False

    def reset(self) -> None:
        if self.loop is None:
            raise ProtocolError("not_configured", "reset before configure")
        self.loop.reset()
        self.latest_input = None

    def idle_input(self) -> OperatorInput:
        start = self.loop.scene.to_norm(np.asarray(self.loop.config.start_pos))
        return OperatorInput(pointer=tuple(float(v) for v in start), gaze_px=None, button=False)

    def tick(self) -> dict:
        if self.loop is None:
            raise ProtocolError("not_configured", "tick before configure")
        applied = self.latest_input if self.latest_input is not None else self.idle_input()
        row = self.loop.tick(applied)
        msg = state_message(row)
        msg["outcome"] = self.loop.outcome
        return msg


class BridgeServer:
    def __init__(
        self,
        host: str = "127.0.0.1",
        port: int = 8765,
        default_config: dict | None = None,
        model: IntentModel | None = None,
        max_sessions: int = MAX_SESSIONS,
    ):
        self.host = host
        self.port = port
        self.default_config = default_config or {}
        self.model = model
        self.max_sessions = max_sessions
        self.active_sessions = 0
        self._server = None

    async def start(self):
        from websockets.asyncio.server import serve

        self._server = await serve(self.handle, self.host, self.port)
        return self._server

    async def run_forever(self):
        server = await self.start()
        await server.wait_closed()

    async def close(self):
        if self._server is not None:
            self._server.close()
            await self._server.wait_closed()

    @property
    def bound_port(self) -> int:
        sockets = self._server.sockets
        return sockets[0].getsockname()[1]

    @staticmethod
    async def _send_error(ws, code: str, detail: str) -> None:
        await ws.send(json.dumps(
            {"type": "error", "proto": PROTO_VERSION, "code": code, "detail": detail}
        ))

    async def _tick_loop(self, ws, session: Session) -> None:
        ev_loop = asyncio.get_running_loop()
        next_t = ev_loop.time() + TICK_PERIOD
        while True:
            delay = next_t - ev_loop.time()
            if delay > 0:
                await asyncio.sleep(delay)
                next_t += TICK_PERIOD
            else:
                next_t = ev_loop.time() + TICK_PERIOD  # fell behind; no burst
            if session.configured and not session.paused:
                await ws.send(json.dumps(session.tick()))

    async def handle(self, ws) -> None:
        if self.active_sessions >= self.max_sessions:
            await self._send_error(ws, "capacity", "no session slots available")
            return
        self.active_sessions += 1
        session = Session(self.model)
        if self.default_config:
            try:
                session.configure(self.default_config)
            except ProtocolError as exc:
                log.warning("default config rejected: %s", exc.detail)
        ticker = asyncio.create_task(self._tick_loop(ws, session))
        try:
            async for raw in ws:
                try:
                    try:
                        doc = json.loads(raw)
                    except json.JSONDecodeError as exc:
                        raise ProtocolError("bad_json", str(exc)) from exc
                    if not isinstance(doc, dict) or "type" not in doc:
                        raise ProtocolError("bad_message", "messages are objects with a type")
                    kind = doc["type"]
                    if kind == "configure":
                        session.configure(doc.get("config", {}))
                    elif kind == "input":
                        session.latest_input = parse_input_message(doc)
                    elif kind == "reset":
                        session.reset()
                    elif kind == "pause":
                        session.paused = True
                    elif kind == "resume":
                        session.paused = False
                    else:
                        raise ProtocolError("bad_type", f"unknown message type {kind!r}")
                except ProtocolError as exc:
                    await self._send_error(ws, exc.code, exc.detail)
        finally:
            ticker.cancel()
            try:
                await ticker
            except (asyncio.CancelledError, Exception):
                pass
            self.active_sessions -= 1
