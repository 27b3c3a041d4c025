"""Deterministic closed-loop teleoperation simulator.

One `ControlLoop` tick runs the whole pipeline in order: gaze update,
features, posterior, confidence, target resolution, fixture adjustment,
force/constraint, then effector pursuit of the (possibly clamped)
commanded pose. The same loop backs offline trials with synthetic
operators, replay of recorded sessions, and the live WebSocket bridge,
so identical inputs always produce identical outputs.

Synthetic operators stand in for human volunteers: the direct reacher
fixates the target and moves straight at its *perceived* position (the
true target plus a depth-axis perception error), while the distracted
scanner interleaves fixation with random scanning to exercise the
confidence dynamics.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .corpus import default_intent_model
from .fixtures import (
    AdjustmentPolicy,
    BoundaryParams,
    FixtureConfig,
    combine,
    compute_fixtures,
    constrain,
)
from .gaze import GazeSample, GazeWindow, StreamSmoother
from .intent import IntentModel, estimate
from .scene import Scene, cut_scene, grasp_scene

DT = 0.05
EFFECTOR_SPEED = 0.10  # m/s pursuit cap
GRASP_EPS = 0.015  # m
CUT_EPS = 0.005  # m
DEFAULT_TIMEOUT = 30.0
START_POS = (0.25, 0.10, 0.20)

TASKS = ("grasping", "cutting")
ASSIST_KINDS = ("none", "guidance_force", "safety_boundary")

TRIAL_ROW_SCHEMA = "trial-row/1"
TRIAL_OUTCOME_SCHEMA = "trial-outcome/1"


class SimConfigError(ValueError):
    pass


@dataclass(frozen=True)
class AssistMode:
    """Which fixture is active and whether it scales with intent."""

    kind: str = "none"
    intent_adjusted: bool = False

    def __post_init__(self):
        if self.kind not in ASSIST_KINDS:
            raise SimConfigError(f"assist kind must be one of {ASSIST_KINDS}, got {self.kind!r}")


@dataclass(frozen=True)
class OperatorInput:
    """One tick of operator input: joystick pose in normalized workspace
    coordinates, gaze pixel (None when the eyes are not tracked), and the
    gripper/blade button."""

    pointer: tuple[float, float, float]
    gaze_px: Optional[tuple[float, float]] = None
    button: bool = False

    def to_dict(self) -> dict:
        return {
            "pointer": list(self.pointer),
            "gaze_px": list(self.gaze_px) if self.gaze_px is not None else None,
            "button": self.button,
        }

    @staticmethod
    def from_dict(doc: dict) -> "OperatorInput":
        gaze = doc.get("gaze_px")
        return OperatorInput(
            pointer=tuple(doc["pointer"]),
            gaze_px=tuple(gaze) if gaze is not None else None,
            button=bool(doc.get("button", False)),
        )


@dataclass(frozen=True)
class StateRow:
    """One logged control tick."""

    t: float
    gaze_px: Optional[tuple[float, float]]
    p_j: tuple[float, float, float]
    c: Optional[tuple[float, float, float]]
    gf: tuple[float, float, float]
    boundary: Optional[BoundaryParams]
    ci: float
    sci: float
    target: Optional[tuple[float, float, float]]
    effector: tuple[float, float, float]
    gripper: bool
    applied_input: Optional[OperatorInput] = None

    def to_dict(self) -> dict:
        boundary = None
        if self.boundary is not None:
            boundary = {
                "S": self.boundary.s_cm,
                "H": self.boundary.h_cm,
                "theta": self.boundary.theta_deg,
                "center": list(self.boundary.center),
                "axis": list(self.boundary.axis),
            }
        doc = {
            "schema": TRIAL_ROW_SCHEMA,
            "t": self.t,
            "gaze_px": list(self.gaze_px) if self.gaze_px is not None else None,
            "p_j": list(self.p_j),
            "c": list(self.c) if self.c is not None else None,
            "gf": list(self.gf),
            "boundary": boundary,
            "ci": self.ci,
            "sci": self.sci,
            "target": list(self.target) if self.target is not None else None,
            "effector": list(self.effector),
            "gripper": self.gripper,
        }
        if self.applied_input is not None:
            doc["input"] = self.applied_input.to_dict()
        return doc

    @staticmethod
    def from_dict(doc: dict) -> "StateRow":
        if doc.get("schema") != TRIAL_ROW_SCHEMA:
            raise SimConfigError(f"unsupported row schema {doc.get('schema')!r}")
        bdoc = doc.get("boundary")
        boundary = None
        if bdoc is not None:
            boundary = BoundaryParams(
                s_cm=bdoc["S"], h_cm=bdoc["H"], theta_deg=bdoc["theta"],
                center=tuple(bdoc["center"]), axis=tuple(bdoc["axis"]),
            )
        inp = doc.get("input")
        return StateRow(
            t=doc["t"],
            gaze_px=tuple(doc["gaze_px"]) if doc.get("gaze_px") is not None else None,
            p_j=tuple(doc["p_j"]),
            c=tuple(doc["c"]) if doc.get("c") is not None else None,
            gf=tuple(doc["gf"]),
            boundary=boundary,
            ci=doc["ci"],
            sci=doc["sci"],
            target=tuple(doc["target"]) if doc.get("target") is not None else None,
            effector=tuple(doc["effector"]),
            gripper=doc["gripper"],
            applied_input=OperatorInput.from_dict(inp) if inp is not None else None,
        )


@dataclass(frozen=True)
class LoopConfig:
    task: str = "grasping"
    mode: AssistMode = field(default_factory=AssistMode)
    fixture: FixtureConfig = field(default_factory=FixtureConfig)
    dt: float = DT
    effector_speed: float = EFFECTOR_SPEED
    start_pos: tuple[float, float, float] = START_POS

    def __post_init__(self):
        if self.task not in TASKS:
            raise SimConfigError(f"task must be one of {TASKS}, got {self.task!r}")
        if self.dt <= 0:
            raise SimConfigError(f"dt must be positive, got {self.dt}")


class ControlLoop:
    """The per-tick pipeline. Feed it one OperatorInput per tick; it
    returns the logged StateRow and latches the first task outcome."""

    def __init__(self, scene: Scene, config: LoopConfig, model: IntentModel | None = None):
        if config.task == "grasping" and scene.target.shape != "sphere":
            raise SimConfigError("grasping task needs a sphere target")
        if config.task == "cutting" and scene.target.shape != "strip":
            raise SimConfigError("cutting task needs a strip target")
        self.scene = scene
        self.config = config
        self.model = model if model is not None else default_intent_model()
        self.policy: AdjustmentPolicy = config.fixture.policy
        self.tick_count = 0
        self.attempts = 0
        self.outcome: Optional[str] = None
        self.effector = np.array(config.start_pos, dtype=float)
        self._smoother = StreamSmoother()
        self._window = GazeWindow()
        self._last_valid_t: Optional[float] = None
        self._prev_button = False

    def reset(self) -> None:
        self.tick_count = 0
        self.attempts = 0
        self.outcome = None
        self.effector = np.array(self.config.start_pos, dtype=float)
        self._smoother = StreamSmoother()
        self._window = GazeWindow()
        self._last_valid_t = None
        self._prev_button = False

    def _evaluate_close(self, effector: np.ndarray) -> Optional[str]:
        target = self.scene.target
        if self.config.task == "grasping":
            if np.linalg.norm(effector - np.asarray(target.center)) <= GRASP_EPS:
                return "success"
            return None
        # cutting: the blade must enter the strip inside the marked segment
        half = np.asarray(target.size) / 2.0
        center = np.asarray(target.center)
        on_strip = (
            abs(effector[1] - center[1]) <= half[1] + CUT_EPS
            and abs(effector[2] - center[2]) <= half[2] + CUT_EPS
            and abs(effector[0] - center[0]) <= half[0] + CUT_EPS
        )
        if not on_strip:
            return None
        lo, hi = target.marked_x
        if lo - CUT_EPS <= effector[0] <= hi + CUT_EPS:
            return "success"
        return "fail_wrong_location"

    def tick(self, inp: OperatorInput) -> StateRow:
        cfg = self.config
        t = self.tick_count * cfg.dt
        self.tick_count += 1

        # gaze update -> features -> posterior -> confidence
        if inp.gaze_px is not None:
            sample = GazeSample(t, inp.gaze_px[0], inp.gaze_px[1], True)
        else:
            sample = GazeSample.invalid(t)
        smoothed = self._smoother.push(sample)
        self._window.update(smoothed, now=t)
        if smoothed.valid:
            self._last_valid_t = t
        track_loss = t - self._last_valid_t if self._last_valid_t is not None else math.inf

        # intent readout, target resolution, fixture adjustment
        intent_est = estimate(self.model, self._window, track_loss, self.scene)
        ci = intent_est.ci
        target = intent_est.target
        p_j = np.clip(np.asarray(inp.pointer, dtype=float), 0.0, 1.0)
        commanded = p_j.copy()
        c_norm: Optional[np.ndarray] = None
        p_g = self.scene.to_norm(target) if target is not None else None
        if p_g is not None:
            c_norm = combine(p_j, p_g, cfg.fixture.field_params)
        fixture_state = compute_fixtures(
            p_j, p_g, target, cfg.mode.kind, cfg.mode.intent_adjusted, ci, cfg.fixture
        )
        gf = fixture_state.gf
        sci = fixture_state.sci
        boundary = fixture_state.boundary
        if boundary is not None:
            cmd_scene, _ = constrain(boundary, self.scene.from_norm(commanded), cfg.fixture.stiffness)
            commanded = self.scene.to_norm(cmd_scene)

        # effector pursues the commanded pose at bounded speed
        cmd_scene = self.scene.from_norm(commanded)
        delta = cmd_scene - self.effector
        dist = float(np.linalg.norm(delta))
        step = cfg.effector_speed * cfg.dt
        if dist > step:
            self.effector = self.effector + delta * (step / dist)
        else:
            self.effector = cmd_scene
        if boundary is not None:
            self.effector, _ = constrain(boundary, self.effector, cfg.fixture.stiffness)

        # task events: hazard contact fails immediately, a button edge is
        # one attempt and may finish the task
        if self.outcome is None:
            for obj in self.scene.objects:
                if obj.hazard and obj.contains(self.effector):
                    self.outcome = "fail_hazard_contact"
                    break
        button_edge = inp.button and not self._prev_button
        self._prev_button = inp.button
        if button_edge and self.outcome is None:
            self.attempts += 1
            self.outcome = self._evaluate_close(self.effector)

        return StateRow(
            t=t,
            gaze_px=inp.gaze_px,
            p_j=tuple(float(v) for v in p_j),
            c=tuple(float(v) for v in c_norm) if c_norm is not None else None,
            gf=tuple(float(v) for v in gf),
            boundary=boundary,
            ci=ci,
            sci=sci,
            target=tuple(float(v) for v in target) if target is not None else None,
            effector=tuple(float(v) for v in self.effector),
            gripper=inp.button,
            applied_input=inp,
        )


@dataclass(frozen=True)
class OperatorConfig:
    kind: str = "direct_reacher"
    gaze_jitter_px: float = 15.0
    move_speed: float = 0.10  # m/s
    reaction_delay: float = 0.5  # s before the first move and after a retry
    depth_noise: float = 0.01  # m, perception error along the camera depth axis
    tremor: float = 0.0005  # m per-tick lateral hand noise
    assist_gain: float = 0.5  # normalized units/s of hand drift per unit force
    settle_time: float = 0.3  # s hold before pressing close
    close_tol: float = 0.004  # m "I have arrived" radius
    stall_time: float = 0.6  # s without progress before closing anyway
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("direct_reacher", "distracted_scanner", "replay"):
            raise SimConfigError(f"unknown operator kind {self.kind!r}")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "gaze_jitter_px": self.gaze_jitter_px,
            "move_speed": self.move_speed,
            "reaction_delay": self.reaction_delay,
            "depth_noise": self.depth_noise,
            "tremor": self.tremor,
            "assist_gain": self.assist_gain,
            "settle_time": self.settle_time,
            "close_tol": self.close_tol,
            "stall_time": self.stall_time,
            "seed": self.seed,
        }


def _goal_point(scene: Scene) -> np.ndarray:
    target = scene.target
    if target.shape == "sphere":
        return np.asarray(target.center, dtype=float)
    lo, hi = target.marked_x
    return np.array([(lo + hi) / 2.0, target.center[1], target.center[2]])


class DirectReacher:
    """Fixates the goal and reaches straight for its perceived position.

    Perception carries a depth-axis error redrawn after every failed
    attempt, modeling the operator looking again. The hand yields to the
    guidance force of the previous tick at assist_gain.
    """

    def __init__(self, scene: Scene, config: OperatorConfig, rng: np.random.Generator):
        self.scene = scene
        self.config = config
        self.rng = rng
        self.goal = _goal_point(scene)
        self.hand = np.array(START_POS, dtype=float)
        self.perceived = self._perceive()
        self.phase = "wait"
        self.timer = config.reaction_delay
        self.stall = 0.0
        self._prev_dist = math.inf

    def _perceive(self) -> np.ndarray:
        return self.goal + np.array([0.0, self.rng.normal(0.0, self.config.depth_noise), 0.0])

    def _gaze(self) -> tuple[float, float]:
        cam = self.scene.camera
        u, v = cam.project(self.goal)
        u += self.rng.normal(0.0, self.config.gaze_jitter_px)
        v += self.rng.normal(0.0, self.config.gaze_jitter_px)
        return (
            min(max(u, 0.0), cam.width - 1.0),
            min(max(v, 0.0), cam.height - 1.0),
        )

    def _drift_with_force(self, feedback: Optional[StateRow], dt: float) -> None:
        if feedback is None:
            return
        gf = np.asarray(feedback.gf)
        if not np.any(gf):
            return
        lo = np.asarray(self.scene.workspace_lo)
        hi = np.asarray(self.scene.workspace_hi)
        self.hand = self.hand + self.config.assist_gain * gf * dt * (hi - lo)

    def step(self, feedback: Optional[StateRow], dt: float = DT) -> OperatorInput:
        cfg = self.config
        button = False
        if self.phase == "wait":
            self.timer -= dt
            if self.timer <= 0.0:
                self.phase = "move"
                self._prev_dist = math.inf
                self.stall = 0.0
        elif self.phase == "move":
            to_goal = self.perceived - self.hand
            dist = float(np.linalg.norm(to_goal))
            if dist > 1e-12:
                step = min(cfg.move_speed * dt, dist)
                self.hand = self.hand + to_goal * (step / dist)
            self.hand[0] += self.rng.normal(0.0, cfg.tremor)
            self.hand[2] += self.rng.normal(0.0, cfg.tremor)
            self._drift_with_force(feedback, dt)
            dist = float(np.linalg.norm(self.perceived - self.hand))
            if dist <= cfg.close_tol:
                self.phase = "settle"
                self.timer = cfg.settle_time
            else:
                if self._prev_dist - dist < 0.1 * cfg.move_speed * dt:
                    self.stall += dt
                else:
                    self.stall = 0.0
                if self.stall >= cfg.stall_time:
                    self.phase = "settle"
                    self.timer = cfg.settle_time
                self._prev_dist = dist
        elif self.phase == "settle":
            self._drift_with_force(feedback, dt)
            self.timer -= dt
            if self.timer <= 0.0:
                button = True
                self.phase = "retry"
        elif self.phase == "retry":
            # the previous close did not end the trial: look again
            self.perceived = self._perceive()
            self.phase = "wait"
            self.timer = cfg.reaction_delay
        pointer = self.scene.to_norm(self.hand)
        return OperatorInput(
            pointer=tuple(float(v) for v in pointer),
            gaze_px=self._gaze(),
            button=button,
        )


class DistractedScanner(DirectReacher):
    """Alternates fixation on the goal with scanning the whole screen,
    pausing the hand while scanning. Exercises the confidence dynamics."""

    def __init__(self, scene: Scene, config: OperatorConfig, rng: np.random.Generator):
        super().__init__(scene, config, rng)
        self.attention = "fixate"
        self.attention_timer = float(rng.uniform(1.0, 2.5))

    def step(self, feedback: Optional[StateRow], dt: float = DT) -> OperatorInput:
        self.attention_timer -= dt
        if self.attention_timer <= 0.0:
            if self.attention == "fixate":
                self.attention = "scan"
                self.attention_timer = float(self.rng.uniform(0.8, 2.0))
            else:
                self.attention = "fixate"
                self.attention_timer = float(self.rng.uniform(1.0, 2.5))
        if self.attention == "scan":
            cam = self.scene.camera
            gaze = (
                float(self.rng.uniform(0.0, cam.width)),
                float(self.rng.uniform(0.0, cam.height)),
            )
            # hand pauses while the eyes wander
            pointer = self.scene.to_norm(self.hand)
            return OperatorInput(tuple(float(v) for v in pointer), gaze, False)
        return super().step(feedback, dt)


class ReplayOperator:
    """Feeds back a recorded input sequence verbatim."""

    def __init__(self, inputs: Sequence[OperatorInput]):
        if not inputs:
            raise SimConfigError("replay needs at least one input")
        self.inputs = list(inputs)
        self.k = 0

    def step(self, feedback: Optional[StateRow], dt: float = DT) -> OperatorInput:
        inp = self.inputs[min(self.k, len(self.inputs) - 1)]
        self.k += 1
        return inp


def make_operator(scene: Scene, config: OperatorConfig, rng: np.random.Generator):
    if config.kind == "direct_reacher":
        return DirectReacher(scene, config, rng)
    if config.kind == "distracted_scanner":
        return DistractedScanner(scene, config, rng)
    raise SimConfigError(f"operator kind {config.kind!r} needs an explicit input sequence")


@dataclass(frozen=True)
class TrialRecord:
    config: dict
    rows: tuple[StateRow, ...]
    outcome: str
    completion_time: float
    attempts: int


def make_task_scene(task: str, rng: np.random.Generator | None = None) -> Scene:
    """Scene for a task with (optionally) randomized target placement."""
    if task == "grasping":
        if rng is None:
            return grasp_scene()
        return grasp_scene(
            ball_xy=(0.25 + float(rng.uniform(-0.06, 0.06)), 0.30 + float(rng.uniform(-0.04, 0.04)))
        )
    if task == "cutting":
        if rng is None:
            return cut_scene()
        return cut_scene(marked_x_center=0.25 + float(rng.uniform(-0.06, 0.06)))
    raise SimConfigError(f"unknown task {task!r}")


def run_trial(
    scene: Scene,
    operator,
    mode: AssistMode,
    timeout: float = DEFAULT_TIMEOUT,
    fixture: FixtureConfig | None = None,
    model: IntentModel | None = None,
    task: str = "grasping",
    config_extra: dict | None = None,
) -> TrialRecord:
    """Run one trial to success, failure, or timeout.

    A timeout counts as failing to finish at the right place. The trial
    outcome is latched by the loop exactly once.
    """
    fixture = fixture if fixture is not None else FixtureConfig()
    loop_cfg = LoopConfig(task=task, mode=mode, fixture=fixture)
    loop = ControlLoop(scene, loop_cfg, model)
    rows: list[StateRow] = []
    feedback: Optional[StateRow] = None
    max_ticks = int(round(timeout / loop_cfg.dt))
    while loop.outcome is None and loop.tick_count < max_ticks:
        inp = operator.step(feedback, loop_cfg.dt)
        feedback = loop.tick(inp)
        rows.append(feedback)
    outcome = loop.outcome if loop.outcome is not None else "fail_wrong_location"
    config = {
        "task": task,
        "mode": {"kind": mode.kind, "intent_adjusted": mode.intent_adjusted},
        "fixture": fixture.to_dict(),
        "boundary_set": fixture.boundary_set if fixture.boundary_override is None else None,
        "timeout": timeout,
    }
    if config_extra:
        config.update(config_extra)
    return TrialRecord(
        config=config,
        rows=tuple(rows),
        outcome=outcome,
        completion_time=rows[-1].t + loop_cfg.dt if rows else 0.0,
        attempts=loop.attempts,
    )


TABLE3_GRID: tuple[tuple[str, AssistMode], ...] = (
    ("cutting", AssistMode("safety_boundary", True)),
    ("cutting", AssistMode("guidance_force", True)),
    ("grasping", AssistMode("safety_boundary", True)),
    ("grasping", AssistMode("guidance_force", True)),
    ("cutting", AssistMode("none", False)),
    ("grasping", AssistMode("none", False)),
)


def run_experiment(
    grid: Sequence[tuple[str, AssistMode]] = TABLE3_GRID,
    n_trials: int = 3,
    seed: int = 0,
    operator: OperatorConfig | None = None,
    fixture_by_task: dict[str, FixtureConfig] | None = None,
    timeout: float = DEFAULT_TIMEOUT,
    model: IntentModel | None = None,
) -> list[TrialRecord]:
    """Run the task x assistance grid with seeded randomized placement.

    Target placement and operator noise derive from (seed, task, trial
    index) only, so the same trial index sees identical conditions across
    assist modes and comparisons are paired. The execution order of the
    grid cells is itself shuffled per trial block.
    """
    if n_trials < 1:
        raise SimConfigError(f"n_trials must be >= 1, got {n_trials}")
    op_cfg = operator if operator is not None else OperatorConfig()
    model = model if model is not None else default_intent_model()
    jobs = []
    for trial_idx in range(n_trials):
        for cell_idx, (task, mode) in enumerate(grid):
            jobs.append((trial_idx, cell_idx, task, mode))
    order_rng = np.random.default_rng(np.random.SeedSequence([seed, 0xC0FFEE]))
    order_rng.shuffle(jobs)  # randomized mode order
    records: list[TrialRecord] = []
    for trial_idx, cell_idx, task, mode in jobs:
        task_id = TASKS.index(task)
        ss = np.random.SeedSequence([seed, task_id, trial_idx])
        placement_ss, operator_ss = ss.spawn(2)
        scene = make_task_scene(task, np.random.default_rng(placement_ss))
        fixture = None
        if fixture_by_task is not None:
            fixture = fixture_by_task.get(task)
        if fixture is None:
            fixture = FixtureConfig(boundary_set={"grasping": 5, "cutting": 2}[task])
        op = make_operator(scene, op_cfg, np.random.default_rng(operator_ss))
        records.append(
            run_trial(
                scene,
                op,
                mode,
                timeout=timeout,
                fixture=fixture,
                model=model,
                task=task,
                config_extra={
                    "seed": seed,
                    "trial_index": trial_idx,
                    "cell_index": cell_idx,
                    "operator": op_cfg.to_dict(),
                },
            )
        )
    return records


def replay_rows(
    inputs: Sequence[OperatorInput],
    scene: Scene,
    loop_config: LoopConfig,
    model: IntentModel | None = None,
) -> list[StateRow]:
    """Feed recorded inputs through a fresh loop; the backbone of the
    offline/online equivalence check."""
    loop = ControlLoop(scene, loop_config, model)
    return [loop.tick(inp) for inp in inputs]


def write_trial_jsonl(record: TrialRecord, path) -> None:
    """One row object per step plus a trailing outcome object."""
    with open(path, "w") as fh:
        for row in record.rows:
            fh.write(json.dumps(row.to_dict()) + "\n")
        fh.write(
            json.dumps(
                {
                    "schema": TRIAL_OUTCOME_SCHEMA,
                    "outcome": record.outcome,
                    "completion_time": record.completion_time,
                    "attempts": record.attempts,
                    "config": record.config,
                }
            )
            + "\n"
        )


def read_trial_jsonl(path) -> TrialRecord:
    rows: list[StateRow] = []
    outcome_doc: Optional[dict] = None
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            doc = json.loads(line)
            schema = doc.get("schema")
            if schema == TRIAL_ROW_SCHEMA:
                rows.append(StateRow.from_dict(doc))
            elif schema == TRIAL_OUTCOME_SCHEMA:
                outcome_doc = doc
            else:
                raise SimConfigError(f"{path}: unsupported schema {schema!r}")
    if outcome_doc is None:
        raise SimConfigError(f"{path}: missing trailing outcome object")
    return TrialRecord(
        config=outcome_doc["config"],
        rows=tuple(rows),
        outcome=outcome_doc["outcome"],
        completion_time=outcome_doc["completion_time"],
        attempts=outcome_doc["attempts"],
    )
