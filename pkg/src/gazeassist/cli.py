"""Command-line entry points: train, simulate, experiment, report, serve."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import corpus, intent, report as report_mod, stats
from .fixtures import FixtureConfig, FixtureConfigError, fixture_config_from_dict
from .gaze import GazeStreamError, read_gaze_csv
from .sim import (
    ASSIST_KINDS,
    TABLE3_GRID,
    TASKS,
    AssistMode,
    OperatorConfig,
    SimConfigError,
    make_operator,
    make_task_scene,
    read_trial_jsonl,
    run_experiment,
    run_trial,
    write_trial_jsonl,
)

log = logging.getLogger("gazeassist")

RUNCONFIG_SCHEMA = "runconfig/1"


class ConfigError(ValueError):
    """Configuration problem, carrying the offending field path."""


def _check_fields(doc: dict, allowed: set[str], path: str) -> None:
    unknown = set(doc) - allowed
    if unknown:
        raise ConfigError(f"{path}.{sorted(unknown)[0]}: unknown field")


def _parse_mode(doc: dict, path: str) -> AssistMode:
    _check_fields(doc, {"kind", "intent_adjusted"}, path)
    kind = doc.get("kind", "none")
    if kind not in ASSIST_KINDS:
        raise ConfigError(f"{path}.kind: must be one of {ASSIST_KINDS}, got {kind!r}")
    return AssistMode(kind, bool(doc.get("intent_adjusted", False)))


def _parse_operator(doc: dict, path: str) -> OperatorConfig:
    allowed = {
        "kind", "gaze_jitter_px", "move_speed", "reaction_delay", "depth_noise",
        "tremor", "assist_gain", "settle_time", "close_tol", "stall_time", "seed",
    }
    _check_fields(doc, allowed, path)
    try:
        return OperatorConfig(**doc)
    except (TypeError, SimConfigError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _parse_fixture(doc: dict, task: str, path: str) -> FixtureConfig:
    try:
        return fixture_config_from_dict(doc, task)
    except FixtureConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def parse_run_config(doc: dict, seed_override: int | None = None) -> dict:
    """Validate a run configuration and materialize its pieces.

    Returns a dict with keys: cells, n_trials, seed, timeout, operator,
    fixture_by_task, out.
    """
    allowed = {"schema", "cells", "task", "mode", "n_trials", "seed", "timeout",
               "operator", "fixture", "out"}
    _check_fields(doc, allowed, "$")
    if doc.get("schema", RUNCONFIG_SCHEMA) != RUNCONFIG_SCHEMA:
        raise ConfigError(f"$.schema: unsupported schema {doc['schema']!r}")
    cells_doc = doc.get("cells", "table3")
    if cells_doc == "table3":
        cells = list(TABLE3_GRID)
    elif isinstance(cells_doc, list):
        cells = []
        for i, cell in enumerate(cells_doc):
            path = f"$.cells[{i}]"
            if not isinstance(cell, dict):
                raise ConfigError(f"{path}: must be an object")
            _check_fields(cell, {"task", "mode"}, path)
            task = cell.get("task")
            if task not in TASKS:
                raise ConfigError(f"{path}.task: must be one of {TASKS}, got {task!r}")
            cells.append((task, _parse_mode(cell.get("mode", {}), f"{path}.mode")))
    else:
        raise ConfigError(f"$.cells: must be 'table3' or a list, got {cells_doc!r}")
    n_trials = doc.get("n_trials", 3)
    if not isinstance(n_trials, int) or n_trials < 1:
        raise ConfigError(f"$.n_trials: must be a positive integer, got {n_trials!r}")
    seed = seed_override if seed_override is not None else doc.get("seed", 0)
    if not isinstance(seed, int):
        raise ConfigError(f"$.seed: must be an integer, got {seed!r}")
    timeout = float(doc.get("timeout", 30.0))
    if timeout <= 0:
        raise ConfigError(f"$.timeout: must be positive, got {timeout}")
    operator = _parse_operator(doc.get("operator", {}), "$.operator")
    fixture_by_task = {
        task: _parse_fixture(doc.get("fixture", {}), task, "$.fixture") for task in TASKS
    }
    return {
        "cells": cells,
        "n_trials": n_trials,
        "seed": seed,
        "timeout": timeout,
        "operator": operator,
        "fixture_by_task": fixture_by_task,
        "out": doc.get("out"),
    }


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"{path}: no such file")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})")


def cmd_train(args) -> int:
    windows = []
    if args.synthetic:
        windows = corpus.synthetic_windows(200, seed=args.seed)
    pairs = args.corpus or []
    for gaze_path, events_path in pairs:
        try:
            samples = read_gaze_csv(gaze_path)
        except GazeStreamError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        try:
            events = corpus.read_events_csv(events_path)
        except GazeStreamError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        windows.extend(corpus.windows_from_recording(samples, events))
    if not windows:
        print("error: no training corpus; give --corpus GAZE EVENTS or --synthetic",
              file=sys.stderr)
        return 1
    counts = {
        intent.INTENT: sum(1 for w in windows if w.label == intent.INTENT),
        intent.NO_INTENT: sum(1 for w in windows if w.label == intent.NO_INTENT),
    }
    train, held = corpus.split_windows(windows, holdout=0.2, seed=args.seed)
    try:
        model = intent.fit(train)
    except intent.TrainingDataError as exc:
        print(f"error: class absent ({exc})", file=sys.stderr)
        return 1
    held_acc = intent.accuracy(model, held) if held else float("nan")
    out = Path(args.out or "model.json")
    intent.save_model(model, out)
    print(f"windows: intent={counts[intent.INTENT]} no_intent={counts[intent.NO_INTENT]}")
    print(f"held-out accuracy: {held_acc:.3f} ({len(held)} windows)")
    print(f"model written to {out}")
    return 0


def cmd_simulate(args) -> int:
    doc = _load_json(args.config) if args.config else {}
    allowed = {"schema", "task", "mode", "seed", "timeout", "operator", "fixture", "out"}
    _check_fields(doc, allowed, "$")
    task = doc.get("task", "grasping")
    if task not in TASKS:
        raise ConfigError(f"$.task: must be one of {TASKS}, got {task!r}")
    mode = _parse_mode(doc.get("mode", {}), "$.mode")
    seed = args.seed if args.seed is not None else doc.get("seed", 0)
    operator = _parse_operator(doc.get("operator", {}), "$.operator")
    fixture = _parse_fixture(doc.get("fixture", {}), task, "$.fixture")
    timeout = float(doc.get("timeout", 30.0))
    model = intent.load_model(args.model) if args.model else None
    ss = np.random.SeedSequence([seed, TASKS.index(task), 0])
    placement, op_seed = ss.spawn(2)
    scene = make_task_scene(task, np.random.default_rng(placement))
    op = make_operator(scene, operator, np.random.default_rng(op_seed))
    record = run_trial(scene, op, mode, timeout=timeout, fixture=fixture,
                       model=model, task=task,
                       config_extra={"seed": seed, "operator": operator.to_dict()})
    out_dir = Path(args.out or doc.get("out") or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "trial_0000.jsonl"
    write_trial_jsonl(record, path)
    print(f"{task}/{mode.kind}: {record.outcome} in {record.completion_time:.2f} s, "
          f"{record.attempts} attempt(s)")
    print(f"log written to {path}")
    return 0


def cmd_experiment(args) -> int:
    if not args.config:
        raise ConfigError("experiment needs --config")
    doc = _load_json(args.config)
    cfg = parse_run_config(doc, seed_override=args.seed)
    records = run_experiment(
        grid=cfg["cells"],
        n_trials=cfg["n_trials"],
        seed=cfg["seed"],
        operator=cfg["operator"],
        fixture_by_task=cfg["fixture_by_task"],
        timeout=cfg["timeout"],
    )
    out_dir = Path(args.out or cfg["out"] or "experiment_out")
    out_dir.mkdir(parents=True, exist_ok=True)
    for i, rec in enumerate(records):
        write_trial_jsonl(rec, out_dir / f"trial_{i:04d}.jsonl")
    summary = report_mod.summarize_records(records)
    report_mod.write_report(summary, out_dir / "report.json", out_dir / "report.md")
    print(f"{len(records)} trials written to {out_dir}")
    print(report_mod.report_to_markdown(summary))
    return 0


def cmd_report(args) -> int:
    if args.fixture:
        if args.fixture != "table2":
            raise ConfigError(f"--fixture: unknown fixture {args.fixture!r}")
        table = stats.aggregate_failure_table(stats.PARAM_SET_FAILURE_RATES)
        print(report_mod.failure_table_to_markdown(table))
        if args.out:
            out_dir = Path(args.out)
            out_dir.mkdir(parents=True, exist_ok=True)
            with open(out_dir / "table2.json", "w") as fh:
                json.dump(report_mod.failure_table_to_dict(table), fh, indent=2)
                fh.write("\n")
        return 0
    paths: list[Path] = []
    for entry in args.logs or []:
        p = Path(entry)
        if p.is_dir():
            paths.extend(sorted(p.glob("*.jsonl")))
        else:
            paths.append(p)
    records = []
    for p in paths:
        try:
            records.append(read_trial_jsonl(p))
        except SimConfigError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
    if not records:
        print("error: no trials", file=sys.stderr)
        return 1
    summary = report_mod.summarize_records(records)
    for cond in summary["conditions"]:
        if cond["trials"] < 2:
            print(f"warning: condition {cond['condition']} has a single trial; "
                  "intervals are degenerate", file=sys.stderr)
    print(report_mod.report_to_markdown(summary))
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        report_mod.write_report(summary, out_dir / "report.json", out_dir / "report.md")
    return 0


def cmd_serve(args) -> int:
    import asyncio

    from .server import BridgeServer

    doc = _load_json(args.config) if args.config else {}
    server = BridgeServer(host=args.host, port=args.port, default_config=doc)
    print(f"serving on ws://{args.host}:{args.port} (proto 1)")
    try:
        asyncio.run(server.run_forever())
    except KeyboardInterrupt:
        pass
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="override the config seed")
    common.add_argument("--config", help="JSON configuration file")
    common.add_argument("--out", help="output directory")
    common.add_argument("--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="gazeassist",
        description="Gaze-driven intent inference with confidence-scaled virtual fixtures",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", parents=[common], help="fit the intent classifier")
    p_train.add_argument("--corpus", nargs=2, action="append",
                         metavar=("GAZE_CSV", "EVENTS_CSV"),
                         help="gaze recording and confirmation events (repeatable)")
    p_train.add_argument("--synthetic", action="store_true",
                         help="use the built-in synthetic corpus")
    p_train.set_defaults(func=cmd_train)

    p_sim = sub.add_parser("simulate", parents=[common], help="run a single trial")
    p_sim.add_argument("--model", help="trained model JSON (defaults to the built-in)")
    p_sim.set_defaults(func=cmd_simulate)

    p_exp = sub.add_parser("experiment", parents=[common],
                           help="run a task x assistance grid")
    p_exp.set_defaults(func=cmd_experiment)

    p_rep = sub.add_parser("report", parents=[common], help="aggregate trial logs")
    p_rep.add_argument("--logs", nargs="+", help="JSONL files or directories")
    p_rep.add_argument("--fixture", help="named fixture dataset (table2)")
    p_rep.set_defaults(func=cmd_report)

    p_srv = sub.add_parser("serve", parents=[common], help="live WebSocket bridge")
    p_srv.add_argument("--host", default="127.0.0.1")
    p_srv.add_argument("--port", type=int, default=8765)
    p_srv.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    if args.seed is None:
        args.seed = 0 if args.command == "train" else args.seed
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (SimConfigError, FixtureConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
