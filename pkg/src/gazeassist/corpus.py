"""Training corpora for the intent classifier.

Recordings pair a gaze CSV with an events CSV of confirmation times. The
two seconds of valid data strictly preceding each confirmation become one
`intent` window; the rest of the timeline is tiled into non-overlapping
two-second `no_intent` windows that avoid the confirmation intervals.

Synthetic generators produce the two archetypal behaviors: fixating
(tight Gaussian jitter around a point) and scanning (uniform jumps over
the whole screen). They drive classifier regression tests and give the
CLI a self-contained training path.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from . import intent
from .gaze import (
    MIN_FEATURE_SAMPLES,
    SCREEN_H,
    SCREEN_W,
    WINDOW_SPAN,
    GazeSample,
    GazeStreamError,
    GazeWindow,
    extract_features,
    smooth,
)
from .intent import INTENT, NO_INTENT, IntentModel, LabeledWindow

GAZE_RATE_HZ = 20.0
FIXATION_JITTER_PX = 15.0


@dataclass(frozen=True)
class ConfirmEvent:
    t: float


def write_events_csv(path, events: list[ConfirmEvent]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "event"])
        for e in events:
            writer.writerow([repr(e.t), "confirm"])


def read_events_csv(path) -> list[ConfirmEvent]:
    events: list[ConfirmEvent] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["t", "event"]:
            raise GazeStreamError(f"{path}: expected header t,event, got {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                t = float(row[0])
                kind = row[1].strip()
            except (IndexError, ValueError) as exc:
                raise GazeStreamError(f"{path}:{lineno}: bad row {row!r}") from exc
            if kind != "confirm":
                raise GazeStreamError(f"{path}:{lineno}: unknown event {kind!r}")
            events.append(ConfirmEvent(t))
    return events


def _features_in(samples: list[GazeSample], t0: float, t1: float):
    chunk = [s for s in samples if t0 <= s.t < t1 and s.valid]
    if len(chunk) < MIN_FEATURE_SAMPLES:
        return None
    window = GazeWindow(span=t1 - t0 + 1e-9)
    for s in chunk:
        window.update(s, now=t1)
    return extract_features(window)


def windows_from_recording(
    samples: list[GazeSample],
    events: list[ConfirmEvent],
    span: float = WINDOW_SPAN,
) -> list[LabeledWindow]:
    """Label a smoothed recording per the confirmation protocol.

    Each confirmation takes the span of strictly preceding valid data as
    one intent window. no_intent windows tile the remaining timeline in
    non-overlapping span-sized bins that do not touch any confirmation
    interval. Windows with fewer than MIN_FEATURE_SAMPLES valid samples
    are dropped.
    """
    if not samples:
        return []
    smoothed = smooth(samples)
    labeled: list[LabeledWindow] = []
    intervals = [(e.t - span, e.t) for e in events]
    for lo, hi in intervals:
        feats = _features_in(smoothed, lo, hi)
        if feats is not None:
            labeled.append(LabeledWindow(feats, INTENT))
    t_start, t_end = samples[0].t, samples[-1].t
    t = t_start
    while t + span <= t_end + 1e-9:
        if all(hi <= t or lo >= t + span for lo, hi in intervals):
            feats = _features_in(smoothed, t, t + span)
            if feats is not None:
                labeled.append(LabeledWindow(feats, NO_INTENT))
        t += span
    return labeled


def fixation_stream(
    rng: np.random.Generator,
    t0: float,
    duration: float,
    point: tuple[float, float] | None = None,
    jitter: float = FIXATION_JITTER_PX,
    rate: float = GAZE_RATE_HZ,
) -> list[GazeSample]:
    """Gaze dwelling on one point with Gaussian jitter, clipped to screen."""
    if point is None:
        point = (
            float(rng.uniform(0.15 * SCREEN_W, 0.85 * SCREEN_W)),
            float(rng.uniform(0.15 * SCREEN_H, 0.85 * SCREEN_H)),
        )
    n = int(round(duration * rate))
    dt = 1.0 / rate
    out = []
    for i in range(n):
        x = min(max(point[0] + rng.normal(0.0, jitter), 0.0), SCREEN_W - 1.0)
        y = min(max(point[1] + rng.normal(0.0, jitter), 0.0), SCREEN_H - 1.0)
        out.append(GazeSample(t0 + i * dt, float(x), float(y), True))
    return out


def scanning_stream(
    rng: np.random.Generator,
    t0: float,
    duration: float,
    rate: float = GAZE_RATE_HZ,
) -> list[GazeSample]:
    """Gaze jumping uniformly over the full screen."""
    n = int(round(duration * rate))
    dt = 1.0 / rate
    return [
        GazeSample(
            t0 + i * dt,
            float(rng.uniform(0.0, SCREEN_W)),
            float(rng.uniform(0.0, SCREEN_H)),
            True,
        )
        for i in range(n)
    ]


def synthetic_windows(n_per_class: int = 200, seed: int = 7) -> list[LabeledWindow]:
    """Independent labeled feature windows from the two generators."""
    rng = np.random.default_rng(seed)
    out: list[LabeledWindow] = []
    for _ in range(n_per_class):
        stream = smooth(fixation_stream(rng, 0.0, WINDOW_SPAN))
        window = GazeWindow(span=WINDOW_SPAN + 1e-9)
        for s in stream:
            window.update(s, now=stream[-1].t)
        out.append(LabeledWindow(extract_features(window), INTENT))
    for _ in range(n_per_class):
        stream = smooth(scanning_stream(rng, 0.0, WINDOW_SPAN))
        window = GazeWindow(span=WINDOW_SPAN + 1e-9)
        for s in stream:
            window.update(s, now=stream[-1].t)
        out.append(LabeledWindow(extract_features(window), NO_INTENT))
    return out


def write_synthetic_corpus(
    gaze_path,
    events_path,
    n_confirm: int = 50,
    seed: int = 7,
) -> None:
    """Write a gaze + events recording that alternates scanning segments
    with fixations ending in a confirmation, mirroring the labeling
    protocol end to end. Segment lengths are multiples of the window span
    so the no-intent tiling stays clear of the confirmation intervals."""
    rng = np.random.default_rng(seed)
    samples: list[GazeSample] = []
    events: list[ConfirmEvent] = []
    t = 0.0
    dt = 1.0 / GAZE_RATE_HZ
    for _ in range(n_confirm):
        scan = scanning_stream(rng, t, 2.0 * WINDOW_SPAN)
        samples.extend(scan)
        t = scan[-1].t + dt
        fix = fixation_stream(rng, t, WINDOW_SPAN)
        samples.extend(fix)
        t = fix[-1].t + dt
        events.append(ConfirmEvent(t))
    from .gaze import write_gaze_csv

    write_gaze_csv(gaze_path, samples)
    write_events_csv(events_path, events)


def split_windows(
    windows: list[LabeledWindow],
    holdout: float = 0.2,
    seed: int = 0,
) -> tuple[list[LabeledWindow], list[LabeledWindow]]:
    """Shuffle deterministically and split into train and held-out sets."""
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(windows))
    n_hold = int(round(len(windows) * holdout))
    held = [windows[i] for i in order[:n_hold]]
    train = [windows[i] for i in order[n_hold:]]
    return train, held


_DEFAULT_MODEL: IntentModel | None = None


def default_intent_model() -> IntentModel:
    """Classifier fitted once on the standard synthetic corpus (seed 7)."""
    global _DEFAULT_MODEL
    if _DEFAULT_MODEL is None:
        _DEFAULT_MODEL = intent.fit(synthetic_windows(200, seed=7))
    return _DEFAULT_MODEL
