"""Gaze stream processing: smoothing, the rolling valid-data window, and
the three dispersion features that feed the intent classifier.

A gaze stream is a time-ordered sequence of screen-space samples, each
flagged valid only when both eyes were tracked. Valid runs are smoothed
with a trailing five-point moving average; a rolling window keeps the
last two seconds of smoothed valid samples, and features describe how
focused the window is around its centroid.
"""

from __future__ import annotations

import csv
import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

SCREEN_W = 640
SCREEN_H = 480

SMOOTH_SPAN = 5
WINDOW_SPAN = 2.0

# Windows smaller than the smoothing kernel carry no fixation evidence;
# the intent pipeline refuses to classify them.
MIN_FEATURE_SAMPLES = 5


class GazeStreamError(ValueError):
    """Raised for out-of-order samples or malformed recordings."""


class InsufficientDataError(ValueError):
    """Raised when a window holds too few samples for feature extraction."""


@dataclass(frozen=True)
class GazeSample:
    """One eye-tracker sample: screen pixels at time t, valid when both
    eyes were tracked. Invalid samples carry no usable coordinates."""

    t: float
    x: float
    y: float
    valid: bool

    @staticmethod
    def invalid(t: float) -> "GazeSample":
        return GazeSample(t, math.nan, math.nan, False)


@dataclass(frozen=True)
class GazeFeatures:
    """Dispersion of a gaze window around its centroid.

    max_dist: largest sample-to-centroid Euclidean distance (pixels)
    mean_dist: mean sample-to-centroid distance (pixels)
    near_count: samples strictly closer to the centroid than mean_dist
    """

    max_dist: float
    mean_dist: float
    near_count: int

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.max_dist, self.mean_dist, float(self.near_count))


class StreamSmoother:
    """Incremental trailing moving average over consecutive valid samples.

    Each valid output is the mean of up to the SMOOTH_SPAN most recent
    consecutive valid inputs ending at it, so the kernel shrinks at the
    start of a run. Invalid samples pass through unchanged and reset the
    run.
    """

    def __init__(self, span: int = SMOOTH_SPAN):
        if span < 1:
            raise ValueError(f"span must be >= 1, got {span}")
        self._run: deque[tuple[float, float]] = deque(maxlen=span)

    def push(self, sample: GazeSample) -> GazeSample:
        if not sample.valid:
            self._run.clear()
            return sample
        self._run.append((sample.x, sample.y))
        n = len(self._run)
        sx = sum(p[0] for p in self._run)
        sy = sum(p[1] for p in self._run)
        return GazeSample(sample.t, sx / n, sy / n, True)

    def reset(self) -> None:
        self._run.clear()


def smooth(stream: Iterable[GazeSample], span: int = SMOOTH_SPAN) -> list[GazeSample]:
    """Smooth a whole stream with the trailing moving average filter."""
    smoother = StreamSmoother(span)
    return [smoother.push(s) for s in stream]


class GazeWindow:
    """Rolling window of smoothed valid samples covering the last `span`
    seconds. Only valid samples are stored; updates evict anything older
    than now - span. `samples` hands out an immutable snapshot."""

    def __init__(self, span: float = WINDOW_SPAN):
        if span <= 0:
            raise ValueError(f"span must be positive, got {span}")
        self.span = span
        self._samples: deque[GazeSample] = deque()

    def __len__(self) -> int:
        return len(self._samples)

    @property
    def samples(self) -> tuple[GazeSample, ...]:
        return tuple(self._samples)

    @property
    def centroid(self) -> tuple[float, float]:
        if not self._samples:
            raise InsufficientDataError("empty gaze window has no centroid")
        n = len(self._samples)
        return (
            sum(s.x for s in self._samples) / n,
            sum(s.y for s in self._samples) / n,
        )

    def update(self, sample: GazeSample, now: float) -> None:
        """Append a valid sample and evict anything older than now - span.

        Invalid samples still trigger the time-based eviction. Samples
        must arrive in time order.
        """
        if self._samples and sample.t < self._samples[-1].t:
            raise GazeStreamError(
                f"out-of-order sample at t={sample.t} after t={self._samples[-1].t}"
            )
        if sample.valid:
            self._samples.append(sample)
        cutoff = now - self.span
        while self._samples and self._samples[0].t < cutoff:
            self._samples.popleft()

    def clear(self) -> None:
        self._samples.clear()


def update_window(window: GazeWindow, sample: GazeSample, now: float) -> GazeWindow:
    window.update(sample, now)
    return window


def extract_features(window: GazeWindow, min_samples: int = 1) -> GazeFeatures:
    """Dispersion features of a window around its centroid.

    Distances strictly below the mean count toward near_count, which makes
    the degenerate all-equal case (every distance zero) report zero.
    """
    if len(window) < max(min_samples, 1):
        raise InsufficientDataError(
            f"window holds {len(window)} samples, need at least {max(min_samples, 1)}"
        )
    cx, cy = window.centroid
    dists = [math.hypot(s.x - cx, s.y - cy) for s in window.samples]
    mean_dist = sum(dists) / len(dists)
    return GazeFeatures(
        max_dist=max(dists),
        mean_dist=mean_dist,
        near_count=sum(1 for d in dists if d < mean_dist),
    )


def track_loss_elapsed(stream: Sequence[GazeSample], now: float) -> float:
    """Seconds since the newest valid sample; +inf if none was ever valid."""
    for sample in reversed(stream):
        if sample.valid:
            return now - sample.t
    return math.inf


def write_gaze_csv(path, samples: Iterable[GazeSample]) -> None:
    """Write a gaze recording as CSV with header t,x,y,valid."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "x", "y", "valid"])
        for s in samples:
            if s.valid:
                writer.writerow([repr(s.t), repr(s.x), repr(s.y), 1])
            else:
                writer.writerow([repr(s.t), "", "", 0])


def read_gaze_csv(path) -> list[GazeSample]:
    """Read a gaze recording, validating ordering and the header."""
    samples: list[GazeSample] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["t", "x", "y", "valid"]:
            raise GazeStreamError(f"{path}: expected header t,x,y,valid, got {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                t = float(row[0])
                valid = bool(int(row[3]))
                if valid:
                    sample = GazeSample(t, float(row[1]), float(row[2]), True)
                else:
                    sample = GazeSample.invalid(t)
            except (IndexError, ValueError) as exc:
                raise GazeStreamError(f"{path}:{lineno}: bad row {row!r}") from exc
            if samples and sample.t <= samples[-1].t:
                raise GazeStreamError(
                    f"{path}:{lineno}: timestamps must strictly increase"
                )
            samples.append(sample)
    return samples
