"""Confidence-modulated haptic virtual fixtures.

Two fixtures are computed around the gaze-resolved target: an attractive
guidance force derived from a Gaussian potential field blending the
joystick and target positions, and a forbidden-region safety boundary
shaped like a funnel (flat disc, cone wall, free space above a plane).
Both scale with the confidence in the operator's intent.

Field math runs in the normalized unit workspace; boundary geometry runs
in centimeters around the target point in the scene frame.
"""

from __future__ import annotations

import json
import math
import threading
import warnings
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

# Boundary parameter ranges (cm, cm, degrees) and the per-parameter
# maximum adjustment, one third of each range.
S_RANGE = (1.0, 7.0)
H_RANGE = (0.0, 15.0)
THETA_RANGE = (5.0, 85.0)

DEFAULT_SIGMA = 0.4
DEFAULT_ITHRESH = 0.60
DEFAULT_MAX_ADJUST = {"dS": -2.0, "dH": 5.0, "dTheta": 25.0}
DEFAULT_STIFFNESS = 5.0  # N/cm
DEFAULT_FORCE_SCALE = 3.0  # N at unit normalized force

# Named boundary presets: set -> (theta deg, H cm, S cm).
BOUNDARY_PRESETS: dict[int, tuple[float, float, float]] = {
    1: (30.0, 5.0, 3.0),
    2: (30.0, 5.0, 5.0),
    3: (30.0, 10.0, 3.0),
    4: (30.0, 10.0, 5.0),
    5: (60.0, 5.0, 3.0),
    6: (60.0, 5.0, 5.0),
    7: (60.0, 10.0, 3.0),
    8: (60.0, 10.0, 5.0),
}

# Default preset per task: the minimum-failure-rate sets.
TASK_BOUNDARY_SET = {"cutting": 2, "grasping": 5}


class DegenerateFieldError(ValueError):
    """All coordinate weights are zero: the field has no influence."""


class FixtureConfigError(ValueError):
    """Malformed fixture configuration document."""


@dataclass(frozen=True)
class FieldParams:
    """Gaussian potential field shape.

    sigma is the per-axis field width in normalized units. weights scales
    the field's influence per axis in [0, 1]. When sigma_is_inverse_cov
    is set, sigma is instead read as the diagonal entry of the inverse
    covariance (the alternate reading of the field definition).
    """

    sigma: tuple[float, float, float] = (DEFAULT_SIGMA,) * 3
    weights: tuple[float, float, float] = (1.0, 1.0, 1.0)
    sigma_is_inverse_cov: bool = False

    def __post_init__(self):
        if any(s <= 0.0 for s in self.sigma):
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if any(not 0.0 <= d <= 1.0 for d in self.weights):
            raise ValueError(f"weights must lie in [0, 1], got {self.weights}")

    def key(self) -> tuple:
        return (self.sigma, self.weights, self.sigma_is_inverse_cov)


@dataclass(frozen=True)
class AdjustmentPolicy:
    """Confidence threshold and the per-parameter maximum adjustments."""

    ithresh: float = DEFAULT_ITHRESH
    d_s: float = DEFAULT_MAX_ADJUST["dS"]
    d_h: float = DEFAULT_MAX_ADJUST["dH"]
    d_theta: float = DEFAULT_MAX_ADJUST["dTheta"]

    def __post_init__(self):
        if not 0.5 < self.ithresh < 1.0:
            raise ValueError(f"ithresh must lie in (0.5, 1), got {self.ithresh}")


@dataclass(frozen=True)
class GuidanceForce:
    """Normalized, dimensionless guidance force plus its device scale."""

    gf: np.ndarray
    scale: float = DEFAULT_FORCE_SCALE

    @property
    def magnitude(self) -> float:
        return float(np.linalg.norm(self.gf))

    def newtons(self) -> np.ndarray:
        return self.gf * self.scale


def potential_weight(p_j: np.ndarray, p_g: np.ndarray, fp: FieldParams) -> float:
    """Gaussian field weight in (0, 1]; 1 exactly at the target."""
    delta = np.asarray(p_j, dtype=float) - np.asarray(p_g, dtype=float)
    sigma = np.asarray(fp.sigma)
    if fp.sigma_is_inverse_cov:
        quad = float(np.sum(delta * delta * sigma * sigma))
    else:
        quad = float(np.sum((delta / sigma) ** 2))
    return math.exp(-0.5 * quad)


def combine(p_j: np.ndarray, p_g: np.ndarray, fp: FieldParams) -> np.ndarray:
    """Per-axis blend of joystick and target positions by field weight."""
    p_j = np.asarray(p_j, dtype=float)
    p_g = np.asarray(p_g, dtype=float)
    w = potential_weight(p_j, p_g, fp)
    d = np.asarray(fp.weights)
    return p_j * (1.0 - w * d) + p_g * (w * d)


_GF_MAX_CACHE: dict[tuple, float] = {}
_GF_MAX_LOCK = threading.Lock()


def _displacement(p_j: np.ndarray, p_g: np.ndarray, fp: FieldParams) -> float:
    return float(np.linalg.norm(combine(p_j, p_g, fp) - p_j))


def gf_max(fp: FieldParams) -> float:
    """Largest displacement the field can command anywhere in the unit
    workspace, with the target at the center.

    Found by a coarse grid search refined with a shrinking pattern
    search; results are cached per field shape.
    """
    if all(d == 0.0 for d in fp.weights):
        raise DegenerateFieldError("all coordinate weights are zero")
    key = fp.key()
    cached = _GF_MAX_CACHE.get(key)
    if cached is not None:
        return cached
    p_g = np.array([0.5, 0.5, 0.5])
    axes = np.linspace(0.0, 1.0, 21)
    grid = np.stack(np.meshgrid(axes, axes, axes, indexing="ij"), axis=-1).reshape(-1, 3)
    delta = grid - p_g
    sigma = np.asarray(fp.sigma)
    if fp.sigma_is_inverse_cov:
        quad = np.sum(delta * delta * sigma * sigma, axis=-1)
    else:
        quad = np.sum((delta / sigma) ** 2, axis=-1)
    disp = np.exp(-0.5 * quad) * np.linalg.norm(delta * np.asarray(fp.weights), axis=-1)
    best_i = int(np.argmax(disp))
    best_val = float(disp[best_i])
    best_p = grid[best_i].copy()
    step = 0.05
    while step > 1e-7:
        improved = True
        while improved:
            improved = False
            for axis in range(3):
                for sign in (1.0, -1.0):
                    p = best_p.copy()
                    p[axis] = min(1.0, max(0.0, p[axis] + sign * step))
                    val = _displacement(p, p_g, fp)
                    if val > best_val:
                        best_val, best_p = val, p
                        improved = True
        step *= 0.5
    with _GF_MAX_LOCK:
        _GF_MAX_CACHE[key] = best_val
    return best_val


def scaled_confidence(ci: float, policy: AdjustmentPolicy = AdjustmentPolicy()) -> float:
    """Re-center confidence at the threshold into [-1, 1].

    Zero at the threshold, 1 at full confidence, -1 at none; the two
    linear pieces meet at the threshold.
    """
    if not 0.0 <= ci <= 1.0:
        raise ValueError(f"ci must lie in [0, 1], got {ci}")
    if ci >= policy.ithresh:
        return (ci - policy.ithresh) / (1.0 - policy.ithresh)
    return (ci - policy.ithresh) / policy.ithresh


def guidance_force(
    p_j: np.ndarray,
    p_g: np.ndarray,
    fp: FieldParams,
    ci: float = 1.0,
    policy: AdjustmentPolicy = AdjustmentPolicy(),
    intent_scaled: bool = True,
    force_scale: float = DEFAULT_FORCE_SCALE,
) -> GuidanceForce:
    """Normalized guidance force pulling the joystick toward the target.

    The raw displacement (combined point minus joystick) is normalized by
    the field's peak displacement. With intent scaling the strength
    follows max(scaled confidence, 0): nothing below the threshold,
    linear up to full strength, never repulsive.
    """
    try:
        peak = gf_max(fp)
    except DegenerateFieldError:
        warnings.warn("guidance field has no influence; returning zero force")
        return GuidanceForce(np.zeros(3), force_scale)
    strength = max(scaled_confidence(ci, policy), 0.0) if intent_scaled else 1.0
    raw = (combine(p_j, p_g, fp) - np.asarray(p_j, dtype=float)) / peak
    norm = float(np.linalg.norm(raw))
    if norm > 1.0:
        raw = raw / norm
    return GuidanceForce(strength * raw, force_scale)


@dataclass(frozen=True)
class BoundaryParams:
    """Funnel-shaped forbidden-region boundary around a target point.

    s_cm is the flat-bottom radius, h_cm the cone height limit, theta_deg
    the cone angle from the bottom plane. center is the target in scene
    meters and axis the unit approach direction; travel is free above the
    plane at h_cm and restricted to the funnel below it.
    """

    s_cm: float
    h_cm: float
    theta_deg: float
    center: tuple[float, float, float] = (0.0, 0.0, 0.0)
    axis: tuple[float, float, float] = (0.0, 0.0, 1.0)

    def __post_init__(self):
        n = math.sqrt(sum(a * a for a in self.axis))
        if abs(n - 1.0) > 1e-6:
            raise ValueError(f"axis must be unit length, norm {n}")

    def clamped(self) -> "BoundaryParams":
        return replace(
            self,
            s_cm=min(max(self.s_cm, S_RANGE[0]), S_RANGE[1]),
            h_cm=min(max(self.h_cm, H_RANGE[0]), H_RANGE[1]),
            theta_deg=min(max(self.theta_deg, THETA_RANGE[0]), THETA_RANGE[1]),
        )

    def in_ranges(self) -> bool:
        return (
            S_RANGE[0] <= self.s_cm <= S_RANGE[1]
            and H_RANGE[0] <= self.h_cm <= H_RANGE[1]
            and THETA_RANGE[0] <= self.theta_deg <= THETA_RANGE[1]
        )


def boundary_preset(set_id: int, center=(0.0, 0.0, 0.0), axis=(0.0, 0.0, 1.0)) -> BoundaryParams:
    if set_id not in BOUNDARY_PRESETS:
        raise FixtureConfigError(f"boundary set must be 1..8, got {set_id}")
    theta, h, s = BOUNDARY_PRESETS[set_id]
    return BoundaryParams(s_cm=s, h_cm=h, theta_deg=theta, center=tuple(center), axis=tuple(axis))


def adjust_boundary(
    base: BoundaryParams,
    sci: float,
    policy: AdjustmentPolicy = AdjustmentPolicy(),
) -> BoundaryParams:
    """Tighten or open the boundary by the scaled confidence.

    Positive sci shrinks the bottom radius and raises the plane and cone
    angle; negative sci opens everything up. Results are clamped to the
    legal parameter ranges.
    """
    return replace(
        base,
        s_cm=base.s_cm + sci * policy.d_s,
        h_cm=base.h_cm + sci * policy.d_h,
        theta_deg=base.theta_deg + sci * policy.d_theta,
    ).clamped()


def _local_cylindrical(b: BoundaryParams, p: np.ndarray) -> tuple[float, float, np.ndarray]:
    """Height (cm) along the axis, radius (cm), and the radial unit vector."""
    axis = np.asarray(b.axis, dtype=float)
    offset = (np.asarray(p, dtype=float) - np.asarray(b.center)) * 100.0
    h = float(offset @ axis)
    radial = offset - h * axis
    r = float(np.linalg.norm(radial))
    r_hat = radial / r if r > 1e-12 else np.zeros(3)
    return h, r, r_hat


def _allowed_radius(b: BoundaryParams, h: float) -> float:
    return b.s_cm + h / math.tan(math.radians(b.theta_deg))


def boundary_allows(b: BoundaryParams, p: np.ndarray) -> bool:
    """Whether a scene point is reachable under the boundary.

    Free above the plane at h_cm; inside the funnel (radius grows from
    s_cm at the cone angle) between the bottom plane and the cone height;
    nothing below the bottom plane.
    """
    h, r, _ = _local_cylindrical(b, p)
    if h >= b.h_cm:
        return True
    if h < 0.0:
        return False
    return r <= _allowed_radius(b, h)


def _project_funnel_2d(b: BoundaryParams, r: float, h: float) -> tuple[float, float]:
    """Nearest point of the funnel solid in the (radius, height) plane.

    The solid's cross-section is the convex quad (0,0)-(S,0)-(rim,H)-(0,H)
    with rim = S + H/tan(theta)."""
    rim = _allowed_radius(b, b.h_cm)
    verts = [(0.0, 0.0), (b.s_cm, 0.0), (rim, b.h_cm), (0.0, b.h_cm)]
    if 0.0 <= h <= b.h_cm and r <= _allowed_radius(b, h):
        return r, h
    best = None
    best_d2 = math.inf
    for (ax, ay), (bx, by) in zip(verts, verts[1:] + verts[:1]):
        ex, ey = bx - ax, by - ay
        denom = ex * ex + ey * ey
        t = 0.0 if denom == 0.0 else max(0.0, min(1.0, ((r - ax) * ex + (h - ay) * ey) / denom))
        qx, qy = ax + t * ex, ay + t * ey
        d2 = (r - qx) ** 2 + (h - qy) ** 2
        if d2 < best_d2:
            best_d2, best = d2, (qx, qy)
    return best


def constrain(
    b: BoundaryParams,
    commanded: np.ndarray,
    stiffness: float = DEFAULT_STIFFNESS,
) -> tuple[np.ndarray, np.ndarray]:
    """Clamp a commanded point into the allowed region.

    Allowed points pass through with zero force. Disallowed points are
    projected to the nearest point of the allowed region (the funnel
    solid or the free half-space above the plane, whichever is closer)
    and a spring restoring force of stiffness newtons per centimeter of
    violation points back along the correction.
    """
    commanded = np.asarray(commanded, dtype=float)
    if boundary_allows(b, commanded):
        return commanded, np.zeros(3)
    axis = np.asarray(b.axis, dtype=float)
    h, r, r_hat = _local_cylindrical(b, commanded)

    fr, fh = _project_funnel_2d(b, r, h)
    d2_funnel = (r - fr) ** 2 + (h - fh) ** 2
    d2_plane = (b.h_cm - h) ** 2  # straight lift onto the free half-space
    if d2_plane < d2_funnel:
        pr, ph = r, b.h_cm
    else:
        pr, ph = fr, fh
    # re-clamp with the exact membership arithmetic so the result is
    # always allowed despite floating-point dust
    ph = max(ph, 0.0)
    if ph < b.h_cm:
        pr = min(pr, _allowed_radius(b, ph))
    local = pr * r_hat + ph * axis
    clamped = np.asarray(b.center) + local / 100.0
    # the centimeter/meter round trip can still land an ulp outside; nudge
    # inward (up and toward the axis) until membership holds
    eps = 1e-14
    while not boundary_allows(b, clamped) and eps < 1e-6:
        local = pr * (1.0 - eps) * r_hat + (ph + eps * max(1.0, ph)) * axis
        clamped = np.asarray(b.center) + local / 100.0
        eps *= 10.0
    restoring = stiffness * (clamped - commanded) * 100.0
    return clamped, restoring


@dataclass(frozen=True)
class FixtureState:
    """Per-tick fixture outputs: the active field, guidance force, and
    the boundary after confidence adjustment."""

    field_params: FieldParams
    gf: np.ndarray
    boundary: Optional[BoundaryParams]
    ci: float
    sci: float


def compute_fixtures(
    p_j: Optional[np.ndarray],
    p_g: Optional[np.ndarray],
    target_scene,
    assist_kind: str,
    intent_adjusted: bool,
    ci: float,
    config: "FixtureConfig",
) -> FixtureState:
    """Evaluate the active fixture for one tick.

    p_j and p_g are normalized workspace positions; target_scene anchors
    the boundary in the scene frame. With no resolved target neither
    fixture engages.
    """
    policy = config.policy
    sci = scaled_confidence(ci, policy)
    gf = np.zeros(3)
    boundary: Optional[BoundaryParams] = None
    if target_scene is not None and p_g is not None and p_j is not None:
        if assist_kind == "guidance_force":
            gf = guidance_force(
                p_j,
                p_g,
                config.field_params,
                ci=ci,
                policy=policy,
                intent_scaled=intent_adjusted,
                force_scale=config.force_scale,
            ).gf
        elif assist_kind == "safety_boundary":
            base = config.base_boundary(center=tuple(target_scene), axis=(0.0, 0.0, 1.0))
            boundary = adjust_boundary(base, sci, policy) if intent_adjusted else base.clamped()
    return FixtureState(config.field_params, gf, boundary, ci, sci)


@dataclass(frozen=True)
class FixtureConfig:
    """Everything the fixture layer needs, loadable from JSON."""

    field_params: FieldParams = field(default_factory=FieldParams)
    boundary_set: int = TASK_BOUNDARY_SET["grasping"]
    boundary_override: Optional[tuple[float, float, float]] = None  # (S, H, theta)
    policy: AdjustmentPolicy = field(default_factory=AdjustmentPolicy)
    stiffness: float = DEFAULT_STIFFNESS
    force_scale: float = DEFAULT_FORCE_SCALE

    def base_boundary(self, center=(0.0, 0.0, 0.0), axis=(0.0, 0.0, 1.0)) -> BoundaryParams:
        if self.boundary_override is not None:
            s, h, theta = self.boundary_override
            return BoundaryParams(s, h, theta, tuple(center), tuple(axis))
        return boundary_preset(self.boundary_set, center, axis)

    def to_dict(self) -> dict:
        doc = {
            "sigma": list(self.field_params.sigma),
            "d": list(self.field_params.weights),
            "sigma_is_inverse_cov": self.field_params.sigma_is_inverse_cov,
            "ithresh": self.policy.ithresh,
            "max_adjust": {"dS": self.policy.d_s, "dH": self.policy.d_h, "dTheta": self.policy.d_theta},
            "stiffness": self.stiffness,
            "force_scale": self.force_scale,
        }
        if self.boundary_override is not None:
            doc["boundary"] = {
                "S": self.boundary_override[0],
                "H": self.boundary_override[1],
                "theta": self.boundary_override[2],
            }
        else:
            doc["boundary_set"] = self.boundary_set
        return doc


_FIXTURE_FIELDS = {
    "sigma", "d", "sigma_is_inverse_cov", "boundary_set", "boundary",
    "ithresh", "max_adjust", "stiffness", "force_scale",
}


def fixture_config_from_dict(doc: dict, task: str = "grasping") -> FixtureConfig:
    """Parse and validate a fixture configuration document.

    Unknown fields are rejected so typos fail loudly. A boundary may be
    given as a preset id or explicit {S, H, theta}; absent both, the
    task's default preset applies.
    """
    unknown = set(doc) - _FIXTURE_FIELDS
    if unknown:
        raise FixtureConfigError(f"unknown fixture config fields: {sorted(unknown)}")
    if "boundary_set" in doc and "boundary" in doc:
        raise FixtureConfigError("give either boundary_set or boundary, not both")
    try:
        fp = FieldParams(
            sigma=tuple(doc.get("sigma", (DEFAULT_SIGMA,) * 3)),
            weights=tuple(doc.get("d", (1.0, 1.0, 1.0))),
            sigma_is_inverse_cov=bool(doc.get("sigma_is_inverse_cov", False)),
        )
        adj = doc.get("max_adjust", DEFAULT_MAX_ADJUST)
        policy = AdjustmentPolicy(
            ithresh=float(doc.get("ithresh", DEFAULT_ITHRESH)),
            d_s=float(adj["dS"]),
            d_h=float(adj["dH"]),
            d_theta=float(adj["dTheta"]),
        )
    except (ValueError, KeyError, TypeError) as exc:
        raise FixtureConfigError(str(exc)) from exc
    override = None
    boundary_set = TASK_BOUNDARY_SET.get(task, 5)
    if "boundary" in doc:
        bdoc = doc["boundary"]
        try:
            override = (float(bdoc["S"]), float(bdoc["H"]), float(bdoc["theta"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise FixtureConfigError(f"boundary: need S, H, theta ({exc})") from exc
    elif "boundary_set" in doc:
        boundary_set = int(doc["boundary_set"])
        if boundary_set not in BOUNDARY_PRESETS:
            raise FixtureConfigError(f"boundary_set: must be 1..8, got {boundary_set}")
    return FixtureConfig(
        field_params=fp,
        boundary_set=boundary_set,
        boundary_override=override,
        policy=policy,
        stiffness=float(doc.get("stiffness", DEFAULT_STIFFNESS)),
        force_scale=float(doc.get("force_scale", DEFAULT_FORCE_SCALE)),
    )


def load_fixture_config(path, task: str = "grasping") -> FixtureConfig:
    with open(path) as fh:
        return fixture_config_from_dict(json.load(fh), task)
