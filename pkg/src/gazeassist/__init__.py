"""Gaze-driven intent inference with confidence-scaled virtual fixtures.

The package turns a gaze stream into an intent confidence level, derives
two haptic assists from it (a guidance force and a forbidden-region
safety boundary), and validates the whole loop with a deterministic
teleoperation simulator plus a small-sample statistics suite.
"""

from .fixtures import (
    AdjustmentPolicy,
    BoundaryParams,
    FieldParams,
    FixtureConfig,
    GuidanceForce,
    adjust_boundary,
    boundary_allows,
    boundary_preset,
    combine,
    constrain,
    gf_max,
    guidance_force,
    potential_weight,
    scaled_confidence,
)
from .gaze import (
    GazeFeatures,
    GazeSample,
    GazeWindow,
    extract_features,
    smooth,
    track_loss_elapsed,
)
from .intent import (
    IntentEstimate,
    IntentModel,
    LabeledWindow,
    confidence,
    fit,
    posterior,
)
from .scene import Camera, Scene, SceneObject, resolve_target
from .stats import (
    adjusted_wald,
    geo_mean_ci,
    laplace,
    mean_ci,
    n1_chisq,
    two_sample_t,
)

__version__ = "0.1.0"
