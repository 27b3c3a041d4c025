"""Potential field, guidance force, and safety boundary geometry."""

import math

import numpy as np
import pytest

from gazeassist import fixtures as fx
from gazeassist.fixtures import (
    AdjustmentPolicy,
    BoundaryParams,
    DegenerateFieldError,
    FieldParams,
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

CENTER = np.array([0.5, 0.5, 0.5])


class TestPotentialWeight:
    def test_peak_at_target(self):
        assert potential_weight(CENTER, CENTER, FieldParams()) == 1.0

    def test_one_sigma_offset(self):
        fp = FieldParams()
        p = CENTER + np.array([fp.sigma[0], 0, 0])
        assert potential_weight(p, CENTER, fp) == pytest.approx(math.exp(-0.5), abs=1e-12)

    def test_far_tail_vanishes(self):
        fp = FieldParams()
        p = CENTER + np.array([10 * fp.sigma[0], 0, 0])
        assert potential_weight(p, CENTER, fp) < 1e-21

    def test_inverse_covariance_reading(self):
        # alternate reading: sigma enters as the inverse-covariance entry
        fp = FieldParams(sigma=(0.4, 0.4, 0.4), sigma_is_inverse_cov=True)
        p = CENTER + np.array([1.0, 0, 0])
        assert potential_weight(p, CENTER, fp) == pytest.approx(math.exp(-0.5 * 0.16), abs=1e-12)


class TestCombine:
    def test_zero_weights_leave_manual_control(self):
        fp = FieldParams(weights=(0.0, 0.0, 0.0))
        p_j = np.array([0.9, 0.1, 0.3])
        assert np.array_equal(combine(p_j, CENTER, fp), p_j)

    def test_at_target_stays_at_target(self):
        fp = FieldParams()
        assert np.allclose(combine(CENTER, CENTER, fp), CENTER)

    def test_one_dimensional_blend(self):
        # W = exp(-1/2); c = 0.9 * (1 - W) + 0.5 * W = 0.657388
        fp = FieldParams(weights=(1.0, 0.0, 0.0))
        p_j = np.array([0.9, 0.5, 0.5])
        c = combine(p_j, CENTER, fp)
        w = math.exp(-0.5)
        assert c[0] == pytest.approx(0.9 * (1 - w) + 0.5 * w, abs=1e-12)
        assert c[1] == 0.5 and c[2] == 0.5

    def test_convex_per_axis(self):
        rng = np.random.default_rng(4)
        fp = FieldParams(weights=(1.0, 0.7, 0.2))
        for _ in range(200):
            p_j = rng.uniform(0, 1, 3)
            p_g = rng.uniform(0, 1, 3)
            c = combine(p_j, p_g, fp)
            assert np.all(c >= np.minimum(p_j, p_g) - 1e-12)
            assert np.all(c <= np.maximum(p_j, p_g) + 1e-12)


class TestGfMax:
    def test_matches_calculus_optimum_1d(self):
        # displacement u * exp(-u^2 / 2 sigma^2) peaks at u = sigma
        fp = FieldParams(weights=(1.0, 0.0, 0.0))
        expected = 0.4 * math.exp(-0.5)
        assert gf_max(fp) == pytest.approx(expected, rel=1e-4)

    def test_degenerate_weights_rejected(self):
        with pytest.raises(DegenerateFieldError):
            gf_max(FieldParams(weights=(0.0, 0.0, 0.0)))

    def test_doubling_sigma_doubles_peak(self):
        # both optima stay reachable inside the unit workspace
        lo = gf_max(FieldParams(sigma=(0.2, 0.2, 0.2), weights=(1.0, 0.0, 0.0)))
        hi = gf_max(FieldParams(sigma=(0.4, 0.4, 0.4), weights=(1.0, 0.0, 0.0)))
        assert hi == pytest.approx(2 * lo, rel=1e-4)

    def test_cache_returns_same_value(self):
        fp = FieldParams(weights=(1.0, 1.0, 0.0))
        assert gf_max(fp) == gf_max(fp)


class TestGuidanceForce:
    def test_zero_at_target(self):
        gf = guidance_force(CENTER, CENTER, FieldParams(), ci=1.0)
        assert gf.magnitude == 0.0

    def test_unit_peak_at_sigma_offset(self):
        fp = FieldParams(weights=(1.0, 0.0, 0.0))
        p_j = CENTER + np.array([fp.sigma[0], 0, 0])
        gf = guidance_force(p_j, CENTER, fp, ci=1.0)
        assert gf.magnitude == pytest.approx(1.0, rel=1e-4)

    def test_points_toward_target(self):
        fp = FieldParams(weights=(1.0, 0.0, 0.0))
        p_j = CENTER + np.array([0.3, 0, 0])
        gf = guidance_force(p_j, CENTER, fp, ci=1.0)
        assert gf.gf[0] < 0.0

    def test_zero_at_confidence_threshold(self):
        fp = FieldParams()
        p_j = CENTER + np.array([0.2, 0.1, 0])
        gf = guidance_force(p_j, CENTER, fp, ci=0.6)
        assert gf.magnitude == 0.0

    def test_never_repulsive_below_threshold(self):
        fp = FieldParams()
        p_j = CENTER + np.array([0.2, 0.1, 0])
        gf = guidance_force(p_j, CENTER, fp, ci=0.1)
        assert gf.magnitude == 0.0

    def test_depth_only_weighting_zero_on_reached_plane(self):
        fp = FieldParams(weights=(0.0, 1.0, 0.0))
        for x in np.linspace(0, 1, 7):
            for z in np.linspace(0, 1, 7):
                p_j = np.array([x, 0.5, z])  # depth already matches
                gf = guidance_force(p_j, CENTER, fp, ci=1.0)
                assert gf.magnitude == 0.0

    def test_rotational_symmetry_equal_weights(self):
        fp = FieldParams(weights=(1.0, 1.0, 0.0))
        radius = 0.23
        mags = []
        for ang in np.linspace(0, 2 * math.pi, 360, endpoint=False):
            p_j = CENTER + radius * np.array([math.cos(ang), math.sin(ang), 0.0])
            mags.append(guidance_force(p_j, CENTER, fp, ci=1.0).magnitude)
        assert max(mags) - min(mags) < 1e-9

    def test_bounded_by_one_at_full_confidence(self):
        rng = np.random.default_rng(11)
        fp = FieldParams()
        for _ in range(500):
            p_j = rng.uniform(0, 1, 3)
            gf = guidance_force(p_j, CENTER, fp, ci=1.0)
            assert gf.magnitude <= 1.0 + 1e-9

    def test_degenerate_field_warns_and_zeroes(self):
        fp = FieldParams(weights=(0.0, 0.0, 0.0))
        with pytest.warns(UserWarning):
            gf = guidance_force(np.array([0.2, 0.2, 0.2]), CENTER, fp, ci=1.0)
        assert gf.magnitude == 0.0

    def test_newton_scaling(self):
        fp = FieldParams(weights=(1.0, 0.0, 0.0))
        p_j = CENTER + np.array([fp.sigma[0], 0, 0])
        gf = guidance_force(p_j, CENTER, fp, ci=1.0, force_scale=3.0)
        assert np.linalg.norm(gf.newtons()) == pytest.approx(3.0, rel=1e-4)


class TestScaledConfidence:
    def test_threshold_is_zero(self):
        assert scaled_confidence(0.6) == 0.0

    def test_endpoints(self):
        assert scaled_confidence(1.0) == 1.0
        assert scaled_confidence(0.0) == -1.0

    def test_arithmetic_above_threshold(self):
        assert scaled_confidence(0.8) == pytest.approx(0.5)

    def test_monotone(self):
        vals = [scaled_confidence(c) for c in np.linspace(0, 1, 101)]
        assert all(b >= a for a, b in zip(vals, vals[1:]))


class TestAdjustBoundary:
    def test_full_confidence_tightens_set2(self):
        adjusted = adjust_boundary(boundary_preset(2), sci=1.0)
        assert adjusted.s_cm == pytest.approx(3.0, abs=1e-9)
        assert adjusted.h_cm == pytest.approx(10.0, abs=1e-9)
        assert adjusted.theta_deg == pytest.approx(55.0, abs=1e-9)

    def test_zero_sci_is_identity(self):
        base = boundary_preset(2)
        assert adjust_boundary(base, 0.0) == base

    def test_no_confidence_fully_opens_set2(self):
        adjusted = adjust_boundary(boundary_preset(2), sci=-1.0)
        assert adjusted.s_cm == pytest.approx(7.0, abs=1e-9)
        assert adjusted.h_cm == pytest.approx(0.0, abs=1e-9)
        assert adjusted.theta_deg == pytest.approx(5.0, abs=1e-9)

    def test_clamped_to_ranges(self):
        base = BoundaryParams(s_cm=1.5, h_cm=14.0, theta_deg=80.0)
        adjusted = adjust_boundary(base, sci=1.0)
        assert adjusted.s_cm == 1.0
        assert adjusted.h_cm == 15.0
        assert adjusted.theta_deg == 85.0
        assert adjusted.in_ranges()


def allows_oracle(b: BoundaryParams, p) -> bool:
    """Independent membership formulation via the cone wall line.

    The wall passes through (radius S, height 0) climbing at tan(theta);
    below the plane the point must sit on or above that line.
    """
    axis = np.asarray(b.axis)
    offset = (np.asarray(p) - np.asarray(b.center)) * 100.0
    h = float(offset @ axis)
    r = float(np.linalg.norm(offset - h * axis))
    if h >= b.h_cm:
        return True
    if h < 0:
        return False
    if r <= b.s_cm:
        return True
    return h >= (r - b.s_cm) * math.tan(math.radians(b.theta_deg))


class TestBoundaryAllows:
    def test_on_axis_bottom(self):
        b = boundary_preset(2)
        assert boundary_allows(b, np.zeros(3))

    def test_vertical_wall_blocks_everything(self):
        # theta at 90 degrees with no bottom radius leaves no room at all
        b = BoundaryParams(s_cm=0.0, h_cm=10.0, theta_deg=90.0)
        rng = np.random.default_rng(0)
        for _ in range(2000):
            h = rng.uniform(1e-4, 0.0999)
            r = rng.uniform(1e-6, 0.2)
            ang = rng.uniform(0, 2 * math.pi)
            p = np.array([r * math.cos(ang), r * math.sin(ang), h])
            assert not boundary_allows(b, p)

    def test_set2_hand_trigonometry(self):
        # at 2.5 cm height the wall sits at 5 + 2.5/tan(30) = 9.33 cm
        b = boundary_preset(2)
        h = 0.025
        assert not boundary_allows(b, np.array([0.094, 0.0, h]))
        assert boundary_allows(b, np.array([0.092, 0.0, h]))

    def test_free_above_plane(self):
        b = boundary_preset(2)
        assert boundary_allows(b, np.array([5.0, 5.0, b.h_cm / 100.0]))

    def test_below_bottom_plane_blocked(self):
        b = boundary_preset(2)
        assert not boundary_allows(b, np.array([0.0, 0.0, -1e-6]))

    def test_against_independent_oracle(self):
        rng = np.random.default_rng(42)
        for set_id in (1, 2, 5, 8):
            b = boundary_preset(set_id)
            for _ in range(5000):
                p = rng.uniform(-0.2, 0.2, 3)
                assert boundary_allows(b, p) == allows_oracle(b, p)

    def test_tilted_axis(self):
        axis = np.array([0.0, 1.0, 1.0]) / math.sqrt(2)
        b = BoundaryParams(s_cm=3.0, h_cm=5.0, theta_deg=60.0, axis=tuple(axis))
        assert boundary_allows(b, 0.02 * axis)
        assert not boundary_allows(b, -0.001 * axis)


def surface_cloud(b: BoundaryParams, n_h=220, n_ang=180):
    """Dense sampling of the allowed-region surface for projection oracles:
    bottom disc, cone wall, and the outer plane at the cone height."""
    pts = []
    axis = np.asarray(b.axis)
    # orthonormal radial frame
    e1 = np.array([1.0, 0.0, 0.0])
    if abs(e1 @ axis) > 0.9:
        e1 = np.array([0.0, 1.0, 0.0])
    e1 = e1 - (e1 @ axis) * axis
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(axis, e1)
    rim = b.s_cm + b.h_cm / math.tan(math.radians(b.theta_deg))
    for ang in np.linspace(0, 2 * math.pi, n_ang, endpoint=False):
        radial = math.cos(ang) * e1 + math.sin(ang) * e2
        for r in np.linspace(0, b.s_cm, n_h // 2):
            pts.append(r * radial)  # bottom disc
        for h in np.linspace(0, b.h_cm, n_h):
            r = b.s_cm + h / math.tan(math.radians(b.theta_deg))
            pts.append(r * radial + h * axis)  # cone wall
        for r in np.linspace(rim, rim + 30.0, n_h // 2):
            pts.append(r * radial + b.h_cm * axis)  # plane lip outward
    return np.asarray(b.center) + np.array(pts) / 100.0


class TestConstrain:
    def test_allowed_point_identity(self):
        b = boundary_preset(2)
        p = np.array([0.01, 0.0, 0.02])
        clamped, force = constrain(b, p)
        assert np.array_equal(clamped, p)
        assert np.all(force == 0.0)

    def test_below_plane_on_axis(self):
        b = boundary_preset(2)
        p = np.array([0.0, 0.0, -0.01])
        clamped, force = constrain(b, p, stiffness=5.0)
        assert np.allclose(clamped, [0.0, 0.0, 0.0], atol=1e-12)
        # purely axial spring: 5 N/cm over 1 cm
        assert force[0] == 0.0 and force[1] == 0.0
        assert force[2] == pytest.approx(5.0, rel=1e-9)

    def test_wall_restoring_force_is_normal(self):
        b = boundary_preset(2)
        # just outside the cone wall midway up
        h = 0.025
        r_wall = (b.s_cm + 2.5 / math.tan(math.radians(30.0))) / 100.0
        p = np.array([r_wall + 0.004, 0.0, h])
        clamped, force = constrain(b, p)
        # wall direction in the (x, z) plane climbs at tan(theta)
        wall_dir = np.array([1.0, 0.0, math.tan(math.radians(30.0))])
        wall_dir /= np.linalg.norm(wall_dir)
        tangential = abs(force @ wall_dir)
        assert tangential <= 1e-6 * np.linalg.norm(force)

    def test_matches_dense_surface_projection(self):
        rng = np.random.default_rng(3)
        for set_id in (2, 5):
            b = boundary_preset(set_id)
            cloud = surface_cloud(b)
            for _ in range(60):
                p = rng.uniform(-0.15, 0.15, 3)
                if boundary_allows(b, p):
                    continue
                clamped, _ = constrain(b, p)
                dists = np.linalg.norm(cloud - p, axis=1)
                best = dists.min()
                got = np.linalg.norm(clamped - p)
                # projection can only beat the discrete cloud by a hair
                assert got <= best + 1e-4
                assert got >= best - 2e-3

    def test_idempotent(self):
        rng = np.random.default_rng(9)
        b = boundary_preset(5)
        for _ in range(500):
            p = rng.uniform(-0.2, 0.2, 3)
            once, _ = constrain(b, p)
            twice, _ = constrain(b, once)
            assert np.linalg.norm(twice - once) < 1e-9

    def test_clamped_point_always_allowed(self):
        rng = np.random.default_rng(10)
        for set_id in range(1, 9):
            b = boundary_preset(set_id)
            for _ in range(400):
                p = rng.uniform(-0.25, 0.25, 3)
                clamped, _ = constrain(b, p)
                assert boundary_allows(b, clamped)


class TestMonotoneTightening:
    def test_allowed_region_shrinks_with_confidence(self):
        rng = np.random.default_rng(21)
        base = boundary_preset(5)
        points = rng.uniform(-0.15, 0.15, (10_000, 3))
        scis = [-1.0, -0.5, 0.0, 0.5, 1.0]
        allowed = []
        for sci in scis:
            b = adjust_boundary(base, sci)
            allowed.append(np.array([boundary_allows(b, p) for p in points]))
        for tighter, looser in zip(allowed[1:], allowed[:-1]):
            assert not np.any(tighter & ~looser)


class TestComputeFixtures:
    def test_no_target_disengages_both(self):
        state = fx.compute_fixtures(None, None, None, "guidance_force", True, 0.9, fx.FixtureConfig())
        assert np.all(state.gf == 0.0) and state.boundary is None
        assert state.sci == pytest.approx(0.75)

    def test_guidance_kind_produces_force(self):
        p_j = CENTER + np.array([0.2, 0.0, 0.0])
        state = fx.compute_fixtures(p_j, CENTER, np.array([0.25, 0.3, 0.1]),
                                    "guidance_force", True, 1.0, fx.FixtureConfig())
        assert np.linalg.norm(state.gf) > 0.0
        assert state.boundary is None

    def test_boundary_kind_adjusts_with_confidence(self):
        target = np.array([0.25, 0.3, 0.1])
        cfg = fx.FixtureConfig(boundary_set=2)
        adjusted = fx.compute_fixtures(CENTER, CENTER, target, "safety_boundary", True, 1.0, cfg)
        raw = fx.compute_fixtures(CENTER, CENTER, target, "safety_boundary", False, 1.0, cfg)
        assert adjusted.boundary.s_cm == pytest.approx(3.0)
        assert raw.boundary.s_cm == pytest.approx(5.0)
        assert adjusted.boundary.center == tuple(target)

    def test_none_kind_is_passive(self):
        state = fx.compute_fixtures(CENTER, CENTER, np.array([0.25, 0.3, 0.1]),
                                    "none", False, 1.0, fx.FixtureConfig())
        assert np.all(state.gf == 0.0) and state.boundary is None


class TestFixtureConfig:
    def test_defaults_by_task(self):
        cfg = fx.fixture_config_from_dict({}, task="cutting")
        assert cfg.boundary_set == 2
        cfg = fx.fixture_config_from_dict({}, task="grasping")
        assert cfg.boundary_set == 5

    def test_unknown_field_rejected(self):
        with pytest.raises(fx.FixtureConfigError, match="sigmaa"):
            fx.fixture_config_from_dict({"sigmaa": [1, 1, 1]})

    def test_explicit_boundary(self):
        cfg = fx.fixture_config_from_dict({"boundary": {"S": 4, "H": 6, "theta": 45}})
        b = cfg.base_boundary()
        assert (b.s_cm, b.h_cm, b.theta_deg) == (4.0, 6.0, 45.0)

    def test_both_boundary_forms_rejected(self):
        with pytest.raises(fx.FixtureConfigError):
            fx.fixture_config_from_dict({"boundary_set": 2, "boundary": {"S": 4, "H": 6, "theta": 45}})

    def test_round_trip(self):
        cfg = fx.fixture_config_from_dict(
            {"sigma": [0.3, 0.4, 0.5], "d": [0, 1, 0], "boundary_set": 7, "ithresh": 0.7}
        )
        again = fx.fixture_config_from_dict(cfg.to_dict())
        assert again == cfg
