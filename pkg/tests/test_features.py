import math

import numpy as np
import pytest

from hrcausal.errors import InsufficientDataError
from hrcausal.features import (
    FEATURE_VARIABLES,
    compute_dg,
    compute_risk,
    compute_speed,
    trace_to_features,
)
from hrcausal.hrsim import SimTrace, WorldConfig, run


def make_trace(h_pos, r_pos, goal, rate=10.0):
    h = np.asarray(h_pos, dtype=float)
    r = np.asarray(r_pos, dtype=float)
    n = h.shape[0]
    g = np.tile(np.asarray(goal, dtype=float), (n, 1))
    zeros = np.zeros(n)
    return SimTrace(
        t=np.arange(n) / rate,
        human_pos=h,
        human_heading=zeros,
        human_speed=zeros,
        robot_pos=r,
        robot_heading=zeros,
        robot_speed=zeros,
        goal_index=np.zeros(n, dtype=int),
        goal_pos=g,
        rate_hz=rate,
    )


# -- speed ---------------------------------------------------------------------


def test_speed_stationary():
    assert compute_speed((1.0, 2.0), (1.0, 2.0), 0.1) == 0.0


def test_speed_axis_aligned():
    assert compute_speed((0.0, 0.0), (0.12, 0.0), 0.1) == pytest.approx(1.2)


def test_speed_345_triangle():
    assert compute_speed((1.0, 1.0), (1.03, 1.04), 0.1) == pytest.approx(0.5)


def test_speed_rejects_bad_dt():
    with pytest.raises(ValueError):
        compute_speed((0, 0), (1, 1), 0.0)


# -- goal distance -----------------------------------------------------------------


def test_dg_345():
    assert compute_dg((0.0, 0.0), (3.0, 4.0)) == pytest.approx(5.0)


def test_dg_coincident():
    assert compute_dg((2.0, 2.0), (2.0, 2.0)) == 0.0


def test_dg_axis_aligned():
    assert compute_dg((1.0, 1.0), (1.0, 7.2)) == pytest.approx(6.2)


def test_dg_triangle_inequality():
    rng = np.random.default_rng(0)
    for _ in range(200):
        a, b, c = rng.uniform(-5, 5, (3, 2))
        assert compute_dg(a, c) <= compute_dg(a, b) + compute_dg(b, c) + 1e-12


# -- collision risk ------------------------------------------------------------------


def test_risk_head_on():
    r = compute_risk((0, 0), (1.0, 0.0), (2.0, 0.0), (0.0, 0.0), 0.6)
    assert r == pytest.approx(1.0)


def test_risk_receding():
    r = compute_risk((0, 0), (-1.0, 0.0), (2.0, 0.0), (0.0, 0.0), 0.6)
    assert r == 0.0


def test_risk_overlap_branch():
    r = compute_risk((0, 0), (0.7, 0.0), (0.5, 0.0), (0.0, 0.0), 0.6)
    assert r == pytest.approx(0.7)


def test_risk_zero_relative_velocity():
    r = compute_risk((0, 0), (0.5, 0.5), (2.0, 0.0), (0.5, 0.5), 0.6)
    assert r == 0.0


def test_risk_zero_when_moving_away_from_stationary_robot():
    rng = np.random.default_rng(1)
    for _ in range(100):
        p_h = rng.uniform(-3, 3, 2)
        direction = rng.uniform(-np.pi, np.pi)
        d = rng.uniform(0.7, 5.0)
        p_r = p_h + d * np.array([np.cos(direction), np.sin(direction)])
        v_h = -rng.uniform(0.1, 2.0) * np.array([np.cos(direction), np.sin(direction)])
        assert compute_risk(p_h, v_h, p_r, (0.0, 0.0), 0.6) == 0.0


def test_risk_continuous_at_cone_boundary():
    # relative velocity rotated to the cone edge: risk tends to 0
    d = 2.0
    phi = math.asin(0.6 / d)
    for eps in (1e-3, 1e-5):
        angle = phi - eps
        v_h = (math.cos(angle), math.sin(angle))
        r = compute_risk((0, 0), v_h, (d, 0.0), (0.0, 0.0), 0.6)
        assert 0.0 <= r < 2 * eps / phi + 1e-9


def test_risk_scales_linearly_with_velocity():
    rng = np.random.default_rng(2)
    for _ in range(100):
        p_h = rng.uniform(-2, 2, 2)
        p_r = p_h + rng.uniform(0.8, 4.0) * _unit(rng)
        v_h = rng.uniform(-1.5, 1.5, 2)
        v_r = rng.uniform(-0.5, 0.5, 2)
        c = rng.uniform(0.1, 4.0)
        base = compute_risk(p_h, v_h, p_r, v_r, 0.6)
        scaled = compute_risk(p_h, c * v_h, p_r, c * v_r, 0.6)
        assert scaled == pytest.approx(c * base, rel=1e-9, abs=1e-12)


def _unit(rng):
    a = rng.uniform(-np.pi, np.pi)
    return np.array([np.cos(a), np.sin(a)])


# -- trace to features ----------------------------------------------------------------


def test_feature_batch_shape():
    trace = run(WorldConfig(seed=0), 150.0)
    batch = trace_to_features(trace)
    assert batch.variables == FEATURE_VARIABLES
    assert batch.n_rows == 1499
    assert batch.rate_hz == pytest.approx(trace.rate_hz)
    assert batch.timestamps[0] == pytest.approx(trace.t[1])


def test_features_stationary_world():
    n = 50
    trace = make_trace(
        np.tile([1.0, 1.0], (n, 1)), np.tile([3.0, 3.0], (n, 1)), (4.0, 7.2)
    )
    batch = trace_to_features(trace)
    np.testing.assert_allclose(batch.column("v"), 0.0)
    np.testing.assert_allclose(batch.column("r"), 0.0)
    np.testing.assert_allclose(batch.column("d_g"), compute_dg((1, 1), (4, 7.2)))


def test_features_straight_walk():
    n = 20
    h = np.column_stack([np.arange(n) * 0.1, np.zeros(n)])  # 1 m/s along x
    trace = make_trace(h, np.tile([0.0, 5.0], (n, 1)), (4.0, 0.0))
    batch = trace_to_features(trace)
    np.testing.assert_allclose(batch.column("v"), 1.0, rtol=1e-9)
    np.testing.assert_allclose(
        batch.column("d_g"), 4.0 - 0.1 * np.arange(1, n), rtol=1e-9
    )


def test_speed_correlates_with_goal_approach():
    # over a seeded run, faster movement should coincide with d_g shrinking
    trace = run(WorldConfig(seed=4, pos_noise_sigma=0.0), 150.0)
    batch = trace_to_features(trace)
    v = batch.column("v")
    d_g = batch.column("d_g")
    drop = -np.diff(d_g)
    keep = np.abs(drop) < 1.0  # exclude goal-switch jumps
    corr = np.corrcoef(v[1:][keep], drop[keep])[0, 1]
    assert corr > 0.5


def test_too_short_trace_raises():
    trace = make_trace([[0.0, 0.0]], [[1.0, 1.0]], (2.0, 2.0))
    with pytest.raises(InsufficientDataError):
        trace_to_features(trace)


def test_smoothing_reduces_speed_noise():
    trace = run(WorldConfig(seed=6, pos_noise_sigma=0.05), 60.0)
    raw = trace_to_features(trace)
    smoothed = trace_to_features(trace, smooth_window=5)
    assert smoothed.column("v").std() < raw.column("v").std()
