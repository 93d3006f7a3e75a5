"""Scenario variables derived from agent trajectories.

Three per-tick quantities describe the interaction: the human's speed v,
their distance to the current goal d_g, and the collision risk r with the
robot. All are computed from recorded positions (finite differences for
velocities), mirroring what a tracking pipeline would provide.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import InsufficientDataError
from .hrsim import SimTrace
from .timeseries import TimeSeriesBatch

FEATURE_VARIABLES = ("v", "d_g", "r")


def compute_speed(p_prev, p_curr, dt: float) -> float:
    """Scalar speed as Euclidean displacement over dt."""
    if dt <= 0:
        raise ValueError("dt must be > 0")
    return math.hypot(p_curr[0] - p_prev[0], p_curr[1] - p_prev[1]) / dt


def compute_dg(p_h, p_goal) -> float:
    """Euclidean distance from the human to the goal position."""
    return math.hypot(p_goal[0] - p_h[0], p_goal[1] - p_h[1])


def compute_risk(p_h, v_h, p_r, v_r, R_enc: float) -> float:
    """Collision risk in units of relative speed.

    The relative velocity v_h - v_r is compared against the cone of
    directions that intersect the robot's encumbrance disc of radius
    R_enc: risk is |v_rel| scaled by 1 - theta/phi inside the cone and 0
    outside, where phi = arcsin(R_enc / d). Overlap (d <= R_enc) returns
    the full |v_rel|. Continuous in theta across the cone boundary.
    """
    if R_enc <= 0:
        raise ValueError("R_enc must be > 0")
    dx, dy = p_r[0] - p_h[0], p_r[1] - p_h[1]
    d = math.hypot(dx, dy)
    vx, vy = v_h[0] - v_r[0], v_h[1] - v_r[1]
    v_rel = math.hypot(vx, vy)
    if v_rel == 0.0:
        return 0.0
    if d <= R_enc:
        return v_rel
    phi = math.asin(R_enc / d)
    cos_theta = (vx * dx + vy * dy) / (v_rel * d)
    theta = math.acos(max(-1.0, min(1.0, cos_theta)))
    return v_rel * max(0.0, 1.0 - theta / phi)


def trace_to_features(
    trace: SimTrace, R_enc: float = 0.6, smooth_window: int = 1
) -> TimeSeriesBatch:
    """Derive the (v, d_g, r) batch from a trace.

    One row per tick from the second onward (velocities need a
    predecessor). smooth_window > 1 applies a trailing moving average to
    the recorded positions before differencing; default off, to avoid
    injecting artificial autocorrelation.
    """
    n = trace.n_ticks
    if n < 2:
        raise InsufficientDataError(f"trace has {n} ticks, need at least 2")
    if smooth_window < 1:
        raise ValueError("smooth_window must be >= 1")
    dt = 1.0 / trace.rate_hz
    h_pos = trace.human_pos
    r_pos = trace.robot_pos
    if smooth_window > 1:
        w = smooth_window
        kernel = np.ones(w) / w
        padded = np.pad(h_pos, ((w // 2, w - 1 - w // 2), (0, 0)), mode="edge")
        h_pos = np.column_stack(
            [np.convolve(padded[:, i], kernel, mode="valid") for i in range(2)]
        )

    v_h = np.diff(h_pos, axis=0) / dt
    v_r = np.diff(r_pos, axis=0) / dt
    rows = np.empty((n - 1, 3))
    for k in range(1, n):
        rows[k - 1, 0] = compute_speed(h_pos[k - 1], h_pos[k], dt)
        rows[k - 1, 1] = compute_dg(h_pos[k], trace.goal_pos[k])
        rows[k - 1, 2] = compute_risk(
            h_pos[k], v_h[k - 1], r_pos[k], v_r[k - 1], R_enc
        )
    return TimeSeriesBatch(
        FEATURE_VARIABLES, trace.rate_hz, trace.t[1], trace.t[1:], rows
    )
