"""Deterministic kinematic simulator of the human-robot delivery scenario.

One pedestrian walks between four goal positions in a rectangular room,
slowing down near each goal and picking a new one on arrival, while a
robot patrols a fixed waypoint loop. The pedestrian treats the robot as
a moving obstacle: inside its collision cone they slow down and steer
away. Traces are pure functions of (config, duration); optional tracker
noise perturbs only the recorded human positions, never the dynamics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParseError

RAW_TRACE_HEADER = "t,hx,hy,hheading,hspeed,rx,ry,rheading,rspeed,gx,gy"

_WAYPOINT_EPS = 0.1  # m, robot switches to the next waypoint inside this


def _wrap_angle(a: float) -> float:
    return (a + math.pi) % (2.0 * math.pi) - math.pi


@dataclass(frozen=True)
class WorldConfig:
    """Scenario geometry, agent parameters, and seeding.

    Defaults reproduce the qualitative couplings of the delivery scenario
    in a 5 x 8.2 m room: goals inset 1 m from the corners, the robot
    patrolling a smaller rectangle inside them.
    """

    room: tuple[float, float] = (5.0, 8.2)
    goals: tuple[tuple[float, float], ...] = (
        (1.0, 1.0),
        (4.0, 1.0),
        (4.0, 7.2),
        (1.0, 7.2),
    )
    # The robot loop sits inside the goal rectangle so encounters happen on
    # path crossings rather than at the goals themselves.
    robot_waypoints: tuple[tuple[float, float], ...] = (
        (1.6, 1.6),
        (3.4, 1.6),
        (3.4, 6.6),
        (1.6, 6.6),
    )
    robot_speed: float = 0.5  # m/s
    v_max: float = 1.2  # m/s, preferred walking speed
    d_slow: float = 1.5  # m, distance over which the human brakes to a goal
    d_avoid: float = 2.5  # m, avoidance range
    R_enc: float = 0.6  # m, robot encumbrance radius
    goal_eps: float = 0.3  # m, goal reached threshold
    dt: float = 0.1  # s
    seed: int = 0
    pos_noise_sigma: float = 0.025  # m, tracker noise on recorded human positions
    turn_rate_max: float = math.pi  # rad/s
    speed_tau: float = 0.5  # s, first-order speed response

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be > 0")
        for name in ("robot_speed", "v_max", "d_slow", "d_avoid", "R_enc", "goal_eps"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        if self.pos_noise_sigma < 0:
            raise ValueError("pos_noise_sigma must be >= 0")
        w, h = self.room
        for label, pts in (("goal", self.goals), ("waypoint", self.robot_waypoints)):
            for x, y in pts:
                if not (0.0 <= x <= w and 0.0 <= y <= h):
                    raise ValueError(f"{label} ({x}, {y}) outside room {self.room}")


@dataclass(frozen=True)
class AgentState:
    """Pose and scalar speed of one agent."""

    position: tuple[float, float]
    heading: float
    speed: float


@dataclass
class SimState:
    """Full mutable world state between ticks."""

    human: AgentState
    robot: AgentState
    goal_index: int
    waypoint_index: int
    rng: np.random.Generator


@dataclass(frozen=True)
class SimTrace:
    """Recorded per-tick states; arrays all share length n_ticks."""

    t: np.ndarray
    human_pos: np.ndarray  # (n, 2)
    human_heading: np.ndarray
    human_speed: np.ndarray
    robot_pos: np.ndarray  # (n, 2)
    robot_heading: np.ndarray
    robot_speed: np.ndarray
    goal_index: np.ndarray
    goal_pos: np.ndarray  # (n, 2)
    rate_hz: float

    @property
    def n_ticks(self) -> int:
        return self.t.shape[0]


# -- behaviour primitives -----------------------------------------------------


def human_desired_speed(d_g: float, cfg: WorldConfig) -> float:
    """Preferred speed: v_max, ramping linearly to 0 inside d_slow of the goal."""
    if d_g < 0:
        raise ValueError("d_g must be >= 0")
    return cfg.v_max * min(1.0, d_g / cfg.d_slow)


def avoidance(
    human: AgentState, robot: AgentState, cfg: WorldConfig
) -> tuple[float, float]:
    """Reaction to the robot: (speed_scale in (0, 1], steer_offset in rad).

    Active only when the robot is within d_avoid and the relative velocity
    falls inside the collision cone of half-angle arcsin(R_enc / d). The
    speed scale floors at 0.3; the steer offset pushes the heading out of
    the cone, up to 45 degrees at dead centre, toward the nearer cone edge
    (ties go counter-clockwise).
    """
    hx, hy = human.position
    rx, ry = robot.position
    dx, dy = rx - hx, ry - hy
    d_true = math.hypot(dx, dy)
    d = max(d_true, 1e-6)
    if d > cfg.d_avoid:
        return 1.0, 0.0
    vrel_x = human.speed * math.cos(human.heading) - robot.speed * math.cos(robot.heading)
    vrel_y = human.speed * math.sin(human.heading) - robot.speed * math.sin(robot.heading)
    v_rel = math.hypot(vrel_x, vrel_y)
    if v_rel < 1e-12:
        return 1.0, 0.0
    phi = math.asin(min(1.0, cfg.R_enc / d))
    if d_true < 1e-6:
        theta = 0.0  # overlapping agents: bearing degenerate, treat as dead centre
    else:
        cos_theta = (vrel_x * dx + vrel_y * dy) / (v_rel * d)
        theta = math.acos(max(-1.0, min(1.0, cos_theta)))
    if theta >= phi:
        return 1.0, 0.0
    speed_scale = min(max(d / cfg.d_avoid, 0.3), 1.0)
    side = 1.0 if dx * vrel_y - dy * vrel_x >= 0.0 else -1.0
    steer_offset = side * (1.0 - theta / phi) * (math.pi / 4.0)
    return speed_scale, steer_offset


def update_goal(
    human_pos: tuple[float, float],
    goal_index: int,
    cfg: WorldConfig,
    rng: np.random.Generator,
) -> int:
    """Redraw the goal (uniformly among the other three) once it is reached."""
    gx, gy = cfg.goals[goal_index]
    if math.hypot(human_pos[0] - gx, human_pos[1] - gy) >= cfg.goal_eps:
        return goal_index
    others = [i for i in range(len(cfg.goals)) if i != goal_index]
    return others[rng.integers(len(others))]


def step(state: SimState, cfg: WorldConfig) -> SimState:
    """Advance the world by one tick of cfg.dt (parallel agent update)."""
    # Avoidance reacts to start-of-tick states.
    speed_scale, steer_offset = avoidance(state.human, state.robot, cfg)

    # Robot: switch waypoint when close, then drive straight at it.
    rx, ry = state.robot.position
    wp_index = state.waypoint_index
    wx, wy = cfg.robot_waypoints[wp_index]
    if math.hypot(wx - rx, wy - ry) < _WAYPOINT_EPS:
        wp_index = (wp_index + 1) % len(cfg.robot_waypoints)
        wx, wy = cfg.robot_waypoints[wp_index]
    d_wp = math.hypot(wx - rx, wy - ry)
    r_heading = math.atan2(wy - ry, wx - rx)
    advance = min(cfg.robot_speed * cfg.dt, d_wp)
    robot = AgentState(
        position=(rx + advance * math.cos(r_heading), ry + advance * math.sin(r_heading)),
        heading=r_heading,
        speed=advance / cfg.dt,
    )

    # Human: rate-limited turn toward the goal, then the avoidance offset.
    hx, hy = state.human.position
    gx, gy = cfg.goals[state.goal_index]
    d_g = math.hypot(gx - hx, gy - hy)
    bearing = math.atan2(gy - hy, gx - hx) if d_g > 1e-9 else state.human.heading
    turn = _wrap_angle(bearing - state.human.heading)
    max_turn = cfg.turn_rate_max * cfg.dt
    heading = _wrap_angle(
        state.human.heading + max(-max_turn, min(max_turn, turn)) + steer_offset
    )
    target_speed = human_desired_speed(d_g, cfg) * speed_scale
    speed = target_speed + (state.human.speed - target_speed) * math.exp(
        -cfg.dt / cfg.speed_tau
    )
    w, h = cfg.room
    new_hx = min(max(hx + speed * cfg.dt * math.cos(heading), 0.0), w)
    new_hy = min(max(hy + speed * cfg.dt * math.sin(heading), 0.0), h)
    human = AgentState(position=(new_hx, new_hy), heading=heading, speed=speed)

    goal_index = update_goal(human.position, state.goal_index, cfg, state.rng)
    return SimState(
        human=human,
        robot=robot,
        goal_index=goal_index,
        waypoint_index=wp_index,
        rng=state.rng,
    )


def initial_state(cfg: WorldConfig, rng: np.random.Generator) -> SimState:
    """Human starts at a random goal, walking to another; robot at waypoint 0."""
    start = int(rng.integers(len(cfg.goals)))
    others = [i for i in range(len(cfg.goals)) if i != start]
    goal_index = others[rng.integers(len(others))]
    hx, hy = cfg.goals[start]
    gx, gy = cfg.goals[goal_index]
    human = AgentState(
        position=(hx, hy), heading=math.atan2(gy - hy, gx - hx), speed=0.0
    )
    wx0, wy0 = cfg.robot_waypoints[0]
    wx1, wy1 = cfg.robot_waypoints[1 % len(cfg.robot_waypoints)]
    robot = AgentState(
        position=(wx0, wy0),
        heading=math.atan2(wy1 - wy0, wx1 - wx0),
        speed=cfg.robot_speed,
    )
    return SimState(human=human, robot=robot, goal_index=goal_index,
                    waypoint_index=1 % len(cfg.robot_waypoints), rng=rng)


def run(cfg: WorldConfig, duration_s: float) -> SimTrace:
    """Simulate floor(duration_s / dt) ticks; bit-identical for identical cfg."""
    if duration_s <= 0:
        raise ValueError("duration_s must be > 0")
    n = int(math.floor(duration_s / cfg.dt + 1e-9))  # guard float tick counts
    dyn_seed, obs_seed = np.random.SeedSequence(cfg.seed).spawn(2)
    state = initial_state(cfg, np.random.default_rng(dyn_seed))

    t = np.arange(n) * cfg.dt
    human_pos = np.empty((n, 2))
    human_heading = np.empty(n)
    human_speed = np.empty(n)
    robot_pos = np.empty((n, 2))
    robot_heading = np.empty(n)
    robot_speed = np.empty(n)
    goal_index = np.empty(n, dtype=int)
    goal_pos = np.empty((n, 2))

    for k in range(n):
        if k > 0:
            state = step(state, cfg)
        human_pos[k] = state.human.position
        human_heading[k] = state.human.heading
        human_speed[k] = state.human.speed
        robot_pos[k] = state.robot.position
        robot_heading[k] = state.robot.heading
        robot_speed[k] = state.robot.speed
        goal_index[k] = state.goal_index
        goal_pos[k] = cfg.goals[state.goal_index]

    if cfg.pos_noise_sigma > 0:
        obs_rng = np.random.default_rng(obs_seed)
        human_pos = human_pos + obs_rng.normal(0.0, cfg.pos_noise_sigma, (n, 2))

    for arr in (t, human_pos, human_heading, human_speed, robot_pos,
                robot_heading, robot_speed, goal_index, goal_pos):
        arr.setflags(write=False)
    return SimTrace(
        t=t,
        human_pos=human_pos,
        human_heading=human_heading,
        human_speed=human_speed,
        robot_pos=robot_pos,
        robot_heading=robot_heading,
        robot_speed=robot_speed,
        goal_index=goal_index,
        goal_pos=goal_pos,
        rate_hz=1.0 / cfg.dt,
    )


# -- raw-trace persistence ------------------------------------------------------


def write_raw_trace(trace: SimTrace, path) -> None:
    """Write the per-tick record in the raw-trace CSV layout."""
    cols = np.column_stack(
        [
            trace.t,
            trace.human_pos,
            trace.human_heading,
            trace.human_speed,
            trace.robot_pos,
            trace.robot_heading,
            trace.robot_speed,
            trace.goal_pos,
        ]
    )
    lines = [RAW_TRACE_HEADER]
    for row in cols:
        lines.append(",".join(format(v, ".12g") for v in row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_raw_trace(path) -> SimTrace:
    """Parse a raw-trace CSV back into a SimTrace (goal_index not recoverable)."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != RAW_TRACE_HEADER:
        raise ParseError(f"{path}: row 1: expected header {RAW_TRACE_HEADER!r}")
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        cells = line.split(",")
        if len(cells) != 11:
            raise ParseError(f"{path}: row {lineno}: expected 11 columns")
        try:
            rows.append([float(c) for c in cells])
        except ValueError:
            raise ParseError(f"{path}: row {lineno}: non-numeric cell") from None
    arr = np.asarray(rows)
    if arr.shape[0] < 2:
        raise ParseError(f"{path}: need at least 2 data rows to infer the rate")
    rate = 1.0 / (arr[1, 0] - arr[0, 0])
    return SimTrace(
        t=arr[:, 0],
        human_pos=arr[:, 1:3],
        human_heading=arr[:, 3],
        human_speed=arr[:, 4],
        robot_pos=arr[:, 5:7],
        robot_heading=arr[:, 7],
        robot_speed=arr[:, 8],
        goal_index=np.full(arr.shape[0], -1, dtype=int),
        goal_pos=arr[:, 9:11],
        rate_hz=rate,
    )
