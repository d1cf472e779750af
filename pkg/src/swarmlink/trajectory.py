"""Square reference trajectory with a trapezoidal speed profile.

The path visits the four corners of a square in the XY plane, pausing `dwell`
seconds at each corner.  Along each side the speed ramps up at `accel`, cruises
at `peak_speed` and ramps down (triangular fallback when the side is too short
to reach the peak; rectangular profile when accel is None).  Default corner
dwell is solved in closed form so the lap-average speed equals
DEFAULT_MEAN_SPEED.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DEFAULT_SIDE = 1.2
DEFAULT_PEAK_SPEED = 0.65
DEFAULT_ACCEL = 1.3
DEFAULT_MEAN_SPEED = 0.18


@dataclass(frozen=True)
class TrajectoryParams:
    side: float = DEFAULT_SIDE
    peak_speed: float = DEFAULT_PEAK_SPEED
    accel: float | None = DEFAULT_ACCEL  # None -> instant speed changes
    dwell: float | None = None           # None -> solved for DEFAULT_MEAN_SPEED
    laps: int = 1
    origin: tuple[float, float, float] = (0.0, 0.0, 1.0)

    def __post_init__(self) -> None:
        if self.side <= 0:
            raise ValueError(f"side must be positive, got {self.side}")
        if self.peak_speed <= 0:
            raise ValueError(f"peak_speed must be positive, got {self.peak_speed}")
        if self.accel is not None and self.accel <= 0:
            raise ValueError(f"accel must be positive, got {self.accel}")
        if self.dwell is not None and self.dwell < 0:
            raise ValueError(f"dwell must be >= 0, got {self.dwell}")
        if self.laps < 1:
            raise ValueError(f"laps must be >= 1, got {self.laps}")


def _side_profile(side: float, peak: float, accel: float | None):
    """Return (profile_name, move_time, peak_reached, fns) for one side.

    fns = (arc_length(t), speed(t)) valid on [0, move_time].
    """
    if accel is None or math.isinf(accel):
        t_move = side / peak

        def s(t: float) -> float:
            return peak * t

        def v(t: float) -> float:
            return peak

        return "rectangular", t_move, peak, (s, v)

    ramp_dist = peak * peak / accel  # distance of accel + decel together
    if side >= ramp_dist:
        t1 = peak / accel
        t2 = t1 + (side - ramp_dist) / peak
        t_move = t2 + t1

        def s(t: float) -> float:
            if t < t1:
                return 0.5 * accel * t * t
            if t < t2:
                return 0.5 * accel * t1 * t1 + peak * (t - t1)
            r = t_move - t
            return side - 0.5 * accel * r * r

        def v(t: float) -> float:
            if t < t1:
                return accel * t
            if t < t2:
                return peak
            return accel * (t_move - t)

        return "trapezoidal", t_move, peak, (s, v)

    # side too short to reach the commanded peak: triangular profile
    tp = math.sqrt(side / accel)
    vp = accel * tp
    t_move = 2.0 * tp

    def s(t: float) -> float:
        if t < tp:
            return 0.5 * accel * t * t
        r = t_move - t
        return side - 0.5 * accel * r * r

    def v(t: float) -> float:
        if t < tp:
            return accel * t
        return accel * (t_move - t)

    return "triangular", t_move, vp, (s, v)


def solve_dwell(
    side: float, peak: float, accel: float | None, mean_speed: float = DEFAULT_MEAN_SPEED
) -> float:
    """Corner dwell making the lap-average speed equal mean_speed."""
    _, t_move, _, _ = _side_profile(side, peak, accel)
    dwell = side / mean_speed - t_move
    if dwell < 0:
        raise ValueError(
            f"mean speed {mean_speed} unreachable: moving alone averages {side / t_move:.3f} m/s"
        )
    return dwell


@dataclass(frozen=True, eq=False)
class ReferenceTrajectory:
    params: TrajectoryParams
    profile: str            # trapezoidal | triangular | rectangular
    dwell: float
    side_time: float        # move time per side, without dwell
    lap_time: float
    total_time: float
    peak_reached: float

    def _locate(self, t: float):
        """(corner_index, time_into_side) treating t clamped to [0, total]."""
        p = self.params
        if t <= 0.0:
            return 0, 0.0
        if t >= self.total_time:
            return 0, 0.0  # closed path: back at the start corner
        lap_t = math.fmod(t, self.lap_time)
        side_slot = self.side_time + self.dwell
        i = min(int(lap_t // side_slot), 3)
        return i, lap_t - i * side_slot

    def _corner(self, i: int) -> np.ndarray:
        s = self.params.side
        ox, oy, oz = self.params.origin
        cx, cy = ((0.0, 0.0), (s, 0.0), (s, s), (0.0, s))[i % 4]
        return np.array([ox + cx, oy + cy, oz])

    def position_at(self, t: float) -> np.ndarray:
        i, ts = self._locate(t)
        c0, c1 = self._corner(i), self._corner(i + 1)
        _, t_move, _, (s_fn, _) = _side_profile(
            self.params.side, self.params.peak_speed, self.params.accel
        )
        if ts >= t_move:  # dwelling at the far corner
            return c1
        frac = s_fn(ts) / self.params.side
        return c0 + frac * (c1 - c0)

    def velocity_at(self, t: float) -> np.ndarray:
        if t < 0.0 or t >= self.total_time:
            return np.zeros(3)
        i, ts = self._locate(t)
        c0, c1 = self._corner(i), self._corner(i + 1)
        _, t_move, _, (_, v_fn) = _side_profile(
            self.params.side, self.params.peak_speed, self.params.accel
        )
        if ts >= t_move:
            return np.zeros(3)
        return (v_fn(ts) / self.params.side) * (c1 - c0)

    def sample(self, dt: float, n_ticks: int | None = None):
        """Positions/velocities at t = k·dt; defaults to covering the whole run."""
        if n_ticks is None:
            n_ticks = int(math.ceil(self.total_time / dt)) + 1
        ts = np.arange(n_ticks) * dt
        pos = np.stack([self.position_at(float(t)) for t in ts])
        vel = np.stack([self.velocity_at(float(t)) for t in ts])
        return ts, pos, vel


def square_trajectory(
    side: float = DEFAULT_SIDE,
    peak_speed: float = DEFAULT_PEAK_SPEED,
    dwell: float | None = None,
    laps: int = 1,
    accel: float | None = DEFAULT_ACCEL,
    origin: tuple[float, float, float] = (0.0, 0.0, 1.0),
) -> ReferenceTrajectory:
    """Build the square reference path; dwell=None solves for a 0.18 m/s lap mean."""
    params = TrajectoryParams(
        side=side, peak_speed=peak_speed, accel=accel, dwell=dwell, laps=laps, origin=origin
    )
    profile, t_move, peak_reached, _ = _side_profile(side, peak_speed, accel)
    if dwell is None:
        dwell = solve_dwell(side, peak_speed, accel)
    lap_time = 4.0 * (t_move + dwell)
    return ReferenceTrajectory(
        params=params,
        profile=profile,
        dwell=dwell,
        side_time=t_move,
        lap_time=lap_time,
        total_time=laps * lap_time,
        peak_reached=peak_reached,
    )
