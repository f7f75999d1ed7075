"""Synthetic sensor streams derived from a ground-truth pose trajectory.

A trajectory is a strictly time-ordered list of planar poses.  Compass
samples are linear interpolations of the unwrapped heading; acceleration
samples are second central differences of the interpolated position, so
they are exact wherever the true position is locally quadratic in time.
Both generators share one uniform sample grid anchored at the first
trajectory point, which makes a synthesized stream reproducible and lets
tests compare integrator output against the trajectory it came from.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence, TextIO

import numpy as np

from .geometry import FRAME_BODY, FRAME_WORLD, body_to_world, wrap_heading
from .sensors import AccelSample, CompassSample

TRAJECTORY_HEADER = "t x y heading"


@dataclass(frozen=True, slots=True)
class TrajectoryPoint:
    """Ground-truth pose: position in meters, heading in degrees."""

    t: float
    x: float
    y: float
    heading_deg: float

    def __post_init__(self) -> None:
        for field in (self.t, self.x, self.y, self.heading_deg):
            if not math.isfinite(field):
                raise ValueError("trajectory fields must be finite")
        if not 0.0 <= self.heading_deg < 360.0:
            raise ValueError(
                f"heading must lie in [0, 360), got {self.heading_deg!r}"
            )


class TrajectoryError(ValueError):
    """Raised when a trajectory cannot support the requested synthesis."""


def _checked_times(trajectory: Sequence[TrajectoryPoint]) -> np.ndarray:
    if len(trajectory) < 2:
        raise TrajectoryError("trajectory needs at least two points")
    times = np.array([p.t for p in trajectory], dtype=np.float64)
    if not np.all(np.diff(times) > 0.0):
        raise TrajectoryError("trajectory times must be strictly increasing")
    return times


def _sample_grid(times: np.ndarray, rate_hz: float) -> np.ndarray:
    if rate_hz <= 0.0:
        raise ValueError(f"rate_hz must be positive, got {rate_hz!r}")
    span = times[-1] - times[0]
    count = int(math.floor(span * rate_hz)) + 1
    if count < 2:
        raise TrajectoryError("trajectory spans less than one sample interval")
    return times[0] + np.arange(count, dtype=np.float64) / rate_hz


def unwrapped_headings(trajectory: Sequence[TrajectoryPoint]) -> np.ndarray:
    """Headings lifted to a continuous signal (no 360/0 jumps).

    Adjacent points are assumed to differ by the shortest arc, so any
    raw step of 180 degrees or more is read as a wrap of the circle.
    """
    _checked_times(trajectory)
    headings = np.array([p.heading_deg for p in trajectory], dtype=np.float64)
    return np.unwrap(headings, period=360.0)


def synthesize_compass(
    trajectory: Sequence[TrajectoryPoint],
    rate_hz: float,
    *,
    noise_deg: float = 0.0,
    rng: np.random.Generator | None = None,
) -> list[CompassSample]:
    """Sample the trajectory's heading at a uniform rate.

    The turn rate between trajectory points must stay below half a
    revolution per sample interval; past that the stream can no longer
    represent the direction of the turn and synthesis refuses.
    """
    times = _checked_times(trajectory)
    unwrapped = unwrapped_headings(trajectory)
    rates = np.abs(np.diff(unwrapped) / np.diff(times))
    limit = 180.0 * rate_hz
    if np.any(rates > limit):
        worst = float(rates.max())
        raise TrajectoryError(
            f"turn rate {worst:.1f} deg/s exceeds {limit:.1f} deg/s "
            f"representable at {rate_hz:g} Hz"
        )
    grid = _sample_grid(times, rate_hz)
    sampled = np.interp(grid, times, unwrapped)
    if noise_deg < 0.0:
        raise ValueError("noise_deg must be non-negative")
    if noise_deg > 0.0:
        if rng is None:
            raise ValueError("noise requires an explicit rng")
        sampled = sampled + rng.normal(0.0, noise_deg, size=sampled.shape)
    return [
        CompassSample(t=float(t), heading_deg=wrap_heading(float(h)))
        for t, h in zip(grid, sampled)
    ]


def synthesize_accel(
    trajectory: Sequence[TrajectoryPoint],
    rate_hz: float,
    *,
    frame: str = FRAME_BODY,
    noise_mps2: float = 0.0,
    rng: np.random.Generator | None = None,
) -> list[AccelSample]:
    """Differentiate the trajectory's position twice on a uniform grid.

    The second central difference is used, so the first and last grid
    points carry no sample.  With ``frame="body"`` the world-frame
    acceleration is rotated by the interpolated heading into the axes a
    chest-worn sensor would report; ``frame="world"`` skips the rotation.
    """
    if frame not in (FRAME_BODY, FRAME_WORLD):
        raise ValueError(f"frame must be 'body' or 'world', got {frame!r}")
    times = _checked_times(trajectory)
    grid = _sample_grid(times, rate_hz)
    if grid.size < 3:
        raise TrajectoryError("need at least three grid samples to differentiate")
    xs = np.interp(grid, times, np.array([p.x for p in trajectory]))
    ys = np.interp(grid, times, np.array([p.y for p in trajectory]))
    scale = rate_hz * rate_hz
    ax = (xs[2:] - 2.0 * xs[1:-1] + xs[:-2]) * scale
    ay = (ys[2:] - 2.0 * ys[1:-1] + ys[:-2]) * scale
    if frame == FRAME_BODY:
        unwrapped = unwrapped_headings(trajectory)
        psi = np.radians(np.interp(grid[1:-1], times, unwrapped))
        c, s = np.cos(psi), np.sin(psi)
        ax, ay = ax * c - ay * s, ax * s + ay * c
    if noise_mps2 < 0.0:
        raise ValueError("noise_mps2 must be non-negative")
    if noise_mps2 > 0.0:
        if rng is None:
            raise ValueError("noise requires an explicit rng")
        ax = ax + rng.normal(0.0, noise_mps2, size=ax.shape)
        ay = ay + rng.normal(0.0, noise_mps2, size=ay.shape)
    return [
        AccelSample(t=float(t), ax=float(vx), ay=float(vy))
        for t, vx, vy in zip(grid[1:-1], ax, ay)
    ]


def write_trajectory(trajectory: Iterable[TrajectoryPoint], out: TextIO) -> None:
    """Write the plain-text trajectory format: a header, one pose per line."""
    out.write(TRAJECTORY_HEADER + "\n")
    for p in trajectory:
        out.write(f"{p.t!r} {p.x!r} {p.y!r} {p.heading_deg!r}\n")


def read_trajectory(src: TextIO) -> list[TrajectoryPoint]:
    """Parse the plain-text trajectory format written by write_trajectory."""
    header = src.readline()
    if header.split() != TRAJECTORY_HEADER.split():
        raise TrajectoryError(f"expected header {TRAJECTORY_HEADER!r}")
    points: list[TrajectoryPoint] = []
    for lineno, line in enumerate(src, start=2):
        fields = line.split()
        if not fields:
            continue
        if len(fields) != 4:
            raise TrajectoryError(f"line {lineno}: expected 4 fields")
        try:
            t, x, y, heading = (float(f) for f in fields)
            points.append(TrajectoryPoint(t=t, x=x, y=y, heading_deg=heading))
        except ValueError as exc:
            raise TrajectoryError(f"line {lineno}: {exc}") from exc
    _checked_times(points)
    return points


def _grid_times(t0: float, duration: float, rate_hz: float) -> np.ndarray:
    count = int(round(duration * rate_hz))
    return t0 + np.arange(count + 1, dtype=np.float64) / rate_hz


def turn_in_place(
    turn_deg: float,
    *,
    heading0: float = 0.0,
    x: float = 0.0,
    y: float = 0.0,
    t0: float = 0.0,
    lead_s: float = 0.1,
    turn_s: float = 0.01,
    tail_s: float = 0.1,
    rate_hz: float = 100.0,
) -> list[TrajectoryPoint]:
    """Stationary pose that turns by turn_deg over a short ramp.

    lead_s, turn_s and tail_s are rounded to whole sample intervals so
    every ramp corner falls on the synthesis grid.
    """
    times = _grid_times(t0, lead_s + turn_s + tail_s, rate_hz)
    ramp_start = t0 + round(lead_s * rate_hz) / rate_hz
    ramp_len = max(round(turn_s * rate_hz), 1) / rate_hz
    progress = np.clip((times - ramp_start) / ramp_len, 0.0, 1.0)
    headings = heading0 + turn_deg * progress
    return [
        TrajectoryPoint(t=float(t), x=x, y=y, heading_deg=wrap_heading(float(h)))
        for t, h in zip(times, headings)
    ]


def straight_walk(
    distance_m: float,
    *,
    heading_deg: float = 0.0,
    cruise_mps: float = 1.0,
    accel_mps2: float = 2.0,
    x0: float = 0.0,
    y0: float = 0.0,
    t0: float = 0.0,
    lead_s: float = 0.25,
    tail_s: float = 0.25,
    rate_hz: float = 100.0,
) -> list[TrajectoryPoint]:
    """Walk a straight line at fixed heading with a trapezoidal speed profile.

    Speed ramps linearly to cruise_mps, holds, and ramps back down, so
    the acceleration is piecewise constant and the second central
    difference recovers it exactly away from the corners.
    """
    if distance_m <= 0.0 or cruise_mps <= 0.0 or accel_mps2 <= 0.0:
        raise ValueError("distance, cruise speed and acceleration must be positive")
    ramp_dist = cruise_mps * cruise_mps / accel_mps2
    if distance_m < ramp_dist:
        raise ValueError(
            "distance too short to reach cruise speed; lower cruise_mps"
        )
    ramp_t = cruise_mps / accel_mps2
    cruise_t = (distance_m - ramp_dist) / cruise_mps
    move_t = 2.0 * ramp_t + cruise_t
    times = _grid_times(t0, lead_s + move_t + tail_s, rate_hz)
    tau = np.clip(times - (t0 + round(lead_s * rate_hz) / rate_hz), 0.0, move_t)

    dist = np.empty_like(tau)
    rising = tau < ramp_t
    falling = tau > ramp_t + cruise_t
    steady = ~(rising | falling)
    dist[rising] = 0.5 * accel_mps2 * tau[rising] ** 2
    dist[steady] = 0.5 * ramp_dist + cruise_mps * (tau[steady] - ramp_t)
    dist[falling] = distance_m - 0.5 * accel_mps2 * (move_t - tau[falling]) ** 2

    fx, fy = body_to_world(0.0, 1.0, heading_deg)
    return [
        TrajectoryPoint(
            t=float(t),
            x=x0 + fx * float(d),
            y=y0 + fy * float(d),
            heading_deg=heading_deg,
        )
        for t, d in zip(times, dist)
    ]


def step_move(
    dx_m: float,
    dy_m: float,
    *,
    heading_deg: float = 0.0,
    duration_s: float = 0.5,
    x0: float = 0.0,
    y0: float = 0.0,
    t0: float = 0.0,
    lead_s: float = 0.1,
    tail_s: float = 0.1,
    rate_hz: float = 100.0,
) -> list[TrajectoryPoint]:
    """Translate by a body-frame offset (right, forward) at fixed heading.

    The motion follows a smoothstep profile: accelerate for half the
    duration, decelerate for the other half, start and end at rest.
    """
    if duration_s <= 0.0:
        raise ValueError(f"duration_s must be positive, got {duration_s!r}")
    wx, wy = body_to_world(dx_m, dy_m, heading_deg)
    times = _grid_times(t0, lead_s + duration_s + tail_s, rate_hz)
    move_start = t0 + round(lead_s * rate_hz) / rate_hz
    u = np.clip((times - move_start) / duration_s, 0.0, 1.0)
    first = u < 0.5
    s = np.empty_like(u)
    s[first] = 2.0 * u[first] ** 2
    s[~first] = 1.0 - 2.0 * (1.0 - u[~first]) ** 2
    return [
        TrajectoryPoint(
            t=float(t),
            x=x0 + wx * float(p),
            y=y0 + wy * float(p),
            heading_deg=heading_deg,
        )
        for t, p in zip(times, s)
    ]
