"""Planar dead reckoning: double integration of acceleration with drift controls.

Velocity is the running sum of acceleration, displacement the running sum
of velocity, both left-endpoint rectangular (each interval uses the value
at its start).  Two interval policies exist: ``timestamped`` takes dt from
the sample timestamps (the default; real sensor streams arrive at a bounded
rate), while ``mcu-clock`` charges one fixed MCU cycle per sample, which
makes displacement scale with processor speed.  That mode is physically
wrong for streamed samples but kept deliberately demonstrable.

Pure double integration diverges quadratically under sensor bias, so two
controls are layered on: a startup bias estimate subtracted from every
sample, and a zero-velocity update (ZUPT) that snaps velocity and window
displacement to exactly zero whenever every sample in a window sits below
a stationarity threshold.  An accelerometer cannot distinguish constant
velocity from rest, so fidelity tests that cruise at constant speed must
disable ZUPT (threshold 0).

Axes are integrated in the sensor's own frame; whether that frame is the
user's body or the room is the avatar stage's mapping decision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .sensors import AccelSample

#: dt policies: interval from sample timestamps, or one MCU cycle per sample.
DT_TIMESTAMPED = "timestamped"
DT_MCU_CLOCK = "mcu-clock"

DEFAULT_CLOCK_HZ = 133_000_000.0


@dataclass(frozen=True)
class IntegrationConfig:
    dt_policy: str = DT_TIMESTAMPED
    clock_hz: float = DEFAULT_CLOCK_HZ
    window_s: float = 0.1
    zupt_threshold: float = 0.1
    bias_window: int = 200

    def __post_init__(self) -> None:
        if self.dt_policy not in (DT_TIMESTAMPED, DT_MCU_CLOCK):
            raise ValueError(f"unknown dt policy {self.dt_policy!r}")
        if not self.clock_hz > 0:
            raise ValueError("clock_hz must be positive")
        if not self.window_s > 0:
            raise ValueError("window_s must be positive")
        if self.zupt_threshold < 0:
            raise ValueError("zupt_threshold must be non-negative")
        if self.bias_window < 1:
            raise ValueError("bias_window must be at least 1")


@dataclass(frozen=True)
class MotionEstimate:
    """Velocity and displacement accumulated over one integration window."""

    vx: float
    vy: float
    dx: float
    dy: float
    window_end: float

    def __post_init__(self) -> None:
        for value in (self.vx, self.vy, self.dx, self.dy, self.window_end):
            if not math.isfinite(value):
                raise ValueError("motion estimate fields must be finite")


class InsufficientSamples(ValueError):
    """Too few stationary samples to estimate the sensor bias."""


def estimate_bias(
    samples: Sequence[AccelSample], bias_window: int = 200
) -> tuple[float, float]:
    """Per-axis mean acceleration over a stationary capture.

    Requires at least ``bias_window`` samples; the result is subtracted
    from all subsequent samples before integration.
    """
    if len(samples) < bias_window:
        raise InsufficientSamples(
            f"bias estimate needs {bias_window} samples, got {len(samples)}"
        )
    n = len(samples)
    bx = math.fsum(s.ax for s in samples) / n
    by = math.fsum(s.ay for s in samples) / n
    return bx, by


def dt_of(cfg: IntegrationConfig, prev_t: float, curr_t: float) -> float:
    """Integration interval between two samples under the configured policy.

    ``mcu-clock`` returns one MCU cycle regardless of the timestamps;
    ``timestamped`` returns the actual interval and rejects non-positive
    ones.
    """
    if cfg.dt_policy == DT_MCU_CLOCK:
        return 1.0 / cfg.clock_hz
    interval = curr_t - prev_t
    if not interval > 0:
        raise ValueError(f"non-positive sample interval {interval}")
    return interval


def _below_threshold(sample: AccelSample, threshold: float) -> bool:
    return math.hypot(sample.ax, sample.ay) < threshold


def integrate_window(
    samples: Sequence[AccelSample],
    cfg: IntegrationConfig,
    v0: tuple[float, float] = (0.0, 0.0),
    window_end: float | None = None,
) -> MotionEstimate:
    """Integrate one window of bias-removed samples into a motion estimate.

    Left-endpoint rectangular double integration: each interval advances
    displacement with the velocity at its start, then velocity with the
    acceleration at its start.  Under ``mcu-clock`` every sample charges
    one fixed cycle; under ``timestamped`` the n samples span n-1 intervals
    and the last sample's acceleration is the next window's left endpoint.

    If every sample magnitude is below ``cfg.zupt_threshold`` the window is
    declared stationary: displacement and exit velocity are exactly zero.
    An empty window yields a zero estimate carrying ``v0``.
    """
    if window_end is None:
        window_end = samples[-1].t if samples else 0.0
    if not samples:
        return MotionEstimate(v0[0], v0[1], 0.0, 0.0, window_end)

    for prev, curr in zip(samples, samples[1:]):
        if not curr.t > prev.t:
            raise ValueError("window samples must have strictly increasing timestamps")

    if all(_below_threshold(s, cfg.zupt_threshold) for s in samples):
        return MotionEstimate(0.0, 0.0, 0.0, 0.0, window_end)

    vx, vy = v0
    dx = dy = 0.0
    if cfg.dt_policy == DT_MCU_CLOCK:
        dt = 1.0 / cfg.clock_hz
        for s in samples:
            dx += vx * dt
            dy += vy * dt
            vx += s.ax * dt
            vy += s.ay * dt
    else:
        for prev, curr in zip(samples, samples[1:]):
            dt = curr.t - prev.t
            dx += vx * dt
            dy += vy * dt
            vx += prev.ax * dt
            vy += prev.ay * dt
    return MotionEstimate(vx, vy, dx, dy, window_end)


class WindowedReckoner:
    """Streaming double integrator emitting one estimate per window.

    Windows are anchored at the first sample and close every
    ``cfg.window_s`` seconds of stream time.  Velocity carries across
    windows until a ZUPT window resets it.  Single writer per stream;
    emitted estimates are immutable snapshots.
    """

    def __init__(
        self, cfg: IntegrationConfig, bias: tuple[float, float] = (0.0, 0.0)
    ) -> None:
        self.cfg = cfg
        self.bias = bias
        self._prev: AccelSample | None = None
        self._boundary = 0.0
        self._vx = self._vy = 0.0
        self._dx = self._dy = 0.0
        self._window_stationary = True
        self._window_count = 0
        self._gap_pending = False

    @property
    def velocity(self) -> tuple[float, float]:
        return self._vx, self._vy

    def note_gap(self) -> None:
        """Frame loss upstream: integrate the missing interval with zero accel."""
        self._gap_pending = True

    def feed(self, sample: AccelSample) -> list[MotionEstimate]:
        """Advance integration by one sample; returns any windows it closed."""
        sample = AccelSample(sample.t, sample.ax - self.bias[0], sample.ay - self.bias[1])
        if self._prev is None:
            self._prev = sample
            self._boundary = sample.t + self.cfg.window_s
            self._join_window(sample)
            return []

        if not sample.t > self._prev.t:
            raise ValueError("accel stream timestamps must be strictly increasing")

        closed: list[MotionEstimate] = []
        ax, ay = self._prev.ax, self._prev.ay
        if self._gap_pending:
            ax = ay = 0.0
            self._gap_pending = False

        if self.cfg.dt_policy == DT_MCU_CLOCK:
            while sample.t > self._boundary:
                closed.append(self._close_window(self._boundary))
            self._advance(ax, ay, 1.0 / self.cfg.clock_hz)
        else:
            start = self._prev.t
            while sample.t > self._boundary:
                self._advance(ax, ay, self._boundary - start)
                start = self._boundary
                closed.append(self._close_window(self._boundary))
            self._advance(ax, ay, sample.t - start)

        self._join_window(sample)
        if sample.t == self._boundary:
            closed.append(self._close_window(self._boundary))
        self._prev = sample
        return closed

    def flush(self) -> MotionEstimate | None:
        """Close the final partial window at the last sample's timestamp."""
        if self._prev is None or self._window_count == 0:
            return None
        return self._close_window(self._prev.t)

    def reset(self) -> None:
        self._prev = None
        self._vx = self._vy = 0.0
        self._dx = self._dy = 0.0
        self._window_stationary = True
        self._window_count = 0
        self._gap_pending = False

    def _join_window(self, sample: AccelSample) -> None:
        self._window_count += 1
        self._window_stationary = self._window_stationary and _below_threshold(
            sample, self.cfg.zupt_threshold
        )

    def _advance(self, ax: float, ay: float, dt: float) -> None:
        if dt <= 0:
            return
        self._dx += self._vx * dt
        self._dy += self._vy * dt
        self._vx += ax * dt
        self._vy += ay * dt

    def _close_window(self, window_end: float) -> MotionEstimate:
        # ZUPT needs evidence: a window that saw no samples (frame loss or a
        # sparse stream) keeps its velocity instead of vacuously zeroing it.
        if self._window_stationary and self._window_count > 0:
            estimate = MotionEstimate(0.0, 0.0, 0.0, 0.0, window_end)
            self._vx = self._vy = 0.0
        else:
            estimate = MotionEstimate(self._vx, self._vy, self._dx, self._dy, window_end)
        self._dx = self._dy = 0.0
        self._boundary = window_end + self.cfg.window_s
        self._window_stationary = True
        self._window_count = 0
        return estimate


def reckon_stream(
    samples: Iterable[AccelSample],
    cfg: IntegrationConfig,
    bias: tuple[float, float] = (0.0, 0.0),
) -> list[MotionEstimate]:
    """Run a whole sample sequence through a fresh windowed reckoner."""
    reckoner = WindowedReckoner(cfg, bias)
    estimates: list[MotionEstimate] = []
    for sample in samples:
        estimates.extend(reckoner.feed(sample))
    tail = reckoner.flush()
    if tail is not None:
        estimates.append(tail)
    return estimates
