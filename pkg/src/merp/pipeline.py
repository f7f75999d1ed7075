"""Deterministic end-to-end pipeline from wire bytes to avatar pose.

The pipeline advances on sample timestamps only, never on wall-clock
time, so feeding the same capture twice (in any chunking) yields the
same events, the same snapshots and the same final pose.  Emitted events
are merged across the two sensor streams on a watermark: an event is
released only once both streams have reached its timestamp, which fixes
a global order (by time, mouse before key on ties) independent of the
interleaving of the input.
"""

from __future__ import annotations

import heapq
import json
import math
import time
from collections import deque
from dataclasses import dataclass, field
from typing import IO, Iterable, Sequence

import numpy as np

from .avatar import Avatar, AvatarState, GameSensitivity, Room
from .geometry import FRAME_BODY
from .heading import MouseFactor, MouseMapper
from .hid import HidEvent, KeyBindings, KeyboardFactor, KeyHold, KeyScheduler, MouseMove
from .reckon import IntegrationConfig, WindowedReckoner
from .sensors import (
    AccelSample,
    CompassSample,
    FrameCorruption,
    FrameKind,
    FrameLoss,
    SensorFrame,
    StreamParser,
    encode_frame,
)
from . import synth

DEFAULT_SNAPSHOT_HZ = 60.0
DEFAULT_SYNTH_RATE_HZ = 100.0

_MOUSE_RANK = 0
_KEY_RANK = 1


@dataclass(frozen=True, slots=True)
class Snapshot:
    """Avatar pose at one snapshot tick of the virtual clock."""

    t: float
    x: float
    y: float
    heading_deg: float


@dataclass(frozen=True, slots=True)
class PipelineResult:
    """Ordered events and snapshots released by one pipeline call."""

    events: list[HidEvent] = field(default_factory=list)
    snapshots: list[Snapshot] = field(default_factory=list)

    def extend(self, other: "PipelineResult") -> None:
        self.events.extend(other.events)
        self.snapshots.extend(other.snapshots)


class Metrics:
    """Counters and a bounded latency reservoir for one pipeline."""

    LATENCY_WINDOW = 200_000

    def __init__(self) -> None:
        self.frames_received = {FrameKind.COMPASS: 0, FrameKind.ACCEL: 0}
        self.frames_lost = {FrameKind.COMPASS: 0, FrameKind.ACCEL: 0}
        self.frames_corrupted = 0
        self.mouse_events = 0
        self.key_events = 0
        self._latency_us: deque[float] = deque(maxlen=self.LATENCY_WINDOW)

    def observe_latency(self, us: float) -> None:
        self._latency_us.append(us)

    HISTOGRAM_BOUNDS_US = (10.0, 20.0, 50.0, 100.0, 200.0, 500.0, 1000.0, 5000.0)

    def latency_quantiles(self) -> tuple[float, float]:
        """(p50, p99) of observed per-frame processing latency, microseconds."""
        if not self._latency_us:
            return 0.0, 0.0
        p50, p99 = np.percentile(np.asarray(self._latency_us), [50.0, 99.0])
        return float(p50), float(p99)

    def latency_histogram(self) -> list[tuple[float, int]]:
        """Cumulative counts at or below each bound; monotone by construction."""
        values = np.sort(np.asarray(self._latency_us))
        counts = np.searchsorted(values, self.HISTOGRAM_BOUNDS_US, side="right")
        out = [(b, int(c)) for b, c in zip(self.HISTOGRAM_BOUNDS_US, counts)]
        out.append((math.inf, len(values)))
        return out

    def as_dict(self) -> dict:
        p50, p99 = self.latency_quantiles()
        return {
            "received": {
                "compass": self.frames_received[FrameKind.COMPASS],
                "accel": self.frames_received[FrameKind.ACCEL],
            },
            "lost": {
                "compass": self.frames_lost[FrameKind.COMPASS],
                "accel": self.frames_lost[FrameKind.ACCEL],
            },
            "corrupted": self.frames_corrupted,
            "events": {"mouse": self.mouse_events, "key": self.key_events},
            "latency_us": {
                "p50": p50,
                "p99": p99,
                "count": len(self._latency_us),
                "cumulative": [
                    [None if math.isinf(bound) else bound, count]
                    for bound, count in self.latency_histogram()
                ],
            },
        }


class Pipeline:
    """Single-writer pipeline; feed bytes in, collect events and snapshots.

    The watermark is the slower stream's latest sample time.  If only one
    stream is ever present its own progress drives the merge, but once
    both have appeared a silent stream holds the merge back until
    ``finish`` flushes it; callers with live traffic should keep both
    streams flowing.
    """

    def __init__(
        self,
        *,
        mouse_factor: MouseFactor | None = None,
        keyboard_factor: KeyboardFactor | None = None,
        integration: IntegrationConfig | None = None,
        sensitivity: GameSensitivity | None = None,
        room: Room | None = None,
        bindings: KeyBindings | None = None,
        frame: str = FRAME_BODY,
        snapshot_hz: float = DEFAULT_SNAPSHOT_HZ,
        synth_rate_hz: float = DEFAULT_SYNTH_RATE_HZ,
        bias: tuple[float, float] = (0.0, 0.0),
    ) -> None:
        if snapshot_hz <= 0.0:
            raise ValueError(f"snapshot_hz must be positive, got {snapshot_hz!r}")
        if synth_rate_hz <= 0.0:
            raise ValueError(f"synth_rate_hz must be positive, got {synth_rate_hz!r}")
        m = mouse_factor if mouse_factor is not None else MouseFactor(100.0)
        k = keyboard_factor if keyboard_factor is not None else KeyboardFactor(1.0)
        cfg = integration if integration is not None else IntegrationConfig()
        sens = (
            sensitivity
            if sensitivity is not None
            else GameSensitivity.matched(m.m_pixels, k.k_seconds_per_meter)
        )
        self.snapshot_hz = snapshot_hz
        self.synth_rate_hz = synth_rate_hz
        self.parser = StreamParser()
        self.mapper = MouseMapper(m)
        self.reckoner = WindowedReckoner(cfg, bias=bias)
        self.scheduler = KeyScheduler(k, bindings)
        self.avatar = Avatar(
            sens,
            room=room if room is not None else Room(),
            bindings=bindings if bindings is not None else KeyBindings(),
            frame=frame,
        )
        self.metrics = Metrics()
        self._prev_compass: CompassSample | None = None
        self._heap: list[tuple[float, int, int, HidEvent]] = []
        self._serial = 0
        self._watermarks: dict[FrameKind, float] = {}
        self._tick_origin: float | None = None
        self._tick_idx = 0
        self._last_t = 0.0
        self._last_heading = 0.0
        self._next_seq = {FrameKind.COMPASS: 0, FrameKind.ACCEL: 0}

    # ---- calibration -------------------------------------------------

    def set_calibration(
        self, m_pixels: float | None = None, k_seconds_per_meter: float | None = None
    ) -> dict[str, float]:
        """Swap scale factors; effective from the next sample onward.

        Sub-pixel and sub-quantum carries survive the swap, so no motion
        is lost at the changeover.  Returns the factors now in force.
        """
        if m_pixels is not None:
            self.mapper.m = MouseFactor(m_pixels)
        if k_seconds_per_meter is not None:
            self.scheduler.k = KeyboardFactor(k_seconds_per_meter)
        return self.calibration()

    def calibration(self) -> dict[str, float]:
        return {
            "m_pixels": self.mapper.m.m_pixels,
            "k_seconds_per_meter": self.scheduler.k.k_seconds_per_meter,
        }

    # ---- ingest ------------------------------------------------------

    def feed_bytes(self, data: bytes) -> PipelineResult:
        """Parse raw wire bytes and release every event the watermark allows."""
        result = PipelineResult()
        for item in self.parser.feed(data):
            if isinstance(item, SensorFrame):
                self._admit_frame(item)
            elif isinstance(item, FrameLoss):
                self.metrics.frames_lost[item.kind] += item.missing
                if item.kind is FrameKind.ACCEL:
                    self.reckoner.note_gap()
            elif isinstance(item, FrameCorruption):
                self.metrics.frames_corrupted += 1
        limit = self._watermark()
        if limit is not None:
            self._drain(limit, result)
        return result

    def finish(self) -> PipelineResult:
        """Flush the open integration window and release everything held."""
        result = PipelineResult()
        estimate = self.reckoner.flush()
        if estimate is not None:
            for event in self.scheduler.schedule(estimate):
                self._push(event, _KEY_RANK)
        end = self._last_t
        for t, _, _, _ in self._heap:
            end = max(end, t)
        self._drain(end, result)
        return result

    def state(self) -> AvatarState:
        return self.avatar.state

    @property
    def last_sample_time(self) -> float:
        return self._last_t

    def reset(self) -> None:
        """Forget all stream and pose state; calibration factors persist."""
        self.parser = StreamParser()
        self.mapper.reset()
        self.reckoner.reset()
        self.scheduler.reset()
        self.avatar.reset()
        self.metrics = Metrics()
        self._prev_compass = None
        self._heap.clear()
        self._serial = 0
        self._watermarks = {}
        self._tick_origin = None
        self._tick_idx = 0
        self._last_t = 0.0
        self._last_heading = 0.0
        self._next_seq = {FrameKind.COMPASS: 0, FrameKind.ACCEL: 0}

    # ---- synthetic injection ----------------------------------------

    def inject_turn(self, turn_deg: float, *, turn_s: float | None = None) -> PipelineResult:
        """Synthesize a stationary in-place turn and feed it as wire bytes.

        By default the turn completes within one sample interval (split
        only when a single shortest-arc delta cannot carry it), so the
        whole angle arrives as one heading delta.  The generated stream
        continues the timestamps, heading and sequence numbers of
        whatever was last received, so it splices into a live session
        without tripping loss detection.
        """
        if turn_s is None:
            steps = max(1, math.ceil(abs(turn_deg) / 179.0))
            turn_s = steps / self.synth_rate_hz
        trajectory = synth.turn_in_place(
            turn_deg,
            heading0=self._last_heading,
            t0=self._next_t0(),
            turn_s=turn_s,
            rate_hz=self.synth_rate_hz,
        )
        return self._inject(trajectory)

    def inject_step(
        self, dx_m: float, dy_m: float, *, duration_s: float = 0.5
    ) -> PipelineResult:
        """Synthesize a body-frame translation (right, forward) and feed it."""
        trajectory = synth.step_move(
            dx_m,
            dy_m,
            heading_deg=self._last_heading,
            duration_s=duration_s,
            t0=self._next_t0(),
            rate_hz=self.synth_rate_hz,
        )
        return self._inject(trajectory)

    def _next_t0(self) -> float:
        if not self._watermarks:
            return 0.0
        return self._last_t + 1.0 / self.synth_rate_hz

    def _inject(self, trajectory: Sequence[synth.TrajectoryPoint]) -> PipelineResult:
        compass = synth.synthesize_compass(trajectory, self.synth_rate_hz)
        accel = synth.synthesize_accel(
            trajectory, self.synth_rate_hz, frame=self.avatar.frame
        )
        frames = encode_interleaved(compass, accel, start_seq=dict(self._next_seq))
        result = PipelineResult()
        for chunk in frames:
            result.extend(self.feed_bytes(chunk))
        result.extend(self.finish())
        return result

    # ---- internals ---------------------------------------------------

    def _admit_frame(self, frame: SensorFrame) -> None:
        self.metrics.frames_received[frame.kind] += 1
        sample = frame.sample
        self._watermarks[frame.kind] = sample.t
        self._last_t = max(self._last_t, sample.t)
        self._next_seq[frame.kind] = (frame.sequence + 1) & 0xFFFFFFFF
        if self._tick_origin is None:
            self._tick_origin = sample.t
        if frame.kind is FrameKind.COMPASS:
            assert isinstance(sample, CompassSample)
            self._last_heading = sample.heading_deg
            if self._prev_compass is not None:
                event = self.mapper.step(self._prev_compass, sample)
                if event is not None:
                    self._push(event, _MOUSE_RANK)
            self._prev_compass = sample
        else:
            assert isinstance(sample, AccelSample)
            for estimate in self.reckoner.feed(sample):
                for event in self.scheduler.schedule(estimate):
                    self._push(event, _KEY_RANK)

    def _push(self, event: HidEvent, rank: int) -> None:
        heapq.heappush(self._heap, (event.t, rank, self._serial, event))
        self._serial += 1
        if isinstance(event, MouseMove):
            self.metrics.mouse_events += 1
        elif isinstance(event, KeyHold):
            self.metrics.key_events += 1

    def _watermark(self) -> float | None:
        if not self._watermarks:
            return None
        return min(self._watermarks.values())

    def _tick_time(self) -> float:
        assert self._tick_origin is not None
        return self._tick_origin + self._tick_idx / self.snapshot_hz

    def _emit_ticks(self, until: float, result: PipelineResult, *, inclusive: bool) -> None:
        if self._tick_origin is None:
            return
        while True:
            tick = self._tick_time()
            if tick > until or (tick == until and not inclusive):
                return
            state = self.avatar.state
            result.snapshots.append(
                Snapshot(t=tick, x=state.x, y=state.y, heading_deg=state.heading_deg)
            )
            self._tick_idx += 1

    def _drain(self, limit: float, result: PipelineResult) -> None:
        while self._heap and self._heap[0][0] <= limit:
            _, _, _, event = heapq.heappop(self._heap)
            # ticks strictly before the event show the pre-event pose
            self._emit_ticks(event.t, result, inclusive=False)
            self.avatar.apply(event)
            result.events.append(event)
        self._emit_ticks(limit, result, inclusive=True)


def encode_interleaved(
    compass: Sequence[CompassSample],
    accel: Sequence[AccelSample],
    *,
    start_seq: dict[FrameKind, int] | None = None,
) -> list[bytes]:
    """Encode two sample streams as one time-ordered list of wire frames.

    Compass precedes acceleration on equal timestamps.  Sequence numbers
    count per stream from ``start_seq`` (default zero).
    """
    seq = {FrameKind.COMPASS: 0, FrameKind.ACCEL: 0}
    if start_seq is not None:
        seq.update(start_seq)
    frames: list[bytes] = []
    i = j = 0
    while i < len(compass) or j < len(accel):
        take_compass = j >= len(accel) or (
            i < len(compass) and compass[i].t <= accel[j].t
        )
        if take_compass:
            kind, sample = FrameKind.COMPASS, compass[i]
            i += 1
        else:
            kind, sample = FrameKind.ACCEL, accel[j]
            j += 1
        frames.append(encode_frame(SensorFrame(kind, seq[kind], sample)))
        seq[kind] = (seq[kind] + 1) & 0xFFFFFFFF
    return frames


def replay(data: bytes, *, chunk_size: int | None = None, **pipeline_kwargs) -> tuple[PipelineResult, Metrics]:
    """Run a captured byte stream through a fresh pipeline, then flush.

    The result is a pure function of the bytes and the configuration;
    chunk_size only exercises the incremental parser and cannot change
    the output.
    """
    pipe = Pipeline(**pipeline_kwargs)
    result = PipelineResult()
    if chunk_size is None:
        result.extend(pipe.feed_bytes(data))
    else:
        if chunk_size <= 0:
            raise ValueError(f"chunk_size must be positive, got {chunk_size!r}")
        for off in range(0, len(data), chunk_size):
            result.extend(pipe.feed_bytes(data[off : off + chunk_size]))
    result.extend(pipe.finish())
    return result, pipe.metrics


@dataclass(frozen=True, slots=True)
class BenchReport:
    """Throughput and per-frame latency of the full decode-to-pose path."""

    frames: int
    seconds: float
    samples_per_second: float
    latency_p50_us: float
    latency_p99_us: float

    def summary(self) -> str:
        return (
            f"{self.frames} frames in {self.seconds:.3f} s "
            f"({self.samples_per_second:,.0f} samples/s), "
            f"latency p50 {self.latency_p50_us:.1f} us, "
            f"p99 {self.latency_p99_us:.1f} us"
        )


def bench_trajectory(duration_s: float, rate_hz: float) -> list[synth.TrajectoryPoint]:
    """Busy figure-of-eight pose path that keeps both streams active."""
    n = int(round(duration_s * rate_hz))
    t = np.arange(n + 1, dtype=np.float64) / rate_hz
    x = 2.0 * np.sin(2.0 * np.pi * t / 8.0)
    y = 1.5 * np.sin(4.0 * np.pi * t / 8.0)
    heading = 180.0 + 120.0 * np.sin(2.0 * np.pi * t / 5.0)
    return [
        synth.TrajectoryPoint(float(ti), float(xi), float(yi), float(hi))
        for ti, xi, yi, hi in zip(t, x, y, heading)
    ]


def bench(*, frames: int = 40_000, rate_hz: float = 200.0) -> BenchReport:
    """Measure feed throughput and per-frame latency on synthetic traffic."""
    if frames < 2:
        raise ValueError("frames must be at least 2")
    duration = frames / (2.0 * rate_hz)
    trajectory = bench_trajectory(duration, rate_hz)
    compass = synth.synthesize_compass(trajectory, rate_hz)
    accel = synth.synthesize_accel(trajectory, rate_hz)
    wire = encode_interleaved(compass, accel)
    pipe = Pipeline(synth_rate_hz=rate_hz)
    start = time.perf_counter()
    for frame in wire:
        before = time.perf_counter_ns()
        pipe.feed_bytes(frame)
        pipe.metrics.observe_latency((time.perf_counter_ns() - before) / 1_000.0)
    pipe.finish()
    elapsed = time.perf_counter() - start
    p50, p99 = pipe.metrics.latency_quantiles()
    return BenchReport(
        frames=len(wire),
        seconds=elapsed,
        samples_per_second=len(wire) / elapsed if elapsed > 0 else float("inf"),
        latency_p50_us=p50,
        latency_p99_us=p99,
    )


def format_snapshot(snap: Snapshot) -> str:
    return json.dumps(
        {"t": snap.t, "x": snap.x, "y": snap.y, "yaw": snap.heading_deg},
        sort_keys=True,
        separators=(",", ":"),
    )


def write_snapshot_log(snapshots: Iterable[Snapshot], out: IO[str]) -> None:
    for snap in snapshots:
        out.write(format_snapshot(snap) + "\n")
