"""Whole-pipeline behavior: bytes in, ordered events and snapshots out."""

import json
import math

import pytest

from merp.heading import MouseFactor
from merp.hid import KeyHold, MouseMove
from merp.pipeline import (
    Metrics,
    Pipeline,
    Snapshot,
    bench,
    encode_interleaved,
    format_snapshot,
    replay,
)
from merp.reckon import IntegrationConfig
from merp.sensors import FrameKind, AccelSample, CompassSample, encode_frame, SensorFrame
from merp.synth import TrajectoryPoint, synthesize_accel, synthesize_compass


def capture(trajectory, rate=100.0):
    compass = synthesize_compass(trajectory, rate)
    accel = synthesize_accel(trajectory, rate)
    return b"".join(encode_interleaved(compass, accel))


def turn_and_walk():
    # heading sweeps 90 deg over a second while the subject drifts north
    return [
        TrajectoryPoint(t, 0.0, 0.25 * t * t, 90.0 * t)
        for t in [i / 100.0 for i in range(101)]
    ]


# ---- determinism ----------------------------------------------------------


def test_replay_is_identical_across_chunk_sizes():
    data = capture(turn_and_walk())
    results = [
        replay(data, chunk_size=size)[0] for size in (1, 13, 997, None)
    ]
    for other in results[1:]:
        assert other.events == results[0].events
        assert other.snapshots == results[0].snapshots
    assert results[0].events  # the trajectory really produces traffic


def test_feeding_byte_by_byte_matches_one_shot():
    data = capture(turn_and_walk())
    one = Pipeline()
    out_one = one.feed_bytes(data)
    out_one.extend(one.finish())
    per_byte = Pipeline()
    acc = [per_byte.feed_bytes(bytes([b])) for b in data]
    merged = acc[0]
    for part in acc[1:]:
        merged.extend(part)
    merged.extend(per_byte.finish())
    assert merged.events == out_one.events
    assert merged.snapshots == out_one.snapshots


# ---- ordering -------------------------------------------------------------


def test_events_are_time_ordered_with_mouse_winning_ties():
    result, _ = replay(capture(turn_and_walk()))
    times = [e.t for e in result.events]
    assert times == sorted(times)
    for a, b in zip(result.events, result.events[1:]):
        if a.t == b.t and isinstance(a, KeyHold):
            assert isinstance(b, KeyHold), "key hold released before a tied mouse move"
    kinds = {type(e) for e in result.events}
    assert kinds == {MouseMove, KeyHold}


def test_snapshots_tick_on_the_virtual_clock():
    result, _ = replay(capture(turn_and_walk()), snapshot_hz=60.0)
    times = [s.t for s in result.snapshots]
    for i, t in enumerate(times):
        assert t == pytest.approx(i / 60.0, abs=1e-12)
    assert 58 <= len(times) <= 62


def test_snapshots_track_the_turn_monotonically():
    result, _ = replay(capture(turn_and_walk()))
    headings = [s.heading_deg for s in result.snapshots]
    assert headings == sorted(headings)  # one-way sweep, no backtracking
    assert headings[0] < 5.0
    assert headings[-1] > 80.0  # the 90 degree sweep arrived


# ---- stationary input -----------------------------------------------------


def test_stationary_subject_is_silent_but_snapshotted():
    truth = [TrajectoryPoint(t, 1.0, -2.0, 45.0) for t in (0.0, 5.0, 10.0)]
    result, metrics = replay(capture(truth))
    assert result.events == []
    assert metrics.mouse_events == 0 and metrics.key_events == 0
    assert 595 <= len(result.snapshots) <= 602
    assert all(s.x == 0.0 and s.y == 0.0 for s in result.snapshots)


# ---- loss and corruption bookkeeping --------------------------------------


def test_conservation_received_plus_lost_is_highest_plus_one():
    truth = turn_and_walk()
    compass = synthesize_compass(truth, 100.0)
    accel = synthesize_accel(truth, 100.0)
    frames = encode_interleaved(compass, accel)
    kept = [f for i, f in enumerate(frames) if i % 17 != 3]  # drop scattered frames
    _, metrics = replay(b"".join(kept))
    # trailing drops are unseeable; scattered interior drops are all counted
    for kind, n in ((FrameKind.COMPASS, len(compass)), (FrameKind.ACCEL, len(accel))):
        seen = metrics.frames_received[kind]
        lost = metrics.frames_lost[kind]
        assert seen + lost <= n
        assert seen + lost >= n - 2  # at most the last frame of each stream dropped
    assert metrics.frames_corrupted == 0


def test_corrupt_bytes_are_counted_not_fatal():
    frames = [bytearray(f) for f in encode_interleaved(
        synthesize_compass(turn_and_walk(), 100.0), [],
    )]
    frames[20][6] ^= 0x10
    _, metrics = replay(b"".join(bytes(f) for f in frames))
    assert metrics.frames_corrupted >= 1
    assert metrics.frames_received[FrameKind.COMPASS] >= len(frames) - 2


# ---- injection ------------------------------------------------------------


def test_cold_start_injected_quarter_turn_lands_141_pixels():
    pl = Pipeline()
    result = pl.inject_turn(90.0)
    moved = sum(e.dx_pixels for e in result.events if isinstance(e, MouseMove))
    assert moved == 141
    # one whole-angle delta emits the chord, not the arc, so the avatar
    # under-rotates: 141 px / (100 * pi / 180 px per degree)
    want = 141 / (100.0 * math.pi / 180.0)
    assert pl.state().heading_deg == pytest.approx(want)


def test_injection_splices_without_tripping_loss_detection():
    pl = Pipeline()
    pl.feed_bytes(capture(turn_and_walk()))
    pl.finish()
    pl.inject_turn(45.0)
    pl.inject_step(0.0, 0.5)
    assert pl.metrics.frames_lost[FrameKind.COMPASS] == 0
    assert pl.metrics.frames_lost[FrameKind.ACCEL] == 0
    assert pl.metrics.frames_corrupted == 0


def test_injected_step_walks_the_avatar_forward():
    pl = Pipeline(integration=IntegrationConfig(zupt_threshold=0.0))
    result = pl.inject_step(0.0, 1.0)
    assert any(isinstance(e, KeyHold) for e in result.events)
    assert pl.state().y == pytest.approx(1.0, abs=0.05)
    assert pl.state().x == pytest.approx(0.0, abs=0.01)


def test_oversized_turn_splits_into_representable_deltas():
    pl = Pipeline()
    result = pl.inject_turn(350.0)
    moved = sum(e.dx_pixels for e in result.events if isinstance(e, MouseMove))
    # two deltas of 175 deg each: 2 * 2 * 100 * sin(87.5 deg)
    assert moved == pytest.approx(2 * 2 * 100 * math.sin(math.radians(87.5)), abs=1.0)


# ---- calibration ----------------------------------------------------------


def test_calibration_swap_rescales_later_turns():
    pl = Pipeline()
    first = pl.inject_turn(90.0)
    pl.set_calibration(m_pixels=200.0)
    second = pl.inject_turn(90.0)
    px_first = sum(e.dx_pixels for e in first.events if isinstance(e, MouseMove))
    px_second = sum(e.dx_pixels for e in second.events if isinstance(e, MouseMove))
    assert px_first == 141
    assert px_second == 283  # 282.84 exact plus the carried 0.42 fraction
    assert pl.calibration() == {"m_pixels": 200.0, "k_seconds_per_meter": 1.0}


def test_calibration_rejects_non_positive_factors():
    pl = Pipeline()
    with pytest.raises(ValueError):
        pl.set_calibration(m_pixels=0.0)
    with pytest.raises(ValueError):
        pl.set_calibration(k_seconds_per_meter=-1.0)
    assert pl.calibration()["m_pixels"] == 100.0


def test_reset_clears_pose_and_counters_but_not_calibration():
    pl = Pipeline()
    pl.set_calibration(m_pixels=250.0)
    pl.inject_turn(90.0)
    pl.reset()
    assert pl.state().heading_deg == 0.0
    assert pl.metrics.mouse_events == 0
    assert pl.calibration()["m_pixels"] == 250.0
    assert pl.last_sample_time == 0.0


# ---- metrics --------------------------------------------------------------


def test_latency_quantiles_and_histogram_shape():
    m = Metrics()
    for us in range(1, 10_001):
        m.observe_latency(float(us))
    p50, p99 = m.latency_quantiles()
    assert p50 == pytest.approx(5000.0, rel=0.01)
    assert p99 == pytest.approx(9900.0, rel=0.01)
    hist = m.latency_histogram()
    counts = [count for _, count in hist]
    assert counts == sorted(counts)  # cumulative, so monotone
    assert counts[-1] == 10_000
    bounds = [b for b, _ in hist]
    assert bounds == sorted(bounds)
    assert math.isinf(bounds[-1])


def test_metrics_dict_is_json_serializable():
    m = Metrics()
    m.observe_latency(3.0)
    m.frames_received[FrameKind.COMPASS] += 5
    text = json.dumps(m.as_dict())
    decoded = json.loads(text)
    assert decoded["received"]["compass"] == 5
    assert decoded["latency_us"]["cumulative"][-1][0] is None  # inf bound


# ---- wire interleaving ----------------------------------------------------


def test_interleaving_puts_compass_first_on_equal_timestamps():
    compass = [CompassSample(0.0, 10.0), CompassSample(0.01, 10.0)]
    accel = [AccelSample(0.0, 0.0, 0.0), AccelSample(0.01, 0.0, 0.0)]
    frames = encode_interleaved(compass, accel)
    kinds = [f[1] for f in frames]  # kind byte sits after the sync byte
    assert kinds == [1, 2, 1, 2]


def test_interleaving_continues_sequence_numbers():
    frames = encode_interleaved(
        [CompassSample(0.0, 0.0)], [], start_seq={FrameKind.COMPASS: 41}
    )
    assert frames[0][2:6] == (41).to_bytes(4, "little")


# ---- snapshots and bench --------------------------------------------------


def test_snapshot_log_lines_are_stable():
    snap = Snapshot(t=0.5, x=1.25, y=-0.5, heading_deg=182.0)
    assert (
        format_snapshot(snap)
        == '{"t":0.5,"x":1.25,"y":-0.5,"yaw":182.0}'
    )


def test_bench_reports_sane_throughput():
    report = bench(frames=2000, rate_hz=200.0)
    assert report.frames == 2000
    assert report.samples_per_second > 1000.0
    assert report.latency_p99_us > 0.0
    assert "samples/s" in report.summary()
    with pytest.raises(ValueError):
        bench(frames=1)
