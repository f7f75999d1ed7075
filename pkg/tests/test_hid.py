"""Key-hold scheduling, stream merging, and the event log format.

Hold-time oracle: a displacement of d meters on one axis is worth
K * d seconds of key time, delivered in 1 ms quanta with the remainder
carried per axis.
"""

import io
import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from merp.hid import (
    DURATION_QUANTUM_S,
    KeyBindings,
    KeyHold,
    KeyScheduler,
    KeyboardFactor,
    MouseMove,
    event_log_text,
    format_event,
    hold_seconds_exact,
    merge_streams,
    parse_event_line,
    preempt_opposing,
    read_event_log,
    write_event_log,
)
from merp.reckon import MotionEstimate

WASD = KeyBindings()


def est(dx, dy, t=1.0):
    return MotionEstimate(0.0, 0.0, dx, dy, t)


# ---- scheduling -----------------------------------------------------------


def test_two_meters_forward_is_a_two_second_w_hold():
    sched = KeyScheduler(KeyboardFactor(1.0))
    events = sched.schedule(est(0.0, 2.0, t=3.5))
    assert events == [KeyHold(3.5, "w", 2.0)]


def test_negative_axes_pick_the_opposite_keys():
    sched = KeyScheduler(KeyboardFactor(0.5))
    events = sched.schedule(est(-3.0, -2.0))
    assert events == [KeyHold(1.0, "a", 1.5), KeyHold(1.0, "s", 1.0)]


def test_diagonal_estimate_holds_both_axes_at_the_same_instant():
    sched = KeyScheduler(KeyboardFactor(1.0))
    events = sched.schedule(est(0.25, 0.75, t=2.0))
    assert {e.key for e in events} == {"d", "w"}
    assert all(e.t == 2.0 for e in events)


def test_durations_are_whole_milliseconds():
    sched = KeyScheduler(KeyboardFactor(1.0))
    (ev,) = sched.schedule(est(0.0, 0.0123456))
    assert ev.duration == pytest.approx(0.012)
    assert round(ev.duration / DURATION_QUANTUM_S) * DURATION_QUANTUM_S == ev.duration


def test_sub_quantum_displacements_accumulate_until_they_surface():
    sched = KeyScheduler(KeyboardFactor(1.0))
    emitted = []
    for i in range(10):
        emitted += sched.schedule(est(0.0003, 0.0, t=float(i)))
    # 10 * 0.3 ms of right-hold time must appear as 3 whole milliseconds
    total = math.fsum(e.duration for e in emitted)
    assert total == pytest.approx(0.003)
    assert all(e.key == "d" for e in emitted)


def test_custom_bindings_are_respected():
    bindings = KeyBindings(forward="i", backward="k", left="j", right="l")
    sched = KeyScheduler(KeyboardFactor(1.0), bindings)
    events = sched.schedule(est(1.0, -1.0))
    assert [e.key for e in events] == ["l", "k"]


def test_bindings_must_be_distinct():
    with pytest.raises(ValueError):
        KeyBindings(forward="w", backward="w")
    with pytest.raises(ValueError):
        WASD.axis_of("q")


def test_scheduler_rejects_non_finite_estimates():
    sched = KeyScheduler(KeyboardFactor(1.0))
    with pytest.raises(ValueError):
        sched.schedule(est(math.nan, 0.0))


displacements = st.floats(-0.5, 0.5, allow_nan=False)


@given(st.lists(st.tuples(displacements, displacements), min_size=1, max_size=60))
def test_emitted_time_conserves_k_times_displacement(moves):
    k = KeyboardFactor(2.0)
    sched = KeyScheduler(k)
    signed = {"x": 0.0, "y": 0.0}
    for i, (dx, dy) in enumerate(moves):
        for ev in sched.schedule(est(dx, dy, t=float(i))):
            axis, direction = WASD.axis_of(ev.key)
            signed[axis] += direction * ev.duration
    want_x = hold_seconds_exact(math.fsum(m[0] for m in moves), k)
    want_y = hold_seconds_exact(math.fsum(m[1] for m in moves), k)
    half = DURATION_QUANTUM_S / 2
    assert abs(signed["x"] - want_x) <= half + 1e-9
    assert abs(signed["y"] - want_y) <= half + 1e-9


@given(st.lists(st.tuples(displacements, displacements), min_size=1, max_size=60))
def test_one_estimate_never_emits_opposing_keys(moves):
    sched = KeyScheduler(KeyboardFactor(3.0))
    for i, (dx, dy) in enumerate(moves):
        events = sched.schedule(est(dx, dy, t=float(i)))
        keys = {e.key for e in events}
        assert not ({"a", "d"} <= keys)
        assert not ({"w", "s"} <= keys)


def test_reset_clears_the_carries():
    sched = KeyScheduler(KeyboardFactor(1.0))
    sched.schedule(est(0.0004, 0.0))
    sched.reset()
    assert sched.schedule(est(0.0004, 0.0)) == []


# ---- event construction and merging ---------------------------------------


def test_zero_pixel_moves_and_zero_holds_are_invalid():
    with pytest.raises(ValueError):
        MouseMove(1.0, 0)
    with pytest.raises(ValueError):
        KeyHold(1.0, "w", 0.0)
    with pytest.raises(ValueError):
        KeyHold(1.0, "w", -0.1)


def test_merge_keeps_time_order_with_mouse_winning_ties():
    mouse = [MouseMove(0.1, 3), MouseMove(0.5, -2)]
    keys = [KeyHold(0.1, "w", 0.2), KeyHold(0.4, "a", 0.1)]
    merged = merge_streams(mouse, keys)
    assert merged == [mouse[0], keys[0], keys[1], mouse[1]]
    assert [e.t for e in merged] == sorted(e.t for e in merged)


def test_merge_rejects_disordered_input():
    with pytest.raises(ValueError):
        merge_streams([MouseMove(2.0, 1), MouseMove(1.0, 1)], [])


# ---- opposing-hold preemption ---------------------------------------------


def test_opposing_hold_truncates_its_predecessor():
    events = [KeyHold(0.0, "d", 0.5), KeyHold(0.3, "a", 0.2)]
    out = preempt_opposing(events, WASD)
    assert out == [KeyHold(0.0, "d", 0.3), KeyHold(0.3, "a", 0.2)]


def test_opposing_hold_at_start_drops_the_predecessor():
    events = [KeyHold(0.0, "w", 0.5), KeyHold(0.0, "s", 0.2)]
    out = preempt_opposing(events, WASD)
    assert out == [KeyHold(0.0, "s", 0.2)]


def test_same_direction_and_cross_axis_overlaps_are_left_alone():
    events = [
        KeyHold(0.0, "d", 0.5),
        KeyHold(0.2, "d", 0.5),
        KeyHold(0.3, "w", 1.0),
        MouseMove(0.35, 7),
    ]
    assert preempt_opposing(events, WASD) == events


def test_non_overlapping_opposing_holds_are_left_alone():
    events = [KeyHold(0.0, "d", 0.2), KeyHold(0.5, "a", 0.2)]
    assert preempt_opposing(events, WASD) == events


# ---- event log format -----------------------------------------------------


def test_log_lines_are_stable_sorted_json():
    assert format_event(MouseMove(1.25, -3)) == '{"dx":-3,"kind":"mouse-move","t":1.25}'
    assert (
        format_event(KeyHold(1.3, "w", 0.153))
        == '{"duration":0.153,"key":"w","kind":"key-hold","t":1.3}'
    )


def test_log_round_trips_through_text():
    events = [
        MouseMove(0.01, 141),
        KeyHold(0.1, "w", 0.05),
        MouseMove(0.11, -17),
        KeyHold(0.2, "a", 0.001),
    ]
    buf = io.StringIO()
    write_event_log(events, buf)
    assert read_event_log(io.StringIO(buf.getvalue())) == events
    assert event_log_text(events) == buf.getvalue()


def test_log_parser_rejects_unknown_kinds():
    with pytest.raises(ValueError):
        parse_event_line(json.dumps({"kind": "scroll", "t": 0.0}))


def test_log_files_round_trip_on_disk(tmp_path):
    path = tmp_path / "events.jsonl"
    events = [MouseMove(0.5, 2), KeyHold(1.0, "s", 0.25)]
    write_event_log(events, str(path))
    assert read_event_log(str(path)) == events
