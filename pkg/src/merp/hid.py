"""Abstract emulated-input events and K-factor key scheduling.

Per-window dead-reckoned displacements become timed key holds: a positive
x displacement holds the ``right`` key for ``K * dx`` seconds, negative
holds ``left``, and the y axis drives ``forward``/``backward`` the same
way.  Axis holds may overlap in time (diagonal motion).  Durations are
quantized to 1 ms with a signed per-axis carry, so the summed hold time
tracks ``K * sum(d)`` to within one quantum.

This module emits abstract events only.  Turning the stream into real OS
input (uinput, HID reports, a synthetic-event API) is an adapter boundary
outside this package; see the README for the contract such an adapter must
honor.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass
from typing import IO, Iterable, Iterator, Sequence

from .reckon import MotionEstimate

#: Key-hold durations are multiples of this quantum.
DURATION_QUANTUM_S = 0.001


@dataclass(frozen=True)
class MouseMove:
    """Relative horizontal mouse move; ``dx_pixels`` is never zero."""

    t: float
    dx_pixels: int

    def __post_init__(self) -> None:
        if self.dx_pixels == 0:
            raise ValueError("zero-pixel mouse moves are suppressed, not emitted")


@dataclass(frozen=True)
class KeyHold:
    """Hold ``key`` for ``duration`` seconds starting at ``t``."""

    t: float
    key: str
    duration: float

    def __post_init__(self) -> None:
        if not self.duration > 0:
            raise ValueError("key-hold duration must be positive")


HidEvent = MouseMove | KeyHold


def mouse_move(t: float, dx_pixels: int) -> MouseMove:
    return MouseMove(t, dx_pixels)


def key_hold(t: float, key: str, duration: float) -> KeyHold:
    return KeyHold(t, key, duration)


@dataclass(frozen=True)
class KeyBindings:
    """Movement-key identifiers; all four must be distinct."""

    forward: str = "w"
    backward: str = "s"
    left: str = "a"
    right: str = "d"

    def __post_init__(self) -> None:
        keys = (self.forward, self.backward, self.left, self.right)
        if len(set(keys)) != 4:
            raise ValueError(f"movement keys must be distinct, got {keys}")

    def axis_of(self, key: str) -> tuple[str, int]:
        """(axis, direction sign) for a bound key; raises on unknown keys."""
        table = {
            self.right: ("x", +1),
            self.left: ("x", -1),
            self.forward: ("y", +1),
            self.backward: ("y", -1),
        }
        try:
            return table[key]
        except KeyError:
            raise ValueError(f"key {key!r} is not a movement binding") from None


@dataclass(frozen=True)
class KeyboardFactor:
    """Seconds of key hold per meter of displacement, strictly positive."""

    k_seconds_per_meter: float

    def __post_init__(self) -> None:
        if not self.k_seconds_per_meter > 0:
            raise ValueError("keyboard factor must be positive")


def hold_seconds_exact(displacement_m: float, k: KeyboardFactor) -> float:
    """Unquantized signed hold time ``K * d`` for one axis displacement."""
    return k.k_seconds_per_meter * displacement_m


def _quantize(seconds: float) -> float:
    return round(seconds / DURATION_QUANTUM_S) * DURATION_QUANTUM_S


class KeyScheduler:
    """Turns motion estimates into key holds, one signed carry per axis.

    The carry keeps the cumulative emitted hold time within half a quantum
    of ``K * sum(displacement)`` per axis and guarantees a single estimate
    never yields opposing holds: with ``|carry| <= 0.5 ms``, a positive
    displacement can only round to a non-negative duration.
    """

    def __init__(self, k: KeyboardFactor, bindings: KeyBindings | None = None) -> None:
        self.k = k
        self.bindings = bindings if bindings is not None else KeyBindings()
        self._carry = {"x": 0.0, "y": 0.0}

    def schedule(self, estimate: MotionEstimate) -> list[HidEvent]:
        """Key holds for one estimate, both axes starting at its window end."""
        for value in (estimate.dx, estimate.dy):
            if not math.isfinite(value):
                raise ValueError("motion estimate must be finite")
        events: list[HidEvent] = []
        axes = (
            ("x", estimate.dx, self.bindings.right, self.bindings.left),
            ("y", estimate.dy, self.bindings.forward, self.bindings.backward),
        )
        for axis, displacement, pos_key, neg_key in axes:
            target = hold_seconds_exact(displacement, self.k) + self._carry[axis]
            emitted = _quantize(target)
            self._carry[axis] = target - emitted
            if emitted > 0:
                events.append(KeyHold(estimate.window_end, pos_key, emitted))
            elif emitted < 0:
                events.append(KeyHold(estimate.window_end, neg_key, -emitted))
        return events

    def reset(self) -> None:
        self._carry = {"x": 0.0, "y": 0.0}


def merge_streams(mouse: Sequence[HidEvent], keys: Sequence[HidEvent]) -> list[HidEvent]:
    """Merge two time-ordered event lists into one, mouse first on ties."""
    for name, stream in (("mouse", mouse), ("keys", keys)):
        for a, b in zip(stream, stream[1:]):
            if b.t < a.t:
                raise ValueError(f"{name} stream is not ordered by emit time")
    merged: list[HidEvent] = []
    i = j = 0
    while i < len(mouse) and j < len(keys):
        if mouse[i].t <= keys[j].t:
            merged.append(mouse[i])
            i += 1
        else:
            merged.append(keys[j])
            j += 1
    merged.extend(mouse[i:])
    merged.extend(keys[j:])
    return merged


def preempt_opposing(events: Iterable[HidEvent], bindings: KeyBindings) -> list[HidEvent]:
    """Truncate any key hold cut short by a later opposing hold.

    Extension for injection adapters: the raw schedule may let a ``right``
    hold from one window overlap a ``left`` hold from the next.  Real
    keyboards cannot hold both, so the earlier hold is truncated at the
    opposing hold's start (dropped entirely if nothing remains).  Mouse
    events pass through untouched.
    """
    out: list[HidEvent] = []
    active: dict[str, tuple[int, int]] = {}  # axis -> (index in out, direction)
    for ev in events:
        if isinstance(ev, MouseMove):
            out.append(ev)
            continue
        axis, direction = bindings.axis_of(ev.key)
        prior = active.get(axis)
        if prior is not None:
            idx, prior_dir = prior
            held = out[idx]
            assert isinstance(held, KeyHold)
            if prior_dir != direction and held.t + held.duration > ev.t:
                remaining = ev.t - held.t
                if remaining > 0:
                    out[idx] = KeyHold(held.t, held.key, remaining)
                else:
                    out[idx] = None  # type: ignore[call-overload]
        active[axis] = (len(out), direction)
        out.append(ev)
    return [ev for ev in out if ev is not None]


# --- event log file format -------------------------------------------------
#
# One event per line, JSON records with sorted keys:
#   {"dx":-3,"kind":"mouse-move","t":1.25}
#   {"duration":0.153,"key":"w","kind":"key-hold","t":1.3}


def event_record(ev: HidEvent) -> dict[str, object]:
    if isinstance(ev, MouseMove):
        return {"t": ev.t, "kind": "mouse-move", "dx": ev.dx_pixels}
    return {"t": ev.t, "kind": "key-hold", "key": ev.key, "duration": ev.duration}


def format_event(ev: HidEvent) -> str:
    return json.dumps(event_record(ev), sort_keys=True, separators=(",", ":"))


def parse_event_line(line: str) -> HidEvent:
    record = json.loads(line)
    kind = record.get("kind")
    if kind == "mouse-move":
        return MouseMove(record["t"], record["dx"])
    if kind == "key-hold":
        return KeyHold(record["t"], record["key"], record["duration"])
    raise ValueError(f"unknown event kind {kind!r}")


def write_event_log(events: Iterable[HidEvent], out: IO[str] | str) -> None:
    if isinstance(out, str):
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            write_event_log(events, fh)
        return
    for ev in events:
        out.write(format_event(ev))
        out.write("\n")


def read_event_log(source: IO[str] | str) -> list[HidEvent]:
    if isinstance(source, str):
        with open(source, "r", encoding="utf-8") as fh:
            return read_event_log(fh)
    return [parse_event_line(line) for line in source if line.strip()]


def event_log_text(events: Iterable[HidEvent]) -> str:
    buf = io.StringIO()
    write_event_log(events, buf)
    return buf.getvalue()


def iter_event_log(source: IO[str]) -> Iterator[HidEvent]:
    for line in source:
        if line.strip():
            yield parse_event_line(line)
