"""First-person avatar driven by emulated mouse and key events.

The avatar lives in a rectangular room centered on the origin.  Mouse
motion turns it in place; a key hold moves it in a straight line at a
fixed speed for the hold duration, with the direction resolved once at
the start of the hold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import TYPE_CHECKING, Iterable, Sequence

from .geometry import FRAME_BODY, FRAME_WORLD, body_to_world, wrap_heading, wrap_signed
from .hid import HidEvent, KeyBindings, KeyHold, MouseMove

if TYPE_CHECKING:
    from .heading import MouseFactor
    from .hid import KeyboardFactor
    from .reckon import IntegrationConfig
    from .synth import TrajectoryPoint


@dataclass(frozen=True, slots=True)
class Room:
    """Axis-aligned walkable area centered on the world origin."""

    width_m: float = 10.0
    height_m: float = 10.0

    def __post_init__(self) -> None:
        if self.width_m <= 0.0 or self.height_m <= 0.0:
            raise ValueError("room dimensions must be positive")

    def clamp(self, x: float, y: float) -> tuple[float, float]:
        half_w, half_h = self.width_m / 2.0, self.height_m / 2.0
        return (
            min(max(x, -half_w), half_w),
            min(max(y, -half_h), half_h),
        )


@dataclass(frozen=True, slots=True)
class GameSensitivity:
    """How the game translates input events into turning and walking."""

    pixels_per_degree: float
    speed_mps: float

    def __post_init__(self) -> None:
        if self.pixels_per_degree <= 0.0:
            raise ValueError("pixels_per_degree must be positive")
        if self.speed_mps <= 0.0:
            raise ValueError("speed_mps must be positive")

    @classmethod
    def matched(cls, m_pixels: float, k_seconds_per_meter: float) -> "GameSensitivity":
        """Sensitivity that makes the avatar mirror the sensed motion.

        A turn of theta degrees maps to roughly m*pi/180 pixels per
        degree of arc, so that sensitivity turns the avatar by the same
        angle; 1/k meters per second undoes the hold-time scaling.
        """
        if m_pixels <= 0.0 or k_seconds_per_meter <= 0.0:
            raise ValueError("scale factors must be positive")
        return cls(
            pixels_per_degree=m_pixels * math.pi / 180.0,
            speed_mps=1.0 / k_seconds_per_meter,
        )


@dataclass(frozen=True, slots=True)
class AvatarState:
    x: float = 0.0
    y: float = 0.0
    heading_deg: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.heading_deg < 360.0:
            raise ValueError(
                f"heading must lie in [0, 360), got {self.heading_deg!r}"
            )


def apply_event(
    state: AvatarState,
    event: HidEvent,
    sensitivity: GameSensitivity,
    *,
    room: Room = Room(),
    bindings: KeyBindings = KeyBindings(),
    frame: str = FRAME_BODY,
) -> AvatarState:
    """Advance the avatar by one event and return the new state.

    frame chooses how movement keys are interpreted: "body" walks
    relative to the current heading (forward is wherever the avatar
    faces), "world" pins the keys to the room axes.
    """
    if frame not in (FRAME_BODY, FRAME_WORLD):
        raise ValueError(f"frame must be 'body' or 'world', got {frame!r}")
    if isinstance(event, MouseMove):
        turned = state.heading_deg + event.dx_pixels / sensitivity.pixels_per_degree
        return replace(state, heading_deg=wrap_heading(turned))
    if isinstance(event, KeyHold):
        axis, sign = bindings.axis_of(event.key)
        dist = sensitivity.speed_mps * event.duration * sign
        bx, by = (dist, 0.0) if axis == "x" else (0.0, dist)
        if frame == FRAME_BODY:
            # direction is resolved once, at the start of the hold
            wx, wy = body_to_world(bx, by, state.heading_deg)
        else:
            wx, wy = bx, by
        x, y = room.clamp(state.x + wx, state.y + wy)
        return replace(state, x=x, y=y)
    raise TypeError(f"unsupported event: {event!r}")


class Avatar:
    """Mutable wrapper that folds an event stream into a pose."""

    def __init__(
        self,
        sensitivity: GameSensitivity,
        *,
        state: AvatarState | None = None,
        room: Room = Room(),
        bindings: KeyBindings = KeyBindings(),
        frame: str = FRAME_BODY,
    ) -> None:
        if frame not in (FRAME_BODY, FRAME_WORLD):
            raise ValueError(f"frame must be 'body' or 'world', got {frame!r}")
        self.sensitivity = sensitivity
        self.room = room
        self.bindings = bindings
        self.frame = frame
        self.state = state if state is not None else AvatarState()

    def apply(self, event: HidEvent) -> AvatarState:
        self.state = apply_event(
            self.state,
            event,
            self.sensitivity,
            room=self.room,
            bindings=self.bindings,
            frame=self.frame,
        )
        return self.state

    def run(self, events: Iterable[HidEvent]) -> AvatarState:
        for event in events:
            self.apply(event)
        return self.state

    def reset(self, state: AvatarState | None = None) -> None:
        self.state = state if state is not None else AvatarState()


@dataclass(frozen=True, slots=True)
class FidelityReport:
    """How closely the avatar tracked a ground-truth trajectory."""

    truth_turn_deg: float
    truth_distance_m: float
    yaw_error_deg: float
    position_error_m: float
    mouse_events: int
    key_events: int

    @property
    def yaw_error_rel(self) -> float:
        """Yaw error as a fraction of the net true turn (0 when no turn)."""
        if self.truth_turn_deg == 0.0:
            return 0.0 if self.yaw_error_deg == 0.0 else math.inf
        return abs(self.yaw_error_deg) / abs(self.truth_turn_deg)

    def as_dict(self) -> dict:
        return {
            "truth_turn_deg": self.truth_turn_deg,
            "truth_distance_m": self.truth_distance_m,
            "yaw_error_deg": self.yaw_error_deg,
            "yaw_error_rel": self.yaw_error_rel,
            "position_error_m": self.position_error_m,
            "mouse_events": self.mouse_events,
            "key_events": self.key_events,
        }


def run_round_trip(
    truth: "Sequence[TrajectoryPoint]",
    *,
    mouse_factor: "MouseFactor | None" = None,
    keyboard_factor: "KeyboardFactor | None" = None,
    integration: "IntegrationConfig | None" = None,
    sensitivity: GameSensitivity | None = None,
    room: Room | None = None,
    bindings: KeyBindings | None = None,
    frame: str = FRAME_BODY,
    rate_hz: float = 100.0,
) -> tuple[list[AvatarState], FidelityReport]:
    """Drive the full sensor-to-avatar chain on a known trajectory.

    Sensors are synthesized from the trajectory, encoded to wire bytes,
    decoded and mapped to events, and applied to an avatar that starts
    at the trajectory's first pose.  Without an explicit sensitivity the
    avatar uses the matched one, making the report a measure of pure
    pipeline error.  Returns the avatar state after each event plus the
    final-pose error summary.
    """
    from . import pipeline as pl
    from . import synth

    if len(truth) < 2:
        raise ValueError("round trip needs at least two trajectory points")
    compass = synth.synthesize_compass(truth, rate_hz)
    accel = synth.synthesize_accel(truth, rate_hz, frame=frame)
    wire = b"".join(pl.encode_interleaved(compass, accel))

    start, end = truth[0], truth[-1]
    pipe = pl.Pipeline(
        mouse_factor=mouse_factor,
        keyboard_factor=keyboard_factor,
        integration=integration,
        sensitivity=sensitivity,
        room=room,
        bindings=bindings,
        frame=frame,
        synth_rate_hz=rate_hz,
    )
    pipe.avatar.reset(AvatarState(x=start.x, y=start.y, heading_deg=start.heading_deg))
    result = pipe.feed_bytes(wire)
    result.extend(pipe.finish())

    states: list[AvatarState] = []
    replayer = Avatar(
        pipe.avatar.sensitivity,
        state=AvatarState(x=start.x, y=start.y, heading_deg=start.heading_deg),
        room=pipe.avatar.room,
        bindings=pipe.avatar.bindings,
        frame=frame,
    )
    for event in result.events:
        states.append(replayer.apply(event))

    final = states[-1] if states else replayer.state
    unwrapped = synth.unwrapped_headings(truth)
    report = FidelityReport(
        truth_turn_deg=float(unwrapped[-1] - unwrapped[0]),
        truth_distance_m=math.hypot(end.x - start.x, end.y - start.y),
        yaw_error_deg=wrap_signed(final.heading_deg - end.heading_deg),
        position_error_m=math.hypot(final.x - end.x, final.y - end.y),
        mouse_events=pipe.metrics.mouse_events,
        key_events=pipe.metrics.key_events,
    )
    return states, report

