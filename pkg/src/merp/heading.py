"""Heading changes to horizontal mouse displacement.

A compass pair (previous heading ``alpha``, current heading ``beta``) turns
into a signed shortest-arc delta, which a calibration factor ``M`` maps to
a horizontal mouse displacement of ``2 * M * sin(theta / 2)`` pixels.
Positive delta is clockwise and moves the mouse rightward.  Fractional
pixels are never dropped: the mapper carries the remainder into the next
emission so slow rotations accumulate instead of vanishing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .hid import HidEvent, mouse_move
from .sensors import CompassSample


@dataclass(frozen=True)
class HeadingDelta:
    """Signed shortest-arc heading change, degrees in ``(-180, 180]``."""

    theta_deg: float

    def __post_init__(self) -> None:
        if not -180.0 < self.theta_deg <= 180.0:
            raise ValueError(f"heading delta {self.theta_deg} outside (-180, 180]")


@dataclass(frozen=True)
class MouseFactor:
    """Pixels-per-turn calibration constant, strictly positive."""

    m_pixels: float

    def __post_init__(self) -> None:
        if not self.m_pixels > 0:
            raise ValueError("mouse factor must be positive")


def heading_delta(alpha_deg: float, beta_deg: float) -> HeadingDelta:
    """Signed shortest arc from ``alpha_deg`` to ``beta_deg``.

    Both inputs must lie in ``[0, 360)``.  The raw difference is normalized
    into ``(-180, 180]`` so a user crossing north never produces a near-360
    spin; a 180 deg turn resolves to +180 by convention.
    """
    for name, value in (("alpha", alpha_deg), ("beta", beta_deg)):
        if not 0.0 <= value < 360.0:
            raise ValueError(f"{name} {value} outside [0, 360)")
    delta = (beta_deg - alpha_deg + 180.0) % 360.0 - 180.0
    if delta == -180.0:
        delta = 180.0
    return HeadingDelta(delta)


def displacement_exact(theta: HeadingDelta, m: MouseFactor) -> float:
    """Unrounded signed displacement ``2 * M * sin(theta / 2)`` in pixels.

    The sine of the half angle keeps the sign of ``theta``, so clockwise
    turns move rightward; magnitude is bounded by ``2 * M``.
    """
    return 2.0 * m.m_pixels * math.sin(math.radians(theta.theta_deg) / 2.0)


class MouseMapper:
    """Stateful heading-to-pixels mapper with fractional-pixel carry.

    Single-writer: one instance per compass stream.  ``carry`` stays within
    half a pixel, so the emitted integer total never drifts more than one
    pixel from the exact real-valued displacement sum.
    """

    def __init__(self, m: MouseFactor) -> None:
        self.m = m
        self.carry = 0.0

    def displace(self, theta: HeadingDelta) -> int:
        """Integer pixels for one heading delta, remainder carried over."""
        target = displacement_exact(theta, self.m) + self.carry
        pixels = round(target)
        self.carry = target - pixels
        return pixels

    def step(self, prev: CompassSample, curr: CompassSample) -> HidEvent | None:
        """Map one compass sample pair to a mouse-move event.

        Returns ``None`` when the rounded displacement is zero (no event is
        emitted; the fraction stays in the carry).
        """
        if not curr.t > prev.t:
            raise ValueError("compass samples must advance in time")
        pixels = self.displace(heading_delta(prev.heading_deg, curr.heading_deg))
        if pixels == 0:
            return None
        return mouse_move(curr.t, pixels)

    def reset(self) -> None:
        self.carry = 0.0
