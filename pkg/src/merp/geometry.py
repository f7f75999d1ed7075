"""Planar heading geometry shared by the synthesis, mapping and avatar stages.

Headings are degrees clockwise from north; the room's world frame puts
north along +y and east along +x.  The body frame has the user's forward
along its +y axis and their right along +x.
"""

from __future__ import annotations

import math

FRAME_BODY = "body"
FRAME_WORLD = "world"


def wrap_heading(deg: float) -> float:
    """Normalize a heading into ``[0, 360)``."""
    wrapped = math.fmod(deg, 360.0)
    if wrapped < 0.0:
        wrapped += 360.0
    return wrapped if wrapped < 360.0 else 0.0


def wrap_signed(deg: float) -> float:
    """Normalize an angle difference into ``(-180, 180]``."""
    wrapped = (deg + 180.0) % 360.0 - 180.0
    return 180.0 if wrapped == -180.0 else wrapped


def forward_unit(heading_deg: float) -> tuple[float, float]:
    """World-frame unit vector the user faces at this heading."""
    psi = math.radians(heading_deg)
    return math.sin(psi), math.cos(psi)


def right_unit(heading_deg: float) -> tuple[float, float]:
    """World-frame unit vector to the user's right at this heading."""
    psi = math.radians(heading_deg)
    return math.cos(psi), -math.sin(psi)


def body_to_world(bx: float, by: float, heading_deg: float) -> tuple[float, float]:
    """Rotate a body-frame vector (right, forward) into world axes."""
    psi = math.radians(heading_deg)
    c, s = math.cos(psi), math.sin(psi)
    return bx * c + by * s, -bx * s + by * c


def world_to_body(wx: float, wy: float, heading_deg: float) -> tuple[float, float]:
    """Rotate a world-frame vector into body axes (right, forward)."""
    psi = math.radians(heading_deg)
    c, s = math.cos(psi), math.sin(psi)
    return wx * c - wy * s, wx * s + wy * c
