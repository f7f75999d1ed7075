"""Flat text configuration for the whole pipeline.

The file format is one ``key = value`` assignment per line; blank lines
and ``#`` comments are ignored.  Every key has a default, so an empty
file (or no file) is a valid configuration.
"""

from __future__ import annotations

import dataclasses
import io
from dataclasses import dataclass
from typing import IO, Callable

from .avatar import GameSensitivity, Room
from .geometry import FRAME_BODY, FRAME_WORLD
from .heading import MouseFactor
from .hid import KeyBindings, KeyboardFactor
from .pipeline import DEFAULT_SNAPSHOT_HZ, DEFAULT_SYNTH_RATE_HZ, Pipeline
from .reckon import DEFAULT_CLOCK_HZ, DT_MCU_CLOCK, DT_TIMESTAMPED, IntegrationConfig

AUTO = "auto"


class ConfigError(ValueError):
    """Raised for unknown keys or values that fail to parse."""


@dataclass(frozen=True, slots=True)
class Settings:
    """Every tunable of the pipeline, service and synthesizer in one place.

    pixels_per_degree and speed_mps default to "auto": the game
    sensitivity is derived from the controller factors so that sensed
    motion and avatar motion agree.  Set them explicitly to model a game
    whose sensitivity does not match the controller.
    """

    mouse_factor: float = 100.0
    keyboard_factor: float = 1.0
    dt_policy: str = DT_TIMESTAMPED
    clock_hz: float = DEFAULT_CLOCK_HZ
    window_s: float = 0.1
    zupt_threshold: float = 0.1
    bias_window: int = 200
    synth_rate_hz: float = DEFAULT_SYNTH_RATE_HZ
    snapshot_hz: float = DEFAULT_SNAPSHOT_HZ
    pixels_per_degree: float | None = None
    speed_mps: float | None = None
    key_forward: str = "w"
    key_backward: str = "s"
    key_left: str = "a"
    key_right: str = "d"
    room_width: float = 10.0
    room_height: float = 10.0
    frame_mode: str = FRAME_BODY
    auth_token: str = ""
    bias_x: float = 0.0
    bias_y: float = 0.0

    def __post_init__(self) -> None:
        if self.dt_policy not in (DT_TIMESTAMPED, DT_MCU_CLOCK):
            raise ConfigError(f"unknown dt_policy {self.dt_policy!r}")
        if self.frame_mode not in (FRAME_BODY, FRAME_WORLD):
            raise ConfigError(f"unknown frame_mode {self.frame_mode!r}")

    def integration(self) -> IntegrationConfig:
        return IntegrationConfig(
            dt_policy=self.dt_policy,
            clock_hz=self.clock_hz,
            window_s=self.window_s,
            zupt_threshold=self.zupt_threshold,
            bias_window=self.bias_window,
        )

    def bindings(self) -> KeyBindings:
        return KeyBindings(
            forward=self.key_forward,
            backward=self.key_backward,
            left=self.key_left,
            right=self.key_right,
        )

    def room(self) -> Room:
        return Room(width_m=self.room_width, height_m=self.room_height)

    def sensitivity(self) -> GameSensitivity:
        if self.pixels_per_degree is None and self.speed_mps is None:
            return GameSensitivity.matched(self.mouse_factor, self.keyboard_factor)
        matched = GameSensitivity.matched(self.mouse_factor, self.keyboard_factor)
        return GameSensitivity(
            pixels_per_degree=(
                self.pixels_per_degree
                if self.pixels_per_degree is not None
                else matched.pixels_per_degree
            ),
            speed_mps=self.speed_mps if self.speed_mps is not None else matched.speed_mps,
        )

    def pipeline(self, *, bias: tuple[float, float] | None = None) -> Pipeline:
        if bias is None:
            bias = (self.bias_x, self.bias_y)
        return Pipeline(
            mouse_factor=MouseFactor(self.mouse_factor),
            keyboard_factor=KeyboardFactor(self.keyboard_factor),
            integration=self.integration(),
            sensitivity=self.sensitivity(),
            room=self.room(),
            bindings=self.bindings(),
            frame=self.frame_mode,
            snapshot_hz=self.snapshot_hz,
            synth_rate_hz=self.synth_rate_hz,
            bias=bias,
        )


def _parse_float(text: str) -> float:
    return float(text)


def _parse_int(text: str) -> int:
    return int(text, 10)


def _parse_str(text: str) -> str:
    return text


def _parse_optional_float(text: str) -> float | None:
    return None if text == AUTO else float(text)


_PARSERS: dict[str, Callable[[str], object]] = {}
for _field in dataclasses.fields(Settings):
    if _field.name in ("pixels_per_degree", "speed_mps"):
        _PARSERS[_field.name] = _parse_optional_float
    elif isinstance(_field.default, bool):
        raise AssertionError("no boolean settings expected")
    elif isinstance(_field.default, int) and not isinstance(_field.default, float):
        _PARSERS[_field.name] = _parse_int
    elif isinstance(_field.default, float):
        _PARSERS[_field.name] = _parse_float
    else:
        _PARSERS[_field.name] = _parse_str


def parse_settings(text: str) -> Settings:
    values: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = key.strip(), value.strip()
        parser = _PARSERS.get(key)
        if parser is None:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        try:
            values[key] = parser(value)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {exc}") from exc
    return Settings(**values)


def load_settings(source: IO[str] | str | None) -> Settings:
    """Settings from a path, an open file, or defaults when source is None."""
    if source is None:
        return Settings()
    if isinstance(source, str):
        with open(source, "r", encoding="utf-8") as fh:
            return parse_settings(fh.read())
    return parse_settings(source.read())


def dump_settings(settings: Settings) -> str:
    """Render settings in the same format parse_settings reads."""
    out = io.StringIO()
    for field in dataclasses.fields(Settings):
        value = getattr(settings, field.name)
        if value is None:
            value = AUTO
        out.write(f"{field.name} = {value}\n")
    return out.getvalue()
