"""Sensor sample types and the binary sensor-frame wire protocol.

The device side streams two kinds of samples over a byte channel: absolute
compass headings and planar accelerations.  Each sample travels in a small
framed record with a sync byte, per-stream sequence counter, microsecond
timestamp, fixed-point payload and an XOR checksum.  The parser here is a
pure incremental state machine: feed it bytes in any chunking and it yields
the same frames, surfacing corruption and sequence gaps instead of hiding
them.

Wire layout (little-endian)::

    [0xA5 sync][1B kind][4B sequence u32][4B timestamp us u32, wrapping]
    [payload][1B checksum = XOR of all bytes after the sync byte]

    kind 0x01 compass: payload = u16 heading in 0.01 deg units (13 bytes total)
    kind 0x02 accel:   payload = 2 x i16 in 0.001 m/s^2 units  (15 bytes total)
"""

from __future__ import annotations

import enum
import math
import struct
from dataclasses import dataclass

SYNC_BYTE = 0xA5

HEADING_LSB_DEG = 0.01
ACCEL_LSB_MPS2 = 0.001

#: Sample-level validity bound (+/-4g).  Note the wire's i16 field tops out
#: at 32.767 m/s^2, so the encodable range is strictly tighter than this.
ACCEL_RANGE_MPS2 = 39.2

_ACCEL_WIRE_MAX_MPS2 = 32767 * ACCEL_LSB_MPS2

_TS_MODULUS_US = 1 << 32
_SEQ_MODULUS = 1 << 32

_HEADER = struct.Struct("<BII")  # kind, sequence, timestamp_us
_COMPASS_PAYLOAD = struct.Struct("<H")
_ACCEL_PAYLOAD = struct.Struct("<hh")

COMPASS_FRAME_LEN = 1 + _HEADER.size + _COMPASS_PAYLOAD.size + 1
ACCEL_FRAME_LEN = 1 + _HEADER.size + _ACCEL_PAYLOAD.size + 1


class FrameKind(enum.IntEnum):
    COMPASS = 0x01
    ACCEL = 0x02


_FRAME_LEN = {FrameKind.COMPASS: COMPASS_FRAME_LEN, FrameKind.ACCEL: ACCEL_FRAME_LEN}


class FrameEncodeError(ValueError):
    """A frame field cannot be represented in the wire format."""


@dataclass(frozen=True)
class CompassSample:
    """Timestamped absolute heading, degrees clockwise from magnetic north.

    ``t`` is monotonic time in seconds; ``heading_deg`` must lie in
    ``[0, 360)``.
    """

    t: float
    heading_deg: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.t):
            raise ValueError("timestamp must be finite")
        if not (0.0 <= self.heading_deg < 360.0):
            raise ValueError(f"heading {self.heading_deg} outside [0, 360)")


@dataclass(frozen=True)
class AccelSample:
    """Timestamped planar acceleration in m/s^2, sensor frame."""

    t: float
    ax: float
    ay: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.t):
            raise ValueError("timestamp must be finite")
        for value in (self.ax, self.ay):
            if not math.isfinite(value) or abs(value) > ACCEL_RANGE_MPS2:
                raise ValueError(f"acceleration {value} outside +/-{ACCEL_RANGE_MPS2}")


@dataclass(frozen=True)
class SensorFrame:
    """One framed sample with its per-stream sequence counter."""

    kind: FrameKind
    sequence: int
    sample: CompassSample | AccelSample

    def __post_init__(self) -> None:
        if not 0 <= self.sequence < _SEQ_MODULUS:
            raise ValueError("sequence outside u32 range")
        expected = CompassSample if self.kind is FrameKind.COMPASS else AccelSample
        if not isinstance(self.sample, expected):
            raise ValueError(f"{self.kind.name} frame carries {type(self.sample).__name__}")


# --- parse results ---------------------------------------------------------


@dataclass(frozen=True)
class ParsedFrame:
    frame: SensorFrame
    consumed: int


@dataclass(frozen=True)
class NeedMoreBytes:
    """Input ends before a complete frame; nothing was consumed."""

    consumed: int = 0


@dataclass(frozen=True)
class FrameError:
    """Bad sync byte, unknown kind, checksum mismatch or invalid field.

    ``consumed`` skips to the next plausible sync byte so the caller can
    resynchronize without losing intact frames.
    """

    reason: str
    consumed: int


ParseResult = ParsedFrame | NeedMoreBytes | FrameError


def _checksum(body: bytes) -> int:
    c = 0
    for b in body:
        c ^= b
    return c


def encode_frame(frame: SensorFrame) -> bytes:
    """Serialize a frame to its wire representation.

    Values are quantized onto the wire grid (0.01 deg, 0.001 m/s^2, whole
    microseconds); quantized values that fall outside their field range
    raise :class:`FrameEncodeError`.  ``parse_frame(encode_frame(f))``
    returns ``f`` bit-exactly whenever the sample values already lie on the
    grid and the timestamp is within one 32-bit microsecond epoch.
    """
    sample = frame.sample
    ts_us = round(sample.t * 1e6)
    if ts_us < 0:
        raise FrameEncodeError("timestamp must be non-negative")
    ts_us %= _TS_MODULUS_US

    if frame.kind is FrameKind.COMPASS:
        # headings just under 360 quantize to the grid point at north
        raw = round(sample.heading_deg / HEADING_LSB_DEG) % 36000
        payload = _COMPASS_PAYLOAD.pack(raw)
    else:
        if max(abs(sample.ax), abs(sample.ay)) > _ACCEL_WIRE_MAX_MPS2:
            raise FrameEncodeError("acceleration exceeds wire range +/-32.767 m/s^2")
        payload = _ACCEL_PAYLOAD.pack(
            round(sample.ax / ACCEL_LSB_MPS2), round(sample.ay / ACCEL_LSB_MPS2)
        )

    body = _HEADER.pack(frame.kind, frame.sequence, ts_us) + payload
    return bytes([SYNC_BYTE]) + body + bytes([_checksum(body)])


def _resync_offset(buf: bytes) -> int:
    """Bytes to skip so the next parse attempt starts at a sync byte."""
    nxt = buf.find(SYNC_BYTE, 1)
    return nxt if nxt >= 0 else len(buf)


def parse_frame(buf: bytes) -> ParseResult:
    """Parse the first complete frame from ``buf``.

    Returns :class:`ParsedFrame` with the consumed byte count on success,
    :class:`NeedMoreBytes` if the buffer holds only a frame prefix, or
    :class:`FrameError` whose ``consumed`` count advances past the
    offending bytes to the next sync candidate.
    """
    if len(buf) == 0:
        return NeedMoreBytes()
    if buf[0] != SYNC_BYTE:
        return FrameError("bad sync byte", _resync_offset(buf))
    if len(buf) < 2:
        return NeedMoreBytes()

    try:
        kind = FrameKind(buf[1])
    except ValueError:
        return FrameError(f"unknown frame kind 0x{buf[1]:02x}", _resync_offset(buf))

    frame_len = _FRAME_LEN[kind]
    if len(buf) < frame_len:
        return NeedMoreBytes()

    body = buf[1 : frame_len - 1]
    if _checksum(body) != buf[frame_len - 1]:
        return FrameError("checksum mismatch", _resync_offset(buf))

    _, sequence, ts_us = _HEADER.unpack_from(body)
    t = ts_us / 1e6
    if kind is FrameKind.COMPASS:
        (raw,) = _COMPASS_PAYLOAD.unpack_from(body, _HEADER.size)
        if raw >= 36000:
            return FrameError("heading out of range", _resync_offset(buf))
        sample: CompassSample | AccelSample = CompassSample(t, raw * HEADING_LSB_DEG)
    else:
        raw_x, raw_y = _ACCEL_PAYLOAD.unpack_from(body, _HEADER.size)
        sample = AccelSample(t, raw_x * ACCEL_LSB_MPS2, raw_y * ACCEL_LSB_MPS2)

    return ParsedFrame(SensorFrame(kind, sequence, sample), frame_len)


# --- stream assembly -------------------------------------------------------


@dataclass(frozen=True)
class FrameLoss:
    """Sequence gap on one stream: ``missing`` frames never arrived."""

    kind: FrameKind
    missing: int


@dataclass(frozen=True)
class FrameCorruption:
    reason: str


StreamEvent = SensorFrame | FrameLoss | FrameCorruption


class StreamParser:
    """Incremental frame-stream assembler for one byte channel.

    Owns a buffer and per-stream bookkeeping: sequence-gap detection and
    unwrapping of the 32-bit microsecond timestamp so stream time stays
    monotonic across wraps.  One instance per stream; no shared state, so
    instances can live on any thread.
    """

    def __init__(self) -> None:
        self._buf = bytearray()
        self._last_seq: dict[FrameKind, int] = {}
        self._last_raw_us: dict[FrameKind, int] = {}
        self._epoch_us: dict[FrameKind, int] = {}

    def feed(self, data: bytes) -> list[StreamEvent]:
        """Consume ``data`` and return every stream event it completes."""
        self._buf.extend(data)
        events: list[StreamEvent] = []
        view = bytes(self._buf)
        pos = 0
        while pos < len(view):
            result = parse_frame(view[pos:])
            if isinstance(result, NeedMoreBytes):
                break
            pos += result.consumed
            if isinstance(result, FrameError):
                events.append(FrameCorruption(result.reason))
                continue
            events.extend(self._admit(result.frame))
        del self._buf[:pos]
        return events

    def _admit(self, frame: SensorFrame) -> list[StreamEvent]:
        events: list[StreamEvent] = []
        kind = frame.kind

        raw_us = round(frame.sample.t * 1e6)
        epoch = self._epoch_us.get(kind, 0)
        last_raw = self._last_raw_us.get(kind)
        if last_raw is not None:
            if raw_us == last_raw:
                events.append(FrameCorruption(f"{kind.name} timestamp not increasing"))
                return events
            if raw_us < last_raw:  # 32-bit microsecond wrap
                epoch += _TS_MODULUS_US
                self._epoch_us[kind] = epoch

        last_seq = self._last_seq.get(kind)
        if last_seq is not None:
            missing = (frame.sequence - last_seq - 1) % _SEQ_MODULUS
        else:
            # streams count from zero; a later first frame means losses,
            # keeping received + lost = highest sequence + 1
            missing = frame.sequence
        if missing:
            events.append(FrameLoss(kind, missing))

        self._last_seq[kind] = frame.sequence
        self._last_raw_us[kind] = raw_us

        if epoch:
            t = (epoch + raw_us) / 1e6
            sample = frame.sample
            if isinstance(sample, CompassSample):
                sample = CompassSample(t, sample.heading_deg)
            else:
                sample = AccelSample(t, sample.ax, sample.ay)
            frame = SensorFrame(kind, frame.sequence, sample)

        events.append(frame)
        return events
