"""
Tour of the binary sensor wire format
=====================================

Builds a few frames by hand, shows their bytes, then corrupts one byte
and watches the stream parser resynchronize and account for the loss.
"""

from merp.sensors import (
    AccelSample,
    CompassSample,
    FrameKind,
    SensorFrame,
    StreamParser,
    encode_frame,
)

# A frame is [sync 0xA5][kind][seq u32][timestamp us u32][payload][xor]
frame = SensorFrame(FrameKind.COMPASS, 0, CompassSample(0.010, 123.45))
raw = encode_frame(frame)
print("compass frame bytes:", raw.hex(" "))
print("length:", len(raw))

accel = SensorFrame(FrameKind.ACCEL, 0, AccelSample(0.015, 0.25, -1.5))
print("accel frame bytes:  ", encode_frame(accel).hex(" "))

# Encode five compass frames 10 ms apart
frames = [
    SensorFrame(FrameKind.COMPASS, i, CompassSample(0.010 * (i + 1), 90.0 + i))
    for i in range(5)
]
stream = b"".join(encode_frame(f) for f in frames)

# Flip one byte inside the third frame
broken = bytearray(stream)
broken[2 * 13 + 7] ^= 0xFF

parser = StreamParser()
for event in parser.feed(bytes(broken)):
    print("parser event:", event)

# The corrupted frame is gone, the parser realigned on the next sync
# byte, and the sequence gap shows up as exactly one missing frame.
