# Live pipeline: byte stream in, events and snapshots out, with metrics.
#
# Feeds a synthesized capture through the Pipeline in ragged chunks the
# way a serial port would deliver it, then prints the pose snapshots,
# the event stream, and the counters a dashboard would scrape.

import json

from merp.pipeline import Pipeline, bench, encode_interleaved
from merp.synth import synthesize_accel, synthesize_compass, turn_in_place

trajectory = turn_in_place(90.0, turn_s=1.0)
compass = synthesize_compass(trajectory, 100.0)
accel = synthesize_accel(trajectory, 100.0)
data = b"".join(encode_interleaved(compass, accel))
print("capture size:", len(data), "bytes")

pipe = Pipeline()
result = pipe.feed_bytes(data[:97])      # partial frames are buffered
result.extend(pipe.feed_bytes(data[97:]))
result.extend(pipe.finish())

print("events:", len(result.events), " snapshots:", len(result.snapshots))
print("first event:", result.events[0])
print("last snapshot:", result.snapshots[-1])
print("avatar ended at heading", round(pipe.state().heading_deg, 3), "deg")

# Counters: frames seen and lost per stream plus HID events emitted.
# The latency reservoir is filled by whoever sits at the ingest boundary
# (the serve loop times each message, bench times each batch), so a bare
# feed_bytes run reports a count of zero there.
m = pipe.metrics.as_dict()
print("received:", m["received"], " lost:", m["lost"], " corrupted:", m["corrupted"])
print("events:", json.dumps(m["events"]))

# Motion can also be injected mid-session without touching the sensor
# path; sequence numbers continue so no loss is recorded
injected = pipe.inject_turn(90.0)
print("injected turn emitted:", injected.events)
print("losses after injection:", pipe.metrics.as_dict()["lost"])

# The self-measuring benchmark drives a synthetic figure through the
# whole stack and reports throughput and latency quantiles
report = bench(frames=20_000)
print(report.summary())
