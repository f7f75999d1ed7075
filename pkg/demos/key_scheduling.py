# Displacement estimates to timed key holds.
#
# Each axis displacement becomes a hold of K seconds per meter on the
# matching movement key, quantized to whole milliseconds. The quantization
# remainder is carried per axis, so long sequences conserve total hold
# time, and opposing keys are never held for the same estimate.

from merp.hid import KeyBindings, KeyScheduler, KeyboardFactor, event_log_text
from merp.reckon import MotionEstimate

sched = KeyScheduler(KeyboardFactor(2.0), KeyBindings())

# 2 m forward at K = 2 s/m means the forward key goes down for 4 s
events = sched.schedule(MotionEstimate(0.0, 0.0, 0.0, 2.0, window_end=3.5))
print("2 m forward:", events)

# A diagonal estimate holds one key per axis, both stamped at window end
events = sched.schedule(MotionEstimate(0.0, 0.0, 0.25, -0.5, window_end=3.6))
print("diagonal:   ", events)

# Sub-millisecond moves accumulate in the carry instead of vanishing
sched = KeyScheduler(KeyboardFactor(1.0), KeyBindings())
emitted = []
for i in range(10):
    emitted += sched.schedule(MotionEstimate(0.0, 0.0, 0.0003, 0.0, window_end=0.1 * (i + 1)))
print("ten 0.3 ms moves produced:", emitted)
print("total hold:", sum(e.duration for e in emitted), "s for 3 ms of walking")

# The event log is line-oriented JSON with sorted keys, the same bytes
# every run, which is what makes replays comparable
print(event_log_text(events), end="")
