# Heading deltas to horizontal mouse pixels.
#
# The mapper turns each change of compass heading into the chord of the
# turn at radius M, keeps the fractional pixel as carry, and emits whole
# pixels. Two things fall out of that and both are shown below: the same
# total rotation produces different pixel totals depending on how it is
# chopped up, and no fraction is ever lost.

import math

from merp.heading import HeadingDelta, MouseFactor, MouseMapper, displacement_exact, heading_delta
from merp.sensors import CompassSample

m = MouseFactor(100.0)

# One 90 degree turn
print("exact chord for 90 deg:", displacement_exact(HeadingDelta(90.0), m))

mapper = MouseMapper(m)
print("emitted for one 90 deg delta:", mapper.displace(HeadingDelta(90.0)), "px")

# The same rotation as two 45 degree deltas
mapper = MouseMapper(m)
total = sum(mapper.displace(HeadingDelta(45.0)) for _ in range(2))
print("emitted for two 45 deg deltas:", total, "px")

# Chopping finer grows the total toward the arc length M * theta
mapper = MouseMapper(m)
total = sum(mapper.displace(HeadingDelta(1.0)) for _ in range(90))
print("emitted for ninety 1 deg deltas:", total, "px")
print("arc length M * theta:", round(100.0 * math.pi / 2, 2))

# The wrap at north is handled by shortest arc: 350 -> 10 is +20, not -340
print("delta across north:", heading_delta(350.0, 10.0).theta_deg, "deg")

# At the event level the mapper consumes compass sample pairs and skips
# the emission entirely while the rounded displacement is zero
mapper = MouseMapper(m)
a = CompassSample(1.00, 10.00)
b = CompassSample(1.01, 10.05)
c = CompassSample(1.02, 12.00)
print("tiny nudge emits:", mapper.step(a, b))
print("next sample emits:", mapper.step(b, c))

# Sub-pixel turns are not dropped; the carry surfaces them eventually
mapper = MouseMapper(MouseFactor(1.0))
emitted = sum(mapper.displace(HeadingDelta(0.5)) for _ in range(300))
print("300 half-degree nudges at M=1 emitted", emitted, "px total")
