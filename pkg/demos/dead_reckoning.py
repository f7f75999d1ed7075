"""
Planar dead reckoning from raw acceleration
===========================================

Double integration with a left-endpoint rectangular rule, the stationary
clamp that keeps noise from walking the position away, and the two ways
of choosing the timestep.
"""

from merp.reckon import IntegrationConfig, WindowedReckoner, integrate_window
from merp.sensors import AccelSample

# ---------------------------------------------------------------------
# 1. Constant acceleration, and why the sum comes in under the calculus
# ---------------------------------------------------------------------
# Velocity is accumulated after displacement uses it, so each interval
# contributes the velocity at its left endpoint. For a = 1 over 1 s the
# discrete answer is (1/2) a t (t - dt), one half-step short of  0.5 m.
cfg = IntegrationConfig(zupt_threshold=0.0)
for dt in (1e-3, 1e-2, 5e-3, 2.5e-3):
    n = round(1.0 / dt)
    samples = [AccelSample(i * dt, 1.0, 0.0) for i in range(n + 1)]
    est = integrate_window(samples, cfg)
    print(f"dt={dt:<7} dx={est.dx:.6f}  deficit={0.5 - est.dx:.6f}")

# -----------------------------------------------
# 2. Zero-velocity clamp on a sub-threshold window
# -----------------------------------------------
cfg = IntegrationConfig(zupt_threshold=0.1)
noise = [AccelSample(0.01 * i, 0.03, -0.04) for i in range(1, 11)]  # |a| = 0.05
est = integrate_window(noise, cfg, v0=(0.8, 0.0))
print("quiet window with leftover velocity 0.8 m/s ->", (est.vx, est.dx))

# One loud sample defeats the clamp and the window integrates normally
loud = noise + [AccelSample(0.11, 2.0, 0.0)]
est = integrate_window(loud, cfg, v0=(0.8, 0.0))
print("same window plus one real kick        ->", (round(est.vx, 3), round(est.dx, 4)))

# ------------------------------------------------------
# 3. Timestep policy: measured timestamps vs a fixed tick
# ------------------------------------------------------
# The mcu-clock policy charges every sample one clock cycle regardless of
# its timestamp. At 133 MHz that is 7.5 ns per 10 ms sample, so wall-time
# displacement is wildly underestimated; kept as a selectable behavior.
mcu = IntegrationConfig(zupt_threshold=0.0, dt_policy="mcu-clock", clock_hz=133e6)
samples = [AccelSample(0.01 * i, 1.0, 0.0) for i in range(101)]
est = integrate_window(samples, mcu)
print("1 s of a=1 under mcu-clock dt:", est.dx, "m")

# ----------------------------------------
# 4. Streaming windows with velocity carry
# ----------------------------------------
reck = WindowedReckoner(IntegrationConfig(zupt_threshold=0.0))
estimates = []
for i in range(1, 26):
    estimates += reck.feed(AccelSample(0.01 * i, 1.0, 0.0))
tail = reck.flush()
if tail is not None:
    estimates.append(tail)
print("windows closed:", [round(e.window_end, 2) for e in estimates])
print("total displacement:", round(sum(e.dx for e in estimates), 6), "m")
print("final velocity:", round(reck.velocity[0], 3), "m/s")
