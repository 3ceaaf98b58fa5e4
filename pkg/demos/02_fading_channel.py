#!/usr/bin/env python3
"""Show the composite fading model: fast Rayleigh times slow lognormal.

Prints power statistics for a few configurations and a crude text plot of
one user's gain trace so the two time scales are visible.
"""

import numpy as np

from spirap import ChannelConfig, gen_fading

for label, cfg in [
    ("fast Rayleigh, no shadowing",
     ChannelConfig(powers=(1.0,), rho_rayleigh=0.0, sigma_shadow_db=0.0, seed=3)),
    ("slow Rayleigh (rho 0.9)",
     ChannelConfig(powers=(1.0,), rho_rayleigh=0.9, sigma_shadow_db=0.0, seed=3)),
    ("fast Rayleigh + 4 dB shadowing",
     ChannelConfig(powers=(1.0,), rho_rayleigh=0.0, sigma_shadow_db=4.0,
                   rho_shadow=0.99, seed=3)),
]:
    a = gen_fading(50_000, cfg, 0)
    p = np.abs(a) ** 2
    lag1 = np.real(np.mean(a[:-1] * np.conj(a[1:]))) / np.mean(p)
    print(f"{label:34s}: mean power {np.mean(p):.3f}, "
          f"P(power < 0.1) = {np.mean(p < 0.1):.3f}, lag-1 corr {lag1:+.2f}")

print("\none shadowed user, gain magnitude in dB over 70 slots:")
cfg = ChannelConfig(powers=(1.0,), sigma_shadow_db=4.0, rho_shadow=0.99, seed=9)
trace = 20 * np.log10(np.abs(gen_fading(70, cfg, 0)))
lo, hi = trace.min(), trace.max()
for row_db in np.arange(np.ceil(hi / 3) * 3, lo - 3, -3):
    line = "".join("*" if abs(t - row_db) < 1.5 else " " for t in trace)
    print(f"{row_db:+6.0f} dB |{line}")
