#!/usr/bin/env python3
"""Tabulate the two-user benchmarks over a power-ratio sweep.

The cancellation bound starts below time sharing at equal powers and
overtakes it once the users separate; past the case boundary it rides the
joint-detection bound exactly.
"""

import numpy as np

from spirap import BoundInputs, mud_bound, spirap_bound, tdma_bound

P2, N = 10.0, 1.0
print(f"weak user fixed at P2/N = {10*np.log10(P2/N):.0f} dB\n")
print("P1/P2 dB   mud     tdma    sic-bound   leader")
for ratio_db in range(0, 22, 2):
    inp = BoundInputs(P2 * 10 ** (ratio_db / 10), P2, N)
    m, t, s = mud_bound(inp), tdma_bound(inp), spirap_bound(inp)
    leader = "time-sharing" if t > s else "cancellation"
    tag = "  (= mud)" if abs(s - m) < 1e-9 else ""
    print(f"{ratio_db:8d}   {m:5.2f}   {t:5.2f}   {s:9.2f}   {leader}{tag}")
