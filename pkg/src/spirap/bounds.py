"""Closed-form two-user Shannon benchmarks (bits per symbol).

Conventions: P1 >= P2 >= 0 are linear user powers, N > 0 the linear noise
power.  Joint decoding gives the multi-user sum capacity; time sharing gives
the TDMA line; the sequential decode-and-subtract scheme gets the stronger
user at an interference-limited rate and the weaker one clean, unless the
interference-limited rate is itself the binding constraint for both.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class BoundInputs:
    P1: float
    P2: float
    N: float

    def __post_init__(self):
        if self.N <= 0:
            raise ValueError("noise power N must be > 0")
        if self.P1 < 0 or self.P2 < 0:
            raise ValueError("user powers must be >= 0")
        if self.P1 < self.P2:
            raise ValueError("convention: P1 >= P2 (normalize before calling)")


def mud_bound(inputs: BoundInputs) -> float:
    """Sum capacity with joint multi-user detection."""
    return float(np.log2(1.0 + (inputs.P1 + inputs.P2) / inputs.N))


def tdma_bound(inputs: BoundInputs) -> float:
    """Equal time sharing: each user gets half the slots at its own power."""
    return float(0.5 * np.log2(1.0 + inputs.P1 / inputs.N)
                 + 0.5 * np.log2(1.0 + inputs.P2 / inputs.N))


def spirap_bound(inputs: BoundInputs) -> float:
    """Sequential-cancellation rate: 2A when the strong user's
    interference-limited rate A binds both users, else A + B."""
    a = float(np.log2(1.0 + inputs.P1 / (inputs.P2 + inputs.N)))
    b = float(np.log2(1.0 + inputs.P2 / inputs.N))
    return 2.0 * a if a < b else a + b
