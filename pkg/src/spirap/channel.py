"""Per-user fading processes and noisy slot superposition.

Each user's gain is constant within a slot and evolves slot to slot as
(Rayleigh AR(1)) x (lognormal shadowing AR(1) in dB).  The composite is
normalized so E[|alpha|^2] equals the user's configured mean power, with
the lognormal mean-power correction applied in closed form.  Noise is
circular complex Gaussian with total variance N0 per sample (N0/2 per real
dimension), matching the receiver-side variance bookkeeping.
"""

from dataclasses import dataclass, field

import numpy as np

_WARMUP_SLOTS = 100  # discarded so both AR(1) filters reach steady state

_LN10_OVER_20 = np.log(10.0) / 20.0


@dataclass
class ChannelConfig:
    N0: float = 1.0
    powers: tuple = (1.0,)          # mean power P_n per user, linear
    rho_rayleigh: float = 0.0       # slot-to-slot gain correlation, [0, 1)
    sigma_shadow_db: float = 0.0    # lognormal shadowing std dev in dB
    rho_shadow: float = 0.99
    fading: str = "rayleigh_lognormal"   # or "awgn" (constant gain sqrt(P))
    seed: int = 0

    def __post_init__(self):
        if self.N0 <= 0:
            raise ValueError("N0 must be > 0")
        if any(p < 0 for p in self.powers):
            raise ValueError("user powers must be >= 0")
        for name in ("rho_rayleigh", "rho_shadow"):
            v = getattr(self, name)
            if not 0.0 <= v < 1.0:
                raise ValueError(f"{name} must be in [0, 1)")
        if self.fading not in ("rayleigh_lognormal", "awgn"):
            raise ValueError(f"unknown fading model {self.fading!r}")

    @property
    def num_users(self) -> int:
        return len(self.powers)


def _user_rng(config: ChannelConfig, user_index: int) -> np.random.Generator:
    return np.random.default_rng([config.seed & 0xFFFFFFFF, 0xFAD1, user_index])


def gen_fading(num_slots: int, config: ChannelConfig, user_index: int) -> np.ndarray:
    """Complex gain sequence alpha_i for one user over num_slots slots."""
    if num_slots < 1:
        raise ValueError("num_slots must be >= 1")
    p = config.powers[user_index]
    if config.fading == "awgn":
        return np.full(num_slots, np.sqrt(p), dtype=np.complex128)

    rng = _user_rng(config, user_index)
    n = num_slots + _WARMUP_SLOTS
    rho = config.rho_rayleigh
    innov = np.sqrt(0.5) * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
    h = np.empty(n, dtype=np.complex128)
    h[0] = innov[0]
    if rho == 0.0:
        h = innov
    else:
        gain = np.sqrt(1.0 - rho * rho)
        for i in range(1, n):
            h[i] = rho * h[i - 1] + gain * innov[i]

    sig = config.sigma_shadow_db
    if sig > 0.0:
        rho_s = config.rho_shadow
        g = rng.standard_normal(n) * sig   # dB-domain Gaussian, std sigma
        if rho_s > 0.0:
            gain_s = np.sqrt(1.0 - rho_s * rho_s)
            for i in range(1, n):
                g[i] = rho_s * g[i - 1] + gain_s * g[i]
        # amplitude factor 10^(g/20); divide by the lognormal power mean so
        # that E[|alpha|^2] stays exactly P
        s_ln = sig * _LN10_OVER_20
        shadow = np.exp(g * _LN10_OVER_20) / np.exp(s_ln * s_ln)
        h = h * shadow

    return np.sqrt(p) * h[_WARMUP_SLOTS:]


def draw_noise(m: int, n0: float, rng: np.random.Generator) -> np.ndarray:
    """Circular complex Gaussian noise vector, total variance n0 per sample."""
    return np.sqrt(n0 / 2.0) * (rng.standard_normal(m) + 1j * rng.standard_normal(m))


def superpose(active, m: int, noise: np.ndarray) -> np.ndarray:
    """Received slot samples: sum of alpha_n * x_n over active users plus noise.

    `active` is an iterable of (symbols, alpha) pairs; a shared noise
    realization is passed in explicitly, which keeps superposition exactly
    linear in the active set (the property cancellation relies on).
    """
    r = np.array(noise, dtype=np.complex128, copy=True)
    if r.shape[0] != m:
        raise ValueError("noise length does not match m")
    for symbols, alpha in active:
        if symbols.shape[0] != m:
            raise ValueError("all passes must have the same symbol count m")
        r += alpha * symbols
    return r


@dataclass
class SlotChannel:
    """Pre-drawn fading for every user plus a noise stream, one run's worth."""

    config: ChannelConfig
    num_slots: int
    m: int                                   # symbols per slot
    alphas: np.ndarray = field(init=False)   # [num_users, num_slots]
    _noise_rng: np.random.Generator = field(init=False)

    def __post_init__(self):
        self.alphas = np.stack([
            gen_fading(self.num_slots, self.config, u)
            for u in range(self.config.num_users)
        ]) if self.config.num_users else np.zeros(
            (0, self.num_slots), dtype=np.complex128)
        self._noise_rng = np.random.default_rng(
            [self.config.seed & 0xFFFFFFFF, 0x401E])

    def observe(self, slot: int, transmissions) -> np.ndarray:
        """One slot observation; transmissions is a list of (user, symbols)."""
        noise = draw_noise(self.m, self.config.N0, self._noise_rng)
        return superpose(
            [(sym, self.alphas[u, slot]) for u, sym in transmissions],
            self.m, noise)
