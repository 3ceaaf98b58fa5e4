"""Rateless spinal encoder: hash-chain spine, per-pass symbol generation, CRC.

A message of n_total bits is split into L = n_total/k chunks.  The spine is
the chain s_i = mix(s_{i-1}, chunk_i) starting from the public constant
s_0 = 0.  Every pass emits one constellation symbol per spine value, so a
pass carries m = L symbols; the symbol bits for (spine value, pass index)
come from the fixed mixing function, which makes passes random-access:
regenerating pass 17 never requires generating passes 0..16.
"""

from dataclasses import dataclass

import numpy as np

from .hashing import MASK64, spine_step, symbol_word, symbol_words_array

CRC_BITS = 16
_CRC_POLY = 0x1021  # CCITT generator x^16+x^12+x^5+1, init 0xFFFF, MSB-first
_CRC_INIT = 0xFFFF


@dataclass(frozen=True)
class SpinalParams:
    """Code geometry: k bits per chunk, beam width B, c bits per symbol."""

    k: int = 8
    B: int = 256
    c: int = 6
    n_total: int = 208

    def __post_init__(self):
        if self.k not in (2, 4, 8):
            raise ValueError(f"k must be one of 2, 4, 8 (got {self.k})")
        if self.B < 1:
            raise ValueError("beam width B must be >= 1")
        if self.c % 2 != 0 or not 2 <= self.c <= 8:
            raise ValueError(f"c must be even and in [2, 8] (got {self.c})")
        if self.n_total % self.k != 0:
            raise ValueError(
                f"n_total={self.n_total} not divisible by k={self.k}")
        if self.L < 2:
            raise ValueError("need at least 2 chunks (n_total/k >= 2)")

    @property
    def L(self) -> int:
        """Number of chunks == symbols per pass (m)."""
        return self.n_total // self.k

    @property
    def m(self) -> int:
        return self.L

    @property
    def payload_bits(self) -> int:
        return self.n_total - CRC_BITS


@dataclass(frozen=True)
class Codeword:
    """Spine chain plus the message bits that produced it."""

    spine: np.ndarray        # uint64, length L
    message_bits: np.ndarray  # uint8 0/1, length n_total


@dataclass(frozen=True)
class Pass:
    """One timeslot's worth of symbols for a codeword."""

    symbols: np.ndarray  # complex128, length m
    pass_index: int


# ---------------------------------------------------------------------------
# CRC-16/CCITT (poly 0x1021, init 0xFFFF, MSB-first, no reflection, xorout 0)
# ---------------------------------------------------------------------------

def crc16(bits: np.ndarray) -> int:
    """CRC over a 0/1 bit array, MSB-first, any bit length."""
    reg = _CRC_INIT
    for b in np.asarray(bits, dtype=np.uint8):
        reg ^= int(b) << 15
        reg = ((reg << 1) ^ _CRC_POLY) & 0xFFFF if reg & 0x8000 else (reg << 1) & 0xFFFF
    return reg


def crc_attach(payload_bits: np.ndarray, params: SpinalParams) -> np.ndarray:
    """Append the 16 CRC bits; result has exactly n_total bits."""
    payload = np.asarray(payload_bits, dtype=np.uint8)
    if payload.size != params.payload_bits:
        raise ValueError(
            f"payload must be {params.payload_bits} bits (got {payload.size})")
    c = crc16(payload)
    tail = np.array([(c >> (15 - i)) & 1 for i in range(16)], dtype=np.uint8)
    return np.concatenate([payload, tail])


def crc_check(message_bits: np.ndarray, params: SpinalParams) -> bool:
    """True iff the trailing 16 bits are the CRC of the leading payload."""
    bits = np.asarray(message_bits, dtype=np.uint8)
    if bits.size != params.n_total:
        raise ValueError(f"message must be {params.n_total} bits (got {bits.size})")
    c = crc16(bits[:-CRC_BITS])
    tail = int("".join(str(int(b)) for b in bits[-CRC_BITS:]), 2)
    return c == tail


# ---------------------------------------------------------------------------
# Constellation: square grid, c/2 bits per axis, unit mean energy
# ---------------------------------------------------------------------------

def constellation_table(c: int) -> np.ndarray:
    """All 2^c points indexed by the c-bit pattern (I bits high, Q bits low).

    Axis levels are the odd integers -(M-1)..(M-1) with M = 2^(c/2), scaled so
    the mean energy over the full constellation is exactly 1.
    """
    if c % 2 != 0 or not 2 <= c <= 8:
        raise ValueError(f"c must be even and in [2, 8] (got {c})")
    half = c // 2
    M = 1 << half
    levels = 2 * np.arange(M) - (M - 1)          # -(M-1), ..., M-1 step 2
    scale = np.sqrt(3.0 / (2.0 * (M * M - 1)))   # mean of levels^2 is (M^2-1)/3
    idx = np.arange(1 << c)
    i_lvl = levels[idx >> half]
    q_lvl = levels[idx & (M - 1)]
    return (i_lvl + 1j * q_lvl) * scale


def map_symbol(c_bits: np.ndarray) -> complex:
    """Map exactly c bits (MSB-first, I bits then Q bits) to a grid point."""
    bits = np.asarray(c_bits, dtype=np.uint8)
    idx = 0
    for b in bits:
        idx = (idx << 1) | int(b)
    return complex(constellation_table(bits.size)[idx])


# ---------------------------------------------------------------------------
# Encoder
# ---------------------------------------------------------------------------

def bits_to_chunks(bits: np.ndarray, k: int) -> np.ndarray:
    """Pack a 0/1 array into k-bit chunk values, MSB-first within each chunk."""
    bits = np.asarray(bits, dtype=np.uint64).reshape(-1, k)
    weights = np.uint64(1) << np.arange(k - 1, -1, -1, dtype=np.uint64)
    return (bits * weights).sum(axis=1, dtype=np.uint64)


def spine_states(bits: np.ndarray, k: int) -> np.ndarray:
    """Hash-chain states over the chunks of a bit array (any chunk count >= 1)."""
    chunks = bits_to_chunks(bits, k)
    states = np.empty(chunks.size, dtype=np.uint64)
    s = 0
    for i, ch in enumerate(chunks):
        s = spine_step(s, int(ch))
        states[i] = s
    return states


def encode_spine(message_bits: np.ndarray, params: SpinalParams) -> Codeword:
    """Compute the spine chain of a full n_total-bit message."""
    bits = np.asarray(message_bits, dtype=np.uint8)
    if bits.size != params.n_total:
        raise ValueError(
            f"message must be {params.n_total} bits (got {bits.size})")
    if not np.isin(bits, (0, 1)).all():
        raise ValueError("message bits must be 0/1")
    return Codeword(spine=spine_states(bits, params.k), message_bits=bits.copy())


def generate_pass(codeword: Codeword, pass_index: int, params: SpinalParams) -> Pass:
    """Symbols of one pass: position i uses bits from (spine_i, pass_index)."""
    if pass_index < 0:
        raise ValueError("pass_index must be >= 0")
    words = symbol_words_array(codeword.spine, pass_index)
    table = constellation_table(params.c)
    idx = (words & np.uint64((1 << params.c) - 1)).astype(np.int64)
    return Pass(symbols=table[idx], pass_index=pass_index)


def pass_symbol(spine_value: int, pass_index: int, c: int) -> complex:
    """Single symbol for one spine value and pass (decoder-side hypothesis)."""
    w = symbol_word(spine_value & MASK64, pass_index)
    return complex(constellation_table(c)[w & ((1 << c) - 1)])


def random_payload(params: SpinalParams, rng: np.random.Generator) -> np.ndarray:
    return rng.integers(0, 2, size=params.payload_bits, dtype=np.uint8)
