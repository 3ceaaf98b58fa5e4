"""Plain-text codec test vectors for cross-checking ports of the codec.

The emitted file freezes: the 64-bit mix on reference inputs, spine chains
for fixed messages, per-pass constellation indices, and CRC values.  All
values are hex; symbol entries are grid indices (exact integers), not floats,
so the file is stable across platforms.
"""

import numpy as np

from .hashing import mix64, symbol_word
from .spinal import SpinalParams, constellation_table, crc16, spine_states

_MIX_INPUTS = (0, 1, 0xDEADBEEF, 0xFFFFFFFFFFFFFFFF)

_SPINE_CASES = (
    # (k, message bits as hex string, bit length)
    (8, "0000", 16),
    (8, "A5C3", 16),
    (2, "A5C3", 16),
    (4, "0123456789ABCDEF", 64),
)

_PASS_CASES = (
    # (k, c, message hex, bit length, pass index)
    (8, 6, "0000", 16, 0),
    (8, 6, "0000", 16, 1),
    (8, 6, "A5C3", 16, 0),
    (8, 2, "A5C3", 16, 5),
)

_CRC_CASES = (
    ("0" * 48, 192),          # all-zero payload
    ("F" * 48, 192),
    ("313233343536373839", 72),   # ASCII "123456789", standard check input
)


def _hex_to_bits(hexstr: str, nbits: int) -> np.ndarray:
    value = int(hexstr, 16)
    return np.array([(value >> (nbits - 1 - i)) & 1 for i in range(nbits)],
                    dtype=np.uint8)


def vector_lines() -> list[str]:
    lines = ["# codec test vectors: 64-bit mix, spine chains, pass symbol "
             "indices, CRC-16/CCITT", "#"]
    for x in _MIX_INPUTS:
        lines.append(f"mix64 in=0x{x:016X} out=0x{mix64(x):016X}")
    for k, msg, nbits in _SPINE_CASES:
        states = spine_states(_hex_to_bits(msg, nbits), k)
        lines.append(f"spine k={k} msg={msg} states="
                     + ",".join(f"{int(s):016X}" for s in states))
    for k, c, msg, nbits, p in _PASS_CASES:
        states = spine_states(_hex_to_bits(msg, nbits), k)
        idx = [int(symbol_word(int(s), p)) & ((1 << c) - 1) for s in states]
        lines.append(f"pass k={k} c={c} msg={msg} pass={p} idx="
                     + ",".join(str(i) for i in idx))
    for payload_hex, nbits in _CRC_CASES:
        crc = crc16(_hex_to_bits(payload_hex, nbits))
        lines.append(f"crc bits={nbits} payload={payload_hex} crc={crc:04X}")
    return lines


def write_vectors(path) -> None:
    import pathlib
    path = pathlib.Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(vector_lines()) + "\n")
