import numpy as np

from spirap.hashing import (derive_seed, mix64, mix64_array, spine_step,
                            symbol_word, symbol_words_array)

# committed reference vectors for the documented mixing function
MIX_VECTORS = {
    0x0000000000000000: 0x0000000000000000,
    0x0000000000000001: 0x5692161D100B05E5,
    0x00000000DEADBEEF: 0x4E062702EC929EEA,
    0xFFFFFFFFFFFFFFFF: 0xB4D055FCF2CBBD7B,
}


def test_mix64_reference_vectors():
    for x, want in MIX_VECTORS.items():
        assert mix64(x) == want


def test_mix64_array_matches_scalar():
    xs = np.array(list(MIX_VECTORS) + [17, 2**63, 123456789], dtype=np.uint64)
    got = mix64_array(xs)
    assert all(int(g) == mix64(int(x)) for x, g in zip(xs, got))


def test_mix64_is_bijective_on_sample():
    rng = np.random.default_rng(0)
    xs = rng.integers(0, 2**63, size=20000, dtype=np.uint64)
    assert len({mix64(int(x)) for x in xs}) == len(set(int(x) for x in xs))


def test_spine_step_moves_zero_state_zero_chunk():
    assert spine_step(0, 0) != 0


def test_spine_step_distinct_chunks():
    outs = {spine_step(12345, ch) for ch in range(256)}
    assert len(outs) == 256


def test_symbol_word_array_matches_scalar():
    states = np.array([0, 1, 999, 2**60], dtype=np.uint64)
    for pidx in (0, 1, 31):
        got = symbol_words_array(states, pidx)
        assert all(int(g) == symbol_word(int(s), pidx)
                   for s, g in zip(states, got))


def test_derive_seed_sensitivity():
    base = derive_seed(42, "fig5", 0)
    assert base != derive_seed(42, "fig5", 1)
    assert base != derive_seed(43, "fig5", 0)
    assert base != derive_seed(42, "fig6", 0)
    assert base == derive_seed(42, "fig5", 0)
