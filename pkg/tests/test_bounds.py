import numpy as np
import pytest

from spirap.bounds import BoundInputs, mud_bound, spirap_bound, tdma_bound


def test_mud_examples():
    assert mud_bound(BoundInputs(0, 0, 1)) == 0.0
    assert mud_bound(BoundInputs(3, 1, 1)) == pytest.approx(np.log2(5))
    assert mud_bound(BoundInputs(1, 1, 1)) == pytest.approx(np.log2(3))


def test_tdma_examples():
    assert tdma_bound(BoundInputs(1, 1, 1)) == pytest.approx(1.0)
    assert tdma_bound(BoundInputs(3, 1, 1)) == pytest.approx(1.5)
    assert tdma_bound(BoundInputs(9, 0, 2)) == pytest.approx(
        0.5 * np.log2(1 + 4.5))


def test_spirap_examples():
    # equal powers: interference-limited branch
    assert spirap_bound(BoundInputs(1, 1, 1)) == pytest.approx(2 * np.log2(1.5))
    # disparate powers: collapses onto the joint-detection bound
    assert spirap_bound(BoundInputs(3, 1, 1)) == pytest.approx(np.log2(5))
    # strong-user limit: ratio to the joint bound tends to one
    for p1 in (1e3, 1e6, 1e9):
        ratio = spirap_bound(BoundInputs(p1, 1, 1)) / mud_bound(BoundInputs(p1, 1, 1))
        assert ratio <= 1.0 + 1e-12
    assert spirap_bound(BoundInputs(1e9, 1, 1)) / mud_bound(
        BoundInputs(1e9, 1, 1)) == pytest.approx(1.0, abs=1e-6)


def test_validation():
    with pytest.raises(ValueError):
        BoundInputs(1, 1, 0)
    with pytest.raises(ValueError):
        BoundInputs(1, 2, 1)   # violates P1 >= P2
    with pytest.raises(ValueError):
        BoundInputs(-1, -2, 1)


def _random_grid(n, rng):
    p2 = 10 ** rng.uniform(-2, 3, n)
    p1 = p2 * 10 ** rng.uniform(0, 3, n)
    nn = 10 ** rng.uniform(-2, 2, n)
    return p1, p2, nn


def test_case2_identity_over_grid():
    # whenever A >= B the two-branch formula equals the joint bound exactly
    rng = np.random.default_rng(42)
    p1, p2, nn = _random_grid(10_000, rng)
    hits = 0
    for a, b, n in zip(p1, p2, nn):
        inp = BoundInputs(a, b, n)
        A = np.log2(1 + a / (b + n))
        Bv = np.log2(1 + b / n)
        if A >= Bv:
            hits += 1
            assert abs(spirap_bound(inp) - mud_bound(inp)) < 1e-12
    assert hits > 100   # the grid actually exercises case 2


def test_dominance_over_grid():
    rng = np.random.default_rng(43)
    p1, p2, nn = _random_grid(10_000, rng)
    for a, b, n in zip(p1, p2, nn):
        inp = BoundInputs(a, b, n)
        m = mud_bound(inp)
        assert spirap_bound(inp) <= m + 1e-12
        assert tdma_bound(inp) <= m + 1e-12


def test_continuity_at_case_boundary():
    # pick P1 so that A == B exactly, then check both branches agree and the
    # function is continuous through the boundary
    p2, n = 1.0, 1.0
    b = np.log2(1 + p2 / n)
    p1_star = (2 ** b - 1) * (p2 + n)
    a_star = np.log2(1 + p1_star / (p2 + n))
    assert a_star == pytest.approx(b, abs=1e-12)
    v_at = spirap_bound(BoundInputs(p1_star, p2, n))
    for eps in (1e-6, 1e-9):
        below = spirap_bound(BoundInputs(p1_star * (1 - eps), p2, n))
        above = spirap_bound(BoundInputs(p1_star * (1 + eps), p2, n))
        assert below == pytest.approx(v_at, abs=1e-5)
        assert above == pytest.approx(v_at, abs=1e-5)


def test_crossover_above_some_ratio():
    # for fixed P2, N there is a ratio beyond which the cancellation bound
    # beats the time-sharing bound (weak user at 10 dB, as in the two-user
    # rate sweep, where time sharing wins at equal powers)
    p2, n = 10.0, 1.0
    ratios_db = np.arange(0.0, 30.0, 0.5)
    diffs = []
    for rdb in ratios_db:
        inp = BoundInputs(p2 * 10 ** (rdb / 10), p2, n)
        diffs.append(spirap_bound(inp) - tdma_bound(inp))
    diffs = np.array(diffs)
    assert diffs[0] < 0          # equal powers: time sharing wins
    crossing = np.flatnonzero(diffs > 0)
    assert crossing.size > 0
    assert np.all(diffs[crossing[0]:] > 0)
