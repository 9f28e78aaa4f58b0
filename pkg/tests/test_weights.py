import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from smoothnum.errors import DomainError, HypothesisViolation
from smoothnum.saddle import solve_alpha
from smoothnum.sieve import SmoothWindow, psi
from smoothnum.weights import (BumpFunction, alpha_at, build_wtrick, cramer_block, cramer_factor,
                               cramer_model, euler_phi, gpy_majorant, tricked, tricked_block,
                               w_of, weight_g, weight_g_block, weight_h, weight_h_block)

import oracles


def test_g_values():
    w = SmoothWindow(1, 2)
    assert weight_g(8, w, buckets=None) == pytest.approx(8 / (solve_alpha(8, 2).alpha * 4))
    assert weight_g(6, w) == 0.0


def test_g_block_matches_scalar():
    w = SmoothWindow(2, 30)
    block = weight_g_block(500, 700, w)
    assert block.tolist() == [weight_g(n, w) for n in range(500, 700)]


def test_alpha_buckets_close_to_exact():
    y = 200.0
    ns = np.array([10**4, 3 * 10**5, 7 * 10**6])
    a = alpha_at(ns, y)
    b = alpha_at(ns, y, buckets=None)
    assert np.max(np.abs(a - b)) <= 1 / math.log(y)


def test_h_values():
    w = SmoothWindow(1, 100)
    N = 10**4
    alpha = solve_alpha(N, 100).alpha
    n = N  # 10^4 = 2^4 5^4 is smooth
    assert weight_h(n, N, w) == pytest.approx(N / (alpha * psi(N, w)))
    assert weight_h(10007, N, w) == 0.0
    with pytest.raises(DomainError):
        weight_h(N - 1, N, w)
    block = weight_h_block(N, N + 200, N, w)
    assert block.tolist() == pytest.approx([weight_h(m, N, w) for m in range(N, N + 200)])


def test_wtrick_desk_scale():
    wt = build_wtrick(10**8)
    assert wt.W == 1 and wt.w_of_n == pytest.approx(0.5 * math.log(math.log(math.log(1e8))))
    assert w_of(10**8) < 1


def test_wtrick_override():
    wt = build_wtrick(10**6, a_seed=1, w_override=5)
    assert wt.W == 6 and wt.A == 1 and wt.modulus == 6
    assert build_wtrick(10**6, a_seed=2, w_override=5).A == 5
    assert build_wtrick(10**6, w_override=5, inclusive=True).W == 30
    assert build_wtrick(10**6, w_override=5, q_extra=4).modulus == 24
    with pytest.raises(HypothesisViolation):
        build_wtrick(10**6, w_override=5, q_extra=7)
    with pytest.raises(DomainError):
        build_wtrick(100)


def test_tricked_trivial_modulus():
    w = SmoothWindow(1, 50)
    wt = build_wtrick(10**6, a_seed=0, w_override=2)
    assert wt.modulus == 1
    for m in (1, 48, 97, 1000):
        assert tricked("g", wt, m, w) == weight_g(m, w)


def test_tricked_vanishes_off_support():
    w = SmoothWindow(5, 200)
    wt = build_wtrick(10**6, w_override=5)
    vals = tricked_block("g", wt, 1, 2000, w)
    for m, v in zip(range(1, 2000), vals.tolist()):
        assert (v == 0) == (not oracles.is_smooth(6 * m + 1, 5, 200))
    assert vals[10] == pytest.approx(tricked("g", wt, 11, w))


def test_tricked_h_needs_anchor():
    wt = build_wtrick(10**6, w_override=5)
    with pytest.raises(DomainError):
        tricked("h", wt, 5, SmoothWindow(5, 200))


def test_bump():
    chi = BumpFunction()
    assert chi(0.0) == 1.0 and chi(1.0) == 0.0 and chi(-1.0) == 0.0
    assert chi(0.5) == 1.0 and chi(-0.3) == 1.0
    t = np.linspace(-1.5, 1.5, 301)
    v = chi(t)
    assert np.all((v >= 0) & (v <= 1)) and np.allclose(v, v[::-1])
    assert 0 < chi(0.75) < 1


def test_gpy_majorant():
    assert gpy_majorant(1, 10) == pytest.approx(math.log(10))
    assert gpy_majorant(101, 10) == pytest.approx(math.log(10))
    # n = 6: divisors below 10 from {2, 3} are 1, 2, 3, 6
    chi = BumpFunction()
    ref = math.log(10) * (1 - chi(math.log(2) / math.log(10)) - chi(math.log(3) / math.log(10))
                          + chi(math.log(6) / math.log(10))) ** 2
    assert gpy_majorant(6, 10) == pytest.approx(ref)


@given(st.integers(1, 10**6), st.sampled_from([3, 10, 30, 100]))
def test_gpy_nonnegative(n, y_lo):
    assert gpy_majorant(n, y_lo) >= 0


def test_cramer_values():
    assert cramer_model(12345, 2) == 1.0
    assert cramer_model(7, 3) == 2.0 and cramer_model(8, 3) == 0.0
    assert cramer_model(77, 10) == 0.0
    assert cramer_model(11, 10) == pytest.approx(210 / 48)
    assert cramer_factor(10) == Fraction(210, 48)


@pytest.mark.parametrize("y_lo", [3, 10, 20])
def test_cramer_mean(y_lo):
    assert abs(cramer_block(1, 10**6 + 1, y_lo).mean() - 1) <= 0.05


def test_euler_phi():
    assert [euler_phi(n) for n in (1, 2, 6, 9, 30, 97)] == [1, 1, 2, 6, 8, 96]


def test_h_majorised_by_cramer():
    # h <= C nu for y >= N^(1/4); the measured C at this scale is about 5.6
    N, y_lo = 10**6, 5
    w = SmoothWindow(y_lo, N**0.5)
    h = weight_h_block(N, 2 * N + 1, N, w)
    nu = cramer_block(N, 2 * N + 1, y_lo)
    assert np.all(h[nu == 0] == 0)
    C = float(np.max(h[nu > 0] / nu[nu > 0]))
    assert C <= 8.0
