import math

import pytest
from hypothesis import given, strategies as st

from smoothnum.config import DEFAULT_CONSTANTS
from smoothnum.errors import DomainError
from smoothnum.saddle import (alpha_main_term, brt_estimate, dilation_prediction, ht_estimate,
                              log_truncated_zeta, mv_product_bounds, restricted_euler,
                              saddle_function, solve_alpha, truncated_zeta)
from smoothnum.sieve import SmoothWindow, primes_up_to, psi


def test_truncated_zeta_values():
    assert truncated_zeta(1, 2) == pytest.approx(2.0, rel=1e-15)
    assert truncated_zeta(1, 10) == pytest.approx(105 / 24, rel=1e-14)
    assert truncated_zeta(60, 1000) == pytest.approx(1.0, abs=1e-15)


def test_truncated_zeta_domain():
    with pytest.raises(DomainError):
        truncated_zeta(0, 10)
    with pytest.raises(DomainError):
        truncated_zeta(1, 1.5)


def test_restricted_euler():
    assert restricted_euler([], 0.7) == 1.0
    assert restricted_euler([2], 1) == pytest.approx(0.5)
    assert restricted_euler([2, 3, 5], 0.8) == pytest.approx(math.prod(1 - p**-0.8 for p in (2, 3, 5)))


@pytest.mark.parametrize("x,y", [(1e4, 30), (1e6, 1000), (1e8, 1e4), (1e6, 200), (1e8, 400)])
def test_saddle_residual(x, y):
    ctx = solve_alpha(x, y)
    assert abs(ctx.residual) <= 1e-9 * math.log(x)
    assert abs(saddle_function(ctx.alpha, y, math.log(x))) <= 1e-9 * math.log(x)


def test_saddle_by_bisection_oracle():
    # independent bisection on the same equation with plain float sums
    x, y = 1e6, 500
    ps = primes_up_to(y).tolist()
    f = lambda s: sum(math.log(p) / (p**s - 1) for p in ps) - math.log(x)
    lo, hi = 1e-6, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if f(mid) > 0 else (lo, mid)
    assert solve_alpha(x, y).alpha == pytest.approx(lo, abs=1e-10)


def test_x_equals_y_is_near_one():
    ctx = solve_alpha(100, 100)
    assert ctx.alpha >= 0.9


def test_clamp_when_x_small():
    ctx = solve_alpha(10, 1000)
    assert ctx.clamped and ctx.alpha == 1.0


def test_alpha_monotone_grid():
    xs = [1e4, 1e5, 1e6, 1e7, 1e8]
    ys = [50, 200, 1000, 5000]
    for y in ys:
        vals = [solve_alpha(x, y).alpha for x in xs]
        assert all(a > b for a, b in zip(vals, vals[1:]))
    for x in xs:
        vals = [solve_alpha(x, y).alpha for y in ys]
        assert all(a < b for a, b in zip(vals, vals[1:]))


@given(c=st.floats(1.0, 2.0), e=st.floats(4, 8))
def test_alpha_local_stability(c, e):
    x = 10**e
    y = math.log(x) ** 3
    assert abs(solve_alpha(c * x, y).alpha - solve_alpha(x, y).alpha) <= 1.0 / math.log(y)


def test_main_term_close():
    x = 1e6
    y = math.log(x) ** 3
    assert abs(solve_alpha(x, y).alpha - alpha_main_term(x, y)) <= DEFAULT_CONSTANTS.alpha_C / math.log(y)


@pytest.mark.parametrize("x,y", [(1e4, 1e4), (1e5, 1e5), (1e6, 1e3)])
def test_ht_estimate_magnitude(x, y):
    exact = psi(int(x), SmoothWindow(1, y))
    est = ht_estimate(solve_alpha(x, y))
    assert 0.5 <= est / exact <= 2.0


def test_brt_reduces_to_ht():
    ctx = solve_alpha(1e6, 1000)
    assert brt_estimate(1e6, SmoothWindow(1, 1000), ctx) == ht_estimate(ctx)


def test_brt_small_prime_factor():
    ctx = solve_alpha(1e6, 1000)
    assert brt_estimate(1e6, SmoothWindow(3, 1000), ctx) == pytest.approx((1 - 2**-ctx.alpha) * ht_estimate(ctx))


def test_dilation():
    w = SmoothWindow(1, 1000)
    base = psi(10**6, w)
    assert dilation_prediction(10**6, w, 1) == base
    assert 0 < dilation_prediction(10**6, w, 1000) < base
    with pytest.raises(DomainError):
        dilation_prediction(10**6, w, 1001)
    with pytest.raises(DomainError):
        dilation_prediction(10**6, w, 0.5)


@pytest.mark.parametrize("x", [10**4, 10**5, 10**6])
@pytest.mark.parametrize("y", [20, 100, 1000])
def test_rankin_domination(x, y):
    count = psi(x, SmoothWindow(1, y))
    for sigma in (solve_alpha(x, y).alpha, 0.9, 1.0):
        assert count <= x**sigma * truncated_zeta(sigma, y)


def test_mv_envelope_examples():
    env = mv_product_bounds(1.0, 100)
    assert env.contains(truncated_zeta(1.0, 100)) and env.regime == "near-one"
    y = 1e4
    assert mv_product_bounds(1 - 4 / math.log(y), y).regime == "near-one"
    env = mv_product_bounds(0.5, y)
    assert env.regime == "small-sigma" and env.contains(truncated_zeta(0.5, y))
    with pytest.raises(DomainError):
        mv_product_bounds(0.1, 100)


@pytest.mark.parametrize("y", [50, 1000, 10**5, 10**6])
def test_mv_envelope_grid(y):
    ly = math.log(y)
    lo = 2 / ly
    for i in range(25):
        sigma = lo + (1 - lo) * i / 24
        env = mv_product_bounds(sigma, y)
        assert env.contains_log(log_truncated_zeta(sigma, y)), (sigma, y)
