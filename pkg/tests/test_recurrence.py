import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from smoothnum.errors import DomainError
from smoothnum.recurrence import (best_denominator, bootstrap_audit, bootstrap_grid, census,
                                  density_excess, interval_grid, recover_q)
from smoothnum.sieve import SmoothWindow, psi, smooth_numbers

W = SmoothWindow(1, 1000)


def test_theta_zero_all_hits():
    rc = census(10**5, W, 1, 0, 0.01)
    assert rc.fraction == 1.0 and rc.hits == rc.total == psi(10**5, W)
    assert recover_q(rc, 100, 10**5).q == 1


@pytest.mark.parametrize("q", [2, 3, 5, 9, 12])
@pytest.mark.parametrize("k", [1, 2])
def test_rational_hits_are_divisibility(q, k):
    # with eps < 1/q, ||n^k a/q|| <= eps iff q | n^k
    rc = census(20000, SmoothWindow(1, 100), k, Fraction(1, q), 0.5 / q - 1e-9)
    ns = smooth_numbers(1, 20001, SmoothWindow(1, 100)).tolist()
    assert rc.hits == sum(1 for n in ns if pow(n, k, q) == 0)


@given(st.floats(0, 1, exclude_max=True), st.sampled_from([0.01, 0.05, 0.2]))
@settings(max_examples=25)
def test_symmetries(theta, eps):
    w = SmoothWindow(1, 50)
    a = census(5000, w, 2, theta, eps)
    th = Fraction(theta)
    assert census(5000, w, 2, 1 - th, eps).hits == a.hits
    assert census(5000, w, 2, th + 3, eps).hits == a.hits
    assert census(5000, w, 2, theta, min(0.49, 2 * eps)).hits >= a.hits


def test_census_sample_are_hits():
    th = Fraction(1, 7)
    rc = census(10**4, W, 1, th, 0.01)
    assert rc.sample and all(n % 7 == 0 for n in rc.sample)


def test_census_examples():
    rc = census(10**6, W, 1, math.sqrt(2) - 1, 0.05)
    assert abs(rc.fraction - 0.1) <= 0.01
    rec = recover_q(rc, 100, 10**6)
    assert rec.q == 70 and not rec.certified
    rc = census(10**6, W, 1, Fraction(1, 7) + Fraction(1, 10**12), 1e-3)
    rec = recover_q(rc, 1000, 10**6)
    assert rec.q == 7 and rec.certified


def test_eps_domain():
    with pytest.raises(DomainError):
        census(100, W, 1, 0.1, 0.5)
    with pytest.raises(DomainError):
        census(100, W, 1, 0.1, 0.0)


def test_best_denominator_exhaustive():
    for q in range(1, 21):
        for a in range(q):
            if math.gcd(a, q) == 1:
                assert best_denominator(Fraction(a, q), 50) == (q, 0)


@given(st.floats(0, 1, exclude_max=True), st.integers(1, 300))
def test_best_denominator_is_optimal(theta, q_max):
    th = Fraction(theta)
    q, err = best_denominator(th, q_max)
    dists = [abs(j * th - round(j * th)) for j in range(1, q_max + 1)]
    assert err == min(dists) and q == 1 + dists.index(min(dists))


def test_interval_grid():
    grid = interval_grid(1000, 10)
    assert len(grid) >= 100
    assert all(1000 <= s and s + ell - 1 <= 2000 for s, ell in grid)
    assert {ell for _, ell in grid} == {10 * 2**j for j in range(7)}


def test_density_excess_floor():
    assert density_excess(10**4, SmoothWindow(1, 2 * 10**4), 10) == 1.0
    assert density_excess(10**4, SmoothWindow(1, 30), 10) >= 1.0


def test_bootstrap_examples():
    N = 10**5
    r = bootstrap_audit(0, 1, N, W, 100, 0.01)
    assert r.hypothesis_ok and r.verdict and r.branch_theta
    r = bootstrap_audit(Fraction(1, 10**12), 1, N, W, 100, 0.01)
    assert r.hypothesis_ok and r.verdict
    r = bootstrap_audit(0.3, 1, N, W, 100, 0.01)
    assert not r.theta_ok and r.verdict is None
    with pytest.raises(DomainError):
        bootstrap_audit(0, 1, N, W, N + 1, 0.01)


def test_bootstrap_explicit_delta_too_large():
    r = bootstrap_audit(Fraction(1, 10**9), 1, 10**4, W, 10, 0.01, delta=1.5)
    assert not r.hits_ok and r.verdict is None


@pytest.mark.slow
def test_bootstrap_grid_small():
    reps = bootstrap_grid(N=10**4, size=12)
    assert len(reps) == 12 and all(r.hypothesis_ok for r in reps)
    assert all(r.verdict for r in reps)
