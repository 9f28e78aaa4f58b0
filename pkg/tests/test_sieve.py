import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from smoothnum.errors import CapacityError, DomainError
from smoothnum.sieve import (SmoothWindow, build_factor_table, character_from_values,
                             dirichlet_characters, factorize, iter_tables, legendre_character,
                             primes_below, primes_up_to, principal_character, psi,
                             psi_character, psi_cumulative, psi_progression, residue_counts,
                             smooth_numbers, von_mangoldt)

import oracles

WINDOWS = [(1, 2), (1, 10), (3, 7), (2, 50), (10, 50), (50, 50), (1, 1)]


def test_factor_table_small():
    t = build_factor_table(2, 12)
    assert dict(zip(t.numbers().tolist(), t.lpf.tolist())) == \
        {2: 2, 3: 3, 4: 2, 5: 5, 6: 3, 7: 7, 8: 2, 9: 3, 10: 5, 11: 11}
    assert dict(zip(t.numbers().tolist(), t.spf.tolist()))[10] == 2


def test_factor_table_one():
    t = build_factor_table(1, 2)
    assert t.lpf.tolist() == [1] and t.spf.tolist() == [1]


@pytest.mark.parametrize("lo", [2, 10**5, 10**9 + 7])
def test_factor_table_matches_trial_division(lo):
    t = build_factor_table(lo, lo + 300)
    for n, s, l in zip(t.numbers().tolist(), t.spf.tolist(), t.lpf.tolist()):
        fs = oracles.prime_factors(n)
        assert (s, l) == (min(fs), max(fs))


def test_table_is_read_only():
    t = build_factor_table(2, 100)
    with pytest.raises(ValueError):
        t.lpf[0] = 5


def test_bad_ranges():
    with pytest.raises(DomainError):
        build_factor_table(10, 5)
    with pytest.raises(CapacityError):
        build_factor_table(1, 1 + 2**40)


def test_segments_cover_range_exactly():
    got = np.concatenate([t.numbers() for t in iter_tables(5, 12345)])
    assert got[0] == 5 and got[-1] == 12344 and np.all(np.diff(got) == 1)


@pytest.mark.parametrize("y_lo,y_hi", WINDOWS)
def test_psi_oracle(y_lo, y_hi):
    w = SmoothWindow(y_lo, y_hi)
    ref = oracles.smooth_list(3000, y_lo, y_hi)
    assert smooth_numbers(1, 3001, w).tolist() == ref
    for x in (1, 2, 17, 100, 2999, 3000):
        assert psi(x, w) == sum(1 for n in ref if n <= x)


def test_psi_spec_values():
    assert psi(10, SmoothWindow(1, 2)) == 4
    assert psi(100, SmoothWindow(1, 100)) == 100
    assert psi(0, SmoothWindow(1, 2)) == 0
    assert psi(100, SmoothWindow(3, 7)) == oracles.psi_naive(100, 3, 7)


def test_one_is_smooth_zero_is_not():
    w = SmoothWindow(5, 7)
    assert w.contains(1) and not w.contains(0)
    assert psi(1, w) == 1


def test_window_validation():
    with pytest.raises(DomainError):
        SmoothWindow(0.5, 3)
    with pytest.raises(DomainError):
        SmoothWindow(5, 3)


def test_psi_progression_values():
    w = SmoothWindow(1, 2)
    assert psi_progression(10, w, 2, 0) == 3
    assert psi_progression(10, w, 1, 0) == psi(10, w)
    w = SmoothWindow(1, 20)
    assert psi_progression(10**4, w, 3, 1) == oracles.psi_progression_naive(10**4, 1, 20, 3, 1)


@pytest.mark.parametrize("q", [1, 2, 7, 30, 97, 100])
def test_additivity(q):
    w = SmoothWindow(2, 50)
    assert sum(psi_progression(5000, w, q, a) for a in range(q)) == psi(5000, w)


def test_residue_counts_read_only():
    c = residue_counts(1000, SmoothWindow(1, 10), 7)
    with pytest.raises(ValueError):
        c[0] = 1


def test_cumulative():
    w = SmoothWindow(1, 30)
    c = psi_cumulative(500, 700, w)
    assert c[0] == psi(500, w) and c[-1] == psi(699, w)


@given(x=st.integers(1, 4000), lo=st.integers(1, 40), span=st.integers(0, 60))
def test_monotonicity(x, lo, span):
    w = SmoothWindow(lo, lo + span)
    assert psi(x, w) <= psi(x + 1, w)
    assert psi(x, w) <= psi(x, SmoothWindow(lo, lo + span + 1))
    assert psi(x, SmoothWindow(lo + 1, max(lo + 1, lo + span))) <= psi(x, w) or span == 0


def test_character_mod3_legendre():
    chi = legendre_character(3)
    # smooth n <= 10 for y = 2 are 1, 2, 4, 8: chi sums to 1 - 1 + 1 - 1
    assert psi_character(10, SmoothWindow(1, 2), chi) == 0
    assert chi(2) + chi(4) + chi(8) == -1


def test_principal_mod1():
    assert psi_character(1000, SmoothWindow(1, 7), principal_character(1)) == psi(1000, SmoothWindow(1, 7))


@pytest.mark.parametrize("q", [3, 4, 5, 8, 9, 12, 15, 16, 20])
def test_characters_form_the_dual_group(q):
    chars = dirichlet_characters(q)
    units = [a for a in range(q) if math.gcd(a, q) == 1]
    assert len(chars) == len(units) and chars[0].principal
    assert sum(c.principal for c in chars) == 1
    for c in chars:
        for a in range(q):
            for b in range(q):
                assert abs(c(a * b) - c(a) * c(b)) < 1e-12
    # orthogonality of rows
    for i, c in enumerate(chars):
        for j, d in enumerate(chars):
            s = sum(c(a) * d.conj(a) for a in units)
            assert abs(s - (len(units) if i == j else 0)) < 1e-9


@pytest.mark.parametrize("q", [3, 4, 7, 12, 20])
def test_character_orthogonality_recovers_progressions(q):
    w = SmoothWindow(1, 13)
    x = 20000
    chars = dirichlet_characters(q)
    for a in range(q):
        if math.gcd(a, q) != 1:
            continue
        val = sum(c.conj(a) * psi_character(x, w, c) for c in chars) / len(chars)
        assert abs(val - psi_progression(x, w, q, a)) < 1e-6


def test_legendre_matches_euler_criterion():
    for p in (3, 5, 7, 11, 13):
        chi = legendre_character(p)
        assert all(chi(n) == oracles.legendre(n, p) for n in range(3 * p))


def test_bad_character_table():
    with pytest.raises(DomainError):
        character_from_values(3, [0, 1, 1j])


@pytest.mark.parametrize("n,expected", [(8, math.log(2)), (6, 0.0), (97, math.log(97)), (1, 0.0)])
def test_von_mangoldt(n, expected):
    t = build_factor_table(1, 200)
    assert von_mangoldt(n, t) == pytest.approx(expected, abs=0)


def test_primes():
    assert primes_up_to(30).tolist() == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert primes_below(29).tolist()[-1] == 23
    assert [p for p in range(200) if oracles.is_prime(p)] == primes_up_to(199).tolist()


@given(st.integers(1, 10**9))
def test_factorize_roundtrip(n):
    fs = factorize(n)
    assert math.prod(p**e for p, e in fs) == n
    assert all(oracles.is_prime(p) for p, _ in fs)
