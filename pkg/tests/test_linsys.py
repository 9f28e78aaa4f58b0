import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from smoothnum.errors import CapacityError, DomainError
from smoothnum.linsys import (Box, LinearSystem, Simplex, abc_census, abc_system, count_solutions,
                              identity_system, local_factor, parse_descriptor, singular_series)
from smoothnum.sieve import SmoothWindow, primes_below

import oracles


def _beta_naive(sys, p):
    tot = 0
    for u in itertools.product(range(p), repeat=sys.s):
        if all((sum(c * x for c, x in zip(row, u)) + a) % p for row, a in zip(sys.psi, sys.shifts)):
            tot += 1
    return Fraction(tot * p**sys.r, (p - 1) ** sys.r * p**sys.s)


def test_abc_local_factors():
    sys = abc_system()
    assert local_factor(sys, 2).exact == 0
    assert local_factor(sys, 5).exact == Fraction(15, 16)
    for p in (2, 3, 5, 7, 11):
        assert local_factor(sys, p, "enumerate").exact == local_factor(sys, p, "inclusion").exact


def test_identity_factor_is_one():
    for s in (1, 2, 3):
        for p in (2, 3, 7):
            assert local_factor(identity_system(s), p).exact == 1


systems = st.builds(
    lambda rows, shifts: (rows, shifts[: len(rows)]),
    st.lists(st.lists(st.integers(-3, 3), min_size=2, max_size=2).filter(any), min_size=1, max_size=4),
    st.lists(st.integers(-4, 4), min_size=4, max_size=4),
)


@given(systems, st.sampled_from([2, 3, 5, 7]))
@settings(max_examples=40)
def test_dual_path_against_naive(data, p):
    rows, shifts = data
    sys = LinearSystem.of(rows, shifts, Box.of([0, 0], [1, 1]))
    ref = _beta_naive(sys, p)
    assert local_factor(sys, p, "enumerate").exact == ref
    assert local_factor(sys, p, "inclusion").exact == ref


def test_factor_relabelling_invariance():
    base = LinearSystem.of([[1, 0], [0, 1], [1, 1]], [0, 1, 2], Box.of([0, 0], [1, 1]))
    perm = LinearSystem.of([[1, 1], [1, 0], [0, 1]], [2, 0, 1], Box.of([0, 0], [1, 1]))
    swap = LinearSystem.of([[0, 1], [1, 0], [1, 1]], [0, 1, 2], Box.of([0, 0], [1, 1]))
    for p in (2, 3, 5, 13):
        b = local_factor(base, p).exact
        assert local_factor(perm, p).exact == b == local_factor(swap, p).exact


def test_factor_decay():
    sys = abc_system()
    C = max(p**2 * abs(local_factor(sys, p).beta - 1) for p in primes_below(500).tolist() if p > 3)
    assert C <= 4


def test_series_tail_stabilises():
    sys = LinearSystem.of([[1, 0], [0, 1], [1, 1]], [1, 1, 1], Box.of([0, 0], [1, 1]))
    big = singular_series(sys, 2000).value
    half = singular_series(sys, 1000).value
    assert abs(big - half) <= 1e-3


def test_series_examples():
    assert singular_series(abc_system(), 3).value == 0.0
    rep = singular_series(identity_system(), 100)
    assert rep.value == 1.0 and len(rep.partial) == 25
    with pytest.raises(DomainError):
        singular_series(abc_system(), 1)


def test_local_factor_errors():
    with pytest.raises(DomainError):
        local_factor(abc_system(), 4)
    with pytest.raises(DomainError):
        local_factor(abc_system(), 5, "magic")
    big = LinearSystem.of([[1] * 6], [0], Box.of([0] * 6, [1] * 6))
    with pytest.raises(CapacityError):
        local_factor(big, 101, "enumerate")


def test_bodies():
    b = Box.of([0, Fraction(1, 2)], [1, 2])
    assert b.volume() == Fraction(3, 2) and len(b.vertices()) == 4
    s = Simplex.of([[0, 0], [1, 0], [0, 1]])
    assert s.volume() == Fraction(1, 2)
    s3 = Simplex.of([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert s3.volume() == Fraction(1, 6)
    with pytest.raises(DomainError):
        Simplex.of([[0, 0], [1, 1], [2, 2]])


@given(st.integers(1, 30), st.integers(1, 30))
def test_lattice_count_box(a, b):
    # (0, a/b]^2 scaled by N = b: half-open, so exactly a^2 points
    sys = LinearSystem.of([[1, 0], [0, 1]], [0, 0], Box.of([0, 0], [Fraction(a, b)] * 2))
    rep = count_solutions(sys, b, SmoothWindow(1, 10**6))
    assert rep.points == a * a


def test_lattice_count_simplex_closed():
    rep = count_solutions(abc_system(), 10, SmoothWindow(1, 100))
    assert rep.points == 66          # closed triangle with legs 10
    assert rep.value == 45           # n1, n2 >= 1 and n1 + n2 <= 10
    assert not rep.contained


def test_count_matches_brute_force():
    N, w = 300, SmoothWindow(1, 7)
    rep = count_solutions(abc_system(), N, w)
    ref = sum(1 for a in range(1, N) for b in range(1, N - a + 1)
              if oracles.is_smooth(a, 1, 7) and oracles.is_smooth(b, 1, 7) and oracles.is_smooth(a + b, 1, 7))
    assert rep.value == ref == abc_census(N, w).count


def test_abc_exact_when_everything_smooth():
    N = 200
    rep = abc_census(N, SmoothWindow(1, N))
    assert rep.count == N * (N - 1) // 2 and rep.psi == N
    with pytest.raises(CapacityError):
        abc_census(10**7, SmoothWindow(1, 100))


def test_abc_coprime_subset():
    w = SmoothWindow(1, 30)
    assert abc_census(3000, w, True).count <= abc_census(3000, w).count


def test_abc_odd_window_is_empty():
    assert count_solutions(abc_system(), 2000, SmoothWindow(3, 100)).value == 0


def test_weighted_count_near_prediction():
    rep = count_solutions(abc_system(), 2000, SmoothWindow(1, math.log(2000) ** 3), weighted=True)
    assert 0.5 <= rep.ratio <= 2.0


DESC = """
# A + B = C
s 2
r 3
form 1 0
form 0 1
form 1 1
shift 0 0 0
body simplex 0 0 ; 1 0 ; 0 1
N 3000
y 100
yprime 1
"""


def test_descriptor_roundtrip():
    sys, extra = parse_descriptor(DESC)
    assert sys == abc_system()
    assert extra == {"N": 3000.0, "y": 100.0, "yprime": 1.0}
    again, _ = parse_descriptor(sys.canonical())
    assert again == sys
    box = LinearSystem.of([[1, 2], [3, 1]], [1, 0], Box.of([0, 0], [Fraction(1, 2), 1]))
    assert parse_descriptor(box.canonical())[0] == box


@pytest.mark.parametrize("text", [
    "form 1 0\n",
    "form 1 0\nform 2 0\nbody box 0 0 1 1\n",
    "s 3\nform 1 0\nbody box 0 0 1 1\n",
    "form 1 x\nbody box 0 0 1 1\n",
    "frob 2\n",
    "form 1 0\nbody sphere 1\n",
])
def test_descriptor_errors(text):
    with pytest.raises(DomainError):
        parse_descriptor(text)
