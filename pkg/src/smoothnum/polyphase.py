"""Polynomial phases on R/Z in the monomial and binomial bases, the smoothness norm,
and correlations of the W-tricked weight g (or the Cramer model) with e(P(m)).

Coefficients are held as exact Fractions (a float is an exact binary rational), so
basis changes are exact integer-matrix transforms.  ``alpha_raw`` keeps the
unreduced binomial coefficients: reducing them mod 1 does not commute with the
inverse transform, since the integer-valued polynomials are not the integer
polynomials.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import DomainError
from .sieve import SmoothWindow, iter_tables, primes_below
from .weights import ALPHA_BUCKETS, WTrick, alpha_at, cramer_factor
from .weyl import _as_fraction, distance_to_nearest_integer, phases

MAX_DEGREE = 30


@lru_cache(maxsize=None)
def stirling2(n: int, k: int) -> int:
    if n == k:
        return 1
    if k == 0 or k > n:
        return 0
    return k * stirling2(n - 1, k) + stirling2(n - 1, k - 1)


@lru_cache(maxsize=None)
def stirling1(n: int, k: int) -> int:
    """Signed Stirling numbers of the first kind: x(x-1)...(x-n+1) = sum s(n,k) x^k."""
    if n == k:
        return 1
    if k == 0 or k > n:
        return 0
    return stirling1(n - 1, k - 1) - (n - 1) * stirling1(n - 1, k)


def _mono_to_binom(beta: Sequence[Fraction]) -> list[Fraction]:
    d = len(beta) - 1
    return [math.factorial(i) * sum((beta[j] * stirling2(j, i) for j in range(i, d + 1)), Fraction(0))
            for i in range(d + 1)]


def _binom_to_mono(alpha: Sequence[Fraction]) -> list[Fraction]:
    d = len(alpha) - 1
    return [sum((alpha[i] * Fraction(stirling1(i, j), math.factorial(i)) for i in range(j, d + 1)),
                Fraction(0))
            for j in range(d + 1)]


def _check_degree(coeffs: Sequence) -> None:
    if len(coeffs) == 0:
        raise DomainError("a polynomial needs at least one coefficient")
    if len(coeffs) - 1 > MAX_DEGREE:
        raise DomainError(f"degree {len(coeffs) - 1} exceeds the supported {MAX_DEGREE}")


@dataclass(frozen=True)
class PolyMod1:
    """P(n) = sum beta_j n^j = sum alpha_j binom(n, j) mod 1."""

    beta: tuple[Fraction, ...]        # monomial coefficients reduced to [0, 1)
    alpha_raw: tuple[Fraction, ...]   # binomial coefficients of beta, not reduced

    @classmethod
    def from_monomial(cls, coeffs: Sequence) -> "PolyMod1":
        _check_degree(coeffs)
        beta = tuple(_as_fraction(c) % 1 for c in coeffs)
        return cls(beta, tuple(_mono_to_binom(beta)))

    @classmethod
    def from_binomial(cls, coeffs: Sequence) -> "PolyMod1":
        _check_degree(coeffs)
        alpha = [_as_fraction(c) for c in coeffs]
        return cls.from_monomial(_binom_to_mono(alpha))

    @property
    def degree(self) -> int:
        return len(self.beta) - 1

    @property
    def alpha(self) -> tuple[Fraction, ...]:
        return tuple(a % 1 for a in self.alpha_raw)

    def __call__(self, n: int) -> Fraction:
        """P(n) mod 1, exactly."""
        return sum((b * n**j for j, b in enumerate(self.beta)), Fraction(0)) % 1

    def phases(self, m: np.ndarray) -> np.ndarray:
        """P(m) mod 1 for an integer array, each monomial reduced exactly."""
        m = np.asarray(m, dtype=np.int64)
        out = np.full(m.shape, float(self.beta[0]))
        for j, b in enumerate(self.beta[1:], start=1):
            if b:
                out += phases(m, j, b)
        return np.mod(out, 1.0)

    def describe(self) -> str:
        def fmt(b: Fraction) -> str:
            return str(b) if b.denominator <= 10**6 else repr(float(b))
        return " + ".join(f"{fmt(b)}*n^{j}" for j, b in enumerate(self.beta) if b) or "0"


def to_binomial_basis(p: PolyMod1) -> list[Fraction]:
    """alpha_0..alpha_d reduced mod 1."""
    return list(p.alpha)


def to_monomial(alpha_raw: Sequence) -> list[Fraction]:
    """Monomial coefficients (unreduced) of sum alpha_j binom(n, j)."""
    _check_degree(alpha_raw)
    return _binom_to_mono([_as_fraction(a) for a in alpha_raw])


def smoothness_norm(p: PolyMod1, N: float) -> float:
    """sup_{1 <= j <= d} N^j ||alpha_j|| (0 for constants)."""
    vals = [float(N) ** j * float(distance_to_nearest_integer(a))
            for j, a in enumerate(p.alpha_raw) if j >= 1]
    return max(vals, default=0.0)


# ---------------------------------------------------------------------------
# correlations


def _m_range(N: int, wt: WTrick) -> int:
    if wt.A > N:
        raise DomainError(f"A={wt.A} exceeds N={N}")
    return (N - wt.A) // wt.modulus


def _e_sum(ph: np.ndarray, weights: np.ndarray | None = None) -> tuple[float, float]:
    ang = 2 * math.pi * ph
    c, s = np.cos(ang), np.sin(ang)
    if weights is not None:
        c, s = c * weights, s * weights
    return math.fsum(c), math.fsum(s)


def _finish(re_parts: list[float], im_parts: list[float], scale: float) -> complex:
    return complex(math.fsum(re_parts) * scale, math.fsum(im_parts) * scale)


def _plain_sum(p: PolyMod1, m_max: int, chunk: int = 1 << 22) -> tuple[list[float], list[float]]:
    re, im = [], []
    for lo in range(1, m_max + 1, chunk):
        m = np.arange(lo, min(lo + chunk, m_max + 1), dtype=np.int64)
        a, b = _e_sum(p.phases(m))
        re.append(a)
        im.append(b)
    return re, im


def phase_correlation(N: int, w: SmoothWindow, wt: WTrick, p: PolyMod1,
                      buckets: int | None = ALPHA_BUCKETS, with_bound: bool = False):
    """(W~/N) sum_{1 <= m <= (N - A)/W~} (g^(W~, A)(m) - 1) e(P(m)).

    Smooth n <= N are streamed once with a running count for Psi(n, [y', y]).
    With ``with_bound`` also returns the triangle bound (W~/N) sum (g^(W~,A)(m) + 1).
    """
    N = int(N)
    Q, A = wt.modulus, wt.A
    m_max = _m_range(N, wt)
    ratio = wt.phi_ratio
    re, im = [], []
    g_total = []
    running = 0
    for t in iter_tables(1, N + 1):
        mask = t.smooth_mask(w)
        cum = running + np.cumsum(mask, dtype=np.int64)
        running = int(cum[-1]) if cum.size else running
        n = t.numbers()
        sel = mask & (n % Q == A % Q) & (n > A) if Q > 1 else mask & (n > A)
        idx = np.flatnonzero(sel)
        if idx.size == 0:
            continue
        nn = n[idx]
        g = ratio * nn / (alpha_at(nn, w.y_hi, buckets) * cum[idx])
        m = (nn - A) // Q
        a, b = _e_sum(p.phases(m), g)
        re.append(a)
        im.append(b)
        g_total.append(math.fsum(g))
    pr, pi = _plain_sum(p, m_max)
    scale = Q / N
    val = _finish(re + [-v for v in pr], im + [-v for v in pi], scale)
    if with_bound:
        return val, scale * (math.fsum(g_total) + m_max)
    return val


def cramer_phase_correlation(N: int, y_lo: float, wt: WTrick, p: PolyMod1,
                             chunk: int = 1 << 22) -> complex:
    """(W~/N) sum_m ((phi(W~)/W~) nu(W~ m + A) - 1) e(P(m)), nu the Cramer model at y'."""
    N = int(N)
    Q, A = wt.modulus, wt.A
    m_max = _m_range(N, wt)
    small = primes_below(y_lo).tolist()
    level = float(cramer_factor(y_lo)) * wt.phi_ratio
    re, im = [], []
    for lo in range(1, m_max + 1, chunk):
        m = np.arange(lo, min(lo + chunk, m_max + 1), dtype=np.int64)
        n = Q * m + A
        keep = np.ones(m.size, dtype=bool)
        for q in small:
            keep &= n % q != 0
        a, b = _e_sum(p.phases(m), np.where(keep, level, 0.0) - 1.0)
        re.append(a)
        im.append(b)
    return _finish(re, im, Q / N)

