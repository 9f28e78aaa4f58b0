"""Smooth Weyl sums, Diophantine data of frequencies, major arcs and the
factorisation triple used to split smooth numbers into bilinear form.

Phases n^k theta mod 1 are reduced exactly.  A float theta is an exact binary
rational, so theta = m/2^64 + rest with integer m and 0 <= rest < 2^-64; the first
part is reduced with wrapping uint64 products (n^k m mod 2^64 is all that matters),
the second is tiny and evaluated in floating point.  Rationals with small
denominator are reduced with integer arithmetic mod q.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterator

import numpy as np

from .config import DEFAULT_CONSTANTS, Constants
from .errors import CapacityError, DomainError
from .saddle import solve_alpha
from .sieve import SmoothWindow, factorize, iter_tables, psi

TWO64 = 2**64
# above this size of n^k the float tail of the phase loses accuracy; use Python ints
_FLOAT_TAIL_LIMIT = 2**74


def _as_fraction(theta) -> Fraction:
    if isinstance(theta, Fraction):
        return theta
    if isinstance(theta, (int, np.integer)):
        return Fraction(int(theta))
    theta = float(theta)
    if not math.isfinite(theta):
        raise DomainError(f"theta must be finite, got {theta}")
    return Fraction(theta)


def phases(n: np.ndarray, k: int, theta, max_n: int | None = None) -> np.ndarray:
    """n^k theta mod 1 for an int64 array n >= 0, as floats in [0, 1)."""
    if k < 1:
        raise DomainError(f"degree k must be >= 1, got {k}")
    n = np.asarray(n, dtype=np.int64)
    th = _as_fraction(theta) % 1
    if th == 0 or n.size == 0:
        return np.zeros(n.shape)
    q = th.denominator
    if q < 2**31:
        a = th.numerator
        r = n % q
        acc = r.copy()
        for _ in range(k - 1):
            acc = acc * r % q
        return (acc * a % q) / q
    top = int(n.max()) if max_n is None else max_n
    if top**k > _FLOAT_TAIL_LIMIT:
        num = th.numerator
        return np.array([(int(v) ** k * num % q) / q for v in n.tolist()])
    m1 = math.floor(th * TWO64)
    rest = float(th - Fraction(m1, TWO64))
    u = n.astype(np.uint64)
    acc = u.copy()
    for _ in range(k - 1):
        acc *= u
    head = (acc * np.uint64(m1)).astype(float) * (1.0 / TWO64)
    tail = n.astype(float) ** k * rest
    return np.mod(head + tail, 1.0)


def _fsum_complex(parts: list[complex]) -> complex:
    return complex(math.fsum(p.real for p in parts), math.fsum(p.imag for p in parts))


def _exp_sum(ph: np.ndarray) -> complex:
    ang = 2 * math.pi * ph
    return complex(math.fsum(np.cos(ang)), math.fsum(np.sin(ang)))


def _smooth_chunks(x: int, w: SmoothWindow) -> Iterator[np.ndarray]:
    for t in iter_tables(1, x + 1):
        nums = t.numbers()[t.smooth_mask(w)]
        if nums.size:
            yield nums


def weyl_sum(x: int, w: SmoothWindow, k: int, theta) -> complex:
    """E_k(x, [y', y]; theta) = sum over smooth n <= x of e(theta n^k).

    Segments are summed independently and merged in ascending order with fsum.
    """
    x = int(x)
    parts = [_exp_sum(phases(nums, k, theta, max_n=x)) for nums in _smooth_chunks(x, w)]
    return _fsum_complex(parts)


# ---------------------------------------------------------------------------
# Diophantine approximation


@dataclass(frozen=True)
class RationalApprox:
    a: int
    q: int
    err: float      # |q theta - a|
    theta: float

    def quality(self, x: float, k: int) -> float:
        """Q = q + x^k ||q theta||."""
        return self.q + float(x) ** k * self.err


def convergents(theta, q_max: int | None = None) -> Iterator[tuple[int, int]]:
    """Continued-fraction convergents p/q of theta (exact), stopping past q_max."""
    th = _as_fraction(theta)
    a = math.floor(th)
    p_prev, q_prev, p, q = 1, 0, a, 1
    yield p, q
    rem = th - a
    while rem != 0:
        th = 1 / rem
        a = math.floor(th)
        rem = th - a
        p, p_prev = a * p + p_prev, p
        q, q_prev = a * q + q_prev, q
        if q_max is not None and q > q_max:
            return
        yield p, q


def _approx(theta, p: int, q: int) -> RationalApprox:
    th = _as_fraction(theta)
    return RationalApprox(p, q, float(abs(q * th - p)), float(th))


def dirichlet_approx(theta, q_max: int) -> RationalApprox:
    """The convergent a/q with q <= q_max minimising ||q theta||."""
    if q_max < 1:
        raise DomainError(f"q_max must be >= 1, got {q_max}")
    *_, (p, q) = convergents(theta, q_max)
    return _approx(theta, p, q)


def distance_to_nearest_integer(v: Fraction) -> Fraction:
    f = v % 1
    return min(f, 1 - f)


@dataclass(frozen=True)
class MajorArcResult:
    member: bool
    a: int | None
    q: int | None
    distance: float | None   # |q theta - a| of the witness
    tolerance: float         # Q x^-k


def _brute_major_arc(th: Fraction, q_bound: int, tol: Fraction):
    for q in range(1, q_bound + 1):
        for a in (math.floor(q * th), math.ceil(q * th), 0, q - 1):
            if 0 <= a < q and math.gcd(a, q) == 1 and abs(q * th - a) <= tol:
                return a, q
    return None


def major_arc_member(theta, Q_param: float, x: float, k: int) -> MajorArcResult:
    """Is theta in the union of {|q theta - a| <= Q x^-k} over coprime 0 <= a < q <= Q?"""
    th = _as_fraction(theta)
    if not 0 <= th < 1:
        raise DomainError(f"theta must lie in [0, 1), got {float(th)}")
    if Q_param < 1:
        raise DomainError(f"Q must be >= 1, got {Q_param}")
    q_bound = math.floor(Q_param)
    tol = Fraction(Q_param) * Fraction(x) ** (-k)
    cands = list(convergents(th, q_bound))
    for p, q in cands:
        if p < q and abs(q * th - p) <= tol:
            return MajorArcResult(True, p, q, float(abs(q * th - p)), float(tol))
    # Convergents are best approximations, so a miss is final unless the best one is
    # the excluded pair a = q = 1 or the tolerance is so wide that non-nearest a count.
    if tol >= Fraction(1, 2) or cands[-1] == (1, 1):
        if q_bound > 10**6:
            raise CapacityError(f"exhaustive major-arc scan up to Q={q_bound} is too large")
        hit = _brute_major_arc(th, q_bound, tol)
        if hit:
            a, q = hit
            return MajorArcResult(True, a, q, float(abs(q * th - a)), float(tol))
    return MajorArcResult(False, None, None, None, float(tol))


def best_quality_approx(theta, q_max: int, x: float, k: int) -> RationalApprox:
    """Among convergents with q <= q_max, the one minimising q + x^k ||q theta||."""
    cands = [_approx(theta, p, q) for p, q in convergents(theta, max(1, int(q_max)))]
    return min(cands, key=lambda r: (r.quality(x, k), r.q))


# ---------------------------------------------------------------------------
# factorisation triple


@dataclass(frozen=True)
class FactorTriple:
    u: int
    v: int
    p: int
    n: int


def prime_factors_desc(n: int) -> list[int]:
    out = []
    for p, e in factorize(n):
        out.extend([p] * e)
    return sorted(out, reverse=True)


def factor_triple(n: int, M: int, w: SmoothWindow, factors: list[int] | None = None) -> FactorTriple:
    """Split n = u v where v collects the largest prime factors (with multiplicity, in
    decreasing order) until the running product first exceeds M; p is the smallest
    prime in v.  ``factors`` may supply the prime factors of n to skip factorising."""
    if n <= M:
        raise DomainError(f"need n > M, got n={n}, M={M}")
    fs = sorted(factors, reverse=True) if factors is not None else prime_factors_desc(n)
    if not all(w.admits_prime(p) for p in fs):
        raise DomainError(f"{n} is not [{w.y_lo}, {w.y_hi}]-smooth")
    v = 1
    for p in fs:
        v *= p
        if v > M:
            return FactorTriple(n // v, v, p, n)
    raise AssertionError("unreachable: product of all factors is n > M")


def check_triple(t: FactorTriple, M: int, w: SmoothWindow) -> list[str]:
    """Names of the triple properties that fail (empty when all hold)."""
    bad = []
    if t.u * t.v != t.n:
        bad.append("u*v == n")
    if t.v % t.p:
        bad.append("p | v")
    if not all(t.p <= f <= w.y_hi for f in prime_factors_desc(t.v)):
        bad.append("v in S([p, y])")
    if not M < t.v <= M * t.p:
        bad.append("M < v <= M p")
    if t.u > 1 and not all(w.y_lo <= f <= t.p for f in prime_factors_desc(t.u)):
        bad.append("u in S([y', p])")
    return bad


# ---------------------------------------------------------------------------
# dichotomy


@dataclass
class DichotomyReport:
    theta: float
    k: int
    ratio: float              # |E| / Psi
    weyl: complex
    psi: int
    branch: str               # "major" or "minor"
    witness: tuple | None     # (a, q) of the major-arc membership
    approx: tuple             # (a, q) minimising Q over convergents with q <= x^0.1
    Q_quality: float
    alpha: float
    envelope_major: float     # Q^(-c + 2(1 - alpha)) (log x)^5, relative to Psi
    envelope_minor: float     # x^(1 - c) / Psi
    regime_ok: bool
    params: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["weyl"] = [self.weyl.real, self.weyl.imag]
        return d


def dichotomy_report(x: int, w: SmoothWindow, k: int, theta,
                     constants: Constants = DEFAULT_CONSTANTS) -> DichotomyReport:
    """|E_k| / Psi together with the major/minor arc classification at Q = x^(1/12)."""
    x = int(x)
    E = weyl_sum(x, w, k, theta)
    total = psi(x, w)
    th = _as_fraction(theta) % 1
    arc = major_arc_member(th, x ** (1 / 12), x, k)
    best = best_quality_approx(th, math.floor(x**0.1), x, k)
    Qq = best.quality(x, k)
    alpha = solve_alpha(x, w.y_hi).alpha
    c = constants.weyl_c
    log_x = math.log(x)
    env_major = Qq ** (-c + 2 * (1 - alpha)) * log_x**5
    env_minor = x ** (1 - c) / total if total else math.inf
    k_prime = math.log(w.y_lo) / math.log(log_x) if w.y_lo > 1 else 0.0
    K = max(2.0, 2.0 * k_prime)
    regime = log_x**K < w.y_hi <= x ** (1 / (4 * k))
    return DichotomyReport(float(th), k, abs(E) / total if total else 0.0, E, total,
                           "major" if arc.member else "minor",
                           (arc.a, arc.q) if arc.member else None, (best.a, best.q), Qq, alpha,
                           env_major, env_minor, regime,
                           dict(x=x, window=w.as_tuple(), k=k, c=c))
