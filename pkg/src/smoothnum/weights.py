"""Weighted indicators of [y', y]-smooth numbers, the W-trick, and the two majorants
(truncated divisor sum and Cramer model)."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

import numpy as np

from .errors import DomainError, HypothesisViolation
from .saddle import solve_alpha
from .sieve import (SmoothWindow, factorize, primes_below, primes_up_to, psi,
                    psi_cumulative, smooth_indicator)

ALPHA_BUCKETS = 64


def euler_phi(n: int) -> int:
    out = n
    for p, _ in factorize(n) if n > 1 else []:
        out = out // p * (p - 1)
    return out


# ---------------------------------------------------------------------------
# alpha(n, y) with bucketing


@lru_cache(maxsize=65536)
def _alpha_bucket(bucket: int, y: float, buckets: int) -> float:
    x = math.exp((bucket + 0.5) / buckets)
    return solve_alpha(max(x, 1.0), y).alpha


def alpha_at(n, y: float, buckets: int | None = ALPHA_BUCKETS):
    """alpha(n, y) for a scalar or an array of n.

    With ``buckets`` set, alpha is evaluated once per cell ``floor(buckets * log n)``.
    ``buckets=None`` solves exactly for every distinct n.
    """
    arr = np.atleast_1d(np.asarray(n, dtype=float))
    if buckets is None:
        uniq, inv = np.unique(arr, return_inverse=True)
        vals = np.array([solve_alpha(v, y).alpha for v in uniq.tolist()])
    else:
        cells = np.floor(np.log(arr) * buckets).astype(np.int64)
        uniq, inv = np.unique(cells, return_inverse=True)
        vals = np.array([_alpha_bucket(int(b), float(y), buckets) for b in uniq.tolist()])
    out = vals[inv].reshape(arr.shape)
    return float(out[0]) if np.ndim(n) == 0 else out


# ---------------------------------------------------------------------------
# g and h


def weight_g(n: int, w: SmoothWindow, buckets: int | None = ALPHA_BUCKETS) -> float:
    """g(n) = n / (alpha(n, y) Psi(n, [y', y])) on S([y', y]), zero elsewhere."""
    n = int(n)
    if n < 1 or not w.contains(n):
        return 0.0
    return n / (alpha_at(n, w.y_hi, buckets) * psi(n, w))


def weight_g_block(lo: int, hi: int, w: SmoothWindow, buckets: int | None = ALPHA_BUCKETS) -> np.ndarray:
    """weight_g on every n in ``[lo, hi)`` (lo >= 1)."""
    if lo < 1:
        raise DomainError(f"g is defined on positive integers, got lo={lo}")
    ind = smooth_indicator(lo, hi, w)
    cum = psi_cumulative(lo, hi, w)
    n = np.arange(lo, hi, dtype=np.int64)
    out = np.zeros(hi - lo)
    idx = np.flatnonzero(ind)
    if idx.size:
        alpha = alpha_at(n[idx], w.y_hi, buckets)
        out[idx] = n[idx] / (alpha * cum[idx])
    return out


def _h_scale(n_anchor: int, w: SmoothWindow) -> tuple[float, float]:
    alpha = solve_alpha(n_anchor, w.y_hi).alpha
    return alpha, n_anchor**alpha / (alpha * psi(n_anchor, w))


def weight_h(n: int, n_anchor: int, w: SmoothWindow) -> float:
    """h(n) = (N^alpha / Psi(N, [y', y])) n^(1 - alpha) / alpha on S, for N <= n <= 2N."""
    if not n_anchor <= n <= 2 * n_anchor:
        raise DomainError(f"h is defined on [N, 2N] = [{n_anchor}, {2 * n_anchor}], got n={n}")
    if not w.contains(n):
        return 0.0
    alpha, scale = _h_scale(n_anchor, w)
    return scale * n ** (1 - alpha)


def weight_h_block(lo: int, hi: int, n_anchor: int, w: SmoothWindow) -> np.ndarray:
    """weight_h on every n in ``[lo, hi)``, which must lie inside [N, 2N]."""
    if hi <= lo:
        return np.zeros(0)
    if lo < n_anchor or hi - 1 > 2 * n_anchor:
        raise DomainError(f"[{lo}, {hi}) leaves the dyadic window [{n_anchor}, {2 * n_anchor}]")
    alpha, scale = _h_scale(n_anchor, w)
    ind = smooth_indicator(lo, hi, w)
    out = np.zeros(hi - lo)
    idx = np.flatnonzero(ind)
    out[idx] = scale * (lo + idx).astype(float) ** (1 - alpha)
    return out


# ---------------------------------------------------------------------------
# W-trick


@dataclass(frozen=True)
class WTrick:
    n_scale: int
    w_of_n: float
    W: int
    A: int
    q_extra: int = 1
    inclusive: bool = False      # W over p <= w instead of p < w

    @property
    def modulus(self) -> int:
        """W~ = W q_extra, the modulus of the restriction n = W~ m + A."""
        return self.W * self.q_extra

    @property
    def phi_ratio(self) -> float:
        Q = self.modulus
        return euler_phi(Q) / Q


def w_of(n_scale: float) -> float:
    """w(N) = (1/2) log log log N."""
    return 0.5 * math.log(math.log(math.log(n_scale)))


def build_wtrick(n_scale: int, a_seed: int = 1, q_extra: int = 1,
                 w_override: float | None = None, inclusive: bool = False) -> WTrick:
    """Assemble W = prod_{p < w(N)} p and the least residue A >= a_seed coprime to W.

    ``w_override`` replaces w(N): at any computable N, w(N) < 2 and W = 1.
    """
    if w_override is None:
        if n_scale < math.exp(math.e**math.e):
            raise DomainError(f"N={n_scale} is below e^(e^e); w(N) < 1/2 (pass w_override)")
        w = w_of(n_scale)
    else:
        w = float(w_override)
    ps = primes_up_to(w) if inclusive else primes_below(w)
    W = math.prod(ps.tolist())
    if q_extra < 1:
        raise DomainError(f"q_extra must be >= 1, got {q_extra}")
    for p, _ in factorize(q_extra) if q_extra > 1 else []:
        if not (p <= w if inclusive else p < w):
            raise HypothesisViolation(f"q_extra={q_extra} has prime factor {p} not below w={w:g}")
    Q = W * q_extra
    A = int(a_seed)
    while math.gcd(A, W) != 1:
        A += 1
    if A > Q and not (Q == 1 and A <= 1):
        raise DomainError(f"A={A} exceeds the modulus {Q}")
    return WTrick(int(n_scale), w, W, A, q_extra, inclusive)


def tricked(kind: str, wt: WTrick, m: int, w: SmoothWindow, n_anchor: int | None = None,
            buckets: int | None = ALPHA_BUCKETS) -> float:
    """(phi(Q)/Q) f(Q m + A) for f = g or h."""
    n = wt.modulus * m + wt.A
    if kind == "g":
        val = weight_g(n, w, buckets)
    elif kind == "h":
        if n_anchor is None:
            raise DomainError("h needs its anchor N")
        val = weight_h(n, n_anchor, w)
    else:
        raise DomainError(f"unknown weight {kind!r}; expected 'g' or 'h'")
    return wt.phi_ratio * val


def tricked_block(kind: str, wt: WTrick, m_lo: int, m_hi: int, w: SmoothWindow,
                  n_anchor: int | None = None, buckets: int | None = ALPHA_BUCKETS) -> np.ndarray:
    """Vectorised ``tricked`` for m in ``[m_lo, m_hi)``."""
    if m_hi <= m_lo:
        return np.zeros(0)
    Q, A = wt.modulus, wt.A
    lo, hi = Q * m_lo + A, Q * (m_hi - 1) + A + 1
    if kind == "g":
        vals = weight_g_block(lo, hi, w, buckets)
    elif kind == "h":
        if n_anchor is None:
            raise DomainError("h needs its anchor N")
        vals = weight_h_block(lo, hi, n_anchor, w)
    else:
        raise DomainError(f"unknown weight {kind!r}; expected 'g' or 'h'")
    return wt.phi_ratio * vals[::Q]


# ---------------------------------------------------------------------------
# majorants


class BumpFunction:
    """Smooth even plateau: 1 on [-1/2, 1/2], 0 outside (-1, 1), exp(-1/t) glue between."""

    @staticmethod
    def _psi(t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        pos = t > 0
        out[pos] = np.exp(-1.0 / t[pos])
        return out

    def __call__(self, t):
        a = np.abs(np.asarray(t, dtype=float))
        s = np.clip(2.0 * (1.0 - a), 0.0, 1.0)   # 1 on the plateau, 0 at |t| >= 1
        num = self._psi(s)
        val = num / (num + self._psi(1.0 - s))
        return float(val) if np.ndim(t) == 0 else val


def gpy_majorant(n: int, y_lo: float, chi: BumpFunction | None = None) -> float:
    """log y' (sum_{d | n} mu(d) chi(log d / log y'))^2.

    Only squarefree d < y' contribute, so only primes p < y' dividing n are needed.
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if not y_lo > 1:
        raise DomainError(f"y' must exceed 1, got {y_lo}")
    chi = chi or BumpFunction()
    small = [p for p in primes_below(y_lo).tolist() if n % p == 0]
    ly = math.log(y_lo)
    total = [float(chi(0.0))]
    for r in range(1, len(small) + 1):
        hit = False
        for combo in combinations(small, r):
            d = math.prod(combo)
            if d < y_lo:
                hit = True
                total.append((-1) ** r * float(chi(math.log(d) / ly)))
        if not hit:
            break
    return ly * math.fsum(total) ** 2


def cramer_factor(y_lo: float) -> Fraction:
    """P(y') / phi(P(y')) as an exact fraction."""
    out = Fraction(1)
    for p in primes_below(y_lo).tolist():
        out *= Fraction(p, p - 1)
    return out


def cramer_model(n: int, y_lo: float) -> float:
    """P(y')/phi(P(y')) if gcd(n, P(y')) = 1, else 0."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if any(n % p == 0 for p in primes_below(y_lo).tolist()):
        return 0.0
    return float(cramer_factor(y_lo))


def cramer_block(lo: int, hi: int, y_lo: float) -> np.ndarray:
    """cramer_model on every n in ``[lo, hi)``."""
    n = np.arange(lo, hi, dtype=np.int64)
    keep = np.ones(n.size, dtype=bool)
    for p in primes_below(y_lo).tolist():
        keep &= n % p != 0
    return np.where(keep, float(cramer_factor(y_lo)), 0.0)
