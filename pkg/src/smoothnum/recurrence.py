"""Strong recurrence of n^k theta along smooth numbers: census of hits
||n^k theta|| <= eps, recovery of the small denominator, and a desk-scale audit of
the bootstrapping disjunction.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from .config import DEFAULT_CONSTANTS, Constants
from .errors import DomainError
from .sieve import SmoothWindow, build_factor_table
from .weyl import _as_fraction, _smooth_chunks, convergents, distance_to_nearest_integer, phases

EXHAUSTIVE_Q = 10**4


def _nearest_distance(ph: np.ndarray) -> np.ndarray:
    return np.minimum(ph, 1.0 - ph)


@dataclass
class RecurrenceCensus:
    theta: float
    k: int
    eps: float
    total: int
    hits: int
    fraction: float
    sample: list[int]
    params: dict = field(default_factory=dict)
    theta_exact: Fraction | None = field(default=None, repr=False)

    def as_dict(self) -> dict:
        d = asdict(self)
        d.pop("theta_exact")
        return d


def census(N: int, w: SmoothWindow, k: int, theta, eps: float, sample_size: int = 16) -> RecurrenceCensus:
    """Count smooth n <= N with ||n^k theta|| <= eps (ties count as hits)."""
    if not 0 < eps < 0.5:
        raise DomainError(f"eps must lie in (0, 1/2), got {eps}")
    N = int(N)
    th = _as_fraction(theta)
    total = hits = 0
    sample: list[int] = []
    for nums in _smooth_chunks(N, w):
        hit = _nearest_distance(phases(nums, k, th, max_n=N)) <= eps
        total += nums.size
        hits += int(np.count_nonzero(hit))
        if len(sample) < sample_size:
            sample.extend(nums[hit][: sample_size - len(sample)].tolist())
    frac = hits / total if total else 0.0
    return RecurrenceCensus(float(th), k, eps, total, hits, frac, sample,
                            dict(N=N, window=w.as_tuple()), th)


@dataclass(frozen=True)
class Recovery:
    q: int
    err: float          # ||q theta||
    threshold: float    # C eps delta^-kappa / x^k
    certified: bool


def best_denominator(theta, q_max: int) -> tuple[int, Fraction]:
    """The least q <= q_max minimising ||q theta||, with that distance (exact)."""
    if q_max < 1:
        raise DomainError(f"q_max must be >= 1, got {q_max}")
    th = _as_fraction(theta)
    best_q, best_err = 1, distance_to_nearest_integer(th)
    for _, q in convergents(th % 1, q_max):
        err = distance_to_nearest_integer(q * th)
        if err < best_err or (err == best_err and q < best_q):
            best_q, best_err = q, err
    # exhaustive cross-check over small q (exact reduction, then exact comparison)
    span = min(q_max, EXHAUSTIVE_Q)
    qs = np.arange(1, span + 1, dtype=np.int64)
    d = _nearest_distance(phases(qs, 1, th))
    for q in np.flatnonzero(d <= d.min() + 1e-15).tolist():
        q += 1
        err = distance_to_nearest_integer(q * th)
        if err < best_err or (err == best_err and q < best_q):
            best_q, best_err = q, err
    return best_q, best_err


def recover_q(rc: RecurrenceCensus, q_max: int, x_scale: int,
              constants: Constants = DEFAULT_CONSTANTS) -> Recovery:
    """Best denominator q <= q_max and whether ||q theta|| <= C eps delta^-kappa / x^k."""
    if rc.fraction <= 0:
        raise DomainError("census has no hits; nothing to recover")
    th = rc.theta_exact if rc.theta_exact is not None else _as_fraction(rc.theta)
    q, err = best_denominator(th, q_max)
    threshold = (constants.recur_C * rc.eps * rc.fraction ** (-constants.recur_kappa)
                 / float(x_scale) ** rc.k)
    return Recovery(q, float(err), threshold, float(err) <= threshold)


# ---------------------------------------------------------------------------
# bootstrapping audit


def interval_grid(N: int, L: int, n_intervals: int = 100) -> list[tuple[int, int]]:
    """Deterministic stratified intervals [s, s + len) inside [N, 2N]: lengths L 2^j,
    starts evenly spaced, at least ``n_intervals`` in total."""
    lengths = []
    ell = L
    while ell <= N + 1:
        lengths.append(ell)
        ell *= 2
    per = max(1, math.ceil(n_intervals / len(lengths)))
    out = []
    for ell in lengths:
        top = 2 * N + 1 - ell
        starts = np.unique(np.linspace(N, top, per).round().astype(np.int64))
        out.extend((int(s), int(ell)) for s in starts)
    return out


def density_excess(N: int, w: SmoothWindow, L: int, n_intervals: int = 100) -> float:
    """Delta_obs = max(1, max over the grid of |A cap P| N / (|A| |P|)), A = S cap [N, 2N]."""
    mask = build_factor_table(N, 2 * N + 1).smooth_mask(w)
    size = int(mask.sum())
    if size == 0:
        raise DomainError(f"no smooth numbers in [{N}, {2 * N}]")
    cum = np.concatenate([[0], np.cumsum(mask, dtype=np.int64)])
    best = 0.0
    for s, ell in interval_grid(N, L, n_intervals):
        c = int(cum[s - N + ell] - cum[s - N])
        best = max(best, c * N / (size * ell))
    return max(1.0, best)


@dataclass
class BootstrapReport:
    theta: float
    k: int
    N: int
    L: int
    eps_prime: float
    delta: float
    hits: int
    size_A: int
    Delta_obs: float
    theta_ok: bool
    hits_ok: bool
    hypothesis_ok: bool
    branch_eps: bool       # eps' >= c delta / Delta
    branch_theta: bool     # ||theta|| <= C Delta eps' / (delta N^k)
    verdict: bool | None   # either branch, or None when the hypothesis fails
    params: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return asdict(self)


def bootstrap_audit(theta, k: int, N: int, w: SmoothWindow, L: int, eps_prime: float,
                    delta: float | None = None, constants: Constants = DEFAULT_CONSTANTS,
                    n_intervals: int = 100) -> BootstrapReport:
    """Check the hypotheses ||theta|| <= eps'/(L N^(k-1)) and #{m in A: ||m^k theta|| <= eps'}
    >= delta |A| and report which branch of the conclusion holds.

    ``delta=None`` uses the observed hit fraction.
    """
    if not 1 <= L <= N:
        raise DomainError(f"need 1 <= L <= N, got L={L}, N={N}")
    th = _as_fraction(theta)
    table = build_factor_table(N, 2 * N + 1)
    A = table.numbers()[table.smooth_mask(w)]
    if A.size == 0:
        raise DomainError(f"no smooth numbers in [{N}, {2 * N}]")
    hits = int(np.count_nonzero(_nearest_distance(phases(A, k, th, max_n=2 * N)) <= eps_prime))
    if delta is None:
        delta = hits / A.size
    Delta = density_excess(N, w, L, n_intervals)
    exact_norm = distance_to_nearest_integer(th)
    norm_theta = float(exact_norm)
    theta_ok = exact_norm <= Fraction(eps_prime) / (L * N ** (k - 1))
    hits_ok = delta > 0 and hits >= delta * A.size
    hyp = theta_ok and hits_ok
    if delta > 0:
        b_eps = eps_prime >= constants.bootstrap_c * delta / Delta
        b_theta = norm_theta <= constants.bootstrap_C * Delta * eps_prime / (delta * float(N) ** k)
    else:
        b_eps = b_theta = False
    return BootstrapReport(float(th), k, N, L, eps_prime, float(delta), hits, int(A.size), Delta,
                           theta_ok, hits_ok, hyp, b_eps, b_theta, (b_eps or b_theta) if hyp else None,
                           dict(window=w.as_tuple(), c=constants.bootstrap_c, C=constants.bootstrap_C))


def bootstrap_grid(N: int = 10**6, w: SmoothWindow | None = None, k: int = 1,
                   constants: Constants = DEFAULT_CONSTANTS, size: int = 50) -> list[BootstrapReport]:
    """The deterministic audit grid: the first ``size`` candidates with hypothesis_ok, from
    theta = t eps'/(L N^(k-1)) over eps' in {0.01, 0.02, 0.05}, L in {10, ..., 10^5}
    and t in {0, 1/1000, 1/100, 1/10, 1/2, 1}, in that nesting order."""
    w = w or SmoothWindow(1, 1000)
    ts = (0, Fraction(1, 1000), Fraction(1, 100), Fraction(1, 10), Fraction(1, 2), 1)
    out = []
    for eps_prime in (0.01, 0.02, 0.05):
        for L in (10, 10**2, 10**3, 10**4, 10**5):
            for t in ts:
                theta = Fraction(t) * Fraction(eps_prime) / (L * N ** (k - 1))
                rep = bootstrap_audit(theta, k, N, w, L, eps_prime, None, constants)
                if rep.hypothesis_ok:
                    out.append(rep)
                    if len(out) == size:
                        return out
    return out
