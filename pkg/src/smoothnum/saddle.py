"""Saddle point alpha(x, y), truncated Euler products and the closed-form estimates
for Psi(x, y) and Psi(x, [y', y]) that the exact counts are compared against.

All products over primes are evaluated as exponentials of ``math.fsum`` log-sums.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .config import DEFAULT_CONSTANTS, Constants
from .errors import DomainError
from .sieve import SmoothWindow, primes_below, primes_up_to, psi

BRACKET_LO = 1e-6
ALPHA_TOL = 1e-12


@dataclass(frozen=True)
class SaddleContext:
    x: float
    y: float
    alpha: float
    zeta_alpha_y: float
    u: float
    residual: float = 0.0
    log_zeta: float = math.nan
    clamped: bool = False   # alpha pinned to 1 because the saddle equation has no root below 1

    @property
    def log_x(self) -> float:
        return math.log(self.x)

    @property
    def log_y(self) -> float:
        return math.log(self.y)


def _log_primes(y: float) -> np.ndarray:
    return np.log(primes_up_to(y).astype(float))


def _log_euler(logp: np.ndarray, sigma: float) -> float:
    # sum of -log(1 - p^-sigma)
    return -math.fsum(np.log1p(-np.exp(-sigma * logp)))


def truncated_zeta(sigma: float, y: float) -> float:
    """zeta(sigma, y) = prod_{p <= y} (1 - p^-sigma)^-1."""
    if not sigma > 0:
        raise DomainError(f"sigma must be positive, got {sigma}")
    if y < 2:
        raise DomainError(f"y must be >= 2, got {y}")
    return math.exp(_log_euler(_log_primes(y), sigma))


def restricted_euler(m_primes, sigma: float) -> float:
    """g_m(sigma) = prod_{p | m} (1 - p^-sigma), given the primes dividing m."""
    if not sigma > 0:
        raise DomainError(f"sigma must be positive, got {sigma}")
    logp = np.log(np.asarray(m_primes, dtype=float))
    if logp.size == 0:
        return 1.0
    return math.exp(math.fsum(np.log1p(-np.exp(-sigma * logp))))


def _saddle_terms(logp: np.ndarray, sigma: float) -> tuple[np.ndarray, np.ndarray]:
    em1 = np.expm1(sigma * logp)          # p^sigma - 1
    f = logp / em1
    df = logp * logp * (em1 + 1.0) / (em1 * em1)
    return f, df


def saddle_function(sigma: float, y: float, log_x: float) -> float:
    """sum_{p <= y} log p / (p^sigma - 1) - log x, the stationarity residual."""
    f, _ = _saddle_terms(_log_primes(y), sigma)
    return math.fsum(f) - log_x


@lru_cache(maxsize=8192)
def solve_alpha(x: float, y: float) -> SaddleContext:
    """Saddle point of sigma -> x^sigma zeta(sigma, y).

    Safeguarded Newton on ``sum log p/(p^sigma - 1) = log x`` inside the bracket
    [1e-6, 1].  When the residual at sigma = 1 is still positive (x small compared
    with y) alpha is clamped to 1 and ``clamped`` is set.
    """
    x, y = float(x), float(y)
    if y < 2:
        raise DomainError(f"y must be >= 2, got {y}")
    if x < 1:
        raise DomainError(f"x must be >= 1, got {x}")
    logp = _log_primes(y)
    log_x = math.log(x)

    def F(s):
        f, df = _saddle_terms(logp, s)
        return math.fsum(f) - log_x, -math.fsum(df)

    lo, hi = BRACKET_LO, 1.0
    f_hi, _ = F(hi)
    clamped = False
    if f_hi >= 0:
        alpha, clamped = 1.0, True
    else:
        alpha = 0.5 * (lo + hi)
        for _ in range(200):
            f, df = F(alpha)
            if f > 0:
                lo = alpha
            else:
                hi = alpha
            step = f / df if math.isfinite(df) and df != 0 else math.nan
            cand = alpha - step
            if not (math.isfinite(cand) and lo < cand < hi):
                cand = 0.5 * (lo + hi)
            if abs(cand - alpha) <= ALPHA_TOL * 0.01 or hi - lo <= ALPHA_TOL * 0.01:
                alpha = cand
                break
            alpha = cand
    residual = F(alpha)[0]
    log_zeta = _log_euler(logp, alpha)
    u = log_x / math.log(y)
    return SaddleContext(x, y, alpha, _safe_exp(log_zeta), u, residual, log_zeta, clamped)


def alpha_main_term(x: float, y: float) -> float:
    """1 - log(u log(u+1)) / log y, the leading approximation to alpha(x, y)."""
    u = math.log(x) / math.log(y)
    return 1.0 - math.log(u * math.log(u + 1.0)) / math.log(y)


def alpha_in_regime(x: float, y: float) -> bool:
    """log x < y <= x, where the main-term approximation is claimed."""
    return math.log(x) < y <= x


def ht_estimate(ctx: SaddleContext) -> float:
    """x^alpha zeta(alpha, y) / (alpha sqrt(2 pi log x log y))."""
    a = ctx.alpha
    log_zeta = ctx.log_zeta if math.isfinite(ctx.log_zeta) else math.log(ctx.zeta_alpha_y)
    log_main = a * ctx.log_x + log_zeta
    return math.exp(log_main) / (a * math.sqrt(2 * math.pi * ctx.log_x * ctx.log_y))


def brt_estimate(x: float, w: SmoothWindow, ctx: SaddleContext | None = None) -> float:
    """g_{P(y')}(alpha(x, y)) times the Hildebrand-Tenenbaum main term."""
    if ctx is None:
        ctx = solve_alpha(x, w.y_hi)
    if w.y_lo > 1 and w.y_lo * w.y_lo >= w.y_hi:
        warnings.warn(f"y'={w.y_lo} is not below sqrt(y)={math.sqrt(w.y_hi):.3g}; "
                      "outside the regime of the restricted estimate", stacklevel=2)
    g = restricted_euler(primes_below(w.y_lo), ctx.alpha)
    return g * ht_estimate(ctx)


def dilation_prediction(x: float, w: SmoothWindow, d: float, baseline: float | None = None) -> float:
    """Predict Psi(x/d, [y', y]) as d^-alpha(x, y) times the baseline Psi(x, [y', y]).

    ``baseline`` defaults to the exact count.
    """
    if not 1 <= d <= x / w.y_hi:
        raise DomainError(f"d={d} outside [1, x/y] = [1, {x / w.y_hi:g}]")
    alpha = solve_alpha(x, w.y_hi).alpha
    if baseline is None:
        baseline = psi(int(x), w)
    return d ** (-alpha) * baseline


def _safe_exp(t: float) -> float:
    return math.exp(t) if t < 709.0 else math.inf


@dataclass(frozen=True)
class ProductEnvelope:
    """Bounds kept in log-space; the products overflow doubles for small sigma."""

    log_lower: float
    log_upper: float
    regime: str          # "near-one" or "small-sigma"
    log_main: float

    @property
    def lower(self) -> float:
        return _safe_exp(self.log_lower)

    @property
    def upper(self) -> float:
        return _safe_exp(self.log_upper)

    def contains_log(self, log_value: float) -> bool:
        return self.log_lower <= log_value <= self.log_upper

    def contains(self, value: float) -> bool:
        return self.contains_log(math.log(value))


def log_truncated_zeta(sigma: float, y: float) -> float:
    """log zeta(sigma, y), usable where the product itself overflows."""
    if not sigma > 0:
        raise DomainError(f"sigma must be positive, got {sigma}")
    return _log_euler(_log_primes(y), sigma)


def mv_product_bounds(sigma: float, y: float, constants: Constants = DEFAULT_CONSTANTS) -> ProductEnvelope:
    """Envelope for prod_{p <= y} (1 - p^-sigma)^-1 in the two regimes of the classical estimate.

    near-one  (max(2/log y, 1 - 4/log y) <= sigma <= 1):  lo*log y .. hi*log y
    small-sigma (2/log y <= sigma < 1 - 4/log y):
        exp(T (1 +- C (1/((1 - sigma) log y) + y^-sigma))) / (1 - sigma),
        T = y^(1 - sigma) / ((1 - sigma) log y)
    """
    ly = math.log(y)
    if sigma < 2 / ly or sigma > 1:
        raise DomainError(f"sigma={sigma} outside [2/log y, 1] = [{2 / ly:.4g}, 1]")
    if sigma >= max(2 / ly, 1 - 4 / ly):
        return ProductEnvelope(math.log(constants.mv_near_one_lo * ly),
                               math.log(constants.mv_near_one_hi * ly), "near-one", math.log(ly))
    one_minus = 1 - sigma
    T = y**one_minus / (one_minus * ly)
    err = constants.mv_small_sigma_C * (1 / (one_minus * ly) + y ** (-sigma))
    shift = -math.log(one_minus)
    return ProductEnvelope(T * (1 - err) + shift, T * (1 + err) + shift, "small-sigma", T + shift)
