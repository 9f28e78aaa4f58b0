"""Empirical checks of equidistribution of [y', y]-smooth numbers in short intervals,
short progressions and residue classes.

Every report carries ``regime_ok``: whether the parameters satisfy the hypotheses of
the statement being echoed.  Where a hypothesis asks for an unspecified constant K to
be "sufficiently large" we test the least value the statement allows.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .config import DEFAULT_CONSTANTS, Constants
from .errors import DomainError, HypothesisViolation
from .saddle import solve_alpha
from .sieve import (DirichletCharacter, SmoothWindow, build_factor_table, factorize, psi,
                    psi_character, residue_counts)
from .weights import euler_phi, weight_h_block


@dataclass
class EquidReport:
    observed: float
    predicted: float
    abs_err: float
    rel_err: float
    regime_ok: bool
    params: dict
    extra: dict = field(default_factory=dict)

    @classmethod
    def build(cls, observed, predicted, regime_ok, params, **extra) -> "EquidReport":
        abs_err = abs(observed - predicted)
        return cls(float(observed), float(predicted), abs_err,
                   abs_err / max(abs(predicted), 1e-300), bool(regime_ok), params, extra)

    def as_dict(self) -> dict:
        return asdict(self)


def _log_exponent(v: float, log_n: float) -> float:
    """The K with v = (log N)^K (0 for v <= 1)."""
    return math.log(v) / math.log(log_n) if v > 1 else 0.0


def smooth_regime(n_scale: float, w: SmoothWindow, q: int = 1) -> bool:
    """y' <= (log N)^K', (log N)^K < y <= N with K = max(2, 2K'), and p | q => p < y'."""
    if n_scale < 16:
        return False
    log_n = math.log(n_scale)
    k_prime = _log_exponent(w.y_lo, log_n)
    K = max(2.0, 2.0 * k_prime)
    ok = log_n**K < w.y_hi <= n_scale
    return ok and all(p < w.y_lo for p, _ in (factorize(q) if q > 1 else []))


def _check_modulus(w: SmoothWindow, q: int) -> None:
    if q < 1:
        raise DomainError(f"modulus must be >= 1, got {q}")
    for p, _ in factorize(q) if q > 1 else []:
        if not p < w.y_lo:
            raise HypothesisViolation(f"q={q} has prime factor {p} >= y'={w.y_lo}")


def _h_window_sum(n_anchor: int, n0: int, n1: int, w: SmoothWindow, q: int, a: int) -> float:
    if n1 == 0:
        return 0.0
    vals = weight_h_block(n0 + 1, n0 + n1 + 1, n_anchor, w)
    n = np.arange(n0 + 1, n0 + n1 + 1, dtype=np.int64)
    return math.fsum(vals[n % q == a])


def _short_window_check(n_anchor: int, n0: int, n1: int) -> None:
    if not (n_anchor <= n0 and n1 >= 0 and n0 + n1 <= 2 * n_anchor):
        raise DomainError(f"need N <= N0 and N0 + N1 <= 2N, got N={n_anchor}, N0={n0}, N1={n1}")


def short_interval_sum(n_anchor: int, n0: int, n1: int, w: SmoothWindow) -> EquidReport:
    """Sum of h over (N0, N0 + N1] against the prediction N1."""
    return short_progression_sum(n_anchor, n0, n1, w, 1, 0)


def short_progression_sum(n_anchor: int, n0: int, n1: int, w: SmoothWindow, q: int, a: int,
                          constants: Constants = DEFAULT_CONSTANTS) -> EquidReport:
    """Sum of h over m in (N0, N0 + N1] with m = a mod q, against N1/phi(q).

    ``extra['envelope']`` holds the three-term error envelope
    N1/phi(q) log_3 N/log_2 N + N/(phi(q) log^(1/24) N) + N/log^(1/5) N.
    """
    _short_window_check(n_anchor, n0, n1)
    _check_modulus(w, q)
    a %= q
    if math.gcd(a, q) != 1:
        raise HypothesisViolation(f"gcd(a, q) = gcd({a}, {q}) > 1")
    phi = euler_phi(q)
    observed = _h_window_sum(n_anchor, n0, n1, w, q, a)
    predicted = n1 / phi
    log_n = math.log(n_anchor)
    l2 = math.log(log_n)
    l3 = math.log(l2) if l2 > 1 else 0.0
    envelope = (predicted * l3 / l2 + n_anchor / (phi * log_n ** (1 / 24))
                + n_anchor / log_n ** 0.2)
    long_enough = n1 >= n_anchor * math.exp(-(log_n**0.25) / 4)
    params = dict(n_anchor=n_anchor, n0=n0, n1=n1, window=w.as_tuple(), q=q, a=a)
    return EquidReport.build(observed, predicted, long_enough and smooth_regime(n_anchor, w, q),
                             params, envelope=envelope)


@dataclass
class ProgressionReport:
    max_deviation: float
    per_residue: dict[int, int]
    deviations: dict[int, float]
    total: int
    regime_ok: bool
    params: dict

    def as_dict(self) -> dict:
        d = asdict(self)
        d["per_residue"] = {str(k): v for k, v in self.per_residue.items()}
        d["deviations"] = {str(k): v for k, v in self.deviations.items()}
        return d


def progression_equid(x: int, w: SmoothWindow, q: int) -> ProgressionReport:
    """max over gcd(a, q) = 1 of |phi(q) Psi(x, [y', y]; q, a) / Psi(x, [y', y]) - 1|."""
    _check_modulus(w, q)
    counts = residue_counts(x, w, q)
    total = psi(x, w)
    phi = euler_phi(q)
    units = [a for a in range(q) if math.gcd(a, q) == 1]
    dev = {a: abs(phi * int(counts[a]) / total - 1.0) for a in units}
    log_x = math.log(x)
    regime = smooth_regime(x, w, q) and q <= log_x
    return ProgressionReport(max(dev.values()), {a: int(counts[a]) for a in range(q)}, dev,
                             total, regime, dict(x=x, window=w.as_tuple(), q=q))


def _progression_members(start: int, length: int, step: int, w: SmoothWindow) -> int:
    if length <= 0:
        return 0
    last = start + (length - 1) * step
    table = build_factor_table(start, last + 1)
    return int(np.count_nonzero(table.smooth_mask(w)[::step]))


def short_interval_count_bound(x: int, w: SmoothWindow, start: int, length: int, step: int = 1,
                               constants: Constants = DEFAULT_CONSTANTS) -> EquidReport:
    """#(S cap P) for P = {start + i step} inside [x, 2x] against
    (x/|P|)^(1 - alpha) Psi(x, [y', y]) |P|/x log x.

    ``extra['holds']`` is observed <= C * bound with C = constants.equid_C.
    """
    last = start + (length - 1) * step
    if length < 1 or step < 1 or start < x or last > 2 * x:
        raise DomainError(f"progression ({start}, {length}, {step}) is not inside [x, 2x]")
    observed = _progression_members(start, length, step, w)
    alpha = solve_alpha(x, w.y_hi).alpha
    bound = (x / length) ** (1 - alpha) * psi(x, w) * length / x * math.log(x)
    params = dict(x=x, window=w.as_tuple(), start=start, length=length, step=step)
    return EquidReport.build(observed, bound, smooth_regime(x, w), params,
                             holds=observed <= constants.equid_C * bound, C=constants.equid_C)


def short_interval_delta_bound(n_scale: int, w: SmoothWindow, start: int, length: int, step: int = 1,
                               ell: float = 1.0, constants: Constants = DEFAULT_CONSTANTS) -> EquidReport:
    """#(S(2N) cap P) against Delta Psi(2N, [y', y]) |P|/N, Delta = log_3 N + (log N)^(ell - 1/24)."""
    last = start + (length - 1) * step
    if length < 1 or step < 1 or start < n_scale or last > 2 * n_scale:
        raise DomainError(f"progression ({start}, {length}, {step}) is not inside [N, 2N]")
    observed = _progression_members(start, length, step, w)
    log_n = math.log(n_scale)
    delta = math.log(math.log(log_n)) + log_n ** (ell - 1 / 24)
    bound = delta * psi(2 * n_scale, w) * length / n_scale
    long_enough = length >= n_scale / log_n**ell
    params = dict(n_scale=n_scale, window=w.as_tuple(), start=start, length=length, step=step, ell=ell)
    return EquidReport.build(observed, bound, long_enough and smooth_regime(n_scale, w, step), params,
                             holds=observed <= constants.equid_C * bound, C=constants.equid_C,
                             delta=delta)


def character_sum_smallness(x: int, w: SmoothWindow, chi: DirichletCharacter) -> EquidReport:
    """|Psi(x, [y', y]; chi)| / Psi(x, [y', y]) against the envelope (log x)^(-1/5).

    ``extra['ratio']`` is observed / envelope.
    """
    if chi.principal:
        raise DomainError("character_sum_smallness needs a non-principal character; use psi")
    total = psi(x, w)
    observed = abs(psi_character(x, w, chi)) / total if total else 0.0
    envelope = math.log(x) ** -0.2
    params = dict(x=x, window=w.as_tuple(), modulus=chi.modulus, label=list(chi.label))
    return EquidReport.build(observed, envelope, smooth_regime(x, w, chi.modulus), params,
                             ratio=observed / envelope)
