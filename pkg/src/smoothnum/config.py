"""Tunable constants and resource budgets.

The asymptotic statements being checked carry implicit constants.  They are
collected here so every report can echo the values it was judged against.
"""
from __future__ import annotations

import math
import os
from dataclasses import asdict, dataclass, field, replace

from scipy.special import expi

# Largest c = (1 - sigma) log y in the near-one regime of the Euler-product envelope is 4;
# there log zeta(sigma, y) - log log y - gamma tends to int_0^c (e^t - 1)/t dt
# = Ei(c) - log c - gamma, about 17.67 at c = 4.
_EI_TAIL4 = float(expi(4.0)) - math.log(4.0) - 0.5772156649015329


@dataclass(frozen=True)
class Constants:
    alpha_C: float = 2.0             # |alpha - (1 - log(u log(u+1))/log y)| <= alpha_C / log y
    envelope_lo: float = 0.5         # generic lower envelope factor
    envelope_hi: float = 2.0         # generic upper envelope factor
    mv_near_one_lo: float = 0.5      # zeta(sigma, y) >= lo * log y for sigma near 1
    mv_near_one_hi: float = field(default=2.0 * math.exp(0.5772156649015329 + _EI_TAIL4))
    mv_small_sigma_C: float = 2.0    # multiplier on the O(.) terms inside the exponential
    equid_C: float = 4.0             # implicit constant of short-interval counting bounds
    weyl_c: float = 0.05             # power saving exponent in the major-arc envelope
    recur_C: float = 10.0            # certification: ||q theta|| <= C eps delta^-kappa / N^k
    recur_kappa: float = 3.0
    bootstrap_c: float = 0.25        # first branch: eps' >= c delta / Delta
    bootstrap_C: float = 4.0         # second branch: ||theta|| <= C Delta eps' / (delta N^k)

    def with_overrides(self, **kw) -> "Constants":
        return replace(self, **kw)

    def as_dict(self) -> dict:
        return asdict(self)


DEFAULT_CONSTANTS = Constants()

SEGMENT_LENGTH = int(os.environ.get("SMOOTHNUM_SEGMENT", 1 << 22))
# Longest window a single FactorTable may cover, and the byte budget of the segment cache.
TABLE_BUDGET = int(float(os.environ.get("SMOOTHNUM_TABLE_BUDGET", 1 << 26)))
CACHE_BYTES = int(float(os.environ.get("SMOOTHNUM_CACHE_BYTES", 320 * 2**20)))
# Sieving primes are generated up to this bound at most, so range_hi <= PRIME_LIMIT**2.
PRIME_LIMIT = int(float(os.environ.get("SMOOTHNUM_PRIME_LIMIT", 2 * 10**8)))
