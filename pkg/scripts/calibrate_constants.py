#!/usr/bin/env python3
"""Measure the implicit constants behind the default Constants values.

Prints one JSON object: the measured value next to the configured default.
"""
import argparse
import json
import math

import numpy as np

from smoothnum.config import DEFAULT_CONSTANTS
from smoothnum.linsys import abc_system, local_factor
from smoothnum.saddle import alpha_in_regime, alpha_main_term, solve_alpha
from smoothnum.sieve import SmoothWindow, primes_up_to
from smoothnum.weights import cramer_block, weight_h_block


def alpha_constant(xs) -> float:
    """max |alpha - main term| * log y over the in-regime grid."""
    worst = 0.0
    for x in xs:
        for y in np.exp(np.linspace(2 * math.log(math.log(x)), math.log(x), 12)):
            if alpha_in_regime(x, y):
                worst = max(worst, abs(solve_alpha(x, y).alpha - alpha_main_term(x, y)) * math.log(y))
    return worst


def majorant_constant(N: int, y_lo: float) -> float:
    """max h / nu over [N, 2N] with y = sqrt N."""
    w = SmoothWindow(y_lo, N**0.5)
    h = weight_h_block(N, 2 * N + 1, N, w)
    nu = cramer_block(N, 2 * N + 1, y_lo)
    keep = nu > 0
    return float(np.max(h[keep] / nu[keep]))


def local_factor_constant(p_max: int) -> float:
    return max(p**2 * abs(local_factor(abc_system(), p).beta - 1) for p in primes_up_to(p_max).tolist() if p > 3)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--N", type=float, default=1e6, help="scale for the majorant constant")
    ap.add_argument("--pmax", type=int, default=1000)
    args = ap.parse_args()
    out = {
        "alpha_C": {"measured": alpha_constant([1e4, 1e5, 1e6, 1e7, 1e8]),
                    "default": DEFAULT_CONSTANTS.alpha_C},
        "h_over_nu": {"measured": majorant_constant(int(args.N), 5), "N": int(args.N)},
        "local_factor_C": {"measured": local_factor_constant(args.pmax), "p_max": args.pmax},
    }
    print(json.dumps(out, indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
