#!/usr/bin/env python3
"""Print desk-scale trend tables: HT ratios, progression deviations and phase correlations."""
import argparse
import math

from smoothnum.equid import progression_equid
from smoothnum.polyphase import PolyMod1, phase_correlation
from smoothnum.saddle import ht_estimate, solve_alpha
from smoothnum.sieve import SmoothWindow, psi
from smoothnum.weights import build_wtrick


def ht_table(exponents):
    print("x        y            HT/Psi")
    for e in exponents:
        x = 10**e
        lx = math.log(x)
        for y in sorted((lx**3, x ** (1 / 3), x**0.5)):
            r = ht_estimate(solve_alpha(x, y)) / psi(x, SmoothWindow(1, y))
            print(f"1e{e:<6} {y:<12.1f} {r:.4f}")


def progression_table(exponents):
    w = SmoothWindow(16, 6.7e4)
    print("x        " + "  ".join(f"q={q:<6}" for q in (2, 3, 5, 6, 15)))
    for e in exponents:
        devs = [progression_equid(10**e, w, q).max_deviation for q in (2, 3, 5, 6, 15)]
        print(f"1e{e:<6} " + "  ".join(f"{d:.6f}" for d in devs))


def phase_table(exponents):
    p = PolyMod1.from_monomial([0, math.sqrt(2) - 1])
    print("N        |corr|")
    for e in exponents:
        N = 10**e
        wt = build_wtrick(N, a_seed=1, w_override=5)
        print(f"1e{e:<6} {abs(phase_correlation(N, SmoothWindow(5, math.log(N) ** 4), wt, p)):.6f}")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-exp", type=int, default=6, help="largest power of ten to include")
    ap.add_argument("--table", choices=("ht", "progression", "phase", "all"), default="all")
    args = ap.parse_args()
    exps = list(range(5, args.max_exp + 1))
    for name, fn in (("ht", ht_table), ("progression", progression_table), ("phase", phase_table)):
        if args.table in (name, "all"):
            fn(exps)
            print()


if __name__ == "__main__":
    main()
