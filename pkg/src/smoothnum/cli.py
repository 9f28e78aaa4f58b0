"""Command-line front end.

Output is deterministic: sorted-key JSON (one object, or JSON lines with a leading
``{"meta": ...}`` line for multi-row commands) or CSV with ``# key=value`` header
comments and columns in sorted order.  Exit codes: 0 success, 1 usage, 2 domain or
hypothesis violation, 3 capacity.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import fields, is_dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import __version__
from .config import DEFAULT_CONSTANTS, Constants
from .errors import CapacityError, DomainError

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_CAPACITY = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


# ---------------------------------------------------------------------------
# argument types


def number(text: str):
    """Integer when integral (accepts 1e6), float otherwise."""
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"not finite: {text!r}")
    return int(v) if v.is_integer() and abs(v) < 2**63 else v


def exact(text: str):
    """'a/b' as an exact Fraction, anything else as a float (sqrt2-1 style names allowed)."""
    named = {"sqrt2-1": math.sqrt(2) - 1, "golden": (math.sqrt(5) - 1) / 2}
    if text in named:
        return named[text]
    if "/" in text:
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError):
            raise argparse.ArgumentTypeError(f"bad fraction: {text!r}") from None
    return float(number(text))


def y_spec(text: str) -> str:
    """A number, 'log^K' for (log x)^K, or 'x^E' for x^E; resolved against x later."""
    if text.startswith(("log^", "x^")):
        try:
            float(text.split("^", 1)[1])
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad y spec: {text!r}") from None
        return text
    number(text)
    return text


def resolve_y(spec: str, x: float) -> float:
    if spec.startswith("log^"):
        return math.log(x) ** float(spec[4:])
    if spec.startswith("x^"):
        return float(x) ** float(spec[2:])
    return float(number(spec))


def constant_override(text: str) -> tuple[str, float]:
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected name=value, got {text!r}")
    name, val = text.split("=", 1)
    if name not in {f.name for f in fields(Constants)}:
        raise argparse.ArgumentTypeError(f"unknown constant {name!r}")
    return name, float(number(val))


# ---------------------------------------------------------------------------
# serialisation


def to_jsonable(obj: Any):
    if is_dataclass(obj) and not isinstance(obj, type):
        return to_jsonable(obj.as_dict() if hasattr(obj, "as_dict") else
                           {f.name: getattr(obj, f.name) for f in fields(obj)})
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    return obj


def _dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, allow_nan=False)


def _flatten(row: dict, prefix: str = "") -> dict:
    out = {}
    for k, v in row.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        elif isinstance(v, list):
            out[key] = json.dumps(v, sort_keys=True)
        else:
            out[key] = v
    return out


def render(meta: dict, rows: list[dict], fmt: str, multi: bool) -> str:
    rows = [to_jsonable(r) for r in rows]
    meta = to_jsonable(meta)
    if fmt == "csv":
        buf = io.StringIO()
        for k, v in sorted(_flatten(meta).items()):
            buf.write(f"# {k}={v}\n")
        flat = [_flatten(r) for r in rows]
        cols = sorted({c for r in flat for c in r})
        wr = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        wr.writeheader()
        for r in flat:
            wr.writerow(r)
        return buf.getvalue()
    if multi:
        return "\n".join([_dumps({"meta": meta})] + [_dumps(r) for r in rows]) + "\n"
    return _dumps({"meta": meta, "result": rows[0] if rows else None}) + "\n"


# ---------------------------------------------------------------------------
# commands


def _window(args, x):
    from .sieve import SmoothWindow
    return SmoothWindow(float(args.yprime), resolve_y(args.y, x))


def cmd_psi(args, consts):
    from .saddle import brt_estimate, ht_estimate, solve_alpha
    from .equid import smooth_regime
    from .sieve import psi
    x = int(args.x)
    w = _window(args, x)
    exact_full = psi(x, type(w)(1, w.y_hi))
    exact_win = psi(x, w)
    ctx = solve_alpha(x, w.y_hi)
    ht = ht_estimate(ctx)
    brt = brt_estimate(x, w, ctx)
    return [dict(x=x, y=w.y_hi, yprime=w.y_lo, psi=exact_full, psi_window=exact_win, ht=ht, brt=brt,
                 ht_ratio=ht / exact_full if exact_full else math.nan,
                 brt_ratio=brt / exact_win if exact_win else math.nan,
                 alpha=ctx.alpha, regime_ok=smooth_regime(x, w))], False


def cmd_alpha(args, consts):
    from .saddle import alpha_in_regime, alpha_main_term, solve_alpha
    x = float(args.x)
    y = resolve_y(args.y, x)
    ctx = solve_alpha(x, y)
    main = alpha_main_term(x, y) if x > y else math.nan
    diff = abs(ctx.alpha - main)
    return [dict(x=x, y=y, alpha=ctx.alpha, residual=ctx.residual, u=ctx.u, clamped=ctx.clamped,
                 main_term=main, deviation_times_log_y=diff * math.log(y),
                 within=diff <= consts.alpha_C / math.log(y), regime_ok=alpha_in_regime(x, y))], False


def cmd_estimate(args, consts):
    from .saddle import dilation_prediction, mv_product_bounds, solve_alpha, log_truncated_zeta
    from .sieve import psi
    x = int(args.x)
    w = _window(args, x)
    base = psi(x, w)
    alpha = solve_alpha(x, w.y_hi).alpha
    rows = []
    for d in args.d:
        pred = dilation_prediction(x, w, d, base)
        exact_val = psi(int(x // d), w)
        rows.append(dict(kind="dilation", d=d, exact=exact_val, predicted=pred,
                         ratio=exact_val / pred if pred else math.nan, alpha=alpha))
    for sigma in args.sigma:
        env = mv_product_bounds(sigma, w.y_hi, consts)
        lz = log_truncated_zeta(sigma, w.y_hi)
        rows.append(dict(kind="euler_product", sigma=sigma, y=w.y_hi, log_zeta=lz,
                         log_lower=env.log_lower, log_upper=env.log_upper, regime=env.regime,
                         contained=env.contains_log(lz)))
    return rows, True


def cmd_equid(args, consts):
    from .equid import progression_equid, short_interval_sum
    x = int(args.x)
    w = _window(args, x)
    rows = []
    for q in args.q:
        rep = progression_equid(x, w, int(q))
        rows.append(dict(kind="progression", q=q, max_deviation=rep.max_deviation, total=rep.total,
                         regime_ok=rep.regime_ok))
    for n1 in args.short:
        rep = short_interval_sum(x, x, int(n1), w)
        rows.append(dict(kind="short_interval", n1=n1, observed=rep.observed, predicted=rep.predicted,
                         rel_err=rep.rel_err, regime_ok=rep.regime_ok))
    return rows, True


def cmd_weyl(args, consts):
    from .weyl import dichotomy_report
    x = int(args.x)
    w = _window(args, x)
    rows = []
    for th in args.theta:
        rep = dichotomy_report(x, w, args.k, th, consts)
        rows.append(dict(theta=str(th), k=args.k, ratio=rep.ratio, abs_E=abs(rep.weyl), psi=rep.psi,
                         branch=rep.branch, witness=rep.witness, Q=rep.Q_quality, approx=rep.approx,
                         envelope_major=rep.envelope_major, envelope_minor=rep.envelope_minor,
                         regime_ok=rep.regime_ok))
    return rows, True


def cmd_recur(args, consts):
    from .recurrence import bootstrap_audit, census, recover_q
    N = int(args.N)
    w = _window(args, N)
    rows = []
    for th in args.theta:
        if args.bootstrap:
            rep = bootstrap_audit(th, args.k, N, w, int(args.L), args.eps_prime, None, consts)
            row = rep.as_dict()
            row["theta"] = str(th)
            row["regime_ok"] = rep.hypothesis_ok
            rows.append(row)
            continue
        rc = census(N, w, args.k, th, args.eps)
        row = dict(theta=str(th), k=args.k, eps=args.eps, total=rc.total, hits=rc.hits,
                   fraction=rc.fraction, baseline=2 * args.eps, regime_ok=False)
        if rc.fraction > 0:
            rec = recover_q(rc, int(args.qmax), N, consts)
            row.update(q=rec.q, q_err=rec.err, threshold=rec.threshold, certified=rec.certified)
        rows.append(row)
    return rows, True


def cmd_phase(args, consts):
    from .polyphase import PolyMod1, cramer_phase_correlation, phase_correlation, smoothness_norm
    from .sieve import factorize
    from .weights import build_wtrick
    N = int(args.N)
    w = _window(args, N)
    poly = PolyMod1.from_monomial(args.coeffs)
    wt = build_wtrick(N, args.a_seed, w_override=args.w_override)
    if args.cramer:
        val = cramer_phase_correlation(N, w.y_lo, wt, poly)
        bound = None
    else:
        val, bound = phase_correlation(N, w, wt, poly, with_bound=True)
    return [dict(poly=poly.describe(), N=N, W=wt.modulus, A=wt.A, correlation=val, abs=abs(val),
                 triangle_bound=bound, smoothness_norm=smoothness_norm(poly, N), cramer=args.cramer,
                 regime_ok=all(p < w.y_lo for p, _ in factorize(wt.modulus)))], False


def cmd_linsys(args, consts):
    from .linsys import count_solutions, parse_descriptor, singular_series
    from .sieve import SmoothWindow
    try:
        text = Path(args.descriptor).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read descriptor: {exc}") from None
    sys_, extra = parse_descriptor(text)
    N = int(args.N if args.N is not None else extra.get("N", 0))
    if N < 1:
        raise DomainError("N must be given in the descriptor or with --N")
    y = resolve_y(args.y, N) if args.y is not None else extra.get("y", N)
    yl = float(args.yprime) if args.yprime is not None else extra.get("yprime", 1)
    w = SmoothWindow(yl, y)
    res = count_solutions(sys_, N, w, args.weighted)
    series = singular_series(sys_, max(2.0, yl))
    return [dict(system=sys_.canonical(), N=N, y=y, yprime=yl, value=res.value, predicted=res.predicted,
                 ratio=res.ratio, points=res.points, series=series.value,
                 partial_products=series.partial, pairwise_independent=sys_.pairwise_independent(),
                 regime_ok=res.contained)], False


def cmd_abc(args, consts):
    from .linsys import abc_census
    N = int(args.N)
    w = _window(args, N)
    res = abc_census(N, w, args.coprime)
    return [dict(N=N, y=w.y_hi, yprime=w.y_lo, count=res.count, predicted=res.predicted,
                 ratio=res.ratio, psi=res.psi, coprime_only=args.coprime, regime_ok=True)], False


COMMANDS: dict[str, Callable] = dict(psi=cmd_psi, alpha=cmd_alpha, estimate=cmd_estimate, equid=cmd_equid,
                                     weyl=cmd_weyl, recur=cmd_recur, phase=cmd_phase, linsys=cmd_linsys,
                                     abc=cmd_abc)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--output", "-o", help="write here instead of stdout")
    common.add_argument("--const", action="append", type=constant_override, default=[],
                        metavar="NAME=VALUE", help="override an implicit constant")
    common.add_argument("--seed", type=int, default=0, help="recorded for sampled grids")

    p = _Parser(prog="smoothnum", description="Experiments on smooth numbers.")
    p.add_argument("--version", action="version", version=f"smoothnum {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def window(sp, xname="--x"):
        sp.add_argument(xname, type=number, required=True)
        sp.add_argument("--y", type=y_spec, required=True, help="number, log^K or x^E")
        sp.add_argument("--yprime", type=number, default=1)

    sp = sub.add_parser("psi", parents=[common], help="exact counts and estimates")
    window(sp)
    sp = sub.add_parser("alpha", parents=[common], help="saddle point")
    sp.add_argument("--x", type=number, required=True)
    sp.add_argument("--y", type=y_spec, required=True)
    sp = sub.add_parser("estimate", parents=[common], help="dilations and Euler-product envelopes")
    window(sp)
    sp.add_argument("--d", type=number, nargs="*", default=[2, 5, 10, 100])
    sp.add_argument("--sigma", type=number, nargs="*", default=[])
    sp = sub.add_parser("equid", parents=[common], help="progressions and short intervals")
    window(sp)
    sp.add_argument("--q", type=number, nargs="*", default=[2, 3, 5, 6, 15])
    sp.add_argument("--short", type=number, nargs="*", default=[])
    sp = sub.add_parser("weyl", parents=[common], help="Weyl sums and arcs")
    window(sp)
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--theta", type=exact, nargs="+", required=True)
    sp = sub.add_parser("recur", parents=[common], help="recurrence census and bootstrap audit")
    window(sp, "--N")
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--theta", type=exact, nargs="+", required=True)
    sp.add_argument("--eps", type=float, default=0.05)
    sp.add_argument("--qmax", type=number, default=100)
    sp.add_argument("--bootstrap", action="store_true")
    sp.add_argument("--L", type=number, default=1000)
    sp.add_argument("--eps-prime", type=float, default=0.01)
    sp = sub.add_parser("phase", parents=[common], help="polynomial phase correlations")
    window(sp, "--N")
    sp.add_argument("--coeffs", type=exact, nargs="+", required=True, help="monomial coefficients")
    sp.add_argument("--w-override", type=number, default=2)
    sp.add_argument("--a-seed", type=int, default=1)
    sp.add_argument("--cramer", action="store_true")
    sp = sub.add_parser("linsys", parents=[common], help="linear systems from a descriptor file")
    sp.add_argument("--descriptor", required=True)
    sp.add_argument("--N", type=number)
    sp.add_argument("--y", type=y_spec)
    sp.add_argument("--yprime", type=number)
    sp.add_argument("--weighted", action="store_true")
    sp = sub.add_parser("abc", parents=[common], help="A + B = C census")
    window(sp, "--N")
    sp.add_argument("--coprime", action="store_true")
    return p


def _config_echo(args) -> dict:
    d = {k: v for k, v in vars(args).items() if k not in ("const", "output")}
    return {k: (str(v) if isinstance(v, Fraction) else v) for k, v in d.items()}


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.command:
            raise UsageError(parser.format_usage().rstrip())
    except UsageError as exc:
        print(str(exc), file=stderr)
        return EXIT_USAGE
    overrides = dict(args.const)
    consts = DEFAULT_CONSTANTS.with_overrides(**overrides)
    try:
        rows, multi = COMMANDS[args.command](args, consts)
    except UsageError as exc:
        print(str(exc), file=stderr)
        return EXIT_USAGE
    except CapacityError as exc:
        print(f"capacity: {exc}", file=stderr)
        return EXIT_CAPACITY
    except DomainError as exc:
        print(f"domain: {exc}", file=stderr)
        return EXIT_DOMAIN
    meta = dict(tool="smoothnum", version=__version__, command=args.command, config=_config_echo(args),
                constants=consts.as_dict(), overrides=overrides,
                regime_ok=[bool(r.get("regime_ok", False)) for r in rows])
    text = render(meta, rows, args.format, multi)
    if args.output:
        Path(args.output).write_text(text)
    else:
        stdout.write(text)
    return EXIT_OK


def main() -> None:
    sys.exit(run())
