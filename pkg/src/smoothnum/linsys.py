"""Simultaneous smooth values of shifted linear forms over lattice points of a dilated
body, the local densities beta_p, and the A + B = C census.

Bodies are boxes (half-open: lo < x <= hi, so N * box holds exactly vol * N^s lattice
points when N lo, N hi are integers) and closed simplices.  Both are given by rational
data; volumes are exact.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import CapacityError, DomainError
from .sieve import SmoothWindow, build_factor_table, primes_below, psi, smooth_numbers
from .weights import ALPHA_BUCKETS, weight_g_block

ENUM_LIMIT = 10**7          # largest p^s enumerated directly
COUNT_LIMIT = 10**10        # largest N^s lattice enumeration


def _frac(v) -> Fraction:
    return Fraction(v) if not isinstance(v, float) else Fraction(v).limit_denominator(10**12)


# ---------------------------------------------------------------------------
# bodies


@dataclass(frozen=True)
class Halfspace:
    a: tuple[Fraction, ...]
    b: Fraction
    strict: bool = False     # a.x < b instead of a.x <= b


@dataclass(frozen=True)
class Box:
    lo: tuple[Fraction, ...]
    hi: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.lo) != len(self.hi):
            raise DomainError("box corners have different dimensions")

    @classmethod
    def of(cls, lo: Sequence, hi: Sequence) -> "Box":
        return cls(tuple(map(_frac, lo)), tuple(map(_frac, hi)))

    @property
    def dim(self) -> int:
        return len(self.lo)

    def volume(self) -> Fraction:
        return math.prod((max(Fraction(0), h - l) for l, h in zip(self.lo, self.hi)), start=Fraction(1))

    def vertices(self) -> list[tuple[Fraction, ...]]:
        return [tuple(c) for c in itertools.product(*zip(self.lo, self.hi))]

    def halfspaces(self) -> list[Halfspace]:
        out = []
        for j in range(self.dim):
            e = tuple(Fraction(int(i == j)) for i in range(self.dim))
            out.append(Halfspace(tuple(-c for c in e), -self.lo[j], strict=True))
            out.append(Halfspace(e, self.hi[j]))
        return out

    def describe(self) -> str:
        return "box " + " ".join(map(str, self.lo + self.hi))


@dataclass(frozen=True)
class Simplex:
    verts: tuple[tuple[Fraction, ...], ...]

    @classmethod
    def of(cls, verts: Sequence[Sequence]) -> "Simplex":
        vs = tuple(tuple(map(_frac, v)) for v in verts)
        s = len(vs[0])
        if len(vs) != s + 1 or any(len(v) != s for v in vs):
            raise DomainError(f"a simplex in dimension {s} needs {s + 1} vertices")
        out = cls(vs)
        if out.volume() == 0:
            raise DomainError("degenerate simplex: vertices are affinely dependent")
        return out

    @property
    def dim(self) -> int:
        return len(self.verts[0])

    def _edges(self) -> list[list[Fraction]]:
        v0 = self.verts[0]
        return [[v[i] - v0[i] for i in range(self.dim)] for v in self.verts[1:]]

    def volume(self) -> Fraction:
        return abs(_det(self._edges())) / math.factorial(self.dim)

    def vertices(self) -> list[tuple[Fraction, ...]]:
        return list(self.verts)

    def halfspaces(self) -> list[Halfspace]:
        # facet i is spanned by all vertices except i; orient it away from vertex i
        s = self.dim
        out = []
        for i in range(s + 1):
            others = [v for k, v in enumerate(self.verts) if k != i]
            base = others[0]
            rows = [[v[c] - base[c] for c in range(s)] for v in others[1:]]
            normal = _null_vector(rows, s)
            b = sum(n * x for n, x in zip(normal, base))
            if sum(n * x for n, x in zip(normal, self.verts[i])) > b:
                normal, b = [-n for n in normal], -b
            out.append(Halfspace(tuple(normal), b))
        return out

    def describe(self) -> str:
        return "simplex " + " ; ".join(" ".join(map(str, v)) for v in self.verts)


def _det(m: list[list[Fraction]]) -> Fraction:
    m = [row[:] for row in m]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            for k in range(c, n):
                m[r][k] -= f * m[c][k]
    return det


def _null_vector(rows: list[list[Fraction]], s: int) -> list[Fraction]:
    """A nonzero vector orthogonal to the s-1 given rows (generalised cross product)."""
    if s == 1:
        return [Fraction(1)]
    return [(-1) ** j * _det([[r[c] for c in range(s) if c != j] for r in rows]) for j in range(s)]


# ---------------------------------------------------------------------------
# systems


@dataclass(frozen=True)
class LinearSystem:
    psi: tuple[tuple[int, ...], ...]     # r x s integer coefficients
    shifts: tuple[int, ...]
    body: Box | Simplex

    def __post_init__(self):
        if not self.psi or self.s < 1:
            raise DomainError("a system needs at least one form and one variable")
        if any(len(row) != self.s for row in self.psi):
            raise DomainError("forms have inconsistent numbers of variables")
        if len(self.shifts) != self.r:
            raise DomainError(f"{self.r} forms but {len(self.shifts)} shifts")
        if self.body.dim != self.s:
            raise DomainError(f"body has dimension {self.body.dim}, forms have s={self.s}")

    @classmethod
    def of(cls, psi: Sequence[Sequence[int]], shifts: Sequence[int] | None, body) -> "LinearSystem":
        psi = tuple(tuple(int(c) for c in row) for row in psi)
        shifts = tuple(int(a) for a in shifts) if shifts is not None else (0,) * len(psi)
        return cls(psi, shifts, body)

    @property
    def s(self) -> int:
        return len(self.psi[0])

    @property
    def r(self) -> int:
        return len(self.psi)

    @property
    def L(self) -> int:
        return max(abs(c) for row in self.psi for c in row)

    def pairwise_independent(self) -> bool:
        for f, g in itertools.combinations(self.psi, 2):
            if all(f[i] * g[j] - f[j] * g[i] == 0 for i, j in itertools.combinations(range(self.s), 2)):
                return False
        return all(any(row) for row in self.psi)

    def value_range(self, N: int) -> list[tuple[Fraction, Fraction]]:
        """Min and max of psi_j(x) + a_j over the closure of N * body (at the vertices)."""
        out = []
        for row, a in zip(self.psi, self.shifts):
            vals = [N * sum(c * x for c, x in zip(row, v)) + a for v in self.body.vertices()]
            out.append((min(vals), max(vals)))
        return out

    def contained(self, N: int) -> bool:
        """psi_j(N body) + a_j inside [1, N] for every j, checked at the vertices."""
        return all(lo >= 1 and hi <= N for lo, hi in self.value_range(N))

    def canonical(self) -> str:
        lines = [f"s {self.s}", f"r {self.r}"]
        lines += ["form " + " ".join(map(str, row)) for row in self.psi]
        lines.append("shift " + " ".join(map(str, self.shifts)))
        lines.append("body " + self.body.describe())
        return "\n".join(lines)


def abc_system() -> LinearSystem:
    """n1, n2, n1 + n2 over the simplex n1, n2 >= 0, n1 + n2 <= 1."""
    return LinearSystem.of([[1, 0], [0, 1], [1, 1]], [0, 0, 0],
                           Simplex.of([[0, 0], [1, 0], [0, 1]]))


def identity_system(s: int = 2) -> LinearSystem:
    """The single form psi(n) = n_1 over the box (0, 1]^s."""
    return LinearSystem.of([[1] + [0] * (s - 1)], [0], Box.of([0] * s, [1] * s))


# ---------------------------------------------------------------------------
# local factors


@dataclass(frozen=True)
class LocalFactor:
    p: int
    beta: float
    exact: Fraction
    method: str


def _beta(count: int, p: int, s: int, r: int) -> Fraction:
    return Fraction(count * p**r, (p - 1) ** r * p**s)


def _enumerate_survivors(sys: LinearSystem, p: int) -> int:
    s = sys.s
    psi = np.array(sys.psi, dtype=np.int64) % p
    shifts = np.array(sys.shifts, dtype=np.int64) % p
    # enumerate the last s-1 coordinates as a block, loop over the first
    if s > 1:
        rest = np.array(list(itertools.product(range(p), repeat=s - 1)), dtype=np.int64)
        partial = (rest @ psi[:, 1:].T) % p
    else:
        partial = np.zeros((1, sys.r), dtype=np.int64)
    count = 0
    for u1 in range(p):
        vals = (partial + u1 * psi[:, 0] + shifts) % p
        count += int(np.count_nonzero(np.all(vals != 0, axis=1)))
    return count


def _rank_consistent(rows: list[list[int]], rhs: list[int], p: int) -> int | None:
    """Rank of the system mod p, or None when it has no solution."""
    m = [[c % p for c in row] + [b % p] for row, b in zip(rows, rhs)]
    ncols = len(rows[0])
    rank = 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = pow(m[rank][c], -1, p)
        m[rank] = [v * inv % p for v in m[rank]]
        for i in range(len(m)):
            if i != rank and m[i][c]:
                f = m[i][c]
                m[i] = [(v - f * w) % p for v, w in zip(m[i], m[rank])]
        rank += 1
    if any(all(v == 0 for v in row[:-1]) and row[-1] for row in m):
        return None
    return rank


def _inclusion_exclusion(sys: LinearSystem, p: int) -> int:
    if sys.r > 20:
        raise CapacityError(f"inclusion-exclusion over {sys.r} forms is too large")
    total = 0
    for size in range(sys.r + 1):
        for T in itertools.combinations(range(sys.r), size):
            if not T:
                total += p**sys.s
                continue
            rank = _rank_consistent([list(sys.psi[j]) for j in T], [-sys.shifts[j] for j in T], p)
            if rank is not None:
                total += (-1) ** size * p ** (sys.s - rank)
    return total


def local_factor(sys: LinearSystem, p: int, method: str = "auto") -> LocalFactor:
    """beta_p = p^-s sum_{u mod p} prod_j (p/(p-1)) 1[psi_j(u) + a_j != 0 mod p]."""
    if p < 2 or any(p % q == 0 for q in range(2, math.isqrt(p) + 1)):
        raise DomainError(f"{p} is not prime")
    if method == "auto":
        method = "enumerate" if p**sys.s <= ENUM_LIMIT else "inclusion"
    if method == "enumerate":
        if p**sys.s > ENUM_LIMIT:
            raise CapacityError(f"p^s = {p}^{sys.s} exceeds the enumeration limit {ENUM_LIMIT}")
        count = _enumerate_survivors(sys, p)
    elif method == "inclusion":
        count = _inclusion_exclusion(sys, p)
    else:
        raise DomainError(f"unknown method {method!r}")
    ex = _beta(count, p, sys.s, sys.r)
    return LocalFactor(p, float(ex), ex, method)


@dataclass
class SeriesReport:
    value: float
    exact: Fraction
    partial: list[tuple[int, float]]


def singular_series(sys: LinearSystem, p_limit: float, method: str = "auto") -> SeriesReport:
    """prod_{p < p_limit} beta_p with the running partial products."""
    if p_limit < 2:
        raise DomainError(f"p_limit must be >= 2, got {p_limit}")
    prod = Fraction(1)
    partial = []
    for p in primes_below(p_limit).tolist():
        prod *= local_factor(sys, p, method).exact
        partial.append((p, float(prod)))
    return SeriesReport(float(prod), prod, partial)


# ---------------------------------------------------------------------------
# counting


def _last_range(hs: list[Halfspace], fixed: Sequence[int], N: int) -> tuple[int, int] | None:
    """Integer range [lo, hi] of the last coordinate given the others (exact)."""
    lo, hi = -math.inf, math.inf
    k = len(fixed)
    for h in hs:
        rhs = N * h.b - sum(c * x for c, x in zip(h.a[:k], fixed))
        c = h.a[k]
        if c == 0:
            if rhs < 0 or (h.strict and rhs == 0):
                return None
            continue
        t = rhs / c
        if c > 0:
            bound = math.ceil(t) - 1 if h.strict and t.denominator == 1 else math.floor(t)
            hi = min(hi, bound)
        else:
            bound = math.floor(t) + 1 if h.strict and t.denominator == 1 else math.ceil(t)
            lo = max(lo, bound)
    if lo > hi:
        return None
    return int(lo), int(hi)


def _outer_ranges(body, N: int) -> list[range]:
    vs = body.vertices()
    out = []
    for j in range(body.dim - 1):
        lo = math.floor(min(N * v[j] for v in vs))
        hi = math.ceil(max(N * v[j] for v in vs))
        out.append(range(lo, hi + 1))
    return out


@dataclass
class SolutionCount:
    value: float
    predicted: float
    ratio: float
    points: int
    contained: bool
    series: float
    params: dict = field(default_factory=dict)


def count_solutions(sys: LinearSystem, N: int, w: SmoothWindow, weighted: bool = False,
                    buckets: int | None = ALPHA_BUCKETS) -> SolutionCount:
    """Sum over lattice points n of N * body of prod_j f(psi_j(n) + a_j), with f the weight g
    (``weighted``) or the indicator of S([y', y]).

    predicted: vol N^s prod_{p < y'} beta_p (weighted) or
    vol N^(s - r) Psi(N, [y', y])^r prod_{p < y'} beta_p (unweighted).
    """
    N = int(N)
    s, r = sys.s, sys.r
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    vol = sys.body.volume()
    if float(N) ** s * float(vol) > COUNT_LIMIT:
        raise CapacityError(f"about {float(N) ** s * float(vol):.3g} lattice points exceeds {COUNT_LIMIT:g}")
    ranges = sys.value_range(N)
    vmax = max(1, math.ceil(max(hi for _, hi in ranges)))
    if weighted:
        table = np.concatenate([[0.0], weight_g_block(1, vmax + 1, w, buckets)])
    else:
        table = np.zeros(vmax + 1)
        if vmax >= 1:
            table[1:] = build_factor_table(1, vmax + 1).smooth_mask(w)
    psi_m = np.array(sys.psi, dtype=np.int64)
    shifts = np.array(sys.shifts, dtype=np.int64)
    # forms not involving the last coordinate are scalars per row; test them first
    outer_only = [j for j in range(r) if psi_m[j, -1] == 0]
    inner = sorted((j for j in range(r) if psi_m[j, -1] != 0), key=lambda j: -abs(psi_m[j]).sum())
    hs = sys.body.halfspaces()
    parts = []
    points = 0
    in_range = True

    def lookup(v):
        v = np.asarray(v)
        return np.where((v >= 1) & (v <= vmax), table[np.clip(v, 0, vmax)], 0.0)

    for fixed in itertools.product(*_outer_ranges(sys.body, N)):
        rng = _last_range(hs, fixed, N)
        if rng is None:
            continue
        lo, hi = rng
        points += hi - lo + 1
        base = psi_m[:, :-1] @ np.array(fixed, dtype=np.int64) + shifts if s > 1 else shifts.copy()
        for j in range(r):
            ends = (int(base[j] + psi_m[j, -1] * lo), int(base[j] + psi_m[j, -1] * hi))
            in_range = in_range and 1 <= min(ends) and max(ends) <= N
        row_weight = 1.0
        for j in outer_only:
            row_weight *= float(lookup(base[j]))
        if row_weight == 0.0:
            continue
        t = np.arange(lo, hi + 1, dtype=np.int64)
        acc = np.full(t.size, row_weight)
        for j in inner:
            acc *= lookup(base[j] + psi_m[j, -1] * t)
        parts.append(math.fsum(acc))
    value = math.fsum(parts)
    w_lo = w.y_lo if w.y_lo > 1 else 1
    series = singular_series(sys, w_lo).value if w_lo >= 2 else 1.0
    if weighted:
        predicted = float(vol) * float(N) ** s * series
    else:
        predicted = float(vol) * float(N) ** (s - r) * float(psi(N, w)) ** r * series
    ratio = value / predicted if predicted else (math.nan if value == 0 else math.inf)
    return SolutionCount(value, predicted, ratio, points, in_range and points > 0, series,
                         dict(N=N, window=w.as_tuple(), weighted=weighted, volume=str(vol)))


# ---------------------------------------------------------------------------
# A + B = C


@dataclass
class AbcCensus:
    count: int
    predicted: float
    ratio: float
    psi: int
    params: dict = field(default_factory=dict)


def abc_census(N: int, w: SmoothWindow, coprime_only: bool = False) -> AbcCensus:
    """Ordered pairs (n1, n2) of positive integers with n1 + n2 <= N and n1, n2, n1 + n2 all
    in S([y', y]), against Psi(N, [y', y])^3 / (2N)."""
    N = int(N)
    if N > 10**6:
        raise CapacityError(f"pair census up to N={N} exceeds the budget 10^6")
    S = smooth_numbers(1, N + 1, w) if N >= 1 else np.zeros(0, dtype=np.int64)
    mask = np.zeros(N + 1, dtype=bool)
    mask[S] = True
    count = 0
    for n1 in S.tolist():
        n2 = S[: np.searchsorted(S, N - n1, side="right")]
        if n2.size == 0:
            break
        hit = mask[n1 + n2]
        if coprime_only:
            hit &= np.gcd(n2, n1) == 1
        count += int(np.count_nonzero(hit))
    total = int(S.size)
    predicted = total**3 / (2 * N) if N else 0.0
    ratio = count / predicted if predicted else (math.nan if count == 0 else math.inf)
    return AbcCensus(count, predicted, ratio, total,
                     dict(N=N, window=w.as_tuple(), coprime_only=coprime_only))


# ---------------------------------------------------------------------------
# descriptor files


def _parse_numbers(tokens: list[str]) -> list[Fraction]:
    return [Fraction(t) for t in tokens]


def parse_descriptor(text: str) -> tuple[LinearSystem, dict]:
    """Parse the plain-text system format.

    One directive per line, ``#`` starts a comment::

        s 2
        r 3
        form 1 0
        form 0 1
        form 1 1
        shift 0 0 0
        body simplex 0 0 ; 1 0 ; 0 1      (or: body box lo_1 .. lo_s hi_1 .. hi_s)
        N 30000
        y 173.2
        yprime 1
    """
    forms, shifts, body, extra = [], None, None, {}
    s_decl = r_decl = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, *rest = line.split()
        try:
            if key == "s":
                s_decl = int(rest[0])
            elif key == "r":
                r_decl = int(rest[0])
            elif key == "form":
                forms.append([int(t) for t in rest])
            elif key == "shift":
                shifts = [int(t) for t in rest]
            elif key == "body":
                kind, args = rest[0], " ".join(rest[1:])
                if kind == "box":
                    vals = _parse_numbers(args.split())
                    if len(vals) % 2:
                        raise DomainError("box needs 2s numbers")
                    h = len(vals) // 2
                    body = Box(tuple(vals[:h]), tuple(vals[h:]))
                elif kind == "simplex":
                    body = Simplex.of([_parse_numbers(v.split()) for v in args.split(";")])
                else:
                    raise DomainError(f"unknown body kind {kind!r}")
            elif key in ("N", "y", "yprime"):
                extra[key] = float(rest[0])
            else:
                raise DomainError(f"unknown directive {key!r}")
        except (ValueError, IndexError, ZeroDivisionError) as exc:
            raise DomainError(f"line {lineno}: cannot parse {raw.strip()!r} ({exc})") from None
    if body is None or not forms:
        raise DomainError("descriptor needs at least one form and a body")
    sys = LinearSystem.of(forms, shifts, body)
    if s_decl is not None and s_decl != sys.s:
        raise DomainError(f"declared s={s_decl} but forms have {sys.s} variables")
    if r_decl is not None and r_decl != sys.r:
        raise DomainError(f"declared r={r_decl} but {sys.r} forms given")
    if not sys.pairwise_independent():
        raise DomainError("forms are not pairwise linearly independent")
    return sys, extra
