"""Segmented sieving of smallest/largest prime factors and exact smooth-number counts.

Everything else in the package treats the functions here as ground truth, so they
only use exact integer arithmetic.  Counting over ``[1, x]`` streams aligned segments
(kept in a small LRU cache) and never materialises the whole range.
"""
from __future__ import annotations

import math
import threading
from collections import OrderedDict
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from . import config
from .errors import CapacityError, DomainError

INT64_MAX = 2**63 - 1


@dataclass(frozen=True)
class SmoothWindow:
    """Prime window ``[y_lo, y_hi]`` (both ends inclusive) defining S([y', y])."""

    y_lo: float
    y_hi: float

    def __post_init__(self):
        if not (self.y_lo >= 1):
            raise DomainError(f"y_lo must be >= 1, got {self.y_lo}")
        if not (self.y_hi >= self.y_lo):
            raise DomainError(f"need y_lo <= y_hi, got ({self.y_lo}, {self.y_hi})")

    def admits_prime(self, p: int) -> bool:
        return self.y_lo <= p <= self.y_hi

    def contains(self, n: int) -> bool:
        """Membership of a single positive integer, by factorisation."""
        if n < 1:
            return False
        return all(self.admits_prime(p) for p, _ in factorize(n))

    def as_tuple(self) -> tuple[float, float]:
        return (self.y_lo, self.y_hi)


# ---------------------------------------------------------------------------
# primes

_prime_lock = threading.Lock()
_primes = np.array([2, 3, 5, 7], dtype=np.int64)
_prime_bound = 10


def _eratosthenes(n: int) -> np.ndarray:
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    # odd-only sieve: index i stands for 2i + 1
    sieve = np.ones((n + 1) // 2, dtype=bool)
    sieve[0] = False
    for i in range(1, (math.isqrt(n) - 1) // 2 + 1):
        if sieve[i]:
            p = 2 * i + 1
            sieve[p * p // 2 :: p] = False
    odd = 2 * np.flatnonzero(sieve).astype(np.int64) + 1
    return np.concatenate(([2], odd)).astype(np.int64)


def primes_up_to(n: float) -> np.ndarray:
    """Ascending array of all primes <= n (read-only view of a shared cache)."""
    global _primes, _prime_bound
    n = int(math.floor(n))
    if n > config.PRIME_LIMIT:
        raise CapacityError(f"primes up to {n} exceed PRIME_LIMIT={config.PRIME_LIMIT}")
    if n > _prime_bound:
        with _prime_lock:
            if n > _prime_bound:
                bound = min(max(n, 2 * _prime_bound), config.PRIME_LIMIT)
                arr = _eratosthenes(bound)
                arr.setflags(write=False)
                _primes, _prime_bound = arr, bound
    primes = _primes
    return primes[: np.searchsorted(primes, n, side="right")]


def primes_below(n: float) -> np.ndarray:
    """Primes p < n (strict), e.g. the prime divisors of P(y')."""
    ps = primes_up_to(max(math.ceil(n), 1))
    return ps[ps < n]


def factorize(n: int) -> list[tuple[int, int]]:
    """Prime factorisation of ``n >= 1`` by trial division over sieved primes."""
    n = int(n)
    if n < 1:
        raise DomainError(f"factorize needs n >= 1, got {n}")
    out = []
    for p in primes_up_to(math.isqrt(n)).tolist():
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
    if n > 1:
        out.append((n, 1))
    return out


# ---------------------------------------------------------------------------
# factor tables


@dataclass(frozen=True, eq=False)
class FactorTable:
    """Smallest and largest prime factor of every n in ``[range_lo, range_hi)``.

    Conventions: 1 -> (1, 1), 0 -> (0, 0).  Arrays are read-only.
    """

    range_lo: int
    range_hi: int
    spf: np.ndarray
    lpf: np.ndarray
    primes: np.ndarray

    def __len__(self) -> int:
        return self.range_hi - self.range_lo

    def numbers(self) -> np.ndarray:
        return np.arange(self.range_lo, self.range_hi, dtype=np.int64)

    def _index(self, n: int) -> int:
        if not self.range_lo <= n < self.range_hi:
            raise DomainError(f"{n} outside table window [{self.range_lo}, {self.range_hi})")
        return n - self.range_lo

    def smallest(self, n: int) -> int:
        return int(self.spf[self._index(n)])

    def largest(self, n: int) -> int:
        return int(self.lpf[self._index(n)])

    def smooth_mask(self, w: SmoothWindow) -> np.ndarray:
        mask = (self.spf >= w.y_lo) & (self.lpf <= w.y_hi)
        if self.range_lo <= 1 < self.range_hi:
            mask[1 - self.range_lo] = True
        if self.range_lo == 0:
            mask[0] = False
        return mask

    def slice(self, lo: int, hi: int) -> "FactorTable":
        i, j = lo - self.range_lo, hi - self.range_lo
        return FactorTable(lo, hi, self.spf[i:j], self.lpf[i:j], self.primes)


def _sieve_segment(lo: int, hi: int, primes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    dtype = np.uint32 if hi <= 2**32 else np.uint64
    size = hi - lo
    rem = np.arange(lo, hi, dtype=np.int64)
    spf = np.zeros(size, dtype=dtype)
    lpf = np.zeros(size, dtype=dtype)
    used = []
    for p in primes.tolist():
        if p * p >= hi:
            break
        used.append(p)
        lpf[(-lo) % p :: p] = p
        pk = p
        while pk < hi:
            rem[(-lo) % pk :: pk] //= p
            pk *= p
    for p in reversed(used):
        spf[(-lo) % p :: p] = p
    big = rem > 1
    lpf[big] = rem[big]
    fresh = spf == 0
    spf[fresh] = np.arange(lo, hi, dtype=np.int64)[fresh]
    if lo <= 1 < hi:
        spf[1 - lo] = lpf[1 - lo] = 1
    if lo == 0:
        spf[0] = lpf[0] = 0
    return spf, lpf


def _check_range(range_lo: int, range_hi: int) -> None:
    if not (0 <= range_lo < range_hi <= INT64_MAX):
        raise DomainError(f"need 0 <= range_lo < range_hi <= 2^63-1, got [{range_lo}, {range_hi})")
    if math.isqrt(range_hi - 1) > config.PRIME_LIMIT:
        raise CapacityError(
            f"range_hi={range_hi} needs sieving primes beyond PRIME_LIMIT={config.PRIME_LIMIT}")


def build_factor_table(range_lo: int, range_hi: int) -> FactorTable:
    """Sieve spf/lpf over ``[range_lo, range_hi)`` in segments of ``config.SEGMENT_LENGTH``."""
    range_lo, range_hi = int(range_lo), int(range_hi)
    _check_range(range_lo, range_hi)
    if range_hi - range_lo > config.TABLE_BUDGET:
        raise CapacityError(
            f"window of {range_hi - range_lo} integers exceeds TABLE_BUDGET={config.TABLE_BUDGET}")
    primes = primes_up_to(math.isqrt(range_hi - 1))
    parts = [
        _sieve_segment(s, min(s + config.SEGMENT_LENGTH, range_hi), primes)
        for s in range(range_lo, range_hi, config.SEGMENT_LENGTH)
    ]
    dtype = np.result_type(*(p[0].dtype for p in parts))
    spf = np.concatenate([p[0] for p in parts]).astype(dtype, copy=False)
    lpf = np.concatenate([p[1] for p in parts]).astype(dtype, copy=False)
    spf.setflags(write=False)
    lpf.setflags(write=False)
    return FactorTable(range_lo, range_hi, spf, lpf, primes)


class _SegmentCache:
    """LRU cache of aligned segments ``[k S, (k+1) S)``, bounded in bytes."""

    def __init__(self, max_bytes: int):
        self.max_bytes = max_bytes
        self._store: OrderedDict[tuple[int, int], FactorTable] = OrderedDict()
        self._bytes = 0
        self._lock = threading.Lock()

    def get(self, k: int, seg: int) -> FactorTable:
        key = (k, seg)
        with self._lock:
            table = self._store.get(key)
            if table is not None:
                self._store.move_to_end(key)
                return table
        table = build_factor_table(k * seg, (k + 1) * seg)
        size = table.spf.nbytes + table.lpf.nbytes
        with self._lock:
            if key not in self._store:
                self._store[key] = table
                self._bytes += size
                while self._bytes > self.max_bytes and len(self._store) > 1:
                    _, old = self._store.popitem(last=False)
                    self._bytes -= old.spf.nbytes + old.lpf.nbytes
        return table

    def clear(self) -> None:
        with self._lock:
            self._store.clear()
            self._bytes = 0


_cache = _SegmentCache(config.CACHE_BYTES)


def iter_tables(lo: int, hi: int) -> Iterator[FactorTable]:
    """Yield factor tables covering ``[lo, hi)`` in ascending order."""
    lo, hi = int(lo), int(hi)
    if hi <= lo:
        return
    _check_range(lo, hi)
    seg = config.SEGMENT_LENGTH
    if hi - lo < seg // 8 and lo >= seg:
        # short window far from the origin: sieve it directly
        yield build_factor_table(lo, hi)
        return
    for k in range(lo // seg, (hi - 1) // seg + 1):
        table = _cache.get(k, seg)
        yield table.slice(max(lo, table.range_lo), min(hi, table.range_hi))


def clear_cache() -> None:
    _cache.clear()
    psi.cache_clear()
    residue_counts.cache_clear()


# ---------------------------------------------------------------------------
# counting


def _as_count_bound(x) -> int:
    if isinstance(x, float):
        if not math.isfinite(x):
            raise DomainError(f"x must be finite, got {x}")
        x = math.floor(x)
    x = int(x)
    if x > INT64_MAX - 1:
        raise DomainError(f"x={x} exceeds the 64-bit range")
    return x


def smooth_numbers(lo: int, hi: int, w: SmoothWindow) -> np.ndarray:
    """All members of S([y', y]) in ``[lo, hi)`` as an int64 array."""
    parts = [t.numbers()[t.smooth_mask(w)] for t in iter_tables(max(lo, 1), hi)]
    return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)


def smooth_indicator(lo: int, hi: int, w: SmoothWindow) -> np.ndarray:
    """Boolean indicator of S([y', y]) on ``[lo, hi)``."""
    if hi - lo > config.TABLE_BUDGET:
        raise CapacityError(f"indicator of {hi - lo} integers exceeds TABLE_BUDGET")
    parts = [t.smooth_mask(w) for t in iter_tables(lo, hi)]
    return np.concatenate(parts) if parts else np.zeros(0, dtype=bool)


@lru_cache(maxsize=4096)
def psi(x, w: SmoothWindow) -> int:
    """Psi(x, [y', y]): number of 1 <= n <= x in S([y', y])."""
    x = _as_count_bound(x)
    if x < 1:
        return 0
    return int(sum(int(np.count_nonzero(t.smooth_mask(w))) for t in iter_tables(1, x + 1)))


def psi_cumulative(lo: int, hi: int, w: SmoothWindow) -> np.ndarray:
    """Array ``C`` with ``C[i] = Psi(lo + i, w)`` for ``lo <= lo + i < hi``."""
    lo = max(int(lo), 0)
    base = psi(lo - 1, w) if lo >= 2 else 0
    return base + np.cumsum(smooth_indicator(lo, hi, w), dtype=np.int64)


@lru_cache(maxsize=1024)
def residue_counts(x, w: SmoothWindow, q: int) -> np.ndarray:
    """``counts[a] = Psi(x, [y', y]; q, a)`` for every residue ``a`` mod ``q``."""
    x = _as_count_bound(x)
    q = int(q)
    if q < 1:
        raise DomainError(f"modulus must be >= 1, got {q}")
    counts = np.zeros(q, dtype=np.int64)
    if x >= 1:
        for t in iter_tables(1, x + 1):
            nums = t.numbers()[t.smooth_mask(w)]
            counts += np.bincount(nums % q, minlength=q)
    counts.setflags(write=False)
    return counts


def psi_progression(x, w: SmoothWindow, q: int, a: int) -> int:
    """Psi(x, [y', y]; q, a)."""
    if not 0 <= a < q:
        raise DomainError(f"need 0 <= a < q, got a={a}, q={q}")
    return int(residue_counts(x, w, q)[a])


def von_mangoldt(n: int, table: FactorTable) -> float:
    """Lambda(n) read off the table: log p if n = p^k, else 0."""
    if n < 1:
        raise DomainError(f"von Mangoldt needs n >= 1, got {n}")
    s, l = table.smallest(n), table.largest(n)
    return math.log(s) if n > 1 and s == l else 0.0


# ---------------------------------------------------------------------------
# Dirichlet characters


def _root_of_unity(num: int, den: int) -> complex:
    t = Fraction(num, den) % 1
    exact = {Fraction(0): 1 + 0j, Fraction(1, 2): -1 + 0j, Fraction(1, 4): 1j, Fraction(3, 4): -1j}
    if t in exact:
        return exact[t]
    ang = 2 * math.pi * float(t)
    return complex(math.cos(ang), math.sin(ang))


@dataclass(frozen=True, eq=False)
class DirichletCharacter:
    """A Dirichlet character given by its table of values on residues mod q."""

    modulus: int
    values: np.ndarray
    principal: bool
    label: tuple = ()

    def __call__(self, n: int) -> complex:
        return complex(self.values[n % self.modulus])

    def conj(self, n: int) -> complex:
        return self(n).conjugate()


def _primitive_root(p: int, e: int) -> int:
    order = p - 1
    ell = [f for f, _ in factorize(order)] if order > 1 else []
    for g in range(2, p):
        if all(pow(g, order // f, p) != 1 for f in ell):
            if e > 1 and pow(g, p - 1, p * p) == 1:
                g += p
            return g
    raise AssertionError("no primitive root found")


def _component_logs(p: int, e: int) -> list[tuple[int, dict[int, int]]]:
    """Generators of (Z/p^e)^* with their orders and discrete-log tables."""
    m = p**e
    if p == 2:
        if e == 1:
            return []
        if e == 2:
            return [(2, {1: 0, 3: 1})]
        five_order = 2 ** (e - 2)
        sign, five = {}, {}
        x = 1
        for b in range(five_order):
            sign[x] = 0
            five[x] = b
            sign[(-x) % m] = 1
            five[(-x) % m] = b
            x = x * 5 % m
        return [(2, sign), (five_order, five)]
    g = _primitive_root(p, e)
    order = (p - 1) * p ** (e - 1)
    logs = {}
    x = 1
    for i in range(order):
        logs[x] = i
        x = x * g % m
    return [(order, logs)]


def dirichlet_characters(q: int) -> list[DirichletCharacter]:
    """All phi(q) Dirichlet characters modulo q; the principal one comes first."""
    q = int(q)
    if q < 1:
        raise DomainError(f"modulus must be >= 1, got {q}")
    parts = []  # (prime power, order, log table)
    for p, e in (factorize(q) if q > 1 else []):
        for order, logs in _component_logs(p, e):
            parts.append((p**e, order, logs))
    units = [r for r in range(q) if math.gcd(r, q) == 1]
    unit_logs = [[logs[r % m] for (m, _, logs) in parts] for r in units]
    orders = [o for (_, o, _) in parts]
    chars = []
    for label in np.ndindex(*orders) if orders else [()]:
        vals = np.zeros(q, dtype=complex)
        for r, lg in zip(units, unit_logs):
            num = sum(Fraction(j * l, o) for j, l, o in zip(label, lg, orders)) % 1
            vals[r] = _root_of_unity(num.numerator, num.denominator)
        vals.setflags(write=False)
        chars.append(DirichletCharacter(q, vals, principal=not any(label), label=tuple(label)))
    return chars


def principal_character(q: int) -> DirichletCharacter:
    return dirichlet_characters(q)[0]


def character_from_values(q: int, values: Sequence[complex]) -> DirichletCharacter:
    """Wrap an explicit value table, checking the character axioms."""
    vals = np.asarray(values, dtype=complex)
    if vals.shape != (q,):
        raise DomainError(f"need {q} values, got shape {vals.shape}")
    for r in range(q):
        if (math.gcd(r, q) > 1) != (abs(vals[r]) < 1e-12):
            raise DomainError(f"chi({r}) must vanish exactly when gcd({r},{q}) > 1")
    if abs(vals[1 % q] - 1) > 1e-12:
        raise DomainError("chi(1) must equal 1")
    for a in range(q):
        for b in range(q):
            if abs(vals[a * b % q] - vals[a] * vals[b]) > 1e-9:
                raise DomainError("values are not completely multiplicative")
    vals.setflags(write=False)
    principal = all(abs(vals[r] - 1) < 1e-12 for r in range(q) if math.gcd(r, q) == 1)
    return DirichletCharacter(q, vals, principal)


def legendre_character(p: int) -> DirichletCharacter:
    """The quadratic character (./p) for an odd prime p."""
    vals = [0] * p
    for r in range(1, p):
        vals[r] = 1 if pow(r, (p - 1) // 2, p) == 1 else -1
    return character_from_values(p, vals)


def psi_character(x, w: SmoothWindow, chi: DirichletCharacter) -> complex:
    """Psi(x, [y', y]; chi) = sum of chi(n) over smooth n <= x."""
    counts = residue_counts(x, w, chi.modulus)
    nz = np.flatnonzero(counts)
    terms = counts[nz] * chi.values[nz]
    return complex(math.fsum(terms.real), math.fsum(terms.imag))
