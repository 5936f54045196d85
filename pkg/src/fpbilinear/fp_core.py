"""Exact arithmetic over F_p and the additive character e_p.

Everything downstream works with a FieldContext: a validated prime p
together with O(p) precomputed tables (modular inverses, Legendre
symbols, the complex roots e_p(k) = exp(-2*pi*i*k/p)).  Field elements
are canonical Python ints in [0, p); all modular reduction funnels
through the context so the negative-exponent character convention has a
single home.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field

import numpy as np

from .errors import NotPrime, TooLarge, ZeroInverse

# Deterministic Miller-Rabin witnesses, valid for every n < 3.3e24 and in
# particular for the whole 64-bit range.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

# Rough per-element cost of the eager tables: 8 (inv, int64) + 1
# (legendre, int8) + 16 (unit roots, complex128).
_BYTES_PER_ELEMENT = 25

FpElement = int


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin primality test for 64-bit integers."""
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(eq=False)
class FieldContext:
    """Immutable per-prime state: p plus the shared lookup tables.

    Tables are marked read-only after construction; the context is safe
    to share across threads.  Derived artifacts (the quadratic Gauss
    constant, square-root tables, kernel grids) are memoised lazily in
    ``_cache`` under ``_lock``.
    """

    p: int
    inv_table: np.ndarray
    legendre_table: np.ndarray
    unit_roots: np.ndarray
    max_table_bytes: int
    _cache: dict = field(default_factory=dict, repr=False)
    _lock: threading.RLock = field(default_factory=threading.RLock, repr=False)

    def reduce(self, a: int) -> FpElement:
        return a % self.p

    def cached(self, key, builder):
        """Once-only construction of a derived table, thread-safe.

        Re-entrant: builders may themselves request other cached keys.
        """
        with self._lock:
            if key not in self._cache:
                self._cache[key] = builder()
            return self._cache[key]

    def check_budget(self, nbytes: int, what: str) -> None:
        if nbytes > self.max_table_bytes:
            raise TooLarge(
                f"{what} needs {nbytes} bytes, over the {self.max_table_bytes} budget"
            )


def make_field(p: int, max_table_bytes: int = 2**31) -> FieldContext:
    """Validate p and build the shared tables; construction is O(p)."""
    if p < 3:
        raise NotPrime(f"p must be an odd prime >= 3, got {p}")
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if p * _BYTES_PER_ELEMENT > max_table_bytes:
        raise TooLarge(
            f"tables for p={p} need ~{p * _BYTES_PER_ELEMENT} bytes, "
            f"over the {max_table_bytes} budget"
        )

    inv = np.zeros(p, dtype=np.int64)
    inv_l = inv.tolist()
    inv_l[1] = 1
    for a in range(2, p):
        # inv[a] = -(p // a) * inv[p % a] mod p, the standard O(p) recurrence
        inv_l[a] = (p - (p // a)) * inv_l[p % a] % p
    inv[:] = inv_l

    legendre = np.full(p, -1, dtype=np.int8)
    squares = (np.arange(p, dtype=np.int64) ** 2) % p
    legendre[squares] = 1
    legendre[0] = 0

    unit_roots = np.exp(-2j * np.pi * np.arange(p) / p)

    for arr in (inv, legendre, unit_roots):
        arr.setflags(write=False)
    return FieldContext(p, inv, legendre, unit_roots, max_table_bytes)


def inv(ctx: FieldContext, a: FpElement) -> FpElement:
    """Multiplicative inverse of a nonzero residue."""
    a %= ctx.p
    if a == 0:
        raise ZeroInverse("0 has no multiplicative inverse")
    return int(ctx.inv_table[a])


def legendre(ctx: FieldContext, a: FpElement) -> int:
    """Legendre symbol (a/p) in {-1, 0, 1}."""
    return int(ctx.legendre_table[a % ctx.p])


def ep(ctx: FieldContext, x: FpElement) -> complex:
    """Additive character e_p(x) = exp(-2*pi*i*x/p)."""
    return complex(ctx.unit_roots[x % ctx.p])


def sqrt_mod(ctx: FieldContext, a: FpElement) -> tuple[FpElement, ...]:
    """All square roots of a mod p via Tonelli-Shanks.

    Returns () for a non-residue, (0,) for a = 0, and the sorted pair
    (r, p - r) otherwise.
    """
    p = ctx.p
    a %= p
    if a == 0:
        return (0,)
    if legendre(ctx, a) != 1:
        return ()
    if p % 4 == 3:
        r = pow(a, (p + 1) // 4, p)
    else:
        q, s = p - 1, 0
        while q % 2 == 0:
            q //= 2
            s += 1
        z = 2
        while legendre(ctx, z) != -1:
            z += 1
        m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
        while t != 1:
            i, t2 = 0, t
            while t2 != 1:
                t2 = t2 * t2 % p
                i += 1
            b = pow(c, 1 << (m - i - 1), p)
            m, c = i, b * b % p
            t, r = t * c % p, r * b % p
    return tuple(sorted((r, p - r)))


def sqrt_tables(ctx: FieldContext) -> tuple[np.ndarray, np.ndarray]:
    """Per-residue square-root lookup (lo root, hi root; -1 = no root).

    Built once per context; lets the quadric-surface enumerators solve
    y^2 = a in O(1) per query.
    """

    def build():
        p = ctx.p
        lo = np.full(p, -1, dtype=np.int64)
        hi = np.full(p, -1, dtype=np.int64)
        r = np.arange(p // 2 + 1, dtype=np.int64)
        sq = r * r % p
        lo[sq] = r
        hi[sq] = (p - r) % p
        lo.setflags(write=False)
        hi.setflags(write=False)
        return lo, hi

    return ctx.cached("sqrt_tables", build)
