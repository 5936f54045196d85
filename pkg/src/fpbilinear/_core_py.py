"""Pure numpy implementations of the hot kernels.

This module mirrors the compiled extension ``fpbilinear._core`` function
for function; whichever is active is chosen in ``fpbilinear.backend``.
All functions take raw tables (unit roots, inverses, Legendre symbols)
rather than a FieldContext so both backends stay context-free.

Integer hygiene: every product of two residues is reduced mod p before
the next multiply, so nothing here exceeds p^2 < 2^62.
"""

from __future__ import annotations

import math

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

NAME = "pure"

_dft_idx_cache: dict[int, np.ndarray] = {}


def dft_naive(values: np.ndarray, roots: np.ndarray) -> np.ndarray:
    """O(p^2) transform fhat(z) = sum_x f(x) e_p(xz) by direct summation."""
    p = len(values)
    idx = _dft_idx_cache.get(p)
    if idx is None:
        ar = np.arange(p, dtype=np.int64)
        idx = ar[:, None] * ar[None, :] % p
        if len(_dft_idx_cache) > 8:
            _dft_idx_cache.clear()
        _dft_idx_cache[p] = idx
    return roots[idx] @ values


def k1_brute_naive(p: int, roots: np.ndarray, x1: int, x2: int, x3: int) -> complex:
    """Definitional O(p^3) triple sum for the three-variable kernel."""
    x1 %= p
    x2 %= p
    x3 %= p
    w = (x2 + x3 - x1) % p
    v = (x2 - x1) % p
    ar = np.arange(p, dtype=np.int64)
    sq = ar * ar % p
    a2 = (p - x2) * sq % p
    a3 = ((p - x3) * sq + (p - v) * ar) % p
    wsq = w * sq % p
    acc = 0j
    for y1 in range(p):
        t1 = (x1 * y1 * y1 + v * y1) % p
        idx = (ar[:, None] + ar[None, :] - y1) % p
        phase = (t1 + a2[:, None] + a3[None, :] + wsq[idx]) % p
        acc += roots[phase].sum()
    return acc / p**3


def k1_brute_grouped(p: int, roots: np.ndarray, x1: int, x2: int, x3: int) -> complex:
    """Same triple sum, regrouped exactly into two circular correlations.

    Writing the phase as a product of five table factors, the sum over
    (y1, y2, y3) collapses to sum_t G[t] E[-t] F[t] with F, G length-p
    correlations, so the cost is O(p^2) while every one of the p^3 terms
    still contributes exactly once.  No Gauss-sum evaluation is involved,
    which keeps this path independent of the closed-form reducer.
    """
    x1 %= p
    x2 %= p
    x3 %= p
    ar = np.arange(p, dtype=np.int64)
    sq = ar * ar % p
    A = roots[x1 * sq % p]
    B = roots[(p - x2) * sq % p]
    C = roots[(p - x3) * sq % p]
    D = roots[(x2 + x3 - x1) % p * sq % p]
    E = roots[(x2 - x1) % p * ar % p]
    F = sliding_window_view(np.concatenate([D, D]), p)[:p] @ B
    G = sliding_window_view(np.concatenate([C, C]), p)[:p] @ A
    return (G * F * E[(p - ar) % p]).sum() / p**3


def quad3_sum(
    p: int,
    roots: np.ndarray,
    leg: np.ndarray,
    inv: np.ndarray,
    sigma: complex,
    d0: int, d1: int, d2: int,
    c01: int, c02: int, c12: int,
    l0: int, l1: int, l2: int,
    const: int,
) -> complex:
    """Exact sum of e_p over F_p^3 of a quadratic phase, by elimination.

    Each round removes one variable: a nonzero square coefficient is
    completed (one-dimensional Gauss sum, factor sqrt(p)*(a/p)*sigma and
    a quadratic correction pushed onto the remaining variables); a
    variable appearing only linearly forces a linear constraint that is
    solved and substituted (factor p); a variable absent from the phase
    contributes a free factor p or kills the sum.  Pivot preference is
    y1, then y2, then y0.
    """
    sqrtp = math.sqrt(p)
    d = [d0 % p, d1 % p, d2 % p]
    c = [[0, 0, 0], [0, 0, 0], [0, 0, 0]]
    c[0][1] = c[1][0] = c01 % p
    c[0][2] = c[2][0] = c02 % p
    c[1][2] = c[2][1] = c12 % p
    ln = [l0 % p, l1 % p, l2 % p]
    k = const % p
    active = [True, True, True]
    order = (1, 2, 0)
    inv4 = int(inv[4 % p])
    m = 1 + 0j

    while any(active):
        piv = -1
        for i in order:
            if active[i] and d[i] != 0:
                piv = i
                break
        if piv >= 0:
            a = d[piv]
            f = inv4 * int(inv[a]) % p
            m *= sqrtp * int(leg[a]) * sigma
            rest = [j for j in range(3) if active[j] and j != piv]
            b0 = ln[piv]
            k = (k - f * (b0 * b0 % p)) % p
            for j in rest:
                bj = c[piv][j]
                d[j] = (d[j] - f * (bj * bj % p)) % p
                ln[j] = (ln[j] - 2 * f * (bj * b0 % p)) % p
            if len(rest) == 2:
                j1, j2 = rest
                c[j1][j2] = c[j2][j1] = (
                    c[j1][j2] - 2 * f * (c[piv][j1] * c[piv][j2] % p)
                ) % p
            active[piv] = False
            continue

        piv = jj = -1
        for i in order:
            if not active[i]:
                continue
            for j in order:
                if j != i and active[j] and c[i][j] != 0:
                    piv, jj = i, j
                    break
            if piv >= 0:
                break
        if piv >= 0:
            m *= p
            cinv = int(inv[c[piv][jj]])
            beta = (p - ln[piv]) * cinv % p
            rest = [j for j in range(3) if active[j] and j != piv and j != jj]
            if rest:
                kk = rest[0]
                alpha = (p - c[piv][kk]) * cinv % p
                d[kk] = (d[kk] + (d[jj] * alpha % p) * alpha + c[jj][kk] * alpha) % p
                ln[kk] = (
                    ln[kk]
                    + 2 * (d[jj] * alpha % p) * beta
                    + c[jj][kk] * beta
                    + ln[jj] * alpha
                ) % p
            k = (k + (d[jj] * beta % p) * beta + ln[jj] * beta) % p
            active[piv] = active[jj] = False
            continue

        i = next(i for i in range(3) if active[i])
        if ln[i] != 0:
            return 0j
        m *= p
        active[i] = False

    return m * complex(roots[k])


def k1_reduced(
    p: int,
    roots: np.ndarray,
    leg: np.ndarray,
    inv: np.ndarray,
    sigma: complex,
    x1: int, x2: int, x3: int,
) -> complex:
    """O(1) kernel value via elimination of the three-variable phase."""
    x1 %= p
    x2 %= p
    x3 %= p
    w = (x2 + x3 - x1) % p
    v = (x2 - x1) % p
    total = quad3_sum(
        p, roots, leg, inv, sigma,
        (x2 + x3) % p, (x3 - x1) % p, (x2 - x1) % p,
        (p - 2 * w % p) % p, (p - 2 * w % p) % p, 2 * w % p,
        v, 0, (p - v) % p,
        0,
    )
    return total / p**3


def k2_brute(
    p: int,
    roots: np.ndarray,
    inv: np.ndarray,
    sqrt_lo: np.ndarray,
    sqrt_hi: np.ndarray,
    u1: int, u2: int, u3: int,
) -> complex:
    """O(p^3) enumeration of the constrained four-variable kernel.

    Enumerates (y1, y3, y4) and solves the quadric constraint
    G = y1^2 - y3^2 - y4^2 + y6^2 - y1 + y3 + y4 - y6 = 0 for y6 as a
    quadratic y6^2 - y6 + c with discriminant 1 - 4c, using the
    square-root tables.
    """
    u1 %= p
    u2 %= p
    u3 %= p
    s23 = (u2 + u3) % p
    s13 = (u1 + u3) % p
    iu3 = int(inv[u3])
    a2 = iu3 * (s23 * s23 % p) % p
    a1 = iu3 * (s13 * s13 % p) % p
    inv2 = int(inv[2])
    ar = np.arange(p, dtype=np.int64)
    sq = ar * ar % p
    acc = 0j
    for y1 in range(p):
        y1sq = y1 * y1 % p
        for y3 in range(p):
            d13 = (y3 - y1) % p
            # phase terms free of (y4, y6)
            t13 = (
                (p - a2) * (d13 * d13 % p)
                + u2 * (y3 * y3 % p)
                + s23 * y1sq
                + (p - 2 * s23 % p) * (y1 * y3 % p)
                + u2 * ((y1 - y3) % p)
            ) % p
            # constraint constant c(y4) = y1^2 - y3^2 - y4^2 - y1 + y3 + y4
            c0 = (y1sq - y3 * y3 - y1 + y3) % p
            cs = (c0 - sq + ar) % p
            disc = (1 - 4 * cs) % p
            lo = sqrt_lo[disc]
            ok = lo >= 0
            if not ok.any():
                continue
            y4 = ar[ok]
            lo = lo[ok]
            hi = sqrt_hi[disc[ok]]
            base4 = (t13 + (p - s13) * sq[ok]) % p  # adds -(u1+u3) y4^2
            for which in range(2):
                y6 = (1 + (lo if which == 0 else hi)) * inv2 % p
                d46 = (y6 - y4) % p
                phase = (
                    base4
                    + a1 * (d46 * d46 % p)
                    + (p - u1) * (y6 * y6 % p)
                    + (2 * s13 % p) * (y4 * y6 % p)
                    + (p - u1) * ((y4 - y6) % p)
                ) % p
                vals = roots[phase]
                if which == 1:
                    vals = vals[lo != hi]
                acc += vals.sum()
    return acc / p**4


def k2_via_h2(
    p: int,
    roots: np.ndarray,
    leg: np.ndarray,
    inv: np.ndarray,
    sigma: complex,
    u1: int, u2: int, u3: int,
) -> complex:
    """O(p) kernel value through the collapse identity: the sum over u4
    of paired three-variable kernels equals the constrained quadric sum."""
    acc = 0j
    for u4 in range(p):
        acc += k1_reduced(p, roots, leg, inv, sigma, u4, u2, u3 + u4) * np.conj(
            k1_reduced(p, roots, leg, inv, sigma, u4, u1, u3 + u4)
        )
    return acc


def char_sum(
    p: int,
    roots: np.ndarray,
    leg: np.ndarray,
    inv: np.ndarray,
    y1: int, y2: int, y3: int,
) -> complex:
    """One-dimensional mixed character sum over y4, poles excluded.

    S = sum_y4 chi(h1 h2) e_p(inv(4) y3 (h2 - h1)) with
    h1 = inv(y4)(y1 - 2 y4) + 1 and h2 = inv(y2 - y1 + y4)(y1 - 2 y4) + 1;
    y4 = 0 and y4 = y1 - y2 are excluded where the inverses blow up.
    """
    y1 %= p
    y2 %= p
    y3 %= p
    ar = np.arange(p, dtype=np.int64)
    mask = (ar != 0) & ((y2 - y1 + ar) % p != 0)
    y4 = ar[mask]
    lin = (y1 - 2 * y4) % p
    h1 = (inv[y4] * lin + 1) % p
    h2 = (inv[(y2 - y1 + y4) % p] * lin + 1) % p
    chi = leg[h1 * h2 % p].astype(np.float64)
    inv4 = int(inv[4 % p])
    phase = inv4 * y3 % p * ((h2 - h1) % p) % p
    return (chi * roots[phase]).sum()


def count_progressions(member: np.ndarray, p: int) -> int:
    """Number of pairs (x, y), y != 0, with x, x+y, x+y^2 all in the set.

    ``member`` is a uint8 0/1 array of length p.
    """
    double = np.concatenate([member, member])
    total = 0
    for y in range(1, p):
        ysq = y * y % p
        total += int(
            np.count_nonzero(member & double[y : y + p] & double[ysq : ysq + p])
        )
    return total
