"""Reduced kernels built from the quadratic Gauss sum.

Objects
-------
Three-variable kernel (the first Cauchy-Schwarz kernel):

    K1(x1, x2, x3) = p^-3 sum_{y1,y2,y3} e_p(R(x; y)),
    R = x1 y1^2 - x2 y2^2 - x3 y3^2
        + (x3 + x2 - x1)(y2 + y3 - y1)^2 + (x2 - x1)(y1 - y3).

Its quadratic part has symmetric matrix with determinant
(x3 + x2)(x2 - x1)(x3 - x1); off that degenerate locus the kernel has
exact modulus p^(-3/2), and on the covered degenerate branches
((x3 + x2) = 0 or (x2 - x1) = 0, with x3 != x1) it is bounded by p^-1.

Four-variable constrained kernel (the second Cauchy-Schwarz kernel):

    K2(u1, u2, u3) = p^-4 sum_{y1,y3,y4,y6: G=0} e_p(R2),
    G = y1^2 - y3^2 - y4^2 + y6^2 - y1 + y3 + y4 - y6,

defined for u3 != 0 and evaluated either by O(p^3) enumeration of the
quadric surface (oracle) or in O(p) through the collapse identity

    sum_{u4} H2(u4, u2, u3 + u4, u1) = K2(u1, u2, u3),

with H2(a, b, c, d) = K1(a, b, c) * conj(K1(a, d, c)).

Every fast path here is paired with a brute-force oracle, and all
evaluators return a KernelValue carrying a summation error bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import backend
from .errors import BudgetExceeded, DegenerateInput
from .fp_core import FieldContext, FpElement, sqrt_tables
from .gauss import KernelValue, kernel_closed, sigma_p

_EPS = float(np.finfo(np.float64).eps)

K1_BRUTE_CAP = 199
K1_NAIVE_CAP = 61
K2_BRUTE_CAP = 61
K2_FULL_ENUM_CAP = 13


class K1Point(NamedTuple):
    x1: int
    x2: int
    x3: int


class K2Point(NamedTuple):
    u1: int
    u2: int
    u3: int


@dataclass
class ExceptionalSet:
    """The u3 values where the normalised four-variable kernel is large."""

    owner: tuple[int, int]
    members: list[int]
    detection: str
    values: dict[int, float] | None = None


def r1_phase(
    ctx: FieldContext,
    x1: FpElement, x2: FpElement, x3: FpElement,
    y1: FpElement, y2: FpElement, y3: FpElement,
) -> FpElement:
    """Exact residue of the three-variable phase polynomial."""
    p = ctx.p
    return (
        x1 * y1 * y1
        - x2 * y2 * y2
        - x3 * y3 * y3
        + (x3 + x2 - x1) * (y2 + y3 - y1) ** 2
        + (x2 - x1) * (y1 - y3)
    ) % p


def r1_phase_terms(
    ctx: FieldContext,
    x1: FpElement, x2: FpElement, x3: FpElement,
    y1: FpElement, y2: FpElement, y3: FpElement,
) -> FpElement:
    """Independent term-by-term evaluation of the same phase (test oracle)."""
    p = ctx.p
    total = 0
    for coeff, val in (
        (x1, y1 * y1),
        (-x2, y2 * y2),
        (-x3, y3 * y3),
        (x3 + x2 - x1, (y2 + y3 - y1) ** 2),
        (x2 - x1, y1 - y3),
    ):
        total = (total + (coeff % p) * (val % p)) % p
    return total


def det_a(ctx: FieldContext, x1: FpElement, x2: FpElement, x3: FpElement) -> FpElement:
    """Determinant of the phase's quadratic part: (x3+x2)(x2-x1)(x3-x1)."""
    p = ctx.p
    return (x3 + x2) % p * ((x2 - x1) % p) % p * ((x3 - x1) % p) % p


def det_a_matrix(
    ctx: FieldContext, x1: FpElement, x2: FpElement, x3: FpElement
) -> FpElement:
    """Cross-check path: cofactor expansion of the explicit 3x3 matrix."""
    p = ctx.p
    w = (x2 + x3 - x1) % p
    a = [
        [(x2 + x3) % p, (p - w) % p, (p - w) % p],
        [(p - w) % p, (x3 - x1) % p, w],
        [(p - w) % p, w, (x2 - x1) % p],
    ]
    det = (
        a[0][0] * ((a[1][1] * a[2][2] - a[1][2] * a[2][1]) % p)
        - a[0][1] * ((a[1][0] * a[2][2] - a[1][2] * a[2][0]) % p)
        + a[0][2] * ((a[1][0] * a[2][1] - a[1][1] * a[2][0]) % p)
    )
    return det % p


def k1_brute(
    ctx: FieldContext,
    x1: FpElement, x2: FpElement, x3: FpElement,
    method: str = "auto",
) -> KernelValue:
    """Exact definitional triple sum, with compensated accumulation.

    ``naive`` walks all p^3 terms; ``grouped`` factors the same sum into
    two length-p circular correlations (O(p^2), still definitional —
    validated against ``naive`` exhaustively at small p).  ``auto``
    picks naive below K1_NAIVE_CAP and grouped up to K1_BRUTE_CAP.
    """
    p = ctx.p
    if method == "auto":
        method = "naive" if p <= K1_NAIVE_CAP else "grouped"
    if method == "naive":
        if p > K1_BRUTE_CAP:
            raise BudgetExceeded(f"k1_brute naive capped at p <= {K1_BRUTE_CAP}")
        val = backend.impl.k1_brute_naive(p, ctx.unit_roots, x1 % p, x2 % p, x3 % p)
    elif method == "grouped":
        if p > 100 * K1_BRUTE_CAP:
            raise BudgetExceeded("k1_brute grouped cap exceeded")
        val = backend.impl.k1_brute_grouped(p, ctx.unit_roots, x1 % p, x2 % p, x3 % p)
    else:
        raise ValueError(f"unknown method {method!r}")
    return KernelValue(complex(val), _EPS * p**1.5)


def k1_reduced(
    ctx: FieldContext, x1: FpElement, x2: FpElement, x3: FpElement
) -> KernelValue:
    """O(1) kernel value by iterated completion of squares.

    The eliminator pivots on y2, then y3, then y1, branching explicitly
    whenever a leading coefficient vanishes; agrees with the brute sum on
    every point, degenerate branches included.
    """
    val = backend.impl.k1_reduced(
        ctx.p, ctx.unit_roots, ctx.legendre_table, ctx.inv_table,
        sigma_p(ctx).value, x1 % ctx.p, x2 % ctx.p, x3 % ctx.p,
    )
    return KernelValue(complex(val), 64 * _EPS)


def k1_grid(ctx: FieldContext) -> np.ndarray:
    """All K1 values as a (p, p, p) array, cached (reduced evaluator)."""

    def build():
        p = ctx.p
        ctx.check_budget(16 * p**3, "k1 grid")
        roots, leg, inw = ctx.unit_roots, ctx.legendre_table, ctx.inv_table
        sig = sigma_p(ctx).value
        red = backend.impl.k1_reduced
        out = np.empty((p, p, p), dtype=np.complex128)
        for x1 in range(p):
            for x2 in range(p):
                for x3 in range(p):
                    out[x1, x2, x3] = red(p, roots, leg, inw, sig, x1, x2, x3)
        out.setflags(write=False)
        return out

    return ctx.cached("k1_grid", build)


def h1_product(
    ctx: FieldContext,
    s1: FpElement, s2: FpElement, n1: FpElement, n2: FpElement,
) -> KernelValue:
    """K(s1-n1, n1) conj(K(s1-n2, n2)) conj(K(s2-n1, n1)) K(s2-n2, n2)."""
    v = (
        kernel_closed(ctx, s1 - n1, n1).value
        * np.conj(kernel_closed(ctx, s1 - n2, n2).value)
        * np.conj(kernel_closed(ctx, s2 - n1, n1).value)
        * kernel_closed(ctx, s2 - n2, n2).value
    )
    return KernelValue(complex(v), 64 * _EPS)


def h2_product(
    ctx: FieldContext,
    x1: FpElement, x2: FpElement, x3: FpElement, x4: FpElement,
) -> KernelValue:
    """K1(x1, x2, x3) * conj(K1(x1, x4, x3))."""
    v = k1_reduced(ctx, x1, x2, x3).value * np.conj(k1_reduced(ctx, x1, x4, x3).value)
    return KernelValue(complex(v), 64 * _EPS)


def g_constraint(
    ctx: FieldContext,
    y1: FpElement, y3: FpElement, y4: FpElement, y6: FpElement,
) -> FpElement:
    """Residue of the quadric G = y1^2-y3^2-y4^2+y6^2-y1+y3+y4-y6."""
    return (
        y1 * y1 - y3 * y3 - y4 * y4 + y6 * y6 - y1 + y3 + y4 - y6
    ) % ctx.p


def r2_phase(
    ctx: FieldContext,
    u1: FpElement, u2: FpElement, u3: FpElement,
    y1: FpElement, y3: FpElement, y4: FpElement, y6: FpElement,
) -> FpElement:
    """Exact residue of the four-variable phase polynomial (u3 != 0)."""
    p = ctx.p
    u1 %= p
    u2 %= p
    u3 %= p
    if u3 == 0:
        raise DegenerateInput("phase contains inv(u3); u3 must be nonzero")
    iu3 = int(ctx.inv_table[u3])
    s23 = (u2 + u3) % p
    s13 = (u1 + u3) % p
    a2 = iu3 * (s23 * s23 % p) % p
    a1 = iu3 * (s13 * s13 % p) % p
    d13 = (y3 - y1) % p
    d46 = (y6 - y4) % p
    return (
        -a2 * (d13 * d13 % p)
        + a1 * (d46 * d46 % p)
        + u2 * (y3 * y3 % p)
        + s23 * (y1 * y1 % p)
        - 2 * s23 * (y1 * y3 % p)
        + u2 * ((y1 - y3) % p)
        - u1 * (y6 * y6 % p)
        - s13 * (y4 * y4 % p)
        + 2 * s13 * (y4 * y6 % p)
        - u1 * ((y4 - y6) % p)
    ) % p


def _check_k2_domain(ctx, u1, u2, u3):
    p = ctx.p
    if u3 % p == 0:
        raise DegenerateInput("u3 must be nonzero")
    if (u1 - u2) % p == 0:
        raise DegenerateInput("u1 and u2 must differ")


def k2_brute(
    ctx: FieldContext, u1: FpElement, u2: FpElement, u3: FpElement
) -> KernelValue:
    """O(p^3) oracle: enumerate (y1, y3, y4), solve the quadric for y6."""
    p = ctx.p
    _check_k2_domain(ctx, u1, u2, u3)
    if p > K2_BRUTE_CAP:
        raise BudgetExceeded(f"k2_brute capped at p <= {K2_BRUTE_CAP}")
    lo, hi = sqrt_tables(ctx)
    val = backend.impl.k2_brute(
        p, ctx.unit_roots, ctx.inv_table, lo, hi, u1 % p, u2 % p, u3 % p
    )
    return KernelValue(complex(val), _EPS * np.sqrt(2 * p**3) * 2 / p)


def k2_full_enum(
    ctx: FieldContext, u1: FpElement, u2: FpElement, u3: FpElement
) -> KernelValue:
    """O(p^4) cross-check: enumerate all four variables, filter G = 0."""
    p = ctx.p
    _check_k2_domain(ctx, u1, u2, u3)
    if p > K2_FULL_ENUM_CAP:
        raise BudgetExceeded(f"k2_full_enum capped at p <= {K2_FULL_ENUM_CAP}")
    acc = 0j
    for y1 in range(p):
        for y3 in range(p):
            for y4 in range(p):
                for y6 in range(p):
                    if g_constraint(ctx, y1, y3, y4, y6) == 0:
                        acc += ctx.unit_roots[
                            r2_phase(ctx, u1, u2, u3, y1, y3, y4, y6)
                        ]
    return KernelValue(complex(acc) / p**4, _EPS * np.sqrt(2 * p**3) * 2 / p)


def k2_via_h2(
    ctx: FieldContext, u1: FpElement, u2: FpElement, u3: FpElement
) -> KernelValue:
    """O(p) evaluation through the collapse identity over u4."""
    p = ctx.p
    _check_k2_domain(ctx, u1, u2, u3)
    val = backend.impl.k2_via_h2(
        p, ctx.unit_roots, ctx.legendre_table, ctx.inv_table,
        sigma_p(ctx).value, u1 % p, u2 % p, u3 % p,
    )
    return KernelValue(complex(val), _EPS * np.sqrt(p) / p**2)


def k2_values_for_pair(
    ctx: FieldContext, u1: FpElement, u2: FpElement
) -> np.ndarray:
    """|K2(u1, u2, u3)| * p^(5/2) for u3 = 1..p-1 (index 0 unused = 0)."""
    p = ctx.p
    out = np.zeros(p)
    scale = p**2.5
    for u3 in range(1, p):
        out[u3] = abs(k2_via_h2(ctx, u1, u2, u3).value) * scale
    return out


def exceptional_candidates_algebraic(
    ctx: FieldContext, u1: FpElement, u2: FpElement
) -> list[int]:
    """Roots of the three denominator-cleared degeneracy conditions.

    The conditions are: u1 + u2 + u3 = 0; and, writing a = u1(u1 + u3),
    b = u2(u2 + u3), t = u3, the cleared forms of
    a/t^2 - b/a = 1  (a^2 - b t^2 - a t^2 = 0)  and
    a/t^2 - b/a = 0  (a^2 - b t^2 = 0), taken over u3 != 0 with a != 0
    so the rational forms are defined.
    """
    p = ctx.p
    u1 %= p
    u2 %= p
    out = []
    for u3 in range(1, p):
        if (u1 + u2 + u3) % p == 0:
            out.append(u3)
            continue
        a = u1 * (u1 + u3) % p
        if a == 0:
            continue
        b = u2 * (u2 + u3) % p
        t2 = u3 * u3 % p
        asq = a * a % p
        if (asq - b * t2 - a * t2) % p == 0 or (asq - b * t2) % p == 0:
            out.append(u3)
    return out


def exceptional_set(
    ctx: FieldContext,
    u1: FpElement,
    u2: FpElement,
    method: str = "empirical",
    tau: float = 2.0,
) -> ExceptionalSet:
    """The u3 where p^(5/2)|K2| exceeds tau, or the algebraic candidates."""
    p = ctx.p
    u1 %= p
    u2 %= p
    if (u1 - u2) % p == 0:
        raise DegenerateInput("u1 and u2 must differ")
    if method == "empirical":
        vals = k2_values_for_pair(ctx, u1, u2)
        members = [u3 for u3 in range(1, p) if vals[u3] > tau]
        return ExceptionalSet(
            (u1, u2), members, "empirical", {m: float(vals[m]) for m in members}
        )
    if method == "algebraic":
        return ExceptionalSet(
            (u1, u2), exceptional_candidates_algebraic(ctx, u1, u2), "algebraic"
        )
    raise ValueError(f"unknown method {method!r}")


def exceptional_comparison(
    ctx: FieldContext, u1: FpElement, u2: FpElement, tau: float = 2.0
) -> dict:
    """Empirical vs algebraic exceptional sets and their symmetric difference."""
    emp = exceptional_set(ctx, u1, u2, "empirical", tau)
    alg = exceptional_set(ctx, u1, u2, "algebraic")
    se, sa = set(emp.members), set(alg.members)
    return {
        "empirical": emp,
        "algebraic": alg,
        "symmetric_difference": sorted(se ^ sa),
        "empirical_only": sorted(se - sa),
        "algebraic_only": sorted(sa - se),
    }
