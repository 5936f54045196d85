"""The quadratic Gauss-sum kernel K(a, b) = p^-1 sum_y e_p(a y^2 + b y).

Two routes are provided: the definitional O(p) sum (the oracle) and the
O(1) closed form

    K(a, b) = 1                                        a = b = 0
            = 0                                        a = 0, b != 0
            = p^(-1/2) (a/p) e_p(-b^2 inv(4a)) sigma_p a != 0

where sigma_p = p^(-1/2) sum_y e_p(y^2) is a unit-modulus fourth root of
unity depending only on p.  sigma_p is always computed by brute force:
with the negative-exponent character convention the textbook sign
formulas are an easy way to get a conjugate wrong, and the O(p) cost is
paid once per context.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fp_core import FieldContext, FpElement

_EPS = float(np.finfo(np.float64).eps)


@dataclass(frozen=True)
class KernelValue:
    """A complex exponential-sum value with a summation error bound."""

    value: complex
    abs_error: float


@dataclass(frozen=True)
class SigmaP:
    """Unit-modulus normalisation constant of the quadratic Gauss sum."""

    value: complex
    p: int


def sigma_p(ctx: FieldContext) -> SigmaP:
    """p^(-1/2) sum_y e_p(y^2), computed once and cached on the context."""

    def build():
        p = ctx.p
        sq = np.arange(p, dtype=np.int64) ** 2 % p
        val = complex(ctx.unit_roots[sq].sum()) / np.sqrt(p)
        return SigmaP(val, p)

    return ctx.cached("sigma_p", build)


def kernel_brute(ctx: FieldContext, a: FpElement, b: FpElement) -> KernelValue:
    """Definitional O(p) evaluation of K(a, b)."""
    p = ctx.p
    y = np.arange(p, dtype=np.int64)
    phase = (a % p * (y * y % p) + b % p * y) % p
    val = complex(ctx.unit_roots[phase].sum()) / p
    return KernelValue(val, _EPS * np.sqrt(p))


def kernel_closed(ctx: FieldContext, a: FpElement, b: FpElement) -> KernelValue:
    """Closed-form O(1) evaluation of K(a, b)."""
    p = ctx.p
    a %= p
    b %= p
    if a == 0:
        return KernelValue(1.0 + 0j if b == 0 else 0j, 0.0)
    inv4a = int(ctx.inv_table[4 * a % p])
    phase = (p - b * b % p) * inv4a % p
    val = (
        int(ctx.legendre_table[a])
        * complex(ctx.unit_roots[phase])
        * sigma_p(ctx).value
        / np.sqrt(p)
    )
    return KernelValue(val, 16 * _EPS)


def kernel_closed_grid(ctx: FieldContext) -> np.ndarray:
    """Full (a, b) table of closed-form kernel values, cached per context.

    Vectorised construction; the bilinear operator and the four-kernel
    products index into this table.
    """

    def build():
        p = ctx.p
        ctx.check_budget(16 * p * p, "kernel grid")
        a = np.arange(p, dtype=np.int64)[:, None]
        b = np.arange(p, dtype=np.int64)[None, :]
        inv4a = ctx.inv_table[4 * a % p]
        phase = (p - b * b % p) * inv4a % p
        grid = (
            ctx.legendre_table[a]
            * ctx.unit_roots[phase]
            * (sigma_p(ctx).value / np.sqrt(p))
        )
        grid[0, :] = 0
        grid[0, 0] = 1
        grid.setflags(write=False)
        return grid

    return ctx.cached("kernel_grid", build)
