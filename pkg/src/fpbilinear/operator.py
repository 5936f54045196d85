"""The bilinear Gauss-kernel operator and its norm machinery.

    T(f1, f2)(s) = sum_{n != s} f1(s - n) f2(n) K(s - n, n)

The diagonal n = s must stay excluded: with it, the delta pair already
has ratio 1 and there is nothing to estimate.

This module also evaluates, term by term, the identities and
Cauchy-Schwarz inequalities that decompose ||T(f1, f2)||_2^2 down to the
reduced kernels: the main/error-term split of the squared norm, the
four-kernel form and its diagonal split, the side-term identity, the
collapse to the three-variable kernel, the second Cauchy-Schwarz step,
and the collapse to the constrained four-variable kernel.  Each check is
a direct evaluation of both sides, so the suite doubles as a cross-
validation of every kernel evaluator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .errors import BudgetExceeded
from .fp_core import FieldContext
from .gauss import kernel_closed_grid
from .kernels import k1_grid, k2_via_h2
from .spectral import GridFunction, norm

DECOMPOSITION_CAP = 31
CHAIN_CAP = 13


@dataclass
class NormEstimate:
    """Certified lower bound on the operator norm, with witnesses."""

    value: float
    witness_f1: GridFunction
    witness_f2: GridFunction
    restarts: int
    converged: bool


@dataclass
class ChainCheck:
    name: str
    kind: str  # "identity" or "inequality"
    lhs: float
    rhs: float
    residual: float  # |lhs-rhs| (identity) or rhs-lhs (inequality slack)
    passed: bool


@dataclass
class ChainReport:
    p: int
    checks: list[ChainCheck] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)


def _shift_index(ctx: FieldContext) -> np.ndarray:
    def build():
        p = ctx.p
        ar = np.arange(p)
        idx = (ar[:, None] - ar[None, :]) % p
        idx.setflags(write=False)
        return idx

    return ctx.cached("shift_index", build)


def apply_T(ctx: FieldContext, f1: GridFunction, f2: GridFunction) -> GridFunction:
    """Apply the operator; O(p^2) via the cached closed-form kernel grid."""
    p = ctx.p
    km = kernel_closed_grid(ctx)
    v1, v2 = f1.values, f2.values
    out = np.empty(p, dtype=np.complex128)
    ar = np.arange(p)
    block = max(1, min(p, (1 << 22) // max(p, 1)))
    for s0 in range(0, p, block):
        s = ar[s0 : min(s0 + block, p), None]
        sn = (s - ar[None, :]) % p
        out[s0 : s0 + sn.shape[0]] = (v1[sn] * km[sn, ar[None, :]] * v2).sum(axis=1)
    # the only surviving diagonal term is s = 0: K(0, s) = 0 for s != 0
    out[0] -= v1[0] * v2[0]
    return GridFunction(out, ctx)


def _pair_matrix(ctx: FieldContext, f1: GridFunction, f2: GridFunction) -> np.ndarray:
    """A[s, n] = f1(s - n) f2(n) K(s - n, n), the full summand table."""
    p = ctx.p
    km = kernel_closed_grid(ctx)
    sn = _shift_index(ctx)
    return f1.values[sn] * km[sn, np.arange(p)[None, :]] * f2.values[None, :]


def decomposition_terms(
    ctx: FieldContext, f1: GridFunction, f2: GridFunction
) -> dict:
    """Direct evaluation of the squared-norm split into main and error term.

    Expanding ||T(f1,f2)||^2 with an unrestricted inner conjugate sum
    gives main - error, where the error term is the n2 = s slice; since
    K(0, s) vanishes off s = 0, the error term collapses to a single sum
    over n1 != 0 bounded by p^(-1/2) ||f1||^2 ||f2||^2.
    """
    p = ctx.p
    if p > DECOMPOSITION_CAP:
        raise BudgetExceeded(f"decomposition check capped at p <= {DECOMPOSITION_CAP}")
    km = kernel_closed_grid(ctx)
    v1, v2 = f1.values, f2.values
    a = _pair_matrix(ctx, f1, f2)
    row_all = a.sum(axis=1)
    row_off = row_all - np.diagonal(a)
    main = complex((row_off * np.conj(row_all)).sum())
    diag_slice = v1[0] * v2 * km[0, :]
    error = complex((row_off * np.conj(diag_slice)).sum())
    n1 = np.arange(1, p)
    error_single = complex(
        (
            v1[(-n1) % p]
            * v2[n1]
            * np.conj(v1[0])
            * np.conj(v2[0])
            * km[(-n1) % p, n1]
        ).sum()
    )
    tnorm2 = norm(apply_T(ctx, f1, f2), 2.0) ** 2
    return {
        "norm_sq": tnorm2,
        "main": main,
        "error": error,
        "error_single": error_single,
        "residual": abs(tnorm2 - (main - error)),
        "error_bound": norm(f1, 2.0) ** 2 * norm(f2, 2.0) ** 2 / math.sqrt(p),
    }


def decomposition_residual(
    ctx: FieldContext, f1: GridFunction, f2: GridFunction
) -> float:
    """| ||T||_2^2 - (main - error) | with both sides evaluated directly."""
    return decomposition_terms(ctx, f1, f2)["residual"]


def _k2_grid(ctx: FieldContext) -> np.ndarray:
    """K2 on its domain (u1 != u2, u3 != 0), zeros elsewhere; cached."""

    def build():
        p = ctx.p
        ctx.check_budget(16 * p**3, "k2 grid")
        out = np.zeros((p, p, p), dtype=np.complex128)
        for u1 in range(p):
            for u2 in range(p):
                if u1 == u2:
                    continue
                for u3 in range(1, p):
                    out[u1, u2, u3] = k2_via_h2(ctx, u1, u2, u3).value
        out.setflags(write=False)
        return out

    return ctx.cached("k2_grid", build)


def cauchy_chain_check(
    ctx: FieldContext,
    f1: GridFunction,
    f2: GridFunction,
    rel_tol: float = 1e-8,
) -> ChainReport:
    """Verify every displayed identity and inequality of the norm proof chain.

    Identities are checked to ``rel_tol`` relative error, inequalities for
    nonnegative slack (up to the same tolerance).  The single-function
    stages use f1.
    """
    p = ctx.p
    if p > CHAIN_CAP:
        raise BudgetExceeded(f"chain check capped at p <= {CHAIN_CAP}")
    km = kernel_closed_grid(ctx)
    k1g = k1_grid(ctx)
    k2g = _k2_grid(ctx)
    f = f1.values
    ar = np.arange(p)
    report = ChainReport(p)

    def add_identity(name, lhs, rhs):
        scale = max(abs(lhs), abs(rhs), 1.0)
        resid = abs(lhs - rhs)
        report.checks.append(
            ChainCheck(name, "identity", abs(lhs), abs(rhs), resid,
                       resid <= rel_tol * scale)
        )

    def add_bound(name, lhs, rhs):
        scale = max(abs(lhs), abs(rhs), 1.0)
        slack = rhs - lhs
        report.checks.append(
            ChainCheck(name, "inequality", lhs, rhs, slack,
                       slack >= -rel_tol * scale)
        )

    terms = decomposition_terms(ctx, f1, f2)
    add_identity(
        "squared-norm-decomposition",
        terms["norm_sq"] + 0j,
        terms["main"] - terms["error"],
    )
    add_identity("error-term-collapse", terms["error"], terms["error_single"])
    add_bound("error-term-bound", abs(terms["error"]), terms["error_bound"])

    # four-kernel form: lam1 = sum over (n1 not in {s1,s2}, n2, s1, s2)
    # of f(s1-n1) conj(f(s2-n1)) conj(f(s1-n2)) f(s2-n2) H1(s1,s2,n1,n2),
    # via the inner product structure in s for each (n1, n2)
    sn = _shift_index(ctx)
    fk = f[sn] * km[sn, ar[None, :]]  # fk[s, n] = f(s-n) K(s-n, n)
    g2 = np.abs(fk) ** 2
    lam1 = 0.0
    lam1_offdiag = 0.0
    for n1 in range(p):
        b = fk[:, n1][:, None] * np.conj(fk)  # b[s, n2], the s-summand
        b[n1, :] = 0  # the n1 not in {s1, s2} restriction
        tot = b.sum(axis=0)
        lam1 += float((np.abs(tot) ** 2).sum())
        lam1_offdiag += float(
            ((np.abs(tot) ** 2) - (np.abs(b) ** 2).sum(axis=0)).sum()
        )
    lam1_diag = 0.0  # s1 = s2 = s slice: n1 != s, n2 unrestricted
    for s in range(p):
        c1 = g2[s, :].copy()
        c1[s] = 0
        lam1_diag += float(c1.sum() * g2[s, :].sum())

    add_identity("four-kernel-diagonal-split", lam1 + 0j, lam1_diag + lam1_offdiag)
    add_bound(
        "first-cauchy-schwarz",
        abs(terms["main"]),
        norm(f2, 2.0) ** 2 * math.sqrt(max(lam1, 0.0)),
    )

    # side term: sum_{s1 != 0, n2} f(s1) conj(f(0)) conj(f(s1-n2)) f(-n2)
    #            H1(s1, 0, 0, n2)
    side = 0j
    for s1 in range(1, p):
        kprod = (
            km[s1, 0]
            * np.conj(km[(s1 - ar) % p, ar])
            * np.conj(km[0, 0])
            * km[(-ar) % p, ar]
        )
        side += (f[s1] * np.conj(f[0]) * np.conj(f[(s1 - ar) % p]) * f[(-ar) % p] * kprod).sum()

    # unrestricted-n form: sum_{n1, n2, s1 != s2} ... = lam1_refined
    lam1_refined = 0.0
    for n1 in range(p):
        b = fk[:, n1][:, None] * np.conj(fk)
        tot = b.sum(axis=0)
        lam1_refined += float(
            ((np.abs(tot) ** 2) - (np.abs(b) ** 2).sum(axis=0)).sum().real
        )
    add_identity(
        "side-term-identity",
        lam1_offdiag + 0j,
        lam1_refined - 2 * side.real,
    )

    # collapse to the three-variable kernel
    lam1_simpl = 0j
    for x1 in range(p):
        x3 = ar[ar != x1]
        inner = (
            np.conj(f)[None, :]
            * f[(np.add.outer(x3, ar) - x1) % p]
            * k1g[x1, :, :].T[ar != x1]
        ).sum(axis=1)
        lam1_simpl += (f[x1] * np.conj(f[x3]) * inner).sum()
    add_identity("three-variable-collapse", lam1_refined + 0j, lam1_simpl)

    # second Cauchy-Schwarz: lam2 via C(x2) = conj(f(x2)) f(x2+x3-x1) K1(x1,x2,x3)
    lam2 = 0.0
    lam2_diag = 0.0
    for x1 in range(p):
        for x3 in range(p):
            if x3 == x1:
                continue
            shift = (ar + x3 - x1) % p
            c = np.conj(f) * f[shift] * k1g[x1, :, x3]
            lam2 += float(abs(c.sum()) ** 2)
            lam2_diag += float((np.abs(c) ** 2).sum())
    lam2_off = lam2 - lam2_diag
    add_bound(
        "second-cauchy-schwarz",
        abs(lam1_simpl),
        norm(f1, 2.0) ** 2 * math.sqrt(max(lam2, 0.0)),
    )

    # collapse to the constrained four-variable kernel
    lam2_simpl = 0j
    for u1 in range(p):
        for u2 in range(p):
            if u1 == u2:
                continue
            u3 = ar[1:]
            lam2_simpl += (
                f[u1]
                * np.conj(f[u2])
                * np.conj(f[(u1 + u3) % p])
                * f[(u2 + u3) % p]
                * k2g[u1, u2, u3]
            ).sum()
    add_identity("constrained-collapse", lam2_off + 0j, lam2_simpl)

    return report


def _matrix_fix_f2(ctx: FieldContext, v2: np.ndarray) -> np.ndarray:
    """Matrix of f1 -> T(f1, f2): M[s, m] = K(m, s-m) f2(s-m), m != 0."""
    p = ctx.p
    km = kernel_closed_grid(ctx)
    sn = _shift_index(ctx)
    m = km[np.arange(p)[None, :], sn] * v2[sn]
    m[:, 0] = 0
    return m


def _matrix_fix_f1(ctx: FieldContext, v1: np.ndarray) -> np.ndarray:
    """Matrix of f2 -> T(f1, f2): M[s, n] = f1(s-n) K(s-n, n), n != s."""
    p = ctx.p
    km = kernel_closed_grid(ctx)
    sn = _shift_index(ctx)
    m = v1[sn] * km[sn, np.arange(p)[None, :]]
    np.fill_diagonal(m, 0)
    return m


def _top_right_singular(m: np.ndarray, v0: np.ndarray, iters: int, tol: float):
    """Power iteration on M*M for the leading right singular vector."""
    v = v0 / np.linalg.norm(v0)
    s_old = -1.0
    for _ in range(iters):
        w = m @ v
        v2 = m.conj().T @ w
        nv = np.linalg.norm(v2)
        if nv == 0:
            return v, 0.0
        v = v2 / nv
        s = float(np.linalg.norm(m @ v))
        if abs(s - s_old) <= tol * max(s, 1e-300):
            break
        s_old = s
    return v, s


def _ratio(ctx, v1, v2):
    n1 = float(np.linalg.norm(v1))
    n2 = float(np.linalg.norm(v2))
    if n1 == 0 or n2 == 0:
        return 0.0
    t = apply_T(ctx, GridFunction(v1, ctx), GridFunction(v2, ctx))
    return float(np.linalg.norm(t.values)) / (n1 * n2)


def estimate_norm(
    ctx: FieldContext,
    restarts: int = 32,
    max_iters: int = 200,
    tol: float = 1e-10,
    seed: int = 0,
    threads: int = 0,
) -> NormEstimate:
    """Lower-bound the operator norm by alternating maximisation.

    With one argument frozen the map is linear, so the optimal other
    argument is the leading right singular vector of an explicit p x p
    matrix; alternating the roles yields a monotone ratio sequence.  The
    best ratio over seeded random restarts plus deterministic starts
    (delta pair, constant pair, quadratic-residue indicators) is returned
    with its witnesses.  This is a lower bound only: the maximisation is
    nonconvex and no upper certificate is claimed.
    """
    p = ctx.p
    rng = np.random.default_rng(seed)
    starts: list[tuple[np.ndarray, np.ndarray]] = []
    delta = np.zeros(p, dtype=np.complex128)
    delta[0] = 1.0
    qr = (ctx.legendre_table == 1).astype(np.complex128)
    starts.append((delta.copy(), delta.copy()))
    starts.append((np.ones(p, dtype=np.complex128), np.ones(p, dtype=np.complex128)))
    starts.append((qr.copy(), qr.copy()))
    for _ in range(restarts):
        starts.append(
            (
                rng.standard_normal(p) + 1j * rng.standard_normal(p),
                rng.standard_normal(p) + 1j * rng.standard_normal(p),
            )
        )

    def run_start(pair):
        v1, v2 = pair
        v1 = v1 / np.linalg.norm(v1)
        v2 = v2 / np.linalg.norm(v2)
        ratio_old = -1.0
        ratio = 0.0
        converged = False
        for _ in range(max_iters):
            m1 = _matrix_fix_f2(ctx, v2)
            v1, _ = _top_right_singular(m1, v1, 200, tol)
            m2 = _matrix_fix_f1(ctx, v1)
            v2, ratio = _top_right_singular(m2, v2, 200, tol)
            if abs(ratio - ratio_old) <= tol * max(ratio, 1e-300):
                converged = True
                break
            ratio_old = ratio
        return _ratio(ctx, v1, v2), v1, v2, converged

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(run_start, starts))
    else:
        results = [run_start(s) for s in starts]

    best = max(results, key=lambda r: r[0])
    value, v1, v2, converged = best
    return NormEstimate(
        value=value,
        witness_f1=GridFunction(v1, ctx),
        witness_f2=GridFunction(v2, ctx),
        restarts=restarts,
        converged=converged,
    )
