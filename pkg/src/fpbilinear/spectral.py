"""Fourier analysis on F_p under the conventions used throughout:

    fhat(z) = sum_x f(x) e_p(xz)
    f(x)    = p^-1 sum_z fhat(z) e_p(-xz)
    ||f||_r = (sum_x |f(x)|^r)^(1/r)          (plain sums, no density)
    ||f||_2^2 = p^-1 ||fhat||_2^2             (Parseval)

Parseval in these conventions carries p^-1 at the squared-norm level,
p^(-1/2) at the norm level: ||fhat||_2^2 = p ||f||_2^2 by character
orthogonality (check with the delta at 0: fhat is identically 1, and
1 = 7^-1 * sqrt(7) * sqrt(7) at p = 7).

The naive transform is the O(p^2) oracle; the fast path is a Bluestein
(chirp-z) reduction of the prime-length transform to a power-of-two
convolution, O(p log p).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import backend
from .fp_core import FieldContext


@dataclass
class GridFunction:
    """A complex-valued function on F_p (length-p array semantics)."""

    values: np.ndarray
    field: FieldContext

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.complex128)
        if self.values.shape != (self.field.p,):
            raise ValueError(
                f"expected {self.field.p} values, got shape {self.values.shape}"
            )
        if not np.all(np.isfinite(self.values.view(np.float64))):
            raise ValueError("grid function contains non-finite entries")

    @classmethod
    def delta(cls, ctx: FieldContext, at: int = 0) -> "GridFunction":
        v = np.zeros(ctx.p, dtype=np.complex128)
        v[at % ctx.p] = 1.0
        return cls(v, ctx)

    @classmethod
    def constant(cls, ctx: FieldContext, c: complex = 1.0) -> "GridFunction":
        return cls(np.full(ctx.p, c, dtype=np.complex128), ctx)

    @classmethod
    def random(cls, ctx: FieldContext, seed) -> "GridFunction":
        rng = np.random.default_rng(seed)
        return cls(
            rng.standard_normal(ctx.p) + 1j * rng.standard_normal(ctx.p), ctx
        )


def _bluestein_tables(ctx: FieldContext):
    def build():
        p = ctx.p
        # exact n^2 mod 2p keeps the half-integer chirp phases exact
        n2 = np.arange(p, dtype=np.int64) ** 2 % (2 * p)
        chirp = np.exp(-1j * np.pi * n2 / p)
        length = 1 << (2 * p - 2).bit_length()
        kernel = np.zeros(length, dtype=np.complex128)
        kernel[:p] = np.conj(chirp)
        kernel[length - (p - 1):] = np.conj(chirp[p - 1:0:-1])
        return chirp, np.fft.fft(kernel), length

    return ctx.cached("bluestein", build)


def _dft_fast(values: np.ndarray, ctx: FieldContext) -> np.ndarray:
    chirp, kernel_fft, length = _bluestein_tables(ctx)
    a = np.zeros(length, dtype=np.complex128)
    a[: ctx.p] = values * chirp
    conv = np.fft.ifft(np.fft.fft(a) * kernel_fft)
    return chirp * conv[: ctx.p]


def dft(f: GridFunction, mode: str = "fast") -> GridFunction:
    """Forward transform fhat(z) = sum_x f(x) e_p(xz)."""
    ctx = f.field
    if mode == "naive":
        out = backend.impl.dft_naive(f.values, ctx.unit_roots)
    elif mode == "fast":
        out = _dft_fast(f.values, ctx)
    else:
        raise ValueError(f"unknown dft mode {mode!r}")
    return GridFunction(out, ctx)


def idft(fhat: GridFunction) -> GridFunction:
    """Inverse transform f(x) = p^-1 sum_z fhat(z) e_p(-xz)."""
    ctx = fhat.field
    out = np.conj(_dft_fast(np.conj(fhat.values), ctx)) / ctx.p
    return GridFunction(out, ctx)


def norm(f: GridFunction, r: float = 2.0) -> float:
    """(sum_x |f(x)|^r)^(1/r); numpy's pairwise reduction, deterministic."""
    if r <= 0:
        raise ValueError("norm order must be positive")
    mags = np.abs(f.values)
    if r == 2.0:
        return float(np.sqrt(np.sum(mags * mags)))
    return float(np.sum(mags**r) ** (1.0 / r))


def parseval_residual(f: GridFunction) -> float:
    """| ||f||_2 - p^(-1/2) ||fhat||_2 |, a single-number transform check.

    Equivalent to the squared-norm form ||f||_2^2 = p^-1 ||fhat||_2^2.
    """
    fhat = dft(f, mode="fast")
    return abs(norm(f, 2.0) - norm(fhat, 2.0) / np.sqrt(f.field.p))
