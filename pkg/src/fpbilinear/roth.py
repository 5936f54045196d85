"""Counting quadratic progressions x, x + y, x + y^2 (y != 0) in subsets of F_p.

Counts are over pairs (x, y) with y nonzero, matching the counting
functional behind the density threshold delta ~ p^(-1/8): degenerate
coincidences such as y^2 = y are counted as the pair count dictates.
The random-set heuristic is delta^3 p (p - 1).
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import backend
from .fp_core import FieldContext
from .report import ScanReport


@dataclass
class SetIndicator:
    """A subset of F_p with bitset membership semantics."""

    member: np.ndarray  # uint8 0/1, length p
    field: FieldContext

    def __post_init__(self):
        self.member = np.ascontiguousarray(self.member, dtype=np.uint8)
        if self.member.shape != (self.field.p,):
            raise ValueError("membership array must have length p")

    @property
    def cardinality(self) -> int:
        return int(self.member.sum())

    @property
    def density(self) -> float:
        return self.cardinality / self.field.p

    def shifted(self, t: int) -> "SetIndicator":
        return SetIndicator(np.roll(self.member, t % self.field.p), self.field)


@dataclass
class ProgressionCount:
    count: int
    heuristic: float


def sample_set(
    ctx: FieldContext, kind: str, density: float, seed: int = 0
) -> SetIndicator:
    """Build a test set of exact cardinality round(density * p).

    ``random`` keeps elements independently then trims/pads to the exact
    cardinality; ``interval`` is an initial segment; ``quadratic_residues``
    is the residue set trimmed (or padded with the smallest non-members)
    to the cardinality.
    """
    p = ctx.p
    if not 0 < density <= 1:
        raise ValueError("density must be in (0, 1]")
    m = max(1, round(density * p))
    member = np.zeros(p, dtype=np.uint8)
    if kind == "interval":
        member[:m] = 1
    elif kind == "random":
        rng = np.random.default_rng(seed)
        member[rng.permutation(p)[:m]] = 1
    elif kind == "quadratic_residues":
        qr = np.flatnonzero(ctx.legendre_table == 1)
        take = min(m, len(qr))
        member[qr[:take]] = 1
        if take < m:
            pad = np.flatnonzero(member == 0)[: m - take]
            member[pad] = 1
    else:
        raise ValueError(f"unknown set kind {kind!r}")
    return SetIndicator(member, ctx)


def count_progressions(ctx: FieldContext, a: SetIndicator) -> ProgressionCount:
    """Exact count over all (x, y) with y != 0 and x, x+y, x+y^2 in the set."""
    count = int(backend.impl.count_progressions(a.member, ctx.p))
    delta = a.density
    return ProgressionCount(count, delta**3 * ctx.p * (ctx.p - 1))


def count_progressions_oracle(ctx: FieldContext, a: SetIndicator) -> int:
    """Independently coded double-loop count (test oracle, O(p^2))."""
    p = ctx.p
    mem = a.member
    total = 0
    for x in range(p):
        if not mem[x]:
            continue
        for y in range(1, p):
            if mem[(x + y) % p] and mem[(x + y * y) % p]:
                total += 1
    return total


def density_sweep(
    ctx: FieldContext,
    kind: str,
    densities: list[float],
    trials: int = 20,
    seed: int = 0,
) -> ScanReport:
    """Counts vs the delta^3 p (p-1) heuristic across densities."""
    t0 = time.perf_counter()
    rows = []
    worst_ratio_dev = 0.0
    sub_seeds = np.random.SeedSequence(seed).spawn(len(densities))
    for density, ss in zip(densities, sub_seeds):
        counts = []
        trial_seeds = ss.spawn(max(trials, 1))
        for ts in trial_seeds[: trials if kind == "random" else 1]:
            a = sample_set(ctx, kind, density, ts)
            counts.append(count_progressions(ctx, a).count)
        counts_arr = np.array(counts, dtype=np.float64)
        delta = max(1, round(density * ctx.p)) / ctx.p
        heuristic = delta**3 * ctx.p * (ctx.p - 1)
        ratio = float(counts_arr.mean() / heuristic) if heuristic else float("nan")
        rows.append(
            {
                "density": delta,
                "trials": len(counts),
                "mean": float(counts_arr.mean()),
                "min": int(counts_arr.min()),
                "max": int(counts_arr.max()),
                "heuristic": heuristic,
                "ratio_to_heuristic": ratio,
                "zero_fraction": float((counts_arr == 0).mean()),
            }
        )
        worst_ratio_dev = max(worst_ratio_dev, abs(ratio - 1.0))
    return ScanReport(
        scan_id="roth-density-sweep",
        p=ctx.p,
        grid=f"kind={kind} densities={densities} trials={trials}",
        normalized_sup=worst_ratio_dev,
        exceptional_points=[],
        constant_fit=None,
        wall_time=time.perf_counter() - t0,
        seed=seed,
        extras={"rows": rows},
    )
