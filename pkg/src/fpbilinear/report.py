"""Structured scan results, shared by the sweep campaigns and the CLI."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class ScanReport:
    """Record of one parameter sweep.

    ``normalized_sup`` is the headline supremum of the scan's normalised
    quantity; ``exceptional_points`` lists the points that exceeded the
    scan's expectation (each with enough data to re-evaluate it);
    ``constant_fit`` is (C, exponent, residual) when the scan fits a
    power law; ``extras`` carries per-scan detail.  Everything except
    ``wall_time`` is deterministic given (p, seed, config).
    """

    scan_id: str
    p: int
    grid: str
    normalized_sup: float
    exceptional_points: list = field(default_factory=list)
    constant_fit: tuple[float, float, float] | None = None
    wall_time: float = 0.0
    seed: int = 0
    extras: dict = field(default_factory=dict)

    def to_dict(self, include_wall_time: bool = False) -> dict:
        out = {
            "scan_id": self.scan_id,
            "p": self.p,
            "grid": self.grid,
            "normalized_sup": self.normalized_sup,
            "exceptional_points": self.exceptional_points,
            "constant_fit": list(self.constant_fit) if self.constant_fit else None,
            "seed": self.seed,
            "extras": self.extras,
        }
        if include_wall_time:
            out["wall_time"] = self.wall_time
        return out
