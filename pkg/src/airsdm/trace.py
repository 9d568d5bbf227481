"""Per-iteration run records shared by both optimizers."""

from __future__ import annotations

from dataclasses import dataclass, field

__all__ = ["RunTrace"]


@dataclass
class RunTrace:
    """Objective trajectory, timing and flags of one optimizer run.

    ``rows`` holds one dict per iteration; the key set is documented by the
    producing optimizer (the alternating surrogate optimizer records the
    surrogate value, secrecy rate and power slack; the blocked pipeline
    records the power split, amplification gains and secrecy rate).
    """

    rows: list[dict] = field(default_factory=list)
    converged: bool = False
    iterations: int = 0
    wall_time_s: float = 0.0
    flags: list[str] = field(default_factory=list)

    def add_flag(self, flag: str) -> None:
        if flag not in self.flags:
            self.flags.append(flag)

    def objective_values(self, key: str) -> list[float]:
        return [row[key] for row in self.rows if key in row]
