"""Small value types shared across modules."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class BitString:
    """Measured register value j = j_{t-1} ... j_0."""

    t: int
    j: int

    def __post_init__(self):
        if self.t < 1 or not 0 <= self.j < (1 << self.t):
            raise ValueError(f"bitstring {self.j} does not fit in {self.t} bits")

    @property
    def binary(self) -> str:
        return format(self.j, f"0{self.t}b")

    def bit(self, i: int) -> int:
        return (self.j >> i) & 1


class BudgetExceeded(RuntimeError):
    """A requested computation is above a configured size limit."""
