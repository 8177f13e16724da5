"""Error models for the recycled control qubit.

Exactly one model is active per run:

* ``amplitude_init`` / ``phase_init``: the control qubit is prepared in a
  perturbed |+> state at every stage.
* ``classical_measure``: the recorded bit is flipped with probability delta;
  the quantum state follows the true outcome.
* ``quantum_measure``: a Pauli channel before measurement. Only px + py
  changes outcome statistics; the post-measurement register may be the
  projection onto the opposite outcome.
* ``bitflip``: every bit of the final bitstring is flipped independently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .common import BitString

__all__ = [
    "ErrorKind",
    "ErrorConfig",
    "plus_state_amplitude_error",
    "plus_state_phase_error",
    "effective_error_probability",
    "delta_for_error_probability",
    "classical_flip",
    "depolarizing_measure_branch",
    "bitflip_bitstring",
    "CORRECT",
    "ERROR",
]

CORRECT, ERROR = "correct", "error"
SQRT_HALF = math.sqrt(0.5)


class ErrorKind(str, Enum):
    NONE = "none"
    AMPLITUDE_INIT = "amplitude_init"
    PHASE_INIT = "phase_init"
    CLASSICAL_MEASURE = "classical_measure"
    QUANTUM_MEASURE = "quantum_measure"
    BITFLIP = "bitflip"


@dataclass(frozen=True)
class ErrorConfig:
    kind: ErrorKind = ErrorKind.NONE
    delta: float = 0.0
    pauli: tuple[float, float, float] | None = None

    def __post_init__(self):
        kind = ErrorKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is ErrorKind.QUANTUM_MEASURE:
            if self.pauli is None:
                raise ValueError("quantum_measure needs pauli=(px, py, pz)")
            px, py, pz = (float(v) for v in self.pauli)
            if min(px, py, pz) < 0 or px + py + pz > 1 + 1e-12:
                raise ValueError(f"invalid Pauli probabilities {self.pauli}")
            object.__setattr__(self, "pauli", (px, py, pz))
            object.__setattr__(self, "delta", px + py)
        elif self.pauli is not None:
            raise ValueError("pauli probabilities only apply to quantum_measure")
        if not 0.0 <= self.delta <= 1.0:
            raise ValueError(f"delta={self.delta} outside [0, 1]")
        if kind is ErrorKind.NONE and self.delta != 0.0:
            raise ValueError("kind=none takes no delta")

    @classmethod
    def parse(cls, text: str) -> "ErrorConfig":
        """Parse ``kind=...,delta=...`` or ``kind=quantum_measure,px=..,py=..,pz=..``."""
        fields = {}
        for part in text.split(","):
            part = part.strip()
            if not part:
                continue
            if "=" not in part:
                raise ValueError(f"malformed error field {part!r}")
            key, value = part.split("=", 1)
            fields[key.strip()] = value.strip()
        kind = ErrorKind(fields.pop("kind", "none"))
        if kind is ErrorKind.QUANTUM_MEASURE:
            pauli = tuple(float(fields.pop(k, 0.0)) for k in ("px", "py", "pz"))
            if fields:
                raise ValueError(f"unexpected fields {sorted(fields)}")
            return cls(kind, pauli=pauli)
        delta = float(fields.pop("delta", 0.0))
        if fields:
            raise ValueError(f"unexpected fields {sorted(fields)}")
        return cls(kind, delta)

    def describe(self) -> str:
        if self.kind is ErrorKind.QUANTUM_MEASURE:
            px, py, pz = self.pauli
            return f"kind=quantum_measure,px={px!r},py={py!r},pz={pz!r}"
        if self.kind is ErrorKind.NONE:
            return "kind=none"
        return f"kind={self.kind.value},delta={self.delta!r}"

    def top_state(self) -> tuple[complex, complex]:
        if self.kind is ErrorKind.AMPLITUDE_INIT:
            return plus_state_amplitude_error(self.delta)
        if self.kind is ErrorKind.PHASE_INIT:
            return plus_state_phase_error(self.delta)
        return complex(SQRT_HALF), complex(SQRT_HALF)

    @property
    def error_probability(self) -> float:
        return effective_error_probability(self.kind, self.delta)

    @classmethod
    def at_error_probability(cls, kind: ErrorKind | str, p: float) -> "ErrorConfig":
        """Config whose effective single-qubit error probability is p.

        Quantum measurement errors split the weight evenly between px and py.
        """
        kind = ErrorKind(kind)
        if kind is ErrorKind.QUANTUM_MEASURE:
            return cls(kind, pauli=(p / 2, p / 2, 0.0))
        return cls(kind, delta_for_error_probability(kind, p))


def plus_state_amplitude_error(delta: float) -> tuple[complex, complex]:
    return complex(math.sqrt((1 + delta) / 2)), complex(math.sqrt((1 - delta) / 2))


def plus_state_phase_error(delta: float) -> tuple[complex, complex]:
    phase = complex(math.cos(math.pi * delta), math.sin(math.pi * delta))
    return complex(SQRT_HALF), SQRT_HALF * phase


def effective_error_probability(kind: ErrorKind | str, delta: float) -> float:
    kind = ErrorKind(kind)
    if kind is ErrorKind.AMPLITUDE_INIT:
        return (1 - math.sqrt(1 - delta * delta)) / 2
    if kind is ErrorKind.PHASE_INIT:
        return (1 - math.cos(math.pi * delta)) / 2
    if kind is ErrorKind.NONE:
        return 0.0
    return float(delta)


def delta_for_error_probability(kind: ErrorKind | str, p: float) -> float:
    kind = ErrorKind(kind)
    if kind is ErrorKind.AMPLITUDE_INIT:
        if not 0 <= p <= 0.5:
            raise ValueError("amplitude errors reach at most p = 1/2")
        return 2 * math.sqrt(p * (1 - p))
    if kind is ErrorKind.PHASE_INIT:
        return math.acos(1 - 2 * p) / math.pi
    if kind is ErrorKind.NONE:
        if p != 0:
            raise ValueError("kind=none has zero error probability")
        return 0.0
    return float(p)


def classical_flip(bit: int, delta: float, rng) -> tuple[int, bool]:
    """Misread the bit with probability delta using one draw from ``rng``."""
    flipped = rng.random() < delta
    return bit ^ int(flipped), flipped


def depolarizing_measure_branch(p1: float, pauli: tuple[float, float, float], rng) -> tuple[int, str, float]:
    """Sample (bit, branch, p1 after the channel) using two draws from ``rng``.

    The channel mixes outcome probabilities with weight delta = px + py; the
    second draw decides whether the post-measurement register is the
    projection onto ``bit`` (correct) or onto ``1 - bit`` (error).
    """
    delta = pauli[0] + pauli[1]
    p1 = min(max(p1, 0.0), 1.0)
    p0 = 1.0 - p1
    p1_eff = (1 - delta) * p1 + delta * p0
    bit = 1 if rng.random() < p1_eff else 0
    p_bit = p1_eff if bit else 1.0 - p1_eff
    p_other = p0 if bit else p1
    p_error = delta * p_other / p_bit if p_bit > 0 else 0.0
    branch = ERROR if rng.random() < p_error else CORRECT
    return bit, branch, p1_eff


def bitflip_bitstring(j: int, t: int, delta: float, rng) -> BitString:
    """Flip each of the t bits of j independently with probability delta (one draw per bit, LSB first)."""
    for i in range(t):
        if rng.random() < delta:
            j ^= 1 << i
    return BitString(t, j)
