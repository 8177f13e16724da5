"""Keyed uniform draws for replayable trajectories.

Trajectory ``index`` of a problem with seed ``seed`` owns a Philox stream keyed
by SeedSequence([seed, index]). The draw used at stage c for purpose d
(0: measurement, 1: secondary error draw, 2: final bit flip) is element
3*c + d of that stream, so it does not depend on t or on the error model.
"""

from __future__ import annotations

import numpy as np

DRAWS_PER_STAGE = 3
MEASURE, SECONDARY, BITFLIP = 0, 1, 2


def trajectory_generator(seed: int, index: int) -> np.random.Generator:
    key = np.random.SeedSequence([seed, index]).generate_state(2, np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def stage_uniforms(seed: int, index: int, t: int) -> np.ndarray:
    """(t, 3) table of uniforms in [0, 1) for one trajectory."""
    return trajectory_generator(seed, index).random((t, DRAWS_PER_STAGE))


class _Sequence:
    """Minimal ``.random()`` provider replaying a fixed list of draws."""

    def __init__(self, values):
        self._values = iter(values)

    def random(self) -> float:
        return float(next(self._values))


class KeyedDraws:
    def __init__(self, seed: int, index: int, t: int):
        self.table = stage_uniforms(seed, index, t)

    def stage(self, cbit: int) -> _Sequence:
        """Draws for one stage: the measurement draw, then the secondary draw."""
        return _Sequence(self.table[cbit, :BITFLIP])

    def bitflips(self) -> _Sequence:
        return _Sequence(self.table[:, BITFLIP])
