"""Batched trajectory engine for campaign-scale sampling.

Starting from |1>, the work register only ever visits the cyclic subspace
spanned by |a^k mod N>, k = 0..r-1, where r is the order of a. In the basis
indexed by k, multiplication by a^e is the cyclic shift k -> k + e (mod r), so
a stage of the circuit costs O(r) instead of O(2^L). The subspace is found by
walking the powers of a, exactly as a statevector code would discover its
support; the known factors of N are never used.

After every reset the register is |top> (x) v for a single vector v, so each
trajectory stores one length-r vector. The random draws, measurement rules,
and error models match :func:`shorsim.statevector.run_iterative_shor` for the
same (seed, index), which makes the two engines interchangeable trajectory by
trajectory.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numba
import numpy as np

from .noise import ErrorConfig, ErrorKind
from .problems import FactoringProblem
from .rng import BITFLIP, stage_uniforms

__all__ = ["cyclic_order", "sample_bitstrings", "TrajectoryBatch", "KIND_CODES"]

KIND_CODES = {
    ErrorKind.NONE: 0,
    ErrorKind.AMPLITUDE_INIT: 1,
    ErrorKind.PHASE_INIT: 2,
    ErrorKind.CLASSICAL_MEASURE: 3,
    ErrorKind.QUANTUM_MEASURE: 4,
    ErrorKind.BITFLIP: 5,
}
EVENT_NONE, EVENT_ERROR_BRANCH, EVENT_CLASSICAL_FLIP, EVENT_DEGENERATE = 0, 1, 2, 3


@numba.njit(cache=True)
def _walk_order(a, n):
    x = a % n
    r = 1
    while x != 1:
        x = x * a % n
        r += 1
    return r


@lru_cache(maxsize=4096)
def cyclic_order(a: int, N: int) -> int:
    """Length of the cycle of 1 under multiplication by a (mod N)."""
    if N >= 1 << 31:
        raise ValueError("cyclic walk limited to N < 2^31")
    if math.gcd(a, N) != 1:
        raise ValueError("a must be a unit modulo N")
    return int(_walk_order(np.int64(a), np.int64(N)))


@numba.njit(cache=True)
def _run(r, shifts, draws, kind, delta, c0, c1, obs_out, p1_out, event_out):
    n_traj, t = draws.shape[0], draws.shape[1]
    v = np.empty(r, np.complex128)
    w = np.empty(r, np.complex128)
    abs_top = abs(c0) ** 2 + abs(c1) ** 2
    for m in range(n_traj):
        v[:] = 0.0
        v[0] = 1.0
        j_obs = 0
        for s in range(t):
            e = shifts[s]
            phi = math.pi * (j_obs * 2.0 ** (-s))
            g = c1 * complex(math.cos(phi), math.sin(phi))
            # <v | P v> and |v|^2 give both outcome probabilities
            ip = 0j
            nv = 0.0
            for k in range(e):
                ip += v[k].conjugate() * v[k - e + r]
                nv += v[k].real * v[k].real + v[k].imag * v[k].imag
            for k in range(e, r):
                ip += v[k].conjugate() * v[k - e]
                nv += v[k].real * v[k].real + v[k].imag * v[k].imag
            cross = (c0.conjugate() * g * ip).real
            p0 = 0.5 * (abs_top * nv + 2.0 * cross)
            p1 = 0.5 * (abs_top * nv - 2.0 * cross)
            p0 = min(max(p0, 0.0), 1.0)
            p1 = min(max(p1, 0.0), 1.0)
            u_meas = draws[m, s, 0]
            u_sec = draws[m, s, 1]
            event = 0
            if kind == 4:
                p1e = (1.0 - delta) * p1 + delta * p0
                bit = 1 if u_meas < p1e else 0
                p_bit = p1e if bit == 1 else 1.0 - p1e
                p_other = p0 if bit == 1 else p1
                perr = delta * p_other / p_bit if p_bit > 0.0 else 0.0
                src = bit
                if u_sec < perr:
                    src = 1 - bit
                    event = 1
                obs = bit
            else:
                bit = 1 if u_meas < p1 else 0
                src = bit
                obs = bit
                if kind == 3 and u_sec < delta:
                    obs = 1 - bit
                    event = 2
            j_obs |= obs << s
            obs_out[m, s] = obs
            p1_out[m, s] = p1
            event_out[m, s] = event
            if s == t - 1:
                break
            p_src = p1 if src == 1 else p0
            if p_src <= 0.0:
                event_out[m, s] = 3
                break
            scale = 1.0 / math.sqrt(2.0 * p_src)
            sg = g * scale
            if src == 1:
                sg = -sg
            a0 = c0 * scale
            for k in range(e):
                w[k] = a0 * v[k] + sg * v[k - e + r]
            for k in range(e, r):
                w[k] = a0 * v[k] + sg * v[k - e]
            v, w = w, v


class TrajectoryBatch:
    """Outputs of :func:`sample_bitstrings` with per-stage detail."""

    def __init__(self, j, observed, p1, events):
        self.j = j
        self.observed = observed
        self.p1 = p1
        self.events = events


def sample_bitstrings(problem: FactoringProblem, count: int, error_config: ErrorConfig | None = None,
                      seed: int | None = None, t: int | None = None, first_index: int = 0,
                      detail: bool = False):
    """Sample ``count`` bitstrings (trajectories first_index, first_index+1, ...).

    Returns an int64 array of j values, or a TrajectoryBatch with ``detail``.
    """
    cfg = error_config or ErrorConfig()
    t = problem.t if t is None else t
    if t > 62:
        raise ValueError("batched engine limited to t <= 62")
    seed = problem.seed if seed is None else seed
    r = cyclic_order(problem.a, problem.N)
    shifts = np.array([pow(2, t - 1 - s, r) for s in range(t)], dtype=np.int64)
    draws = np.empty((count, t, 3))
    for i in range(count):
        draws[i] = stage_uniforms(seed, first_index + i, t)
    obs = np.zeros((count, t), dtype=np.int64)
    p1 = np.zeros((count, t))
    events = np.zeros((count, t), dtype=np.int8)
    c0, c1 = cfg.top_state()
    _run(np.int64(r), shifts, draws, KIND_CODES[cfg.kind], float(cfg.delta),
         complex(c0), complex(c1), obs, p1, events)
    if (events == EVENT_DEGENERATE).any():
        from .statevector import DegenerateBranch
        raise DegenerateBranch("a trajectory selected a zero-probability branch")
    if cfg.kind is ErrorKind.BITFLIP:
        obs ^= (draws[:, :, BITFLIP] < cfg.delta).astype(np.int64)
    j = (obs << np.arange(t, dtype=np.int64)).sum(axis=1)
    if detail:
        return TrajectoryBatch(j, obs, p1, events)
    return j
