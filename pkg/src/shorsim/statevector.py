"""Sharded statevector simulation of the iterative (single control qubit) Shor circuit.

Register layout: global index i = x * 2^L + y, where x is the recycled control
qubit and y the L-bit work register. The 2^n amplitudes are split into S = 2^g
contiguous shards; since x is the top index bit, shards 0..S/2-1 hold x = 0
("group 0") and shards S/2..S-1 hold x = 1 ("group 1").

Each stage applies the controlled multiplication by a^(2^(t-1-cbit)) mod N as a
permutation that only touches group 1, a classically controlled phase, a
Hadamard on the control, a measurement, and a reset of the control.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .common import BitString, BudgetExceeded
from .noise import (
    CORRECT,
    ERROR,
    ErrorConfig,
    ErrorKind,
    bitflip_bitstring,
    classical_flip,
    depolarizing_measure_branch,
)
from .numtheory import mod_inverse
from .problems import FactoringProblem
from .rng import KeyedDraws

__all__ = [
    "ShardedState",
    "StageTrace",
    "ExchangePlan",
    "DegenerateBranch",
    "QubitCeilingExceeded",
    "DEFAULT_QUBIT_CEILING",
    "init_state",
    "build_permutation_plan",
    "apply_oracle",
    "apply_phase",
    "apply_hadamard_top",
    "measure_top",
    "reset_top",
    "stage_multipliers",
    "run_iterative_shor",
    "exhaustive_joint_distribution",
]

DEFAULT_QUBIT_CEILING = 26
EXHAUSTIVE_MAX_T = 14
EXHAUSTIVE_MAX_QUBITS = 12
REDUCTION_BLOCK = 64
SQRT_HALF = math.sqrt(0.5)


class DegenerateBranch(RuntimeError):
    """The branch selected for the reset has zero probability mass."""


class QubitCeilingExceeded(BudgetExceeded):
    pass


@dataclass(frozen=True)
class StageTrace:
    cbit: int
    p1: float
    sampled_bit: int
    error_events: tuple[str, ...] = ()

    def __post_init__(self):
        if not -1e-12 <= self.p1 <= 1 + 1e-12:
            raise ValueError(f"p1={self.p1} outside [0, 1]")


@dataclass
class ShardedState:
    n_qubits: int
    shards: list[np.ndarray]
    staging: list[np.ndarray]
    workers: int = 1
    _pool: ThreadPoolExecutor | None = field(default=None, repr=False, compare=False)

    @property
    def shard_count(self) -> int:
        return len(self.shards)

    @property
    def shard_size(self) -> int:
        return self.shards[0].size

    @property
    def half(self) -> int:
        return len(self.shards) // 2

    def group(self, x: int) -> list[np.ndarray]:
        h = self.half
        return self.shards[x * h:(x + 1) * h]

    def map(self, fn, items) -> list:
        """Run ``fn`` over items on the worker pool; results keep input order."""
        items = list(items)
        if self.workers <= 1 or len(items) <= 1:
            return [fn(it) for it in items]
        if self._pool is None:
            self._pool = ThreadPoolExecutor(max_workers=self.workers)
        return list(self._pool.map(fn, items))

    def amplitudes(self) -> np.ndarray:
        return np.concatenate(self.shards)

    def copy(self) -> "ShardedState":
        return ShardedState(self.n_qubits, [s.copy() for s in self.shards],
                            [np.empty_like(s) for s in self.staging], self.workers)

    def group_norm(self, x: int) -> float:
        """Sum of |psi|^2 over group x, independent of the shard layout.

        Squares are summed in fixed 64-element blocks aligned to the global
        index, and the block sums are combined with an exactly rounded sum.
        """
        shards = self.group(x)
        if self.shard_size < REDUCTION_BLOCK:
            shards = [np.concatenate(shards)]
        block = min(REDUCTION_BLOCK, shards[0].size)

        def partial(s: np.ndarray) -> np.ndarray:
            sq = s.real * s.real + s.imag * s.imag
            return sq.reshape(-1, block).sum(axis=1)

        return math.fsum(np.concatenate(self.map(partial, shards)).tolist())

    def norm(self) -> float:
        return self.group_norm(0) + self.group_norm(1)

    def close(self):
        if self._pool is not None:
            self._pool.shutdown()
            self._pool = None


def init_state(n: int, top_qubit_state=(SQRT_HALF, SQRT_HALF), shard_count: int = 2,
               workers: int = 1) -> ShardedState:
    """|top> (x) |0...01> on n qubits split into ``shard_count`` shards."""
    if n < 2:
        raise ValueError("need at least two qubits")
    if shard_count < 2 or shard_count & (shard_count - 1) or shard_count > (1 << n):
        raise ValueError(f"shard count {shard_count} must be a power of two in [2, 2^n]")
    c0, c1 = (complex(c) for c in top_qubit_state)
    if abs(abs(c0) ** 2 + abs(c1) ** 2 - 1) > 1e-12:
        raise ValueError("top qubit state is not normalized")
    size = (1 << n) // shard_count
    shards = [np.zeros(size, dtype=np.complex128) for _ in range(shard_count)]
    half = shard_count // 2
    lower_one = 1  # index of |0...01> within a group
    shards[lower_one // size][lower_one % size] = c0
    shards[half + lower_one // size][lower_one % size] = c1
    staging = [np.empty(size, dtype=np.complex128) for _ in range(shard_count)]
    return ShardedState(n, shards, staging, workers)


# -- permutation plan -----------------------------------------------------------

@dataclass(frozen=True)
class ExchangePlan:
    """Routing of group-1 amplitudes for y -> a_pow * y mod N.

    ``sends[s]`` lists (destination shard, local source indices) in increasing
    destination order; ``receives[d]`` lists (source shard, local destination
    indices). Shard numbers are positions within group 1. ``fixed[s]`` are the
    local indices with y >= N, which stay in place.
    """

    a_pow: int
    N: int
    n_qubits: int
    shard_count: int
    sends: tuple[tuple[tuple[int, np.ndarray], ...], ...]
    receives: tuple[tuple[tuple[int, np.ndarray], ...], ...]
    fixed: tuple[np.ndarray, ...]

    def moved(self) -> int:
        return sum(idx.size for lst in self.sends for _, idx in lst)

    def as_permutation(self) -> np.ndarray:
        """Global map y -> y' over the whole group (identity for y >= N)."""
        size = (1 << self.n_qubits) // self.shard_count
        perm = np.arange(size * (self.shard_count // 2), dtype=np.int64)
        for s, lst in enumerate(self.sends):
            for d, src in lst:
                (_, dst), = [item for item in self.receives[d] if item[0] == s]
                perm[s * size + src] = d * size + dst
        return perm


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.int64)
    a.setflags(write=False)
    return a


@lru_cache(maxsize=256)
def build_permutation_plan(a_pow: int, N: int, n_qubits: int, shard_count: int) -> ExchangePlan:
    L = n_qubits - 1
    if N > (1 << L):
        raise ValueError(f"N={N} does not fit in {L} work qubits")
    ainv = mod_inverse(a_pow, N)
    half = shard_count // 2
    size = (1 << n_qubits) // shard_count
    if a_pow >= N or max(a_pow, ainv) * N >= 1 << 63:
        raise ValueError("multiplier out of range")
    sends, receives, fixed = [], [], []
    for s in range(half):
        lo = s * size
        y = np.arange(lo, min(lo + size, N), dtype=np.int64)
        # sender side: where does each of my y go
        dest = a_pow * y % N
        order = np.argsort(dest, kind="stable")
        dest_sorted, src_sorted = dest[order], (y - lo)[order]
        dshard = dest_sorted // size
        cuts = np.flatnonzero(np.diff(dshard)) + 1
        sends.append(tuple((int(ds[0]), _frozen(ss)) for ds, ss in
                           zip(np.split(dshard, cuts), np.split(src_sorted, cuts)) if ds.size))
        # receiver side: which shard feeds each of my y'
        origin_shard = (ainv * y % N) // size
        recv = []
        for o in np.unique(origin_shard):
            recv.append((int(o), _frozen((y - lo)[origin_shard == o])))
        receives.append(tuple(recv))
        fixed.append(_frozen(np.arange(max(0, N - lo), size, dtype=np.int64)))
    return ExchangePlan(a_pow, N, n_qubits, shard_count, tuple(sends), tuple(receives), tuple(fixed))


def apply_oracle(state: ShardedState, a_pow: int, N: int, plan: ExchangePlan | None = None) -> None:
    """Controlled multiplication |1, y> -> |1, a_pow*y mod N> for y < N."""
    a_pow %= N
    if a_pow == 1:
        return
    if plan is None:
        plan = build_permutation_plan(a_pow, N, state.n_qubits, state.shard_count)
    live, stage = state.group(1), state.staging[state.half:]

    # pack contiguous send blocks per source shard
    def pack(s):
        return {d: live[s][src] for d, src in plan.sends[s]}

    blocks = state.map(pack, range(state.half))

    def unpack(d):
        out = stage[d]
        for s, dst in plan.receives[d]:
            out[dst] = blocks[s][d]
        keep = plan.fixed[d]
        out[keep] = live[d][keep]

    state.map(unpack, range(state.half))
    h = state.half
    state.shards[h:], state.staging[h:] = state.staging[h:], state.shards[h:]


def apply_phase(state: ShardedState, cbit: int, measured_bits_so_far: int) -> None:
    """Multiply group 1 by exp(i*pi*j/2^cbit), j being the bits measured so far."""
    if measured_bits_so_far == 0:
        return
    phi = math.pi * (measured_bits_so_far / (1 << cbit))
    c, s = math.cos(phi), math.sin(phi)

    def rotate(sh):
        re = sh.real.copy()
        im = sh.imag.copy()
        sh.real = c * re - s * im
        sh.imag = s * re + c * im

    state.map(rotate, state.group(1))


def apply_hadamard_top(state: ShardedState) -> None:
    h = state.half

    def pair(k):
        u, v, tmp = state.shards[k], state.shards[k + h], state.staging[k]
        np.add(u, v, out=tmp)
        np.subtract(u, v, out=v)
        np.multiply(tmp, SQRT_HALF, out=u)
        np.multiply(v, SQRT_HALF, out=v)

    state.map(pair, range(h))


def measure_top(state: ShardedState, rng, error_config: ErrorConfig | None = None):
    """Sample the control qubit.

    Returns (bit, p1, event) where ``event`` is None, ``"error_branch"`` when
    the quantum measurement channel selected the opposite projection, or
    ``"classical_flip"`` when the recorded bit was misread. For a classical
    flip the returned bit is the recorded one; the state must still be
    projected onto ``bit ^ 1``, which :func:`run_iterative_shor` handles.
    """
    cfg = error_config or ErrorConfig()
    p1 = state.group_norm(1)
    if cfg.kind is ErrorKind.QUANTUM_MEASURE:
        bit, branch, _ = depolarizing_measure_branch(p1, cfg.pauli, rng)
        return bit, p1, ("error_branch" if branch == ERROR else None)
    bit = 1 if rng.random() < p1 else 0
    if cfg.kind is ErrorKind.CLASSICAL_MEASURE:
        observed, flipped = classical_flip(bit, cfg.delta, rng)
        return observed, p1, ("classical_flip" if flipped else None)
    return bit, p1, None


def reset_top(state: ShardedState, bit: int, branch: str = CORRECT,
              top_qubit_state=(SQRT_HALF, SQRT_HALF)) -> None:
    """Project the control onto ``bit`` and re-prepare it.

    With ``branch="error"`` the work register is replaced by the normalized
    projection onto the opposite outcome.
    """
    src = bit if branch == CORRECT else 1 - bit
    p_src = state.group_norm(src)
    if p_src <= 0.0:
        raise DegenerateBranch(f"branch {branch} for bit {bit} has zero probability")
    scale = 1.0 / math.sqrt(p_src)
    c0, c1 = (complex(c) for c in top_qubit_state)
    h = state.half

    def fill(k):
        lower = state.shards[k + src * h] * scale
        np.multiply(lower, c0, out=state.shards[k])
        np.multiply(lower, c1, out=state.shards[k + h])

    state.map(fill, range(h))


def stage_multipliers(a: int, N: int, t: int) -> list[int]:
    """a^(2^(t-1-cbit)) mod N for cbit = 0..t-1, by repeated squaring."""
    out = [a % N]
    for _ in range(t - 1):
        out.append(out[-1] * out[-1] % N)
    return out[::-1]


def _check_ceiling(n: int, ceiling: int) -> None:
    if n > ceiling:
        raise QubitCeilingExceeded(f"{n} qubits exceed the ceiling of {ceiling}")


def run_iterative_shor(problem: FactoringProblem, error_config: ErrorConfig | None = None,
                       seed: int | None = None, index: int = 0, t: int | None = None,
                       shard_count: int = 2, workers: int = 1,
                       qubit_ceiling: int = DEFAULT_QUBIT_CEILING):
    """One run of the circuit; returns (BitString, list of StageTrace).

    Random draws come from the keyed stream (seed, index), with seed defaulting
    to the problem seed.
    """
    cfg = error_config or ErrorConfig()
    t = problem.t if t is None else t
    n = problem.n_qubits
    _check_ceiling(n, qubit_ceiling)
    draws = KeyedDraws(problem.seed if seed is None else seed, index, t)
    top = cfg.top_state()
    state = init_state(n, top, shard_count, workers)
    mults = stage_multipliers(problem.a, problem.N, t)
    j_obs = 0
    traces = []
    try:
        for cbit in range(t):
            apply_oracle(state, mults[cbit], problem.N)
            apply_phase(state, cbit, j_obs)
            apply_hadamard_top(state)
            bit, p1, event = measure_top(state, draws.stage(cbit), cfg)
            j_obs |= bit << cbit
            actual = bit ^ 1 if event == "classical_flip" else bit
            branch = ERROR if event == "error_branch" else CORRECT
            if cbit < t - 1:
                reset_top(state, actual, branch, top)
            traces.append(StageTrace(cbit, p1, bit, (event,) if event else ()))
    finally:
        state.close()
    result = BitString(t, j_obs)
    if cfg.kind is ErrorKind.BITFLIP:
        result = bitflip_bitstring(j_obs, t, cfg.delta, draws.bitflips())
        diff = result.j ^ j_obs
        traces = [StageTrace(tr.cbit, tr.p1, tr.sampled_bit,
                             tr.error_events + (("bitflip",) if diff >> tr.cbit & 1 else ()))
                  for tr in traces]
    return result, traces


def _children(state: ShardedState, cfg: ErrorConfig):
    """(weight, actual bit, observed bit, branch) for every measurement outcome."""
    p0, p1 = state.group_norm(0), state.group_norm(1)
    probs = (p0, p1)
    kind, delta = cfg.kind, cfg.delta
    if kind is ErrorKind.CLASSICAL_MEASURE:
        for b in (0, 1):
            yield probs[b] * (1 - delta), b, b, CORRECT
            yield probs[b] * delta, b, 1 - b, CORRECT
    elif kind is ErrorKind.QUANTUM_MEASURE:
        for b in (0, 1):
            yield (1 - delta) * probs[b], b, b, CORRECT
            yield delta * probs[1 - b], b, b, ERROR
    else:
        for b in (0, 1):
            yield probs[b], b, b, CORRECT


def exhaustive_joint_distribution(problem: FactoringProblem, error_config: ErrorConfig | None = None,
                                  t: int | None = None, shard_count: int = 2,
                                  node_budget: int = 1 << 22, prune: float = 1e-17) -> np.ndarray:
    """Exact output distribution of the circuit by enumerating measurement paths.

    Returns an array ``dist`` of length 2^t with dist[j] = P(j). Paths whose
    probability falls below ``prune`` are dropped.
    """
    cfg = error_config or ErrorConfig()
    t = problem.t if t is None else t
    n = problem.n_qubits
    if t > EXHAUSTIVE_MAX_T or n > EXHAUSTIVE_MAX_QUBITS:
        raise BudgetExceeded(f"exhaustive enumeration limited to t <= {EXHAUSTIVE_MAX_T}, "
                             f"n <= {EXHAUSTIVE_MAX_QUBITS}")
    top = cfg.top_state()
    mults = stage_multipliers(problem.a, problem.N, t)
    dist = np.zeros(1 << t)
    nodes = 0
    stack = [(init_state(n, top, shard_count), 0, 0, 1.0)]
    while stack:
        state, cbit, j_obs, weight = stack.pop()
        nodes += 1
        if nodes > node_budget:
            raise BudgetExceeded("path enumeration exceeded its node budget")
        apply_oracle(state, mults[cbit], problem.N)
        apply_phase(state, cbit, j_obs)
        apply_hadamard_top(state)
        for w, actual, observed, branch in _children(state, cfg):
            w *= weight
            if w < prune:
                continue
            j_next = j_obs | observed << cbit
            if cbit == t - 1:
                dist[j_next] += w
                continue
            child = state.copy()
            reset_top(child, actual, branch, top)
            stack.append((child, cbit + 1, j_next, w))
    if cfg.kind is ErrorKind.BITFLIP and cfg.delta > 0:
        idx = np.arange(1 << t)
        for i in range(t):
            dist = (1 - cfg.delta) * dist + cfg.delta * dist[idx ^ (1 << i)]
    return dist
