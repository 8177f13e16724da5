"""Campaign orchestration and the statistics built on top of it.

A campaign samples M bitstrings per factoring problem, post-processes each
one and keeps per-problem counts. Problems are independent: each draws its
randomness from streams keyed by its own seed, so results do not depend on
worker count or scheduling.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .noise import ErrorConfig, ErrorKind, effective_error_probability
from .numtheory import multiplicative_order
from .postprocess import (
    CLASSIFICATIONS,
    FAIL,
    LUCKY,
    SUCCESS,
    EkeraParams,
    ekera_postprocess,
    gcd_split,
    shor_standard_procedure,
)
from .problems import FactoringProblem, problem_to_record, uniform_problem_set
from .spectrum import DistributionSpec, KnownOrderSampler
from .statevector import DEFAULT_QUBIT_CEILING, QubitCeilingExceeded, run_iterative_shor
from .trajectories import sample_bitstrings

__all__ = [
    "SCHEMA_VERSION",
    "CampaignSpec",
    "ProblemResult",
    "CampaignResult",
    "run_campaign",
    "sample_problem",
    "first_hit_statistics",
    "FirstHitStatistics",
    "t_sweep",
    "error_sweep",
    "ErrorSweepPoint",
    "error_config_for_delta",
    "r_ratio_histogram",
    "RatioHistogram",
    "write_jsonl",
    "uniform_campaign_problems",
]

SCHEMA_VERSION = 1
BACKENDS = ("simulator", "known_order_sampler")
ENGINES = ("batched", "statevector")
POST_MODES = ("shor", "ekera")
_SAMPLER_STREAM = 0x5A3
_POST_STREAM = 0xE7A


@dataclass(frozen=True)
class CampaignSpec:
    problems: tuple[FactoringProblem, ...]
    M: int = 256
    error: ErrorConfig = field(default_factory=ErrorConfig)
    post_mode: str = "shor"
    backend: str = "simulator"
    engine: str = "batched"
    shards: int = 2
    qubit_ceiling: int = DEFAULT_QUBIT_CEILING
    workers: int = 1
    keep_outcomes: bool = False

    def __post_init__(self):
        object.__setattr__(self, "problems", tuple(self.problems))
        if self.M < 1:
            raise ValueError("M must be positive")
        if self.backend not in BACKENDS:
            raise ValueError(f"backend must be one of {BACKENDS}")
        if self.engine not in ENGINES:
            raise ValueError(f"engine must be one of {ENGINES}")
        if self.post_mode not in POST_MODES:
            raise ValueError(f"post_mode must be one of {POST_MODES}")
        if self.backend == "known_order_sampler":
            if self.error.kind is not ErrorKind.NONE:
                raise ValueError("the known-order sampler only covers the error-free distribution")
            if any(p.p is None for p in self.problems):
                raise ValueError("the known-order sampler needs p and q for every problem")

    def header(self) -> dict:
        return {
            "schema": "shorsim.campaign",
            "version": SCHEMA_VERSION,
            "M": self.M,
            "error": self.error.describe(),
            "post_mode": self.post_mode,
            "backend": self.backend,
            "engine": self.engine if self.backend == "simulator" else None,
            "order_source": "classical" if self.backend == "known_order_sampler" else "quantum",
            "n_problems": len(self.problems),
        }


@dataclass
class ProblemResult:
    problem: FactoringProblem
    M: int
    order: int
    counts: dict[str, int]
    first_factor_index: int | None
    first_order_index: int | None
    order_solvable: bool
    ratios: dict[str, int]
    outcomes: list[dict] | None = None

    @property
    def success_count(self) -> int:
        return self.counts[SUCCESS]

    @property
    def lucky_counts(self) -> dict[str, int]:
        return {k: self.counts[k] for k in LUCKY}

    @property
    def factor_count(self) -> int:
        return self.M - self.counts[FAIL]

    def record(self) -> dict:
        rec = {
            "problem": problem_to_record(self.problem),
            "M": self.M,
            "order": str(self.order),
            "counts": self.counts,
            "first_factor_index": self.first_factor_index,
            "first_order_index": self.first_order_index,
            "order_solvable": self.order_solvable,
            "r_over_order": self.ratios,
        }
        if self.outcomes is not None:
            rec["outcomes"] = self.outcomes
        return rec


def _rms(values: Sequence[float]) -> float:
    if len(values) < 2:
        return 0.0
    arr = np.asarray(values, dtype=float)
    return float(np.sqrt(np.mean((arr - arr.mean()) ** 2)))


@dataclass
class CampaignResult:
    spec: CampaignSpec
    problems: list[ProblemResult]

    def by_length(self) -> dict[int, list[ProblemResult]]:
        groups: dict[int, list[ProblemResult]] = {}
        for res in self.problems:
            groups.setdefault(res.problem.L, []).append(res)
        return dict(sorted(groups.items()))

    def aggregate(self) -> dict:
        """Per-L means and spreads, plus means over L.

        ``rms_problems`` is the spread of per-problem fractions;
        ``rms_semiprimes`` is the spread across N of the per-N average over bases.
        """
        per_length = {}
        for L, group in self.by_length().items():
            row = {"n_problems": len(group)}
            for name, frac in (("success", lambda r: r.success_count / r.M),
                               ("factor", lambda r: r.factor_count / r.M)):
                vals = [frac(r) for r in group]
                by_n: dict[int, list[float]] = {}
                for r, v in zip(group, vals):
                    by_n.setdefault(r.problem.N, []).append(v)
                row[name] = {
                    "mean": float(np.mean(vals)),
                    "rms_problems": _rms(vals),
                    "rms_semiprimes": _rms([float(np.mean(v)) for v in by_n.values()]),
                }
            per_length[L] = row
        means = {
            name: float(np.mean([row[name]["mean"] for row in per_length.values()])) if per_length else math.nan
            for name in ("success", "factor")
        }
        return {"per_length": per_length, "mean_over_lengths": means,
                "order_known": order_known_statistics(self)}

    def records(self) -> Iterable[dict]:
        yield self.spec.header()
        for res in self.problems:
            yield res.record()

    def to_jsonl(self) -> str:
        return "".join(json.dumps(rec, sort_keys=True) + "\n" for rec in self.records())


def order_known_statistics(result: CampaignResult) -> dict:
    """Among problems where some bitstring produced the true order, how many split N from it."""
    hit = [r for r in result.problems if r.first_order_index is not None]
    solvable = sum(r.order_solvable for r in hit)
    return {"problems_with_order": len(hit), "solvable": solvable,
            "fraction": solvable / len(hit) if hit else math.nan}


def uniform_campaign_problems(lengths: Iterable[int], n_semiprimes: int = 50, n_bases: int = 50,
                              seed: int = 0) -> list[FactoringProblem]:
    """Uniform problem set with an independent generator per bit length."""
    problems = []
    for L in lengths:
        problems.extend(uniform_problem_set(L, n_semiprimes, n_bases, np.random.default_rng([seed, L])))
    return problems


def sample_problem(problem: FactoringProblem, spec: CampaignSpec, order: int | None = None) -> np.ndarray:
    """The M bitstrings of one problem under the chosen backend."""
    M = spec.M
    if spec.backend == "known_order_sampler":
        order = order or multiplicative_order(problem.a, problem.N, problem.p, problem.q).value
        sampler = KnownOrderSampler(DistributionSpec(order, problem.t))
        rng = np.random.default_rng([problem.seed, _SAMPLER_STREAM])
        return np.array(sampler.samples(rng, M), dtype=object)
    if problem.n_qubits > spec.qubit_ceiling:
        raise QubitCeilingExceeded(f"{problem.n_qubits} qubits exceed the ceiling of {spec.qubit_ceiling}")
    if spec.engine == "batched":
        return sample_bitstrings(problem, M, spec.error)
    return np.array([run_iterative_shor(problem, spec.error, index=i, shard_count=spec.shards,
                                        qubit_ceiling=spec.qubit_ceiling)[0].j for i in range(M)])


def _process(problem: FactoringProblem, spec: CampaignSpec) -> ProblemResult:
    order = multiplicative_order(problem.a, problem.N, problem.p, problem.q).value
    js = sample_problem(problem, spec, order)
    counts = Counter({c: 0 for c in CLASSIFICATIONS})
    ratios: Counter[str] = Counter()
    first_factor = first_order = None
    params = EkeraParams.default(problem.L, problem.t) if spec.post_mode == "ekera" else None
    outcomes = [] if spec.keep_outcomes else None
    for idx, j in enumerate(js, start=1):
        j = int(j)
        if params is None:
            out = shor_standard_procedure(j, problem.t, problem.N, problem.a, order=order)
            got_order = out.convergent.r == order
        else:
            rng = np.random.default_rng([problem.seed, idx, _POST_STREAM])
            out = ekera_postprocess(j, problem.t, problem.N, problem.a, params, rng, order=order)
            got_order = out.order == order
        counts[out.classification] += 1
        if out.classification in LUCKY:
            ratios[str(Fraction(out.convergent.r, order))] += 1
        if first_factor is None and out.found_factor:
            first_factor = idx
        if first_order is None and got_order:
            first_order = idx
        if outcomes is not None:
            outcomes.append(out.record(j))
    solvable = bool(gcd_split(problem.N, pow(problem.a, order // 2, problem.N)))
    return ProblemResult(problem, spec.M, order, dict(counts), first_factor, first_order,
                         solvable, dict(sorted(ratios.items())), outcomes)


def _process_args(args):
    return _process(*args)


def run_campaign(spec: CampaignSpec) -> CampaignResult:
    """Run every problem of ``spec``; results come back in problem order."""
    jobs = [(p, spec) for p in spec.problems]
    if spec.workers <= 1 or len(jobs) <= 1:
        results = [_process(*job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            results = list(pool.map(_process_args, jobs, chunksize=max(1, len(jobs) // (8 * spec.workers))))
    return CampaignResult(spec, results)


# -- derived statistics ---------------------------------------------------------


@dataclass(frozen=True)
class FirstHitStatistics:
    first_factor: dict[int, int]
    first_order: dict[int, int]
    n_problems: int
    never_factor: float
    never_order: float

    @property
    def factor_on_first(self) -> float:
        return self.first_factor.get(1, 0) / self.n_problems if self.n_problems else math.nan

    @property
    def order_on_first(self) -> float:
        return self.first_order.get(1, 0) / self.n_problems if self.n_problems else math.nan


def first_hit_statistics(result: CampaignResult) -> FirstHitStatistics:
    """Histograms of how many bitstrings each problem needed for a factor and for the order."""
    n = len(result.problems)
    ff = Counter(r.first_factor_index for r in result.problems if r.first_factor_index is not None)
    fo = Counter(r.first_order_index for r in result.problems if r.first_order_index is not None)
    return FirstHitStatistics(
        dict(sorted(ff.items())),
        dict(sorted(fo.items())),
        n,
        (n - sum(ff.values())) / n if n else math.nan,
        (n - sum(fo.values())) / n if n else math.nan,
    )


def t_sweep(problem: FactoringProblem, t_values: Iterable[int], M: int, **spec_kwargs) -> dict[int, dict[str, float]]:
    """Outcome fractions of one problem as the number of measured bits varies."""
    out = {}
    for t in t_values:
        spec = CampaignSpec(problems=(problem.with_t(t),), M=M, **spec_kwargs)
        res = _process(spec.problems[0], spec)
        out[t] = {c: res.counts[c] / M for c in CLASSIFICATIONS}
        out[t]["factor"] = res.factor_count / M
    return out


@dataclass(frozen=True)
class ErrorSweepPoint:
    delta: float
    p_error: float
    success: float
    factor: float
    reference: float


def error_config_for_delta(kind: ErrorKind | str, delta: float) -> ErrorConfig:
    """Error model at strength delta; the quantum channel splits delta evenly over X and Y."""
    kind = ErrorKind(kind)
    if kind is ErrorKind.QUANTUM_MEASURE:
        return ErrorConfig(kind, pauli=(delta / 2, delta / 2, 0.0))
    if kind is ErrorKind.NONE or delta == 0:
        return ErrorConfig()
    return ErrorConfig(kind, delta)


def error_sweep(problem: FactoringProblem, error_kind: ErrorKind | str, delta_grid: Iterable[float], M: int,
                post_mode: str = "ekera", **spec_kwargs) -> list[ErrorSweepPoint]:
    """Success against effective error probability, with the independent-error curve (1 - p)^t."""
    points = []
    for delta in delta_grid:
        cfg = error_config_for_delta(error_kind, delta)
        spec = CampaignSpec(problems=(problem,), M=M, error=cfg, post_mode=post_mode, **spec_kwargs)
        res = _process(problem, spec)
        p = effective_error_probability(error_kind, delta)
        points.append(ErrorSweepPoint(delta, p, res.success_count / M, res.factor_count / M,
                                      (1 - p) ** problem.t))
    return points


@dataclass(frozen=True)
class RatioHistogram:
    bins: dict[str, int]
    overflow: int
    lucky_total: int

    def normalized(self) -> dict[str, float]:
        if not self.lucky_total:
            return {}
        out = {k: v / self.lucky_total for k, v in self.bins.items()}
        out[">1"] = self.overflow / self.lucky_total
        return out


def r_ratio_histogram(result: CampaignResult) -> RatioHistogram:
    """Counts of r / order over lucky bitstrings; ratios above one go to the overflow bin."""
    total: Counter[Fraction] = Counter()
    for res in result.problems:
        for key, n in res.ratios.items():
            total[Fraction(key)] += n
    bins = {str(f): n for f, n in sorted(total.items(), key=lambda kv: kv[0], reverse=True) if f <= 1}
    overflow = sum(n for f, n in total.items() if f > 1)
    return RatioHistogram(bins, overflow, sum(total.values()))


def write_jsonl(records: Iterable[dict], path: str | Path) -> None:
    with open(path, "w") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
