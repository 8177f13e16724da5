"""Command-line entry point: ``shorsim <subcommand> ...``.

Exit codes: 0 on success, 2 on configuration errors, 3 when a budget or the
qubit ceiling would be exceeded.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import sys
from dataclasses import asdict

import numpy as np

from .common import BudgetExceeded
from .harness import (
    CampaignSpec,
    error_sweep,
    first_hit_statistics,
    r_ratio_histogram,
    run_campaign,
    t_sweep,
    uniform_campaign_problems,
)
from .noise import ErrorConfig, ErrorKind
from .numtheory import multiplicative_order
from .postprocess import (
    EkeraParams,
    ekera_bound,
    ekera_postprocess,
    rosser_bound,
    shor_bound,
    shor_bound_factors,
    shor_standard_procedure,
)
from .problems import (
    FactoringProblem,
    largest_interesting_semiprime,
    problem_to_record,
    read_manifest,
)
from .spectrum import DistributionSpec, KnownOrderSampler, distribution
from .statevector import DEFAULT_QUBIT_CEILING, run_iterative_shor

EXIT_CONFIG, EXIT_BUDGET = 2, 3
MAX_DUMP_T = 20


class ConfigError(ValueError):
    pass


def _int_range(text: str) -> list[int]:
    """Parse "9-18", "4,8,12" or a mix of both."""
    values = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part:
            lo, hi = part.split("-", 1)
            values.extend(range(int(lo), int(hi) + 1))
        elif part:
            values.append(int(part))
    if not values:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return values


def _float_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _error(text: str) -> ErrorConfig:
    try:
        return ErrorConfig.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


class _Emitter:
    def __init__(self, fh):
        self.fh = fh

    def __call__(self, record: dict) -> None:
        self.fh.write(json.dumps(record, sort_keys=True) + "\n")


def _problem_from_args(args) -> FactoringProblem:
    if (args.p is None) != (args.q is None):
        raise ConfigError("give both --p and --q or neither")
    return FactoringProblem.make(args.N, args.a, getattr(args, "t", None), args.p, args.q, seed=args.seed)


def _add_problem_args(p: argparse.ArgumentParser, t_flag: bool = True) -> None:
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--p", type=int)
    p.add_argument("--q", type=int)
    if t_flag:
        p.add_argument("--t", type=int, help="measured bits (default: smallest t with 2^t >= N^2)")


def _load_problems(args) -> list[FactoringProblem]:
    if getattr(args, "problem_file", None):
        return list(read_manifest(args.problem_file))
    if getattr(args, "L", None):
        return uniform_campaign_problems(args.L, args.semiprimes, args.bases, args.seed)
    raise ConfigError("give --problem-file or --L")


# -- subcommands ----------------------------------------------------------------


def cmd_generate_problems(args, emit):
    emit({"schema": "shorsim.problems", "version": 1})
    for prob in _load_problems(args):
        emit(problem_to_record(prob))


def cmd_simulate(args, emit):
    problem = _problem_from_args(args)
    bits, traces = run_iterative_shor(problem, args.error, index=args.index, shard_count=args.shards,
                                      workers=args.workers, qubit_ceiling=args.qubit_ceiling)
    for tr in traces:
        emit({"cbit": tr.cbit, "p1": tr.p1, "bit": tr.sampled_bit,
              "error_event": list(tr.error_events) or None})
    emit({"j": str(bits.j), "binary": bits.binary, "t": bits.t})


def cmd_sample_distribution(args, emit):
    spec = DistributionSpec(args.order, args.t)
    if args.dump_distribution:
        if args.t > MAX_DUMP_T:
            raise BudgetExceeded(f"--dump-distribution is limited to t <= {MAX_DUMP_T}")
        for j, p in enumerate(distribution(spec)):
            emit({"j": str(j), "p": float(p)})
        return
    rng = np.random.default_rng(args.seed)
    for j in KnownOrderSampler(spec).samples(rng, args.count):
        emit({"j": str(j)})


def _read_bitstrings(path: str):
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line[0] == "{":
                rec = json.loads(line)
                if "j" not in rec:
                    continue
                yield int(rec.get("problem", 0)), int(rec["j"])
            else:
                yield 0, int(line)


def cmd_postprocess(args, emit):
    problems = list(read_manifest(args.problem_file))
    if not problems:
        raise ConfigError("empty problem file")
    for i, (which, j) in enumerate(_read_bitstrings(args.bitstrings_file)):
        prob = problems[which]
        order = None
        if prob.p is not None:
            order = multiplicative_order(prob.a, prob.N, prob.p, prob.q).value
        if args.mode == "shor":
            out = shor_standard_procedure(j, prob.t, prob.N, prob.a, order=order)
        else:
            rng = np.random.default_rng([args.seed, i])
            out = ekera_postprocess(j, prob.t, prob.N, prob.a, EkeraParams.default(prob.L, prob.t), rng, order)
        emit(out.record(j))


def cmd_campaign(args, emit):
    spec = CampaignSpec(problems=tuple(_load_problems(args)), M=args.M, error=args.error,
                        post_mode=args.post_mode, backend=args.backend, engine=args.engine,
                        shards=args.shards, qubit_ceiling=args.qubit_ceiling, workers=args.workers,
                        keep_outcomes=args.keep_outcomes)
    result = run_campaign(spec)
    for rec in result.records():
        emit(rec)
    hits = first_hit_statistics(result)
    hist = r_ratio_histogram(result)
    emit({"aggregate": result.aggregate(),
          "first_hits": {**asdict(hits), "factor_on_first": hits.factor_on_first,
                         "order_on_first": hits.order_on_first},
          "r_over_order": {"bins": hist.bins, "overflow": hist.overflow, "lucky_total": hist.lucky_total}})


def cmd_t_sweep(args, emit):
    problem = _problem_from_args(args)
    rows = t_sweep(problem, args.t_values, args.M, post_mode=args.post_mode, qubit_ceiling=args.qubit_ceiling)
    for t, fractions in rows.items():
        emit({"t": t, **fractions})


def cmd_error_sweep(args, emit):
    problem = _problem_from_args(args)
    for pt in error_sweep(problem, args.kind, args.deltas, args.M, post_mode=args.post_mode,
                          qubit_ceiling=args.qubit_ceiling):
        emit(asdict(pt))


def cmd_table1(args, emit):
    for n in args.n_qubits:
        rec = largest_interesting_semiprime(n)
        emit({k: (str(v) if k in ("N", "p", "q") else v) for k, v in asdict(rec).items()})


def cmd_bounds(args, emit):
    for N in args.N or []:
        f = shor_bound_factors(N, inner=args.inner)
        emit({"N": str(N), "shor_bound": shor_bound(N, args.inner), "peak": f.peak,
              "coprime": f.coprime, "good_base": f.good_base})
    for L in args.L or []:
        t = 2 * L if args.t is None else args.t
        emit({"L": L, "t": t, "ekera_bound": ekera_bound(EkeraParams.default(L, t), L)})
    for r in args.order or []:
        emit({"order": str(r), "rosser_bound": rosser_bound(r)})


# -- parser ---------------------------------------------------------------------


def _add_global_flags(parser: argparse.ArgumentParser, defaults: bool) -> None:
    def default(value):
        return value if defaults else argparse.SUPPRESS

    parser.add_argument("--seed", type=int, default=default(0))
    parser.add_argument("--shards", type=int, default=default(2), help="statevector shards (power of two)")
    parser.add_argument("--workers", type=int, default=default(1))
    parser.add_argument("--out", default=default(None), help="output file (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="shorsim", description=__doc__.splitlines()[0])
    _add_global_flags(parser, defaults=True)
    # the same flags are accepted after the subcommand name
    shared = argparse.ArgumentParser(add_help=False)
    _add_global_flags(shared, defaults=False)
    sub = parser.add_subparsers(dest="command", required=True)
    _sub_add = sub.add_parser
    sub.add_parser = lambda *a, **kw: _sub_add(*a, parents=[shared], **kw)

    p = sub.add_parser("generate-problems", help="write a manifest of uniform problems")
    p.add_argument("--L", type=_int_range, required=True)
    p.add_argument("--semiprimes", type=int, default=50)
    p.add_argument("--bases", type=int, default=50)
    p.set_defaults(func=cmd_generate_problems)

    p = sub.add_parser("simulate", help="one run of the iterative circuit with a stage trace")
    _add_problem_args(p)
    p.add_argument("--index", type=int, default=0, help="trajectory index within the seed")
    p.add_argument("--error", type=_error, default=ErrorConfig())
    p.add_argument("--qubit-ceiling", type=int, default=DEFAULT_QUBIT_CEILING)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sample-distribution", help="sample the error-free output distribution for a known order")
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--dump-distribution", action="store_true")
    p.set_defaults(func=cmd_sample_distribution)

    p = sub.add_parser("postprocess", help="post-process bitstrings for problems in a manifest")
    p.add_argument("--mode", choices=("shor", "ekera"), default="shor")
    p.add_argument("--problem-file", required=True)
    p.add_argument("--bitstrings-file", required=True)
    p.set_defaults(func=cmd_postprocess)

    p = sub.add_parser("campaign", help="sample and post-process many problems")
    p.add_argument("--problem-file")
    p.add_argument("--L", type=_int_range)
    p.add_argument("--semiprimes", type=int, default=50)
    p.add_argument("--bases", type=int, default=50)
    p.add_argument("--M", type=int, default=256)
    p.add_argument("--error", type=_error, default=ErrorConfig())
    p.add_argument("--post-mode", choices=("shor", "ekera"), default="shor")
    p.add_argument("--backend", choices=("simulator", "known_order_sampler"), default="simulator")
    p.add_argument("--engine", choices=("batched", "statevector"), default="batched")
    p.add_argument("--qubit-ceiling", type=int, default=DEFAULT_QUBIT_CEILING)
    p.add_argument("--keep-outcomes", action="store_true")
    p.set_defaults(func=cmd_campaign)

    p = sub.add_parser("t-sweep", help="outcome fractions against the number of measured bits")
    _add_problem_args(p, t_flag=False)
    p.add_argument("--t-values", type=_int_range, required=True)
    p.add_argument("--M", type=int, default=256)
    p.add_argument("--post-mode", choices=("shor", "ekera"), default="shor")
    p.add_argument("--qubit-ceiling", type=int, default=DEFAULT_QUBIT_CEILING)
    p.set_defaults(func=cmd_t_sweep)

    p = sub.add_parser("error-sweep", help="success against effective error probability")
    _add_problem_args(p)
    p.add_argument("--kind", choices=[k.value for k in ErrorKind if k is not ErrorKind.NONE], required=True)
    p.add_argument("--deltas", type=_float_list, required=True)
    p.add_argument("--M", type=int, default=256)
    p.add_argument("--post-mode", choices=("shor", "ekera"), default="ekera")
    p.add_argument("--qubit-ceiling", type=int, default=DEFAULT_QUBIT_CEILING)
    p.set_defaults(func=cmd_error_sweep)

    p = sub.add_parser("table1", help="largest semiprimes with equal-length distinct prime factors")
    p.add_argument("--n-qubits", type=_int_range, default=_int_range("5-30"))
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("bounds", help="theoretical success bounds")
    p.add_argument("--N", type=_int_range)
    p.add_argument("--L", type=_int_range)
    p.add_argument("--t", type=int)
    p.add_argument("--order", type=_int_range)
    p.add_argument("--inner", choices=("bits", "natural"), default="bits",
                   help="base of the inner logarithm in log log N")
    p.set_defaults(func=cmd_bounds)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with contextlib.ExitStack() as stack:
            fh = stack.enter_context(open(args.out, "w")) if args.out else sys.stdout
            args.func(args, _Emitter(fh))
    except BudgetExceeded as exc:
        print(f"shorsim: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ValueError, OSError, IndexError) as exc:
        print(f"shorsim: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return 0


if __name__ == "__main__":
    sys.exit(main())
