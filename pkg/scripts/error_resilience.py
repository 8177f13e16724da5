"""Success of the neighbourhood pipeline under each error model as the error strength grows.

Writes one row per (model, delta) with the independent-error reference (1 - p)^t.

    python3 scripts/error_resilience.py --N 1048351 --a 11 --M 512
"""

import argparse
import json
from dataclasses import asdict
from pathlib import Path

import numpy as np

from shorsim.harness import error_sweep
from shorsim.noise import ErrorKind, delta_for_error_probability
from shorsim.problems import FactoringProblem


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--N", type=int, default=1048351)
    ap.add_argument("--a", type=int, default=11)
    ap.add_argument("--M", type=int, default=512)
    ap.add_argument("--p-max", type=float, default=0.05)
    ap.add_argument("--points", type=int, default=6)
    ap.add_argument("--seed", type=int, default=8)
    ap.add_argument("--out", default="results/error_resilience.jsonl")
    args = ap.parse_args()

    prob = FactoringProblem.make(args.N, args.a, seed=args.seed)
    p_grid = np.linspace(0, args.p_max, args.points)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w") as fh:
        for kind in ErrorKind:
            if kind is ErrorKind.NONE:
                continue
            # quantum errors are parameterized by px + py, which equals p
            deltas = [p if kind is ErrorKind.QUANTUM_MEASURE else delta_for_error_probability(kind, p)
                      for p in p_grid]
            for point in error_sweep(prob, kind, deltas, args.M):
                row = {"kind": kind.value, **asdict(point)}
                fh.write(json.dumps(row) + "\n")
                print(json.dumps(row))


if __name__ == "__main__":
    main()
