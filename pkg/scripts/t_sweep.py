"""Outcome fractions against the number of measured bits for N = 15707.

    python3 scripts/t_sweep.py --bases 831,833 --t-values 4-32
"""

import argparse
import json
from pathlib import Path

from shorsim.cli import _int_range
from shorsim.harness import t_sweep
from shorsim.problems import FactoringProblem


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--N", type=int, default=15707)
    ap.add_argument("--bases", type=_int_range, default=_int_range("831,833"))
    ap.add_argument("--t-values", type=_int_range, default=_int_range("4-32"))
    ap.add_argument("--M", type=int, default=1024)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--out", default="results/t_sweep.tsv")
    args = ap.parse_args()

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w") as fh:
        fh.write("a\tt\tsuccess\tlucky_ne\tlucky_no\tlucky_oo\tfail\n")
        for a in args.bases:
            rows = t_sweep(FactoringProblem.make(args.N, a, seed=args.seed), args.t_values, args.M)
            for t, row in rows.items():
                fh.write(f"{a}\t{t}\t" + "\t".join(f"{row[k]:.4f}" for k in
                                                  ("success", "lucky_ne", "lucky_no", "lucky_oo", "fail")) + "\n")
                print(json.dumps({"a": a, "t": t, **row}))


if __name__ == "__main__":
    main()
