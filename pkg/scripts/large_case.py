"""Classify bitstrings of a 39-bit problem using the known-order sampler.

The order is computed classically from p and q, so this exercises the
post-processing and classification only; the output header says so.

    python3 scripts/large_case.py --M 4096
"""

import argparse
import json
from pathlib import Path

from shorsim.harness import CampaignSpec, r_ratio_histogram, run_campaign
from shorsim.problems import FactoringProblem


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--N", type=int, default=274877906893)
    ap.add_argument("--a", type=int, default=226009433972)
    ap.add_argument("--p", type=int, default=364303)
    ap.add_argument("--q", type=int, default=754531)
    ap.add_argument("--M", type=int, default=4096)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="results/large_case.json")
    args = ap.parse_args()

    prob = FactoringProblem.make(args.N, args.a, p=args.p, q=args.q, seed=args.seed)
    result = run_campaign(CampaignSpec(problems=(prob,), M=args.M, backend="known_order_sampler"))
    res = result.problems[0]
    hist = r_ratio_histogram(result)
    summary = {
        **result.spec.header(),
        "order": str(res.order),
        "fractions": {k: v / args.M for k, v in res.counts.items()},
        "r_over_order": hist.bins,
        "r_over_order_overflow": hist.overflow,
    }
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    Path(args.out).write_text(json.dumps(summary, indent=2))
    print(json.dumps(summary, indent=2))


if __name__ == "__main__":
    main()
