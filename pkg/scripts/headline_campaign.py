"""Uniform campaign over L = 9..18 with Shor post-processing.

Writes the per-problem records, the aggregates, first-hit histograms and the
r/order histogram under results/. Expect a couple of hours on one core.

    python3 scripts/headline_campaign.py --lengths 9-18 --M 256
"""

import argparse
import json
import time
from dataclasses import asdict
from pathlib import Path

from shorsim.cli import _int_range
from shorsim.harness import (
    CampaignSpec,
    first_hit_statistics,
    r_ratio_histogram,
    run_campaign,
    uniform_campaign_problems,
)
from shorsim.postprocess import shor_bound


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--lengths", type=_int_range, default=_int_range("9-18"))
    ap.add_argument("--semiprimes", type=int, default=50)
    ap.add_argument("--bases", type=int, default=50)
    ap.add_argument("--M", type=int, default=256)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="results/headline")
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    problems = uniform_campaign_problems(args.lengths, args.semiprimes, args.bases, args.seed)
    start = time.time()
    result = run_campaign(CampaignSpec(problems=tuple(problems), M=args.M, workers=args.workers))
    elapsed = time.time() - start

    (out / "campaign.jsonl").write_text(result.to_jsonl())
    agg = result.aggregate()
    hits = first_hit_statistics(result)
    hist = r_ratio_histogram(result)
    summary = {
        "elapsed_seconds": elapsed,
        "aggregate": agg,
        "shor_bound": {str(L): shor_bound(1 << L) for L in args.lengths},
        "first_hits": {**asdict(hits), "factor_on_first": hits.factor_on_first,
                       "order_on_first": hits.order_on_first},
        "r_over_order": hist.normalized(),
    }
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True))
    with open(out / "per_length.tsv", "w") as fh:
        fh.write("L\tproblems\tsuccess\tsuccess_rms\tfactor\tfactor_rms\n")
        for L, row in agg["per_length"].items():
            fh.write(f"{L}\t{row['n_problems']}\t{row['success']['mean']:.4f}\t"
                     f"{row['success']['rms_semiprimes']:.4f}\t{row['factor']['mean']:.4f}\t"
                     f"{row['factor']['rms_semiprimes']:.4f}\n")
    print(json.dumps({"elapsed_seconds": round(elapsed), **agg["mean_over_lengths"],
                      "order_known": agg["order_known"]}, indent=2))


if __name__ == "__main__":
    main()
