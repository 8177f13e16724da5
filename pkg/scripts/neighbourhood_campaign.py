"""Single-bitstring success of the neighbourhood-search pipeline against its bound.

    python3 scripts/neighbourhood_campaign.py --lengths 12,16,20 --problems 500
"""

import argparse
import json
from pathlib import Path

from shorsim.cli import _int_range
from shorsim.harness import CampaignSpec, run_campaign, uniform_campaign_problems
from shorsim.postprocess import EkeraParams, ekera_bound


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--lengths", type=_int_range, default=_int_range("12,16,20"))
    ap.add_argument("--problems", type=int, default=500)
    ap.add_argument("--bases", type=int, default=5)
    ap.add_argument("--M", type=int, default=1)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--out", default="results/neighbourhood.jsonl")
    args = ap.parse_args()

    rows = []
    for L in args.lengths:
        problems = uniform_campaign_problems([L], -(-args.problems // args.bases), args.bases, args.seed)
        result = run_campaign(CampaignSpec(problems=problems, M=args.M, post_mode="ekera"))
        total = len(problems) * args.M
        rows.append({
            "L": L,
            "problems": len(problems),
            "success": sum(r.success_count for r in result.problems) / total,
            "bound": max(ekera_bound(EkeraParams.default(L, p.t), L) for p in problems),
        })
        print(json.dumps(rows[-1]))
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    Path(args.out).write_text("".join(json.dumps(r) + "\n" for r in rows))


if __name__ == "__main__":
    main()
