"""Largest semiprimes with two equal-length distinct prime factors, by register size.

    python3 scripts/table1.py --n-qubits 5-40
"""

import argparse
from pathlib import Path

from shorsim.cli import _int_range
from shorsim.problems import largest_interesting_semiprime


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-qubits", type=_int_range, default=_int_range("5-40"))
    ap.add_argument("--out", default="results/table1.tsv")
    args = ap.parse_args()

    lines = ["n\tN\tp\tq\tt"]
    for n in args.n_qubits:
        rec = largest_interesting_semiprime(n)
        lines.append(f"{n}\t{rec.N}\t{rec.p}\t{rec.q}\t{rec.t_recommended}")
        print(lines[-1])
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    Path(args.out).write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
