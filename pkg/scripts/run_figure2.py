#!/usr/bin/env python3
"""Singular value densities of the normalized random feature matrix.

Pools singular values over 10 trials at d=50, m=150 with data and weights from
the standard normal law, for the five logarithmic scalings between N and m,
and writes max-1 density curves (density.csv, spectrum_summary.json,
spectrum.svg).
"""

import argparse
import sys

from rfcond import cli


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="out/figure2")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--trials", type=int, default=10)
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args()
    return cli.main([
        "spectrum", "--d", "50", "--m", "150", "--gamma", "1.0", "--sigma", "1.0",
        "--trials", str(args.trials), "--seed", str(args.seed),
        "--workers", str(args.workers), "--out", args.out,
    ])


if __name__ == "__main__":
    sys.exit(main())
