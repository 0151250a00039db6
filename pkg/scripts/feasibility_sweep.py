#!/usr/bin/env python3
"""Feasibility frontier of the certificate over damping gain and interval
length.  The discrete Poincare constant grows like L/pi, so lengths beyond
about pi*sqrt(2) ~ 4.44 are infeasible regardless of the gain.

Usage: python scripts/feasibility_sweep.py [--alphas 0.25,0.5,1,2,4] [--lengths ...] [--out runs/sweep]
"""

import argparse
import sys

from wavetrig.cli import main as cli_main


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alphas", default="0.25,0.5,1,2,4")
    ap.add_argument("--lengths", default="0.5,1,2,3,4,4.5,5")
    ap.add_argument("--n", type=int, default=99)
    ap.add_argument("--t-end", dest="t_end", type=float, default=10.0)
    ap.add_argument("--out", default="runs/sweep")
    args = ap.parse_args()

    code = cli_main([
        "sweep",
        "--alphas", args.alphas,
        "--lengths", args.lengths,
        "--n", str(args.n),
        "--t-end", str(args.t_end),
        "--out", args.out,
    ])
    if code == 0:
        with open(f"{args.out}/sweep.csv") as fh:
            header = fh.readline().strip().split(",")
            print(" ".join(f"{h:>10}" for h in header[:6]))
            for line in fh:
                cells = line.strip().split(",")
                print(" ".join(f"{float(c):10.4g}" for c in cells[:6]))
    return code


if __name__ == "__main__":
    sys.exit(main())
