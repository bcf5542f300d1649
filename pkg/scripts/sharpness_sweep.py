"""Ratio ||T a|| / ||a|| of the block-constant family a_j = r**-k as r decreases to sqrt(b).

Writes CSV (r, ratio, sharp_constant, gap) to stdout, or JSON with --json.
Usage: python scripts/sharpness_sweep.py --base 4 --points 12
"""

import argparse
import math
import sys

import numpy as np

from weighted_hardy.extremal import sharpness_sweep, sweep_json, write_sweep_csv


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--base", type=int, default=4)
    ap.add_argument("--points", type=int, default=12)
    ap.add_argument("--closest", type=float, default=1e-6, help="smallest relative distance of r above sqrt(b)")
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()

    lo, hi = math.sqrt(args.base), float(args.base)
    offsets = np.geomspace(0.5, args.closest, args.points)
    grid = lo + offsets * (hi - lo)
    rows, skipped = sharpness_sweep(args.base, grid)
    if args.json:
        print(sweep_json(args.base, rows, skipped))
    else:
        write_sweep_csv(sys.stdout, rows)


if __name__ == "__main__":
    main()
