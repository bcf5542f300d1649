"""Truncated operator norms for geometric partitions n_k = b**k with M_k = sqrt(n_k).

Prints the norm of each K-block section next to the limiting constant
(sqrt(b) + 1) / sqrt(b - 1).  Usage: python scripts/truncated_norms.py --base 4 --blocks 8
"""

import argparse

from weighted_hardy import (
    AveragingConfig,
    ExponentPair,
    NormingScheme,
    WeightScheme,
    geometric_partition,
    geometric_sharp_constant,
    truncated_operator_norm,
)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--base", type=int, default=4)
    ap.add_argument("--blocks", type=int, default=8)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    cfg = AveragingConfig(
        partition=geometric_partition(args.base, args.blocks),
        weights=WeightScheme.constant(),
        exponents=ExponentPair.from_p(2.0),
        norming=NormingScheme("root_of_boundary"),
    )
    sharp = geometric_sharp_constant(args.base)
    print(f"{'K':>3}  {'n_K':>10}  {'norm':>18}  {'sharp - norm':>14}")
    for K in range(1, args.blocks + 1):
        est = truncated_operator_norm(cfg, K, seed=args.seed, full_output=True)
        print(f"{K:>3}  {args.base**K:>10}  {est.value:>18.15f}  {sharp - est.value:>14.6e}")
    print(f"limit (sqrt(b) + 1) / sqrt(b - 1) = {sharp:.15f}")


if __name__ == "__main__":
    main()
