"""Bound constants and a random-sample check for every config file in a directory.

Usage: python scripts/bound_constants.py [configs/] --samples 200
"""

import argparse
from pathlib import Path

import numpy as np

from weighted_hardy import ConfigError, generalized_rho, load_config, rho, verify_batch


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("directory", nargs="?", default=str(Path(__file__).resolve().parent.parent / "configs"))
    ap.add_argument("--samples", type=int, default=200)
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    print(f"{'config':<24} {'p':>4} {'constant':>20} {'blocks scanned':>15}  {'worst ratio':>12}")
    for path in sorted(Path(args.directory).glob("*.json")):
        try:
            cfg = load_config(path)
        except ConfigError as exc:
            print(f"{path.stem:<24} invalid: {exc}")
            continue
        report = rho(cfg) if cfg.norming.kind == "derived" else generalized_rho(cfg)
        if not report.converged:
            print(f"{cfg.name:<24} {cfg.p:>4g} {'diverges':>20} {report.truncation_level:>15}")
            continue
        N = cfg.partition.boundary(cfg.truncation)
        a = rng.standard_normal((args.samples, N)) + 1j * rng.standard_normal((args.samples, N))
        worst = max(r.lhs / r.rhs_norm for r in verify_batch(a, cfg, report))
        print(f"{cfg.name:<24} {cfg.p:>4g} {report.constant:>20.15f} {report.truncation_level:>15}  {worst:>12.6f}")


if __name__ == "__main__":
    main()
