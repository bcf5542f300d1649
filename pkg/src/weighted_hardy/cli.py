"""Command-line front end.

Exit codes: 0 success, 1 inequality violated, 2 invalid input, 3 divergent constant.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .constants import (
    BoundReport,
    generalized_rho,
    geometric_rho_prime_bound,
    geometric_sharp_constant,
    lacunary_bound,
    rho,
)
from .extremal import (
    ExtremalParams,
    direct_sums,
    extremal_l2_norm_sq,
    extremal_lhs_sum,
    extremal_ratio,
    sharpness_sweep,
    sweep_json,
    write_sweep_csv,
)
from .operator import (
    CSV_FIELDS,
    DivergentConstantError,
    truncated_operator_norm,
    verify_batch,
    write_verification_csv,
)
from .partitions import (
    AveragingConfig,
    ConfigError,
    GeometricExtension,
    RatioExtension,
    load_config,
)

EXIT_OK, EXIT_VIOLATION, EXIT_INVALID, EXIT_DIVERGENT = 0, 1, 2, 3
SAMPLE_CHUNK = 256


@dataclass(frozen=True)
class RunSpec:
    subcommand: str
    config_path: str | None = None
    output_format: str = "table"
    seed: int = 42
    samples: int = 1000
    tolerance: float = 1e-10
    blocks: int | None = None
    base: int | None = None
    grid: tuple[float, ...] = ()
    r: float | None = None
    constant: str = "auto"

    def __post_init__(self):
        if self.subcommand == "verify" and self.samples < 1:
            raise ConfigError(f"--samples must be >= 1, got {self.samples}")
        if not self.tolerance > 0.0:
            raise ConfigError(f"--tol must be positive, got {self.tolerance}")
        if self.blocks is not None and self.blocks < 1:
            raise ConfigError(f"--blocks must be >= 1, got {self.blocks}")


def _g(x: float) -> str:
    return format(x, ".17g")


def _print_table(header: list[str], rows: list[list]) -> None:
    cells = [[str(c) for c in header]] + [[c if isinstance(c, str) else _g(c) if isinstance(c, float) else str(c) for c in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    for i, row in enumerate(cells):
        print("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
        if i == 0:
            print("  ".join("-" * w for w in widths))


def _geometric_base(config: AveragingConfig) -> int | None:
    ext = config.partition.extension
    if not isinstance(ext, GeometricExtension):
        return None
    K = config.partition.num_blocks
    if config.partition.boundaries(K) != [ext.base**k for k in range(1, K + 1)]:
        return None
    return ext.base


def _gap_ratio(config: AveragingConfig) -> Fraction | None:
    part = config.partition
    if not isinstance(part.extension, (GeometricExtension, RatioExtension)) or part.num_blocks < 2:
        return None
    return part.hadamard_ratio()


def _primary_constant(config: AveragingConfig, tol: float) -> tuple[str, BoundReport]:
    if config.norming.kind == "derived":
        return "rho", rho(config, tol)
    return "generalized_rho", generalized_rho(config, tol)


def _is_unit_root_norming(config: AveragingConfig) -> bool:
    return config.weights.is_unit and config.norming.kind == "root_of_boundary"


def cmd_bounds(spec: RunSpec) -> int:
    config = load_config(spec.config_path)
    entries: list[tuple[str, BoundReport | float]] = []
    primary_name, primary = _primary_constant(config, spec.tolerance)
    entries.append((primary_name, primary))
    if primary_name == "rho":
        entries.append(("generalized_rho", generalized_rho(config, spec.tolerance)))
    r = _gap_ratio(config)
    if r is not None:
        entries.append(("lacunary_bound", lacunary_bound(r, config.q)))
    b = _geometric_base(config)
    if b is not None and abs(config.p - 2.0) < 1e-12:
        entries.append(("rho_prime_bound", geometric_rho_prime_bound(b)))
        entries.append(("sharp_constant", geometric_sharp_constant(b)))
        entries.append(("sharp_constant_squared", geometric_sharp_constant(b) ** 2))

    def as_row(name, val):
        if isinstance(val, BoundReport):
            return [name, val.constant, val.truncation_level, val.tail_bound, val.converged]
        return [name, val, "", "", True]

    header = ["name", "constant", "truncation_level", "tail_bound", "converged"]
    rows = [as_row(n, v) for n, v in entries]
    if spec.output_format == "json":
        doc = {
            "config": config.name,
            "constants": {n: v.to_dict() if isinstance(v, BoundReport) else v for n, v in entries},
        }
        print(json.dumps(doc))
    elif spec.output_format == "csv":
        print(",".join(header))
        for row in rows:
            print(",".join(_g(c) if isinstance(c, float) else str(c).lower() if isinstance(c, bool) else str(c) for c in row))
    else:
        print(f"config: {config.name}  p={_g(config.p)}  q={_g(config.q)}  norming={config.norming.kind}")
        _print_table(header, rows)
        if r is not None and not _is_unit_root_norming(config):
            print("note: lacunary_bound applies to unit weights with M_k = n_k^(1/q)")
    if not primary.converged:
        print(f"error: {primary_name} constant diverges", file=sys.stderr)
        return EXIT_DIVERGENT
    return EXIT_OK


def _verify_constant(config: AveragingConfig, spec: RunSpec) -> tuple[str, BoundReport | float]:
    choice = spec.constant
    if choice == "auto":
        return _primary_constant(config, spec.tolerance)
    if choice == "rho":
        return "rho", rho(config, spec.tolerance)
    if choice == "generalized":
        return "generalized_rho", generalized_rho(config, spec.tolerance)
    if choice == "lacunary":
        r = _gap_ratio(config)
        if r is None or not _is_unit_root_norming(config):
            raise ConfigError("lacunary constant needs a lacunary partition, unit weights and root_of_boundary norming")
        return "lacunary_bound", lacunary_bound(r, config.q)
    b = _geometric_base(config)
    if b is None or abs(config.p - 2.0) > 1e-12 or not _is_unit_root_norming(config):
        raise ConfigError("sharp constant needs a geometric partition, p = 2, unit weights and root_of_boundary norming")
    return "sharp_constant", geometric_sharp_constant(b)


def cmd_verify(spec: RunSpec) -> int:
    config = load_config(spec.config_path)
    _, constant = _verify_constant(config, spec)
    if isinstance(constant, BoundReport) and not constant.converged:
        print("error: constant diverges", file=sys.stderr)
        return EXIT_DIVERGENT
    K = spec.blocks or config.truncation
    N = config.partition.boundary(K)
    rng = np.random.default_rng(spec.seed)
    reports = []
    left = spec.samples
    while left > 0:
        n = min(left, SAMPLE_CHUNK)
        a = rng.standard_normal((n, N)) + 1j * rng.standard_normal((n, N))
        reports.extend(verify_batch(a, config, constant))
        left -= n
    violations = sum(not r.holds for r in reports)
    if spec.output_format == "json":
        print(json.dumps({"config": config.name, "blocks": K, "length": N, "reports": [r.to_dict() for r in reports]}))
    elif spec.output_format == "table":
        slack_rel = min(r.slack / (r.bound_constant * r.rhs_norm) for r in reports)
        max_ratio = max(r.lhs / r.rhs_norm for r in reports)
        cval = reports[0].bound_constant
        print(f"config: {config.name}  p={_g(config.p)}  blocks={K}  length={N}")
        _print_table(
            ["samples", "constant", "max_ratio", "min_relative_slack", "violations"],
            [[len(reports), cval, max_ratio, slack_rel, violations]],
        )
    else:
        write_verification_csv(sys.stdout, config.name, reports)
    if violations:
        print(f"error: {violations} sample(s) violate the inequality", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_norm(spec: RunSpec) -> int:
    config = load_config(spec.config_path)
    K = spec.blocks or config.truncation
    b = _geometric_base(config)
    rows = []
    for k in range(1, K + 1):
        est = truncated_operator_norm(config, k, full_output=True, seed=spec.seed)
        rows.append([k, config.partition.boundary(k), est.value, est.iterations, est.converged])
    header = ["blocks", "length", "norm", "iterations", "converged"]
    if spec.output_format == "json":
        print(json.dumps({
            "config": config.name,
            "sharp_constant": geometric_sharp_constant(b) if b is not None else None,
            "rows": [dict(zip(header, row)) for row in rows],
        }))
    elif spec.output_format == "csv":
        print(",".join(header))
        for row in rows:
            print(",".join(_g(c) if isinstance(c, float) else str(c).lower() if isinstance(c, bool) else str(c) for c in row))
    else:
        print(f"config: {config.name}")
        _print_table(header, rows)
        if b is not None and _is_unit_root_norming(config):
            print(f"sharp constant (b={b}): {_g(geometric_sharp_constant(b))}")
    return EXIT_OK


def cmd_extremal(spec: RunSpec) -> int:
    if spec.base is None or spec.r is None:
        raise ConfigError("extremal needs --base and --r")
    params = ExtremalParams(spec.base, spec.r)
    lhs_d, l2_d, K = direct_sums(params)
    sharp = geometric_sharp_constant(params.b)
    ratio = extremal_ratio(params)
    doc = {
        "b": params.b,
        "r": params.r,
        "l2_norm_sq": extremal_l2_norm_sq(params),
        "l2_norm_sq_direct": l2_d,
        "lhs_sum": extremal_lhs_sum(params),
        "lhs_sum_direct": lhs_d,
        "direct_blocks": K,
        "ratio": ratio,
        "sharp_constant": sharp,
        "gap": sharp - ratio,
    }
    if spec.output_format == "json":
        print(json.dumps(doc))
    elif spec.output_format == "csv":
        print(",".join(doc))
        print(",".join(_g(v) if isinstance(v, float) else str(v) for v in doc.values()))
    else:
        _print_table(["quantity", "value"], [[k, v] for k, v in doc.items()])
    return EXIT_OK


def cmd_sweep(spec: RunSpec) -> int:
    if spec.base is None or not spec.grid:
        raise ConfigError("sweep needs --base and --grid")
    rows, skipped = sharpness_sweep(spec.base, spec.grid)
    if spec.output_format == "json":
        print(sweep_json(spec.base, rows, skipped))
    elif spec.output_format == "table":
        _print_table(["r", "ratio", "sharp_constant", "gap"], [list(r) for r in rows])
    else:
        write_sweep_csv(sys.stdout, rows)
    if skipped:
        print(f"skipped r outside (sqrt(b), b): {', '.join(_g(r) for r in skipped)}", file=sys.stderr)
    return EXIT_OK


COMMANDS = {
    "bounds": cmd_bounds,
    "verify": cmd_verify,
    "norm": cmd_norm,
    "extremal": cmd_extremal,
    "sweep": cmd_sweep,
}
DEFAULT_FORMAT = {"verify": "csv", "sweep": "csv"}


def _grid(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid grid {text!r}: expected comma-separated numbers") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", choices=("table", "json", "csv"), default=None)
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--tol", type=float, default=1e-10)
    common.add_argument("--blocks", type=int, default=None)

    parser = argparse.ArgumentParser(
        prog="weighted-hardy", description="Weighted Hardy-type averages: constants, checks and sharpness sweeps."
    )
    sub = parser.add_subparsers(dest="subcommand", required=True, metavar="{bounds,verify,norm,extremal,sweep}")
    for name, help_ in (
        ("bounds", "compute the bound constants of a config"),
        ("verify", "check the inequality on random complex sequences"),
        ("norm", "truncated operator norms for p = 2"),
    ):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.add_argument("--config", required=True, metavar="PATH")
        if name == "verify":
            sp.add_argument("--samples", type=int, default=1000)
            sp.add_argument(
                "--constant", choices=("auto", "rho", "generalized", "lacunary", "sharp"), default="auto"
            )
    ex = sub.add_parser("extremal", parents=[common], help="closed forms of the extremal family at one r")
    ex.add_argument("--base", type=int, required=True)
    ex.add_argument("--r", type=float, required=True)
    sw = sub.add_parser("sweep", parents=[common], help="ratios of the extremal family as r decreases to sqrt(b)")
    sw.add_argument("--base", type=int, required=True)
    sw.add_argument("--grid", type=_grid, required=True)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        spec = RunSpec(
            subcommand=args.subcommand,
            config_path=getattr(args, "config", None),
            output_format=args.output or DEFAULT_FORMAT.get(args.subcommand, "table"),
            seed=args.seed,
            samples=getattr(args, "samples", 1000),
            tolerance=args.tol,
            blocks=args.blocks,
            base=getattr(args, "base", None),
            grid=getattr(args, "grid", ()),
            r=getattr(args, "r", None),
            constant=getattr(args, "constant", "auto"),
        )
        return COMMANDS[spec.subcommand](spec)
    except (ConfigError, OSError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except DivergentConstantError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGENT


if __name__ == "__main__":
    sys.exit(main())
