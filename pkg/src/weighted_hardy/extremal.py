"""Block-constant test sequences a_j = r**-k on N_k for the boundaries n_k = b**k.

As r decreases to sqrt(b) the ratio ||T a||_2 / ||a||_2 climbs to the best
constant (sqrt(b) + 1) / sqrt(b - 1) without reaching it.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass
from typing import IO, NamedTuple, Sequence

import numpy as np

from .constants import geometric_sharp_constant
from .partitions import ConfigError

__all__ = [
    "ExtremalParams",
    "extremal_sequence",
    "extremal_l2_norm_sq",
    "extremal_lhs_sum",
    "extremal_block_terms",
    "extremal_ratio",
    "direct_sums",
    "oracle_truncation",
    "SweepRow",
    "sharpness_sweep",
    "write_sweep_csv",
    "sweep_json",
]


@dataclass(frozen=True)
class ExtremalParams:
    """Base b >= 2 and decay r with sqrt(b) < r < b.

    r = b is a removable singularity of the closed forms and is excluded with
    everything above it.
    """

    b: int
    r: float

    def __post_init__(self):
        if int(self.b) != self.b or self.b < 2:
            raise ConfigError(f"invalid base b={self.b!r}: need an integer >= 2")
        r = float(self.r)
        if not (r * r > self.b and r < self.b):
            raise ConfigError(f"invalid r={self.r!r}: need sqrt({self.b}) < r < {self.b}")
        object.__setattr__(self, "b", int(self.b))
        object.__setattr__(self, "r", r)


def extremal_sequence(params: ExtremalParams, K: int) -> np.ndarray:
    """(a_1, ..., a_{b**K}) with a_j = r**-k for j in N_k."""
    if K < 1:
        raise ConfigError("K must be >= 1")
    b, r = params.b, params.r
    lengths = [b] + [b**k - b ** (k - 1) for k in range(2, K + 1)]
    return np.repeat(float(r) ** -np.arange(1, K + 1, dtype=float), lengths)


def extremal_l2_norm_sq(params: ExtremalParams) -> float:
    b, r = params.b, params.r
    return b * (r * r - 1.0) / (r * r * (r * r - b))


def extremal_lhs_sum(params: ExtremalParams) -> float:
    """sum_k |b**(-k/2) * (a_1 + ... + a_{b**k})|**2 in closed form."""
    b, r = params.b, params.r
    bracket = (r - 1.0) ** 2 / (b - 1.0) - 2.0 * r * (b - 1.0) / b + r * r * (b - 1.0) ** 2 / (b * (r * r - b))
    return b * b / (r * r * (r - b) ** 2) * bracket


def extremal_block_terms(params: ExtremalParams, K: int) -> np.ndarray:
    """Per-block summands for k = 1..K, as three geometric pieces in 1/b, 1/r and b/r**2."""
    b, r = params.b, params.r
    k = np.arange(1, K + 1, dtype=float)
    pieces = (
        b * b / (r * r) * (1.0 / b) ** k
        - 2.0 * b * (b - 1.0) / (r * (r - 1.0)) * (1.0 / r) ** k
        + (b - 1.0) ** 2 / (r - 1.0) ** 2 * (b / (r * r)) ** k
    )
    return (r - 1.0) ** 2 / (r - b) ** 2 * pieces


def extremal_ratio(params: ExtremalParams) -> float:
    return math.sqrt(extremal_lhs_sum(params) / extremal_l2_norm_sq(params))


def oracle_truncation(params: ExtremalParams, tol: float = 1e-15) -> int:
    """Blocks needed so rate**(K+1) / (1 - rate) < tol.

    Every summand is O(rate**k) with rate = max(1/b, 1/r, b/r**2) = b/r**2 on
    the admissible range.  The O() constant is order one to a few hundred on
    the grids used here, so tol = 1e-15 leaves the relative tail below 1e-12.
    """
    rate = max(1.0 / params.b, 1.0 / params.r, params.b / params.r**2)
    return max(1, math.ceil(math.log(tol * (1.0 - rate)) / math.log(rate)) + 1)


def direct_sums(params: ExtremalParams, K: int | None = None) -> tuple[float, float, int]:
    """Both series by blockwise summation, independent of the closed forms.

    Returns ``(lhs_sum, l2_norm_sq, K)``.  Partial sums are carried as
    u_k = b**(-k/2) * sum_{j <= b**k} a_j so nothing overflows.
    """
    b, r = params.b, params.r
    if K is None:
        K = oracle_truncation(params)
    sb = math.sqrt(b)
    u = sb / r
    lhs = [u * u]
    l2 = [b / (r * r)]
    x = sb / r
    y = b / (r * r)
    xk, yk = x, y
    for _ in range(2, K + 1):
        xk *= x
        yk *= y
        u = u / sb + (1.0 - 1.0 / b) * xk
        lhs.append(u * u)
        l2.append((1.0 - 1.0 / b) * yk)
    return math.fsum(lhs), math.fsum(l2), K


class SweepRow(NamedTuple):
    r: float
    ratio: float
    sharp_constant: float
    gap: float


def sharpness_sweep(b: int, r_grid: Sequence[float]) -> tuple[list[SweepRow], list[float]]:
    """Ratios of the test family along ``r_grid``; returns ``(rows, skipped_r)``."""
    sharp = geometric_sharp_constant(b)
    rows: list[SweepRow] = []
    skipped: list[float] = []
    grid = [float(r) for r in r_grid]
    if any(y >= x for x, y in zip(grid, grid[1:])):
        raise ConfigError("r grid must be strictly decreasing toward sqrt(b)")
    for r in grid:
        try:
            params = ExtremalParams(b, r)
        except ConfigError:
            skipped.append(r)
            continue
        ratio = extremal_ratio(params)
        rows.append(SweepRow(r, ratio, sharp, sharp - ratio))
    if skipped:
        warnings.warn(f"skipped r values outside (sqrt({b}), {b}): {skipped}", stacklevel=2)
    return rows, skipped


def write_sweep_csv(fh: IO[str], rows: Sequence[SweepRow]) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(SweepRow._fields)
    for row in rows:
        writer.writerow([format(v, ".17g") for v in row])


def sweep_json(b: int, rows: Sequence[SweepRow], skipped: Sequence[float] = ()) -> str:
    return json.dumps({"b": b, "rows": [row._asdict() for row in rows], "skipped": list(skipped)})
