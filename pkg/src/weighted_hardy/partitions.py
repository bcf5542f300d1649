"""Partitions of the positive integers into consecutive blocks, weights and norming rules.

Indices are 1-based at every public interface: block ``k`` is
``N_k = {n_{k-1} + 1, ..., n_k}`` with ``n_0 = 0``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import accumulate
from pathlib import Path
from typing import Any, Sequence

import numpy as np

__all__ = [
    "ConfigError",
    "ExponentPair",
    "GeometricExtension",
    "RatioExtension",
    "ConstantExtension",
    "Partition",
    "WeightScheme",
    "NormingScheme",
    "AveragingConfig",
    "conjugate_exponent",
    "geometric_partition",
    "lacunary_partition",
    "singleton_partition",
    "config_from_dict",
    "load_config",
]

CONJUGACY_TOL = 1e-12


class ConfigError(ValueError):
    """Raised for invalid exponents, partitions, weights or config documents."""


def conjugate_exponent(p: float) -> float:
    """Return q = p / (p - 1), the Hölder conjugate of ``p > 1``."""
    p = float(p)
    if not (p > 1.0) or not math.isfinite(p):
        raise ConfigError(f"invalid exponent p={p!r}: need 1 < p < inf")
    return p / (p - 1.0)


@dataclass(frozen=True)
class ExponentPair:
    p: float
    q: float

    def __post_init__(self):
        if not (self.p > 1.0 and self.q > 1.0):
            raise ConfigError(f"invalid exponents p={self.p}, q={self.q}: both must exceed 1")
        if abs(1.0 / self.p + 1.0 / self.q - 1.0) > CONJUGACY_TOL:
            raise ConfigError(f"p={self.p} and q={self.q} are not conjugate")

    @classmethod
    def from_p(cls, p: float) -> "ExponentPair":
        return cls(float(p), conjugate_exponent(p))


# -- partition extension rules ------------------------------------------------
# Each rule maps the last boundary n_k to the next boundary n_{k+1}.


@dataclass(frozen=True)
class GeometricExtension:
    base: int

    def next_boundary(self, prev: int) -> int:
        return prev * self.base


@dataclass(frozen=True)
class RatioExtension:
    """Continue a lacunary sequence with n_{k+1} = ceil(ratio * n_k)."""

    ratio: Fraction

    def next_boundary(self, prev: int) -> int:
        nxt = math.ceil(self.ratio * prev)
        return max(nxt, prev + 1)


@dataclass(frozen=True)
class ConstantExtension:
    length: int

    def next_boundary(self, prev: int) -> int:
        return prev + self.length


Extension = GeometricExtension | RatioExtension | ConstantExtension


@dataclass(frozen=True)
class Partition:
    """Finite list of block lengths |N_1|, ..., |N_K| plus an optional rule for k > K."""

    block_lengths: tuple[int, ...]
    extension: Extension | None = None

    def __post_init__(self):
        lengths = tuple(int(x) for x in self.block_lengths)
        if not lengths:
            raise ConfigError("partition needs at least one block")
        if any(x < 1 for x in lengths):
            raise ConfigError(f"block lengths must be >= 1, got {lengths}")
        object.__setattr__(self, "block_lengths", lengths)

    @property
    def num_blocks(self) -> int:
        """Number of explicitly listed blocks (K)."""
        return len(self.block_lengths)

    @property
    def extends(self) -> bool:
        return self.extension is not None

    def boundaries(self, K: int) -> list[int]:
        """Boundaries n_1 < ... < n_K as exact Python ints."""
        nb = list(accumulate(self.block_lengths[:K]))
        if K <= len(nb):
            return nb
        ext = self.extension
        if ext is None:
            raise IndexError(
                f"block {K} requested but partition has {self.num_blocks} blocks and no extension rule"
            )
        if isinstance(ext, ConstantExtension):
            start = nb[-1]
            nb.extend(range(start + ext.length, start + ext.length * (K - len(nb)) + 1, ext.length))
            return nb
        prev = nb[-1]
        while len(nb) < K:
            prev = ext.next_boundary(prev)
            nb.append(prev)
        return nb

    def boundary(self, k: int) -> int:
        if k < 1:
            raise IndexError("blocks are numbered from 1")
        return self.boundaries(k)[-1]

    def lengths(self, K: int) -> list[int]:
        nb = self.boundaries(K)
        return [nb[0]] + [b - a for a, b in zip(nb, nb[1:])]

    def blocks_covering(self, N: int) -> int:
        """Number of complete blocks inside {1, ..., N}."""
        K = 0
        for nk in accumulate(self.block_lengths):
            if nk > N:
                return K
            K += 1
        if self.extension is None:
            return K
        if isinstance(self.extension, ConstantExtension):
            return K + (N - nk) // self.extension.length
        while True:
            nk = self.extension.next_boundary(nk)
            if nk > N:
                return K
            K += 1

    def hadamard_ratio(self, K: int | None = None) -> Fraction:
        """min n_{k+1}/n_k over the first K boundaries (exact)."""
        nb = self.boundaries(K or self.num_blocks)
        if len(nb) < 2:
            raise ConfigError("need at least two boundaries for a gap ratio")
        return min(Fraction(b, a) for a, b in zip(nb, nb[1:]))


def geometric_partition(b: int, K: int) -> Partition:
    """Blocks N_1 = {1..b}, N_k = {b^(k-1)+1 .. b^k}, so that n_k = b^k."""
    if int(b) != b or b <= 1:
        raise ConfigError(f"invalid base b={b!r}: need an integer >= 2")
    if K < 1:
        raise ConfigError("K must be >= 1")
    b = int(b)
    lengths = [b] + [b**k - b ** (k - 1) for k in range(2, K + 1)]
    return Partition(tuple(lengths), GeometricExtension(b))


def lacunary_partition(boundaries: Sequence[int]) -> tuple[Partition, Fraction]:
    """Partition with the given boundaries and its gap ratio r = min n_{k+1}/n_k.

    The returned partition extends past the last boundary by
    ``n_{k+1} = ceil(r n_k)``, which keeps the gap condition with the same r.
    """
    nb = [int(x) for x in boundaries]
    if len(nb) < 2:
        raise ConfigError("lacunary partition needs at least two boundaries")
    if nb[0] < 1 or any(b <= a for a, b in zip(nb, nb[1:])):
        raise ConfigError(f"boundaries must be strictly increasing positive integers, got {nb}")
    r = min(Fraction(b, a) for a, b in zip(nb, nb[1:]))
    lengths = [nb[0]] + [b - a for a, b in zip(nb, nb[1:])]
    return Partition(tuple(lengths), RatioExtension(r)), r


def singleton_partition(K: int = 1) -> Partition:
    """N_n = {n}."""
    return Partition((1,) * K, ConstantExtension(1))


# -- weights ------------------------------------------------------------------


@dataclass(frozen=True)
class WeightScheme:
    """Positive weights m_j.

    kinds:
      ``constant``  -- m_j = value (default 1)
      ``explicit``  -- m_j = values[(j - 1) mod len(values)] (the list repeats)
      ``geometric`` -- m_j = scale * ratio**(j - 1)
    """

    kind: str = "constant"
    values: tuple[float, ...] = (1.0,)
    ratio: float = 1.0

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if self.kind not in ("constant", "explicit", "geometric"):
            raise ConfigError(f"unknown weight kind {self.kind!r}")
        if not vals or any(not (v > 0.0) or not math.isfinite(v) for v in vals):
            raise ConfigError(f"weights must be strictly positive and finite, got {vals}")
        if self.kind in ("constant", "geometric") and len(vals) != 1:
            raise ConfigError(f"{self.kind} weights take a single value")
        if self.kind == "geometric" and not (self.ratio > 0.0 and math.isfinite(self.ratio)):
            raise ConfigError(f"geometric weight ratio must be positive, got {self.ratio}")

    @classmethod
    def constant(cls, value: float = 1.0) -> "WeightScheme":
        return cls("constant", (value,))

    @classmethod
    def explicit(cls, values: Sequence[float]) -> "WeightScheme":
        return cls("explicit", tuple(values))

    @classmethod
    def geometric(cls, scale: float, ratio: float) -> "WeightScheme":
        return cls("geometric", (scale,), ratio)

    @property
    def is_unit(self) -> bool:
        return self.kind == "constant" and self.values[0] == 1.0

    def weights(self, N: int) -> np.ndarray:
        """m_1, ..., m_N."""
        if self.kind == "constant":
            return np.full(N, self.values[0])
        if self.kind == "explicit":
            return np.resize(np.asarray(self.values), N)
        return self.values[0] * self.ratio ** np.arange(N, dtype=float)

    def block_power_sum(self, lo: int, hi: int, q: float) -> float:
        """Sum of m_j**q for lo <= j <= hi, in closed form (blocks may be huge)."""
        L = hi - lo + 1
        if self.kind == "constant":
            return float(L) * self.values[0] ** q
        if self.kind == "explicit":
            mq = np.asarray(self.values) ** q
            P = len(mq)
            full, rem = divmod(L, P)
            idx = ((lo - 1) % P + np.arange(rem)) % P
            return float(full) * float(mq.sum()) + float(mq[idx].sum())
        c, g = self.values[0], self.ratio
        gq = g**q
        if gq == 1.0:
            return float(L) * c**q
        with np.errstate(over="raise", under="raise"):
            try:
                head = np.float64(c) ** q * np.float64(gq) ** float(lo - 1)
                if gq < 1.0:
                    span = -np.expm1(float(L) * math.log(gq)) / (1.0 - gq)
                else:
                    span = np.expm1(float(L) * math.log(gq)) / (gq - 1.0)
                out = head * span
            except FloatingPointError as exc:
                raise OverflowError(f"geometric weight sum over [{lo}, {hi}] leaves float range") from exc
        return float(out)


# -- norming ------------------------------------------------------------------


@dataclass(frozen=True)
class NormingScheme:
    """How M_n is produced.

    kinds:
      ``derived``          -- M_n = w_1 + ... + w_n
      ``power``            -- M_n = n**alpha, alpha > 0
      ``root_of_boundary`` -- M_k = n_k**(1/q)
    """

    kind: str = "derived"
    alpha: float | None = None

    def __post_init__(self):
        if self.kind not in ("derived", "power", "root_of_boundary"):
            raise ConfigError(f"unknown norming kind {self.kind!r}")
        if self.kind == "power":
            if self.alpha is None or not (self.alpha > 0.0):
                raise ConfigError(f"power norming needs alpha > 0, got {self.alpha}")


@dataclass(frozen=True)
class AveragingConfig:
    partition: Partition
    weights: WeightScheme
    exponents: ExponentPair
    norming: NormingScheme = NormingScheme()
    blocks: int | None = None
    name: str = "config"

    @property
    def p(self) -> float:
        return self.exponents.p

    @property
    def q(self) -> float:
        return self.exponents.q

    @property
    def truncation(self) -> int:
        """Default number of blocks used for finite experiments."""
        return self.blocks or self.partition.num_blocks

    def block_weights(self, K: int) -> np.ndarray:
        """w_1, ..., w_K where w_n is the l^q norm of the weights on N_n."""
        nb = self.partition.boundaries(K)
        q = self.q
        if self.weights.kind == "constant":
            lengths = np.asarray(self.partition.lengths(K), dtype=float)
            return self.weights.values[0] * lengths ** (1.0 / q)
        out = np.empty(K)
        lo = 1
        for k, hi in enumerate(nb):
            out[k] = self.weights.block_power_sum(lo, hi, q) ** (1.0 / q)
            lo = hi + 1
        return out

    def norming_values(self, K: int, w: np.ndarray | None = None) -> np.ndarray:
        """M_1, ..., M_K."""
        kind = self.norming.kind
        if kind == "derived":
            if w is None:
                w = self.block_weights(K)
            return np.cumsum(w[:K])
        if kind == "power":
            return np.arange(1, K + 1, dtype=float) ** self.norming.alpha
        nb = np.asarray(self.partition.boundaries(K), dtype=float)
        return nb ** (1.0 / self.q)


# -- JSON ingestion -----------------------------------------------------------

_TOP_KEYS = {"name", "partition", "weights", "p", "norming", "blocks"}


def _check_keys(section: str, doc: dict, allowed: set[str]) -> None:
    if not isinstance(doc, dict):
        raise ConfigError(f"{section}: expected an object")
    extra = set(doc) - allowed
    if extra:
        raise ConfigError(f"{section}: unknown field(s) {sorted(extra)}")


def _partition_from_dict(doc: dict, blocks: int | None) -> Partition:
    kind = doc.get("kind") if isinstance(doc, dict) else None
    if kind == "geometric":
        _check_keys("partition", doc, {"kind", "base", "blocks"})
        if "base" not in doc:
            raise ConfigError("partition.base is required for geometric partitions")
        return geometric_partition(doc["base"], int(doc.get("blocks", blocks or 1)))
    if kind == "lacunary":
        _check_keys("partition", doc, {"kind", "boundaries"})
        if "boundaries" not in doc:
            raise ConfigError("partition.boundaries is required for lacunary partitions")
        return lacunary_partition(doc["boundaries"])[0]
    if kind == "singleton":
        _check_keys("partition", doc, {"kind", "blocks"})
        return singleton_partition(int(doc.get("blocks", blocks or 1)))
    if kind == "explicit":
        _check_keys("partition", doc, {"kind", "block_lengths", "extension"})
        lengths = doc.get("block_lengths")
        if not isinstance(lengths, list):
            raise ConfigError("partition.block_lengths must be a list of integers")
        ext = doc.get("extension")
        rule: Extension | None
        if ext is None:
            rule = None
        elif ext == "constant":
            rule = ConstantExtension(int(lengths[-1]))
        elif ext == "lacunary":
            nb = list(accumulate(int(x) for x in lengths))
            rule = RatioExtension(min(Fraction(b, a) for a, b in zip(nb, nb[1:])))
        else:
            raise ConfigError(f"partition.extension: unknown rule {ext!r}")
        return Partition(tuple(lengths), rule)
    raise ConfigError(f"partition.kind: unknown kind {kind!r}")


def _weights_from_dict(doc: dict) -> WeightScheme:
    kind = doc.get("kind", "constant") if isinstance(doc, dict) else None
    if kind == "constant":
        _check_keys("weights", doc, {"kind", "value"})
        return WeightScheme.constant(doc.get("value", 1.0))
    if kind == "explicit":
        _check_keys("weights", doc, {"kind", "values"})
        if not isinstance(doc.get("values"), list):
            raise ConfigError("weights.values must be a list of positive numbers")
        return WeightScheme.explicit(doc["values"])
    if kind == "geometric":
        _check_keys("weights", doc, {"kind", "scale", "ratio"})
        return WeightScheme.geometric(doc.get("scale", 1.0), doc["ratio"])
    raise ConfigError(f"weights.kind: unknown kind {kind!r}")


def _norming_from_dict(doc: dict) -> NormingScheme:
    kind = doc.get("kind", "derived") if isinstance(doc, dict) else None
    if kind == "power":
        _check_keys("norming", doc, {"kind", "alpha"})
        if "alpha" not in doc:
            raise ConfigError("norming.alpha is required for power norming")
        return NormingScheme("power", float(doc["alpha"]))
    if kind in ("derived", "root_of_boundary"):
        _check_keys("norming", doc, {"kind"})
        return NormingScheme(kind)
    raise ConfigError(f"norming.kind: unknown kind {kind!r}")


def config_from_dict(doc: dict[str, Any]) -> AveragingConfig:
    """Build a config from a parsed JSON document; see README for the schema."""
    _check_keys("config", doc, _TOP_KEYS)
    for key in ("partition", "p"):
        if key not in doc:
            raise ConfigError(f"{key}: required field missing")
    p = doc["p"]
    if isinstance(p, bool) or not isinstance(p, (int, float)):
        raise ConfigError(f"p: expected a number, got {p!r}")
    blocks = doc.get("blocks")
    if blocks is not None and (not isinstance(blocks, int) or blocks < 1):
        raise ConfigError(f"blocks: expected a positive integer, got {blocks!r}")
    try:
        exponents = ExponentPair.from_p(p)
    except ConfigError as exc:
        raise ConfigError(f"p: {exc}") from None
    return AveragingConfig(
        partition=_partition_from_dict(doc["partition"], blocks),
        weights=_weights_from_dict(doc.get("weights", {"kind": "constant"})),
        exponents=exponents,
        norming=_norming_from_dict(doc.get("norming", {"kind": "derived"})),
        blocks=blocks,
        name=str(doc.get("name", "config")),
    )


def load_config(path: str | Path) -> AveragingConfig:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: malformed JSON ({exc})") from None
    if isinstance(doc, dict) and "name" not in doc:
        doc["name"] = path.stem
    return config_from_dict(doc)
