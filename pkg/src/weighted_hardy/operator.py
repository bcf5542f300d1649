"""The averaging operator (a_j) -> (M_k^{-1} sum_{j <= n_k} m_j a_j), norms and checks."""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import asdict, dataclass
from typing import IO, Iterable, NamedTuple

import numpy as np

from .constants import BoundReport
from .partitions import AveragingConfig, ConfigError

__all__ = [
    "DivergentConstantError",
    "VerificationReport",
    "NormEstimate",
    "apply_operator",
    "apply_adjoint",
    "lp_norm",
    "verify_main_inequality",
    "verify_batch",
    "write_verification_csv",
    "truncated_operator_norm",
]

HOLDS_RTOL = 1e-12
CSV_FIELDS = ("config-id", "sample-id", "lhs", "rhs_norm", "constant", "slack", "holds")


class DivergentConstantError(ValueError):
    """The bound constant did not converge, so no inequality can be checked against it."""


def _layout(config: AveragingConfig, K: int) -> tuple[list[int], np.ndarray, np.ndarray]:
    nb = config.partition.boundaries(K)
    m = config.weights.weights(nb[-1])
    M = config.norming_values(K)
    return nb, m, M


def apply_operator(a, config: AveragingConfig) -> np.ndarray:
    """Return (b_1, ..., b_K) for every block N_K fully inside ``a``.

    ``a`` may be batched; the sequence runs along the last axis.  Entries past
    the last complete block are ignored.
    """
    a = np.asarray(a)
    N = a.shape[-1]
    K = config.partition.blocks_covering(N)
    if K == 0:
        warnings.warn(
            f"sequence of length {N} does not cover the first block (n_1 = {config.partition.boundary(1)})",
            stacklevel=2,
        )
        return np.zeros(a.shape[:-1] + (0,), dtype=np.result_type(a, float))
    nb, m, M = _layout(config, K)
    prefix = np.cumsum(m * a[..., : nb[-1]], axis=-1)
    return prefix[..., np.asarray(nb) - 1] / M


def apply_adjoint(y, config: AveragingConfig) -> np.ndarray:
    """Adjoint of the K-block truncation: z_j = m_j * sum_{k : n_k >= j} y_k / M_k."""
    y = np.asarray(y)
    K = y.shape[-1]
    nb, m, M = _layout(config, K)
    u = y / M
    tails = np.cumsum(u[..., ::-1], axis=-1)[..., ::-1]
    lengths = np.diff(np.concatenate(([0], np.asarray(nb, dtype=np.int64))))
    return m * np.repeat(tails, lengths, axis=-1)


def lp_norm(a, p: float, axis: int = -1) -> float | np.ndarray:
    """(sum |a_j|**p)**(1/p), with the largest modulus factored out first."""
    if not p >= 1.0:
        raise ConfigError(f"lp_norm needs p >= 1, got {p}")
    mod = np.abs(np.asarray(a))
    if mod.size == 0:
        return 0.0 if mod.ndim <= 1 else np.zeros(np.delete(mod.shape, axis))
    scale = mod.max(axis=axis, keepdims=True)
    safe = np.where(scale > 0.0, scale, 1.0)
    out = np.squeeze(safe, axis=axis) * (np.sum((mod / safe) ** p, axis=axis)) ** (1.0 / p)
    out = np.where(np.squeeze(scale, axis=axis) > 0.0, out, 0.0)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class VerificationReport:
    lhs: float
    rhs_norm: float
    bound_constant: float
    slack: float
    holds: bool

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _constant_value(constant: BoundReport | float) -> float:
    if isinstance(constant, BoundReport):
        if not constant.converged:
            raise DivergentConstantError(
                f"bound constant did not converge (tail bound {constant.tail_bound})"
            )
        return constant.constant
    c = float(constant)
    if not math.isfinite(c):
        raise DivergentConstantError("bound constant is not finite")
    return c


def _report(lhs: float, rhs: float, c: float) -> VerificationReport:
    slack = c * rhs - lhs
    return VerificationReport(lhs, rhs, c, slack, bool(slack >= -HOLDS_RTOL * c * rhs))


def verify_main_inequality(a, config: AveragingConfig, constant: BoundReport | float) -> VerificationReport:
    """Check ||T a||_p <= C ||a||_p for one finite sequence (zero-extended).

    Blocks beyond the last complete one are dropped from the left side, which
    can only lower it, so a pass here is an instance of the infinite inequality.
    """
    c = _constant_value(constant)
    p = config.p
    lhs = lp_norm(apply_operator(a, config), p)
    return _report(float(lhs), float(lp_norm(a, p)), c)


def verify_batch(samples, config: AveragingConfig, constant: BoundReport | float) -> list[VerificationReport]:
    """verify_main_inequality for each row of a 2-D array of samples."""
    c = _constant_value(constant)
    samples = np.atleast_2d(samples)
    p = config.p
    lhs = np.atleast_1d(lp_norm(apply_operator(samples, config), p, axis=-1))
    rhs = np.atleast_1d(lp_norm(samples, p, axis=-1))
    return [_report(float(x), float(y), c) for x, y in zip(lhs, rhs)]


def _fmt(x: float) -> str:
    return format(x, ".17g")


def write_verification_csv(
    fh: IO[str], config_id: str, reports: Iterable[VerificationReport], header: bool = True
) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    if header:
        writer.writerow(CSV_FIELDS)
    for i, r in enumerate(reports):
        writer.writerow(
            [config_id, i, _fmt(r.lhs), _fmt(r.rhs_norm), _fmt(r.bound_constant), _fmt(r.slack), str(r.holds).lower()]
        )


class NormEstimate(NamedTuple):
    value: float
    iterations: int
    converged: bool


def truncated_operator_norm(
    config: AveragingConfig,
    K: int,
    tol: float = 1e-14,
    max_iters: int = 20000,
    seed: int = 0,
    full_output: bool = False,
) -> float | NormEstimate:
    """Largest singular value of the K x n_K section of the operator (p = 2 only).

    Power iteration on T^T T, with T applied as a weighted prefix sum and T^T as
    a weighted suffix sum.  Stops when the Rayleigh quotient changes by less
    than ``tol`` relative.
    """
    if abs(config.p - 2.0) > 1e-12:
        raise ConfigError(f"operator norm estimation supports p = 2 only, got p = {config.p}")
    if K < 1:
        raise ConfigError("K must be >= 1")
    nb = config.partition.boundaries(K)
    x = np.abs(np.random.default_rng(seed).standard_normal(nb[-1]))
    x /= np.linalg.norm(x)
    lam = 0.0
    converged = False
    it = 0
    for it in range(1, max_iters + 1):
        y = apply_operator(x, config)[:K]
        lam_new = float(y @ y)
        if lam_new == 0.0:
            lam, converged = 0.0, True
            break
        z = apply_adjoint(y, config)
        x = z / np.linalg.norm(z)
        if abs(lam_new - lam) <= tol * lam_new:
            lam, converged = lam_new, True
            break
        lam = lam_new
    if not converged:
        warnings.warn(f"power iteration stopped after {max_iters} iterations", stacklevel=2)
    est = NormEstimate(math.sqrt(lam), it, converged)
    return est if full_output else est.value
