"""Bound constants for the weighted averaging operator.

Every constant here is a supremum over n of a supremand

    s_n = w_n * sum_{k >= n} t_k

raised to the power 1/p.  For the cumulative norming M_n = w_1 + ... + w_n
the terms are t_k = 1/M_k; for an arbitrary positive norming sequence they are
t_k = (w_1 + ... + w_k)**(p-1) / M_k**p.  Infinite sums are truncated after
K blocks and the remainder is bounded from the trailing terms:

* geometric regime: trailing ratios t_{k+1}/t_k are non-increasing and stay
  below gamma < 1, remainder <= t_K * gamma / (1 - gamma);
* integral test: local decay exponents sigma_k of t_k stay above sigma > 1,
  remainder <= t_K * K / (sigma - 1);
* otherwise the series is reported as divergent.

The supremum over n beyond the scanned range is bounded by extrapolating the
differences s_{n+1} - s_n, which decay geometrically in every supported
configuration, or by the last scanned value when s_n is non-increasing.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .partitions import AveragingConfig, ConfigError, ConstantExtension

__all__ = [
    "BoundReport",
    "block_weight",
    "cumulative_M",
    "rho",
    "generalized_rho",
    "lacunary_bound",
    "geometric_sharp_constant",
    "geometric_rho_prime_bound",
    "series_tail_bound",
]

DEFAULT_TOL = 1e-10
TAIL_WINDOW = 16
MIN_BLOCKS = 64
MAX_BLOCKS = 1 << 23
# Relative size below which supremand differences are treated as roundoff.
_NOISE_FLOOR = 1e-13
# Boundaries above this can no longer be turned into floats safely.
_FLOAT_BOUNDARY_LIMIT = 1 << 1000


@dataclass(frozen=True)
class BoundReport:
    """A bound constant with the truncation that produced it.

    ``tail_bound`` is in units of the supremand, i.e. of ``constant**p``.
    ``scanned`` is the number of leading n whose supremand was evaluated
    directly; larger n are covered by extrapolation.
    """

    constant: float
    truncation_level: int
    tail_bound: float
    converged: bool
    scanned: int = 0
    regime: str = ""

    def to_dict(self) -> dict:
        d = asdict(self)
        return {k: d[k] for k in ("constant", "truncation_level", "tail_bound", "converged")}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _check_block(config: AveragingConfig, n: int) -> None:
    if n < 1:
        raise IndexError("blocks are numbered from 1")
    if n > config.partition.num_blocks and not config.partition.extends:
        raise IndexError(f"block {n} is beyond the partition and no extension rule is set")


def block_weight(config: AveragingConfig, n: int) -> float:
    """w_n = (sum_{j in N_n} m_j**q)**(1/q)."""
    _check_block(config, n)
    return float(config.block_weights(n)[-1])


def cumulative_M(config: AveragingConfig, n: int) -> float:
    """M_n under the config's norming rule."""
    if config.norming.kind != "power":
        _check_block(config, n)
    return float(config.norming_values(n)[-1])


def lacunary_bound(r: float, q: float) -> float:
    """r**(1/q) / (r**(1/q) - 1), the constant for gap ratio r and conjugate exponent q."""
    r, q = float(r), float(q)
    if not r > 1.0:
        raise ConfigError(f"invalid ratio r={r}: need r > 1")
    if not q > 1.0:
        raise ConfigError(f"invalid exponent q={q}: need q > 1")
    root = r ** (1.0 / q)
    return root / (root - 1.0)


def geometric_sharp_constant(b: int) -> float:
    """(sqrt(b) + 1) / sqrt(b - 1), the best constant for boundaries n_k = b**k and p = 2."""
    if int(b) != b or b <= 1:
        raise ConfigError(f"invalid base b={b!r}: need an integer >= 2")
    return (math.sqrt(b) + 1.0) / math.sqrt(b - 1.0)


def geometric_rho_prime_bound(b: int) -> float:
    """(1 + sqrt(b))**2 / (b - 1), the squared sharp constant."""
    return geometric_sharp_constant(b) ** 2


# -- tail machinery -----------------------------------------------------------


def series_tail_bound(t: np.ndarray, window: int = TAIL_WINDOW) -> tuple[float, str]:
    """Upper bound on sum_{k > K} t_k from the trailing terms of t_1..t_K.

    Returns ``(bound, regime)`` with regime one of ``geometric``, ``integral``
    or ``divergent`` (bound is +inf in the last case).
    """
    K = len(t)
    if K < window + 1:
        raise ValueError(f"need at least {window + 1} terms, got {K}")
    tw = t[-(window + 1):]
    if np.any(tw <= 0.0):
        return math.inf, "divergent"
    ratios = tw[1:] / tw[:-1]
    gamma = float(ratios.max())
    if gamma < 1.0 - 1e-9 and np.all(np.diff(ratios) <= 4 * np.finfo(float).eps):
        return float(t[-1]) * gamma / (1.0 - gamma), "geometric"
    k = np.arange(K - window, K + 1, dtype=float)
    sigma = float(np.min(np.log(tw[:-1] / tw[1:]) / np.log1p(1.0 / k[:-1])))
    if sigma > 1.0 + 1e-9:
        return float(t[-1]) * K / (sigma - 1.0), "integral"
    return math.inf, "divergent"


def _difference_tail(d: np.ndarray, max_lag: int = 4) -> float:
    """Bound on sum of |d_i| past the end of d, assuming its trailing decay persists."""
    ad = np.abs(d)
    best = math.inf
    for lag in range(1, max_lag + 1):
        if len(ad) < 2 * lag + 2:
            break
        num, den = ad[lag:], ad[:-lag]
        if np.any(den == 0.0):
            continue
        theta = float(np.max(num / den))
        if theta < 1.0 - 1e-9:
            best = min(best, float(ad[-lag:].sum()) * theta / (1.0 - theta))
    return best


def _beyond_scan(s: np.ndarray, err: np.ndarray, n_scan: int) -> tuple[float, int]:
    """Bound sup_{n > n_end} s_n - s_{n_end} from a trailing window ending at n_end.

    Returns ``(extra, n_end)``; extra is +inf when no decay pattern is found.
    """
    W = TAIL_WINDOW
    d = np.diff(s[n_scan - W - 1 : n_scan])
    if np.all(d <= 0.0):
        return 0.0, n_scan
    # Near the scan edge the padding w_n * tail dominates the differences, so
    # extrapolate from where it is below roundoff.
    clean = np.nonzero(err[:n_scan] <= _NOISE_FLOOR * s[:n_scan])[0]
    n_end = int(clean[-1]) + 1 if len(clean) else 0
    if n_end < W + 2:
        return math.inf, n_end
    d = np.diff(s[n_end - W - 1 : n_end])
    if np.all(d <= 0.0):
        return 0.0, n_end
    if np.max(np.abs(d)) <= _NOISE_FLOOR * s[n_end - 1]:
        # differences already at roundoff level of the suffix sums
        return float(np.abs(d).sum()), n_end
    return _difference_tail(d), n_end


def _float_safe_blocks(config: AveragingConfig, cap: int) -> int:
    part = config.partition
    if isinstance(part.extension, ConstantExtension):
        return cap
    nb = part.boundaries(min(part.num_blocks, cap))
    K = 0
    for nk in nb:
        if nk > _FLOAT_BOUNDARY_LIMIT:
            return K
        K += 1
    if K == cap or part.extension is None:
        return K
    nk = nb[-1]
    while K < cap:
        nk = part.extension.next_boundary(nk)
        if nk > _FLOAT_BOUNDARY_LIMIT:
            break
        K += 1
    return K


def _terms(config: AveragingConfig, K: int, collapsed: bool) -> tuple[np.ndarray, np.ndarray]:
    w = config.block_weights(K)
    M = config.norming_values(K, w)
    if collapsed:
        return w, 1.0 / M
    p = config.p
    W = np.cumsum(w)
    # W_{n,k} = w_n * W_k**(p-1) / M_k**p; only the k-dependent factor is kept here.
    return w, np.exp((p - 1.0) * np.log(W) - p * np.log(M))


def _supremum(config: AveragingConfig, tol: float, collapsed: bool, max_blocks: int) -> BoundReport:
    if not tol > 0.0:
        raise ValueError("tol must be positive")
    if not config.partition.extends:
        raise ConfigError("tail not boundable: partition has no extension rule")
    p = config.p
    cap = _float_safe_blocks(config, max_blocks)
    if cap < MIN_BLOCKS:
        raise ConfigError(f"only {cap} blocks fit in floating point; cannot bound the tail")
    K = MIN_BLOCKS
    report = None
    while True:
        try:
            w, t = _terms(config, K, collapsed)
        except OverflowError:
            # weights left the float range before the tail could be certified
            if report is None:
                raise
            return report
        tail, regime = series_tail_bound(t)
        if regime == "divergent":
            return BoundReport(math.inf, K, math.inf, False, 0, regime)
        S = np.cumsum(t[::-1])[::-1] + tail
        s = w * S
        err = w * tail
        over = np.nonzero(err > tol / 2)[0]
        n_scan = int(over[0]) if len(over) else K
        report = BoundReport(
            float(s[: max(n_scan, 1)].max()) ** (1.0 / p), K, math.inf, False, n_scan, regime
        )
        if n_scan >= TAIL_WINDOW + 2:
            extra, n_end = _beyond_scan(s, err, n_scan)
            if math.isfinite(extra):
                sup_p = max(float(s[:n_scan].max()), float(s[n_end - 1]) + extra)
                tail_bound = float(err[:n_scan].max()) + extra
                report = BoundReport(
                    sup_p ** (1.0 / p), K, tail_bound, tail_bound <= tol, n_scan, regime
                )
                if report.converged:
                    return report
        if K >= cap:
            return report
        K = min(2 * K, cap)


def rho(config: AveragingConfig, tol: float = DEFAULT_TOL, max_blocks: int = MAX_BLOCKS) -> BoundReport:
    """sup_n (w_n * sum_{j >= n} 1/M_j)**(1/p) for the cumulative norming M_n = w_1 + ... + w_n."""
    if config.norming.kind != "derived":
        raise ConfigError("rho needs the derived norming M_n = w_1 + ... + w_n; use generalized_rho")
    return _supremum(config, tol, collapsed=True, max_blocks=max_blocks)


def generalized_rho(
    config: AveragingConfig, tol: float = DEFAULT_TOL, max_blocks: int = MAX_BLOCKS
) -> BoundReport:
    """sup_n (w_n * sum_{k >= n} (w_1 + ... + w_k)**(p-1) / M_k**p)**(1/p) for any norming."""
    return _supremum(config, tol, collapsed=False, max_blocks=max_blocks)
