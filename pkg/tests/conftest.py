import math

import numpy as np
import pytest

from weighted_hardy.partitions import (
    AveragingConfig,
    ExponentPair,
    NormingScheme,
    WeightScheme,
    geometric_partition,
    lacunary_partition,
    singleton_partition,
)

P_VALUES = (1.5, 2.0, 3.0)


def make_config(partition, p, norming="derived", weights=None, alpha=None, blocks=None, name="cfg"):
    return AveragingConfig(
        partition=partition,
        weights=weights or WeightScheme.constant(),
        exponents=ExponentPair.from_p(p),
        norming=NormingScheme(norming, alpha),
        blocks=blocks,
        name=name,
    )


def suite_configs(p):
    """The five configurations of the main property suite, with their sample truncation."""
    return {
        "geometric_b2": make_config(geometric_partition(2, 10), p, blocks=10, name="geometric_b2"),
        "geometric_b4": make_config(geometric_partition(4, 5), p, blocks=5, name="geometric_b4"),
        "lacunary_3_81": make_config(lacunary_partition([3, 9, 27, 81])[0], p, blocks=4, name="lacunary_3_81"),
        "singleton_n2": make_config(
            singleton_partition(256), p, norming="power", alpha=2.0, blocks=256, name="singleton_n2"
        ),
        "explicit_weights_b3": make_config(
            geometric_partition(3, 6),
            p,
            weights=WeightScheme.explicit([1.0, 2.0, 0.5, 3.0]),
            blocks=6,
            name="explicit_weights_b3",
        ),
    }


def sharp_config(b=4, K=5, p=2.0):
    return make_config(geometric_partition(b, K), p, norming="root_of_boundary", blocks=K, name=f"sharp_b{b}")


def random_complex(rng, n_samples, N):
    return rng.standard_normal((n_samples, N)) + 1j * rng.standard_normal((n_samples, N))


def dense_operator(m, boundaries, M):
    """Explicit K x n_K matrix with T[k, j] = m_j / M_k for j <= n_k."""
    K, N = len(boundaries), boundaries[-1]
    T = np.zeros((K, N))
    for k, nk in enumerate(boundaries):
        T[k, :nk] = m[:nk] / M[k]
    return T


def direct_block_weights(m, boundaries, q):
    """w_k straight from the weight vector, block by block."""
    out, lo = [], 0
    for nk in boundaries:
        out.append(math.fsum(float(x) ** q for x in m[lo:nk]) ** (1.0 / q))
        lo = nk
    return np.array(out)


@pytest.fixture
def rng():
    return np.random.default_rng(20231008)
