"""Weighted Hardy-type averages of l^p sequences over nested block partitions."""

from .constants import (
    BoundReport,
    block_weight,
    cumulative_M,
    generalized_rho,
    geometric_rho_prime_bound,
    geometric_sharp_constant,
    lacunary_bound,
    rho,
)
from .extremal import (
    ExtremalParams,
    extremal_l2_norm_sq,
    extremal_lhs_sum,
    extremal_ratio,
    extremal_sequence,
    sharpness_sweep,
)
from .operator import (
    DivergentConstantError,
    VerificationReport,
    apply_operator,
    lp_norm,
    truncated_operator_norm,
    verify_batch,
    verify_main_inequality,
)
from .partitions import (
    AveragingConfig,
    ConfigError,
    ExponentPair,
    NormingScheme,
    Partition,
    WeightScheme,
    config_from_dict,
    conjugate_exponent,
    geometric_partition,
    lacunary_partition,
    load_config,
    singleton_partition,
)

__version__ = "0.1.0"
