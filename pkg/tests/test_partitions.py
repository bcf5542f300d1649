import json
import math
from fractions import Fraction

import hypothesis.strategies as st
import numpy as np
import pytest
from hypothesis import given

from weighted_hardy.partitions import (
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


@pytest.mark.parametrize("p, q", [(2, 2), (3, 1.5), (1.25, 5)])
def test_conjugate_exponent_examples(p, q):
    assert conjugate_exponent(p) == pytest.approx(q, rel=1e-15)
    ExponentPair(p, conjugate_exponent(p))


@pytest.mark.parametrize("p", [1.0, 0.5, -2.0, math.inf, math.nan])
def test_conjugate_exponent_rejects(p):
    with pytest.raises(ConfigError):
        conjugate_exponent(p)


@given(st.floats(min_value=1.0001, max_value=1e6))
def test_conjugate_is_involution(p):
    assert conjugate_exponent(conjugate_exponent(p)) == pytest.approx(p, rel=1e-12 * max(1.0, p / 1e3))


def test_exponent_pair_rejects_non_conjugate():
    with pytest.raises(ConfigError):
        ExponentPair(2.0, 3.0)


def test_geometric_partition_b4():
    part = geometric_partition(4, 3)
    assert part.block_lengths == (4, 12, 48)
    assert part.boundaries(3) == [4, 16, 64]


def test_geometric_partition_small_and_extended():
    assert geometric_partition(2, 1).block_lengths == (2,)
    assert geometric_partition(2, 1).boundaries(1) == [2]
    assert geometric_partition(3, 4).boundaries(4) == [3, 9, 27, 81]
    # the extension rule keeps n_k = b**k beyond the listed blocks
    assert geometric_partition(3, 2).boundaries(6) == [3**k for k in range(1, 7)]


@pytest.mark.parametrize("b", [1, 0, -3, 2.5])
def test_geometric_partition_rejects_base(b):
    with pytest.raises(ConfigError):
        geometric_partition(b, 3)


def test_lacunary_partition_examples():
    part, r = lacunary_partition([2, 4, 8, 16])
    assert part.block_lengths == (2, 2, 4, 8)
    assert r == 2
    assert lacunary_partition([1, 2, 3, 4])[1] == Fraction(4, 3)
    assert lacunary_partition([4, 16, 64])[1] == 4


@pytest.mark.parametrize("nb", [[4, 4, 8], [8, 4], [0, 2, 4], [5]])
def test_lacunary_partition_rejects(nb):
    with pytest.raises(ConfigError):
        lacunary_partition(nb)


def test_lacunary_extension_keeps_gap():
    part, r = lacunary_partition([1, 2, 3, 4])
    nb = part.boundaries(30)
    assert nb[:4] == [1, 2, 3, 4]
    assert min(Fraction(b, a) for a, b in zip(nb, nb[1:])) >= r


@given(st.integers(2, 9), st.integers(1, 12))
def test_geometric_matches_lacunary(b, K):
    if K == 1:
        return
    assert geometric_partition(b, K).block_lengths == lacunary_partition([b**k for k in range(1, K + 1)])[0].block_lengths


@given(st.lists(st.integers(1, 50), min_size=1, max_size=30))
def test_prefix_sum_consistency(lengths):
    part = Partition(tuple(lengths))
    nb = part.boundaries(len(lengths))
    assert nb == list(np.cumsum(lengths))
    assert all(b > a for a, b in zip(nb, nb[1:]))
    assert part.lengths(len(lengths)) == lengths
    # nested union of the blocks is exactly {1..n_k}
    for k in range(1, len(lengths) + 1):
        assert sum(part.lengths(k)) == part.boundary(k)


@given(st.lists(st.integers(1, 20), min_size=1, max_size=15), st.integers(0, 400))
def test_blocks_covering(lengths, N):
    part = Partition(tuple(lengths))
    K = part.blocks_covering(N)
    nb = part.boundaries(len(lengths))
    assert K == sum(1 for nk in nb if nk <= N)


def test_blocks_covering_with_extensions():
    assert singleton_partition(1).blocks_covering(37) == 37
    assert geometric_partition(4, 1).blocks_covering(1000) == 4
    assert geometric_partition(4, 1).blocks_covering(3) == 0


def test_partition_without_extension_is_finite():
    part = Partition((2, 3))
    with pytest.raises(IndexError):
        part.boundaries(3)


def test_partition_rejects_empty_blocks():
    with pytest.raises(ConfigError):
        Partition((2, 0, 1))
    with pytest.raises(ConfigError):
        Partition(())


def test_weights_reject_nonpositive():
    with pytest.raises(ConfigError):
        WeightScheme.explicit([1.0, 0.0])
    with pytest.raises(ConfigError):
        WeightScheme.constant(-1.0)
    with pytest.raises(ConfigError):
        WeightScheme.geometric(1.0, 0.0)


@given(
    st.lists(st.floats(0.1, 10.0), min_size=1, max_size=7),
    st.integers(1, 60),
    st.integers(0, 60),
    st.sampled_from([1.5, 2.0, 3.0]),
)
def test_explicit_block_power_sum_matches_enumeration(values, lo, span, q):
    ws = WeightScheme.explicit(values)
    hi = lo + span
    m = ws.weights(hi)
    assert ws.block_power_sum(lo, hi, q) == pytest.approx(float(np.sum(m[lo - 1 : hi] ** q)), rel=1e-12)


@pytest.mark.parametrize("ratio", [0.9, 1.0, 1.1])
def test_geometric_block_power_sum_matches_enumeration(ratio):
    ws = WeightScheme.geometric(2.0, ratio)
    m = ws.weights(80)
    for lo, hi in [(1, 1), (3, 17), (20, 80)]:
        assert ws.block_power_sum(lo, hi, 1.5) == pytest.approx(float(np.sum(m[lo - 1 : hi] ** 1.5)), rel=1e-12)


def test_norming_rejects_bad_alpha():
    with pytest.raises(ConfigError):
        NormingScheme("power", 0.0)
    with pytest.raises(ConfigError):
        NormingScheme("power")
    with pytest.raises(ConfigError):
        NormingScheme("cubic")


def test_config_from_dict_roundtrip(tmp_path):
    doc = {
        "partition": {"kind": "geometric", "base": 4},
        "weights": {"kind": "constant"},
        "p": 2,
        "norming": {"kind": "root_of_boundary"},
        "blocks": 6,
    }
    path = tmp_path / "b4.json"
    path.write_text(json.dumps(doc))
    cfg = load_config(path)
    assert cfg.name == "b4"
    assert cfg.truncation == 6
    assert cfg.partition.boundaries(6) == [4**k for k in range(1, 7)]
    assert cfg.norming.kind == "root_of_boundary"
    assert cfg.q == 2.0


@pytest.mark.parametrize(
    "doc, field",
    [
        ({"partition": {"kind": "geometric", "base": 4}, "p": 2, "extra": 1}, "extra"),
        ({"partition": {"kind": "geometric", "base": 4, "ratio": 2}, "p": 2}, "ratio"),
        ({"partition": {"kind": "hexagonal"}, "p": 2}, "partition.kind"),
        ({"partition": {"kind": "singleton"}, "p": 1}, "p"),
        ({"partition": {"kind": "singleton"}, "p": "2"}, "p"),
        ({"partition": {"kind": "singleton"}}, "p"),
        ({"partition": {"kind": "singleton"}, "p": 2, "norming": {"kind": "power"}}, "alpha"),
        ({"partition": {"kind": "singleton"}, "p": 2, "weights": {"kind": "explicit", "values": [1, 0]}}, "positive"),
    ],
)
def test_config_errors_name_the_field(doc, field):
    with pytest.raises(ConfigError, match=field):
        config_from_dict(doc)


def test_explicit_partition_extensions():
    cfg = config_from_dict(
        {"partition": {"kind": "explicit", "block_lengths": [1, 2, 4], "extension": "lacunary"}, "p": 2}
    )
    assert cfg.partition.boundaries(5) == [1, 3, 7, 17, 40]  # r = 7/3, ceil(7r) = 17, ceil(17r) = 40
    cfg = config_from_dict(
        {"partition": {"kind": "explicit", "block_lengths": [1, 2, 3], "extension": "constant"}, "p": 2}
    )
    assert cfg.partition.boundaries(5) == [1, 3, 6, 9, 12]


def test_malformed_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(ConfigError, match="malformed"):
        load_config(path)
