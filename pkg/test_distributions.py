# test_distributions.py
"""Tests for noise distributions, SV parameters, marginals and TV distance"""

import itertools
from fractions import Fraction

import pytest

from config.settings import FLOAT_MODE
from core.distributions import (
    NoiseDistribution,
    chain_rule_probability,
    conditional_bit,
    convolve_bernoulli,
    marginal_prefix,
    pushforward_xor,
    sv_parameter,
    tv_distance,
)
from core.gf2 import BitVector, RandomStream
from models.exceptions import (
    DimensionMismatchError,
    InvalidDistributionError,
    ParameterRangeError,
    ZeroMassPrefixError,
)

F = Fraction
HALF = F(1, 2)

# 33 dyadic biases in [-1/4, 1/4]
DYADIC_GRID = [F(j, 64) for j in range(-16, 17)]


def pair_law() -> NoiseDistribution:
    """Law of (b, b) for a fair coin b"""
    return NoiseDistribution(2, (HALF, 0, 0, HALF))


def test_table_invariants_are_enforced():
    with pytest.raises(InvalidDistributionError):
        NoiseDistribution(1, (F(1, 2), F(1, 3)))
    with pytest.raises(InvalidDistributionError):
        NoiseDistribution(1, (F(3, 2), F(-1, 2)))
    with pytest.raises(InvalidDistributionError):
        NoiseDistribution(2, (HALF, HALF))
    with pytest.raises(InvalidDistributionError):
        NoiseDistribution(1, (0.5, 0.5))
    NoiseDistribution(1, (0.25, 0.75), FLOAT_MODE)


def test_sv_parameter_examples():
    assert sv_parameter(NoiseDistribution.uniform(3)) == 0
    product = NoiseDistribution.product_bernoulli([F(1, 32)] * 3)
    assert sv_parameter(product) == F(1, 32)


def test_sv_parameter_of_products_is_the_largest_bias():
    rng = RandomStream(3)
    for k in range(1, 5):
        for _ in range(10):
            biases = [F(int(j), 16) for j in rng.integers(-7, 8, k)]
            p = NoiseDistribution.product_bernoulli(biases)
            assert sv_parameter(p) == max(abs(b) for b in biases)


def test_shared_coin_pair_statistics():
    s = F(1, 8)
    p = NoiseDistribution.shared_coin(2, s)
    assert marginal_prefix(p, 1) == NoiseDistribution.uniform(1)
    # Z_2 agrees with Z_1 with probability (1/2 - s)^2 + (1/2 + s)^2
    assert sv_parameter(p) == 2 * s * s
    assert sv_parameter(p) <= 4 * s * s
    xor_law = pushforward_xor(p, BitVector(2, 0b11))
    assert xor_law == NoiseDistribution.bernoulli(F(15, 32))


def test_correlated_with_first_has_exact_sv_parameter():
    p = NoiseDistribution.correlated_with_first(3, F(1, 64))
    assert sv_parameter(p) == F(1, 64)
    assert conditional_bit(p, 3, BitVector.from_string("10")) == HALF + F(1, 64)
    assert conditional_bit(p, 2, BitVector.from_string("0")) == HALF - F(1, 64)


def test_conditional_bit_examples():
    assert conditional_bit(NoiseDistribution.uniform(3), 3, BitVector.from_string("01")) == HALF
    assert conditional_bit(NoiseDistribution.bernoulli(F(1, 4)), 1, BitVector(0)) == F(1, 4)
    assert conditional_bit(pair_law(), 2, BitVector.from_string("1")) == 1


def test_conditional_on_zero_mass_prefix_raises():
    p = NoiseDistribution.point_mass(2, 0)
    with pytest.raises(ZeroMassPrefixError):
        conditional_bit(p, 2, BitVector.from_string("1"))


def test_marginal_prefix_examples():
    p = NoiseDistribution.product_bernoulli([F(1, 8), F(1, 16), F(3, 16)])
    assert marginal_prefix(p, 3) == p
    assert marginal_prefix(p, 2) == NoiseDistribution.product_bernoulli([F(1, 8), F(1, 16)])
    with pytest.raises(ParameterRangeError):
        marginal_prefix(p, 4)


def test_chain_rule_reconstructs_full_support_tables():
    rng = RandomStream(11)
    for k in range(1, 5):
        p = NoiseDistribution.random_sv_source(k, F(1, 8), rng)
        for z in range(1 << k):
            assert chain_rule_probability(p, BitVector(k, z)) == p.table[z]


def test_random_sv_source_respects_delta():
    rng = RandomStream(5)
    for k in range(1, 5):
        p = NoiseDistribution.random_sv_source(k, F(1, 64), rng)
        assert sv_parameter(p) <= F(1, 64)


def test_convolve_bernoulli_examples():
    assert convolve_bernoulli(0, F(3, 8)) == 0
    assert convolve_bernoulli(HALF, F(1, 16)) == F(1, 16)
    assert convolve_bernoulli(F(1, 4), F(1, 4)) == F(1, 8)
    with pytest.raises(ParameterRangeError):
        convolve_bernoulli(F(3, 4), 0)


def test_convolve_bernoulli_matches_two_bit_enumeration():
    for d1, d2 in itertools.product(DYADIC_GRID, DYADIC_GRID):
        joint = NoiseDistribution.product_bernoulli([d1, d2])
        xor_law = pushforward_xor(joint, BitVector(2, 0b11))
        assert xor_law.table[1] == HALF - convolve_bernoulli(d1, d2)


def test_tv_distance_examples():
    p = NoiseDistribution.bernoulli(F(15, 32))
    assert tv_distance(p, p) == 0
    assert tv_distance(NoiseDistribution.point_mass(1, 0), NoiseDistribution.point_mass(1, 1)) == 1
    assert tv_distance(p, NoiseDistribution.uniform(1)) == F(1, 32)
    with pytest.raises(DimensionMismatchError):
        tv_distance(NoiseDistribution.uniform(1), NoiseDistribution.uniform(2))


def test_tv_distance_is_a_metric():
    rng = RandomStream(17)
    for k in range(1, 5):
        for _ in range(5):
            p, q, r = (NoiseDistribution.random_sv_source(k, F(1, 4), rng) for _ in range(3))
            assert tv_distance(p, q) == tv_distance(q, p)
            assert tv_distance(p, r) <= tv_distance(p, q) + tv_distance(q, r)
            assert 0 <= tv_distance(p, q) <= 1


def test_pushforward_xor_examples():
    p = NoiseDistribution.product_bernoulli([F(1, 8), F(1, 8)])
    assert pushforward_xor(p, BitVector(2, 0)) == NoiseDistribution.point_mass(1, 0)
    assert pushforward_xor(p, BitVector(2, 0b11)) == NoiseDistribution.bernoulli(HALF - 2 * F(1, 8) ** 2)
    with pytest.raises(DimensionMismatchError):
        pushforward_xor(p, BitVector(3, 1))


def test_float_view_and_digest():
    p = NoiseDistribution.shared_coin(2, F(1, 8))
    assert p.to_float().mode == FLOAT_MODE
    assert abs(sum(p.to_float().table) - 1.0) < 1e-12
    assert p.digest() == NoiseDistribution.shared_coin(2, F(1, 8)).digest()
    assert p.digest() != NoiseDistribution.uniform(2).digest()
    assert p.to_json()["table"][0] == "17/64"
