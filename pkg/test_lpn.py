# test_lpn.py
"""Tests for the LPN samplers, residuals and exact batch laws"""

from fractions import Fraction

import numpy as np
import pytest
from scipy.stats import chisquare

from conftest import all_keys
from core.distributions import HALF, NoiseDistribution
from core.gf2 import BitVector, RandomStream, inner_product
from core.lpn import (
    BatchLaw,
    exact_target_distribution,
    residual_arrays,
    residual_pushforward,
    residuals,
    sample_batch_lpn,
    sample_lpn,
    sample_lpn_arrays,
    u_marginal,
)
from models.data_models import Batch, LpnSample, SecretKey
from models.exceptions import DimensionMismatchError, ParameterRangeError, SizeGuardError

F = Fraction


def key(text: str) -> SecretKey:
    return SecretKey(BitVector.from_string(text))


def test_noiseless_mode_gives_exact_inner_products(rng):
    sk = key("1011")
    for _ in range(200):
        s = sample_lpn(4, HALF, sk, rng, allow_noiseless=True)
        assert s.y == inner_product(s.u, sk.sk)


def test_bias_one_half_needs_the_noiseless_flag(rng):
    with pytest.raises(ParameterRangeError):
        sample_lpn(4, HALF, key("1011"), rng)
    with pytest.raises(ParameterRangeError):
        sample_lpn(4, F(0), key("1011"), rng)


def test_key_length_must_match(rng):
    with pytest.raises(DimensionMismatchError):
        sample_lpn(3, F(1, 4), key("10"), rng)


def test_noise_rate_of_vectorised_sampler():
    rng = RandomStream(2024)
    sk = key("10")
    u, y = sample_lpn_arrays(2, 0.25, sk, 1_000_000, rng)
    noise_rate = residual_arrays(u, y, sk).mean()
    assert abs(noise_rate - 0.25) < 2e-3


def test_zero_key_makes_labels_pure_noise(rng):
    sk = key("0")
    noise = [sample_lpn(1, F(3, 8), sk, rng).y for _ in range(4000)]
    assert abs(np.mean(noise) - 0.125) < 0.03


def test_point_mass_noise_gives_noiseless_batches(rng):
    sk = key("110")
    p = NoiseDistribution.point_mass(3, 0)
    for _ in range(100):
        assert residuals(sample_batch_lpn(3, p, sk, rng), sk) == BitVector.zeros(3)


def test_shared_bit_noise_gives_equal_residuals(rng):
    sk = key("1")
    p = NoiseDistribution(2, (HALF, 0, 0, HALF))
    seen = set()
    for _ in range(20_000):
        r = residuals(sample_batch_lpn(1, p, sk, rng), sk)
        assert r.bits[0] == r.bits[1]
        seen.add(r.value)
    assert seen == {0, 3}


def test_batch_residual_histogram_fits_p():
    rng = RandomStream(99)
    sk = key("0110")
    p = NoiseDistribution.correlated_with_first(2, F(1, 8))
    draws = 20_000
    counts = np.zeros(4, dtype=np.int64)
    for _ in range(draws):
        counts[residuals(sample_batch_lpn(4, p, sk, rng), sk).value] += 1
    _, p_value = chisquare(counts, np.array([float(x) for x in p.table]) * draws)
    assert p_value > 1e-3


def test_batch_u_vectors_are_uniform():
    rng = RandomStream(123)
    n, sk = 4, key("1011")
    p = NoiseDistribution.correlated_with_first(3, F(1, 16))
    draws = 16_000
    counts = np.zeros((p.k, 1 << n), dtype=np.int64)
    for _ in range(draws):
        for i, sample in enumerate(sample_batch_lpn(n, p, sk, rng).samples):
            counts[i, sample.u.value] += 1
    for row in counts:
        assert chisquare(row)[1] > 1e-3 / p.k


def test_vectorised_u_vectors_are_uniform():
    rng = RandomStream(321)
    n = 8
    u, _ = sample_lpn_arrays(n, 0.25, key("10110010"), 200_000, rng)
    counts = np.bincount(u.astype(np.int64), minlength=1 << n)
    assert chisquare(counts)[1] > 1e-3


def test_residuals_recover_known_noise():
    sk = key("101")
    us = [BitVector.from_string(t) for t in ("100", "011", "111")]
    noise = (1, 0, 1)
    batch = Batch(tuple(LpnSample(u, inner_product(u, sk.sk) ^ e) for u, e in zip(us, noise)))
    assert residuals(batch, sk).bits == noise


def test_wrong_key_residuals_follow_the_key_difference():
    for n in range(1, 4):
        for sk in all_keys(n):
            for other in all_keys(n):
                diff = sk.sk ^ other.sk
                for value in range(1 << n):
                    u = BitVector(n, value)
                    batch = Batch((LpnSample(u, inner_product(u, sk.sk)),))
                    assert residuals(batch, other).bits[0] == inner_product(u, diff)


def test_exact_target_single_sample():
    law = exact_target_distribution(1, NoiseDistribution.bernoulli(F(1, 4)), key("1"))
    for u in (0, 1):
        for y in (0, 1):
            expected = HALF * (F(3, 4) if y == u else F(1, 4))
            assert law.table[u | (y << 1)] == expected


def test_exact_target_uniform_noise_is_uniform():
    law = exact_target_distribution(2, NoiseDistribution.uniform(2), key("11"))
    assert set(law.table) == {F(1, 64)}


def test_exact_target_mass_residuals_and_u_marginals():
    rng = RandomStream(8)
    for n in (1, 2):
        for k in (1, 2, 3):
            p = NoiseDistribution.random_sv_source(k, F(1, 8), rng)
            for sk in all_keys(n):
                law = exact_target_distribution(n, p, sk)
                assert law.total_mass() == 1
                assert residual_pushforward(law, sk) == p
                for i in range(1, k + 1):
                    assert u_marginal(law, i) == NoiseDistribution.uniform(n)


def test_outcome_index_and_decode_agree():
    batch = Batch((LpnSample(BitVector.from_string("10"), 1), LpnSample(BitVector.from_string("01"), 0)))
    index = BatchLaw.outcome_index(batch)
    assert index == (0b01 | 1 << 2) | (0b10 << 3)
    law = BatchLaw(2, 2, tuple(F(int(i == index)) for i in range(1 << 6)))
    assert law.decode(index) == batch


def test_size_guard():
    with pytest.raises(SizeGuardError):
        exact_target_distribution(8, NoiseDistribution.uniform(3), SecretKey(BitVector.zeros(8)))
