# test_gf2.py
"""Tests for bit vectors, encodings and random streams"""

import numpy as np
import pytest

from core.gf2 import (
    BitVector,
    RandomStream,
    decode,
    encode,
    inner_product,
    parity,
    parity_array,
    sample_bernoulli,
    sample_uniform,
    xor,
)
from models.exceptions import DimensionMismatchError, ParameterRangeError


def test_encoding_puts_coordinate_one_lowest():
    v = BitVector.from_string("101")
    assert v.bits == (1, 0, 1)
    assert encode(v) == 5
    assert encode(BitVector.from_string("011")) == 6
    assert str(decode(6, 3)) == "011"


def test_textual_form_round_trips_through_from_string():
    for text in ("", "0", "1", "0110", "1111000011"):
        assert str(BitVector.from_string(text)) == text


def test_inner_product_and_xor():
    u = BitVector.from_string("110")
    v = BitVector.from_string("011")
    assert inner_product(u, v) == 1
    assert inner_product(u, BitVector.from_string("111")) == 0
    assert str(xor(u, v)) == "101"
    assert u ^ v == xor(u, v)


def test_length_mismatch_is_rejected():
    with pytest.raises(DimensionMismatchError):
        inner_product(BitVector(3, 1), BitVector(2, 1))
    with pytest.raises(DimensionMismatchError):
        xor(BitVector(3, 1), BitVector(4, 1))


def test_invalid_vectors_are_rejected():
    with pytest.raises(ParameterRangeError):
        BitVector(2, 4)
    with pytest.raises(ParameterRangeError):
        BitVector.from_string("10a")
    with pytest.raises(ParameterRangeError):
        BitVector.from_bits([0, 2])


def test_parity_array_matches_scalar_parity():
    values = np.array([0, 1, 3, 7, 2**40 + 1, 2**62 - 1, 123456789], dtype=np.uint64)
    assert parity_array(values).tolist() == [parity(int(x)) for x in values]


def test_random_stream_is_reproducible():
    a, b = RandomStream(7), RandomStream(7)
    assert [a.random() for _ in range(5)] == [b.random() for _ in range(5)]
    assert a.bits(20).tolist() == b.bits(20).tolist()
    assert a.position == b.position == 25


def test_sample_uniform_requires_positive_dimension(rng):
    assert sample_uniform(5, rng).length == 5
    with pytest.raises(ParameterRangeError):
        sample_uniform(0, rng)


def test_sample_bernoulli_extremes(rng):
    assert all(sample_bernoulli(0, rng) == 0 for _ in range(50))
    assert all(sample_bernoulli(1, rng) == 1 for _ in range(50))
    with pytest.raises(ParameterRangeError):
        sample_bernoulli(1.5, rng)


def test_packed_uniform_stays_in_range(rng):
    values = rng.packed_uniform(10, 1000)
    assert values.dtype == np.uint64
    assert int(values.max()) < 1 << 10


def test_encode_and_decode_are_inverse_bijections():
    for m in range(0, 11):
        seen = set()
        for value in range(1 << m):
            v = decode(value, m)
            assert v.length == m
            assert encode(v) == value
            assert decode(encode(v), m) == v
            seen.add(v.bits)
        assert len(seen) == 1 << m


def test_inner_product_is_bilinear():
    for m in range(1, 5):
        vectors = [BitVector(m, x) for x in range(1 << m)]
        for u in vectors:
            for v in vectors:
                for w in vectors:
                    assert inner_product(u ^ v, w) == inner_product(u, w) ^ inner_product(v, w)
                    assert inner_product(w, u ^ v) == inner_product(w, u) ^ inner_product(w, v)


@pytest.mark.slow
def test_sample_uniform_single_coordinate_frequency():
    rng = RandomStream(2024)
    draws = 1_000_000
    ones = sum(sample_uniform(1, rng).value for _ in range(draws))
    assert abs(ones / draws - 0.5) < 3e-3


def test_sample_uniform_covers_every_vector():
    rng = RandomStream(99)
    outcomes = {sample_uniform(3, rng).value for _ in range(10_000)}
    assert outcomes == set(range(8))


def test_sample_bernoulli_mean():
    rng = RandomStream(77)
    draws = 1_000_000
    ones = sum(sample_bernoulli(0.25, rng) for _ in range(draws))
    assert abs(ones / draws - 0.25) < 2e-3
