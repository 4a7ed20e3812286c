# conftest.py
"""Shared fixtures and random-instance builders for the test suite"""

import os
import sys
from fractions import Fraction

import pytest

sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from core.gf2 import BitVector, RandomStream
from core.linearize import BiasFunction
from models.data_models import SecretKey

DATA_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "data")


def random_in_range_q(k: int, rng: RandomStream, resolution: int = 6) -> BiasFunction:
    """Random dyadic q with every |q(z) - 1/2| <= 2^-(k+3)"""
    scale = 1 << resolution
    bound = Fraction(1, 1 << (k + 3))
    draws = rng.integers(-scale, scale + 1, 1 << k)
    return BiasFunction(k, tuple(Fraction(1, 2) + bound * Fraction(int(j), scale) for j in draws))


def all_keys(n: int):
    return [SecretKey(BitVector(n, value)) for value in range(1 << n)]


@pytest.fixture
def rng():
    return RandomStream(12345)


@pytest.fixture
def data_dir():
    return DATA_DIR
