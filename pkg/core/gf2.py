# core/gf2.py
"""Bit vectors over F_2, seeded random streams and the canonical integer encoding.

Every probability table in the toolkit is indexed by ``encode(v)``, where
coordinate 1 of ``v`` is the least significant bit.
"""

import logging
from dataclasses import dataclass
from typing import Iterable, Tuple

import numpy as np

from models.exceptions import DimensionMismatchError, ParameterRangeError

logger = logging.getLogger(__name__)


def parity(x: int) -> int:
    """Parity of the set bits of a non-negative integer"""
    return bin(x).count("1") & 1


def parity_array(x: np.ndarray) -> np.ndarray:
    """Elementwise parity of a uint64 array, as uint8"""
    x = np.asarray(x, dtype=np.uint64).copy()
    for shift in (32, 16, 8, 4, 2, 1):
        x ^= x >> np.uint64(shift)
    return (x & np.uint64(1)).astype(np.uint8)


@dataclass(frozen=True)
class BitVector:
    """Element of F_2^m stored as its integer encoding"""
    length: int
    value: int = 0

    def __post_init__(self):
        if self.length < 0:
            raise ParameterRangeError(f"dimension must be non-negative, got {self.length}")
        if self.value < 0 or self.value >> self.length:
            raise ParameterRangeError(
                f"value {self.value} does not fit in {self.length} coordinates"
            )

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "BitVector":
        bits = list(bits)
        value = 0
        for i, b in enumerate(bits):
            if b not in (0, 1):
                raise ParameterRangeError(f"coordinate {i + 1} is {b}, expected 0 or 1")
            value |= b << i
        return cls(len(bits), value)

    @classmethod
    def from_string(cls, text: str) -> "BitVector":
        """Parse the textual form: '0'/'1' characters, coordinate 1 first"""
        text = text.strip()
        if any(c not in "01" for c in text):
            raise ParameterRangeError(f"not a bit string: {text!r}")
        return cls.from_bits(int(c) for c in text)

    @classmethod
    def zeros(cls, length: int) -> "BitVector":
        return cls(length, 0)

    @property
    def bits(self) -> Tuple[int, ...]:
        return tuple((self.value >> i) & 1 for i in range(self.length))

    def __getitem__(self, index: int) -> int:
        return self.bits[index]

    def __len__(self) -> int:
        return self.length

    def __xor__(self, other: "BitVector") -> "BitVector":
        return xor(self, other)

    def __str__(self) -> str:
        return "".join(str(b) for b in self.bits)


def encode(v: BitVector) -> int:
    """Sum of v_i * 2^(i-1); coordinate 1 is least significant"""
    return v.value


def decode(value: int, length: int) -> BitVector:
    return BitVector(length, value)


def _check_lengths(u: BitVector, v: BitVector):
    if u.length != v.length:
        raise DimensionMismatchError(f"length mismatch: {u.length} != {v.length}")


def inner_product(u: BitVector, v: BitVector) -> int:
    _check_lengths(u, v)
    return parity(u.value & v.value)


def xor(u: BitVector, v: BitVector) -> BitVector:
    _check_lengths(u, v)
    return BitVector(u.length, u.value ^ v.value)


class RandomStream:
    """Seeded PCG64 stream (numpy ``Generator``); single owner, never global.

    ``position`` counts the values drawn so far.
    """

    ALGORITHM = "numpy.random.PCG64"

    def __init__(self, seed: int):
        self.seed = int(seed)
        self.position = 0
        self.generator = np.random.Generator(np.random.PCG64(self.seed))

    def random(self) -> float:
        self.position += 1
        return float(self.generator.random())

    def random_array(self, size: int) -> np.ndarray:
        self.position += size
        return self.generator.random(size)

    def bits(self, size: int) -> np.ndarray:
        self.position += size
        return self.generator.integers(0, 2, size=size, dtype=np.uint8)

    def integers(self, low: int, high: int, size: int) -> np.ndarray:
        """Uniform integers in [low, high)"""
        self.position += size
        return self.generator.integers(low, high, size=size, dtype=np.int64)

    def packed_uniform(self, m: int, size: int) -> np.ndarray:
        """``size`` uniform encodings of F_2^m vectors as uint64 (m <= 62)"""
        self.position += size
        return self.generator.integers(0, 1 << m, size=size, dtype=np.uint64)

    def __repr__(self) -> str:
        return f"RandomStream(seed={self.seed}, position={self.position})"


def sample_uniform(m: int, rng: RandomStream) -> BitVector:
    if m < 1:
        raise ParameterRangeError(f"dimension must be at least 1, got {m}")
    return BitVector.from_bits(int(b) for b in rng.bits(m))


def sample_bernoulli(prob_one, rng: RandomStream) -> int:
    """Ber(prob_one): returns 1 with probability prob_one"""
    if not 0 <= prob_one <= 1:
        raise ParameterRangeError(f"probability {prob_one} outside [0, 1]")
    return int(rng.random() < prob_one)
