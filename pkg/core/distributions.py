# core/distributions.py
"""Exact and floating distributions over F_2^k.

Tables are dense (2^k entries) and indexed by the integer encoding of
``core.gf2``. Rational mode stores ``fractions.Fraction`` entries and is used
for every exact verification; float mode stores Python floats for sampling.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence, Tuple, Union

from config.settings import FLOAT_MODE, FLOAT_TOLERANCE, RATIONAL_MODE
from core.gf2 import BitVector, RandomStream, parity
from models.exceptions import (
    DimensionMismatchError,
    InvalidDistributionError,
    ParameterRangeError,
    ZeroMassPrefixError,
)
from utils.helpers import canonical_json, format_number, sha256_text

logger = logging.getLogger(__name__)

Rational = Fraction
Number = Union[Fraction, float]

HALF = Fraction(1, 2)


def to_mode(value, mode: str) -> Number:
    if mode == RATIONAL_MODE:
        if isinstance(value, float):
            raise InvalidDistributionError(
                f"float entry {value!r} in a rational-mode table; pass Fraction or int"
            )
        return Fraction(value)
    if mode == FLOAT_MODE:
        return float(value)
    raise ParameterRangeError(f"unknown arithmetic mode {mode!r}")


def half(mode: str) -> Number:
    return HALF if mode == RATIONAL_MODE else 0.5


@dataclass(frozen=True)
class NoiseDistribution:
    """Probability table over F_2^k (the joint noise law p)"""
    k: int
    table: Tuple[Number, ...]
    mode: str = RATIONAL_MODE

    def __post_init__(self):
        if self.k < 0:
            raise ParameterRangeError(f"k must be non-negative, got {self.k}")
        if len(self.table) != 1 << self.k:
            raise InvalidDistributionError(
                f"table has {len(self.table)} entries, expected 2^{self.k}"
            )
        table = tuple(to_mode(x, self.mode) for x in self.table)
        object.__setattr__(self, "table", table)

        if any(x < 0 for x in table):
            raise InvalidDistributionError("negative probability in table")
        total = sum(table, to_mode(0, self.mode))
        if self.mode == RATIONAL_MODE and total != 1:
            raise InvalidDistributionError(f"total mass is {total}, expected exactly 1")
        if self.mode == FLOAT_MODE and abs(total - 1.0) > FLOAT_TOLERANCE:
            raise InvalidDistributionError(f"total mass is {total!r}, expected 1")

    # --- constructors -------------------------------------------------

    @classmethod
    def uniform(cls, k: int, mode: str = RATIONAL_MODE) -> "NoiseDistribution":
        size = 1 << k
        entry = Fraction(1, size) if mode == RATIONAL_MODE else 1.0 / size
        return cls(k, (entry,) * size, mode)

    @classmethod
    def point_mass(cls, k: int, index: int = 0, mode: str = RATIONAL_MODE) -> "NoiseDistribution":
        if not 0 <= index < 1 << k:
            raise ParameterRangeError(f"index {index} outside F_2^{k}")
        return cls(k, tuple(int(z == index) for z in range(1 << k)), mode)

    @classmethod
    def bernoulli(cls, prob_one, mode: str = RATIONAL_MODE) -> "NoiseDistribution":
        """Ber(prob_one) as a distribution over F_2^1"""
        prob_one = to_mode(prob_one, mode)
        if not 0 <= prob_one <= 1:
            raise ParameterRangeError(f"probability {prob_one} outside [0, 1]")
        return cls(1, (1 - prob_one, prob_one), mode)

    @classmethod
    def product_bernoulli(cls, biases: Sequence, mode: str = RATIONAL_MODE) -> "NoiseDistribution":
        """Coordinate i is Ber(1/2 - biases[i]), independently"""
        probs = [half(mode) - to_mode(b, mode) for b in biases]
        return cls.from_conditionals(len(probs), lambda i, prefix: probs[i - 1], mode)

    @classmethod
    def from_conditionals(
        cls,
        k: int,
        conditional: Callable[[int, BitVector], Number],
        mode: str = RATIONAL_MODE,
    ) -> "NoiseDistribution":
        """Chain-rule construction: ``conditional(i, prefix)`` is Pr[X_i = 1 | X_<i = prefix]"""
        cache = {}
        table = []
        for z in range(1 << k):
            prob = to_mode(1, mode)
            for i in range(1, k + 1):
                prefix_value = z & ((1 << (i - 1)) - 1)
                key = (i, prefix_value)
                if key not in cache:
                    c = to_mode(conditional(i, BitVector(i - 1, prefix_value)), mode)
                    if not 0 <= c <= 1:
                        raise ParameterRangeError(
                            f"conditional {c} for bit {i} is outside [0, 1]"
                        )
                    cache[key] = c
                c = cache[key]
                prob *= c if (z >> (i - 1)) & 1 else 1 - c
            table.append(prob)
        return cls(k, tuple(table), mode)

    @classmethod
    def shared_coin(cls, k: int, s, mode: str = RATIONAL_MODE) -> "NoiseDistribution":
        """Law of (e_1 + b, ..., e_k + b) with e_i ~ Ber(1/2 - s), b ~ Ber(1/2)"""
        if k < 1:
            raise ParameterRangeError(f"k must be at least 1, got {k}")
        s = to_mode(s, mode)
        h = half(mode)
        if not 0 <= s <= h:
            raise ParameterRangeError(f"bias {s} outside [0, 1/2]")
        table = []
        mask = (1 << k) - 1
        for z in range(1 << k):
            prob = to_mode(0, mode)
            for b in (0, mask):
                e = z ^ b
                ones = bin(e).count("1")
                prob += h * (h - s) ** ones * (h + s) ** (k - ones)
            table.append(prob)
        return cls(k, tuple(table), mode)

    @classmethod
    def correlated_with_first(cls, k: int, delta, mode: str = RATIONAL_MODE) -> "NoiseDistribution":
        """X_1 ~ Ber(1/2); each later bit equals X_1 with probability 1/2 + delta.

        For k = 2 this is the shared-coin pair rescaled so that its SV
        parameter is exactly delta.
        """
        delta = to_mode(delta, mode)
        h = half(mode)
        if not 0 <= delta <= h:
            raise ParameterRangeError(f"bias {delta} outside [0, 1/2]")

        def conditional(i, prefix):
            if i == 1:
                return h
            return h + delta if prefix.bits[0] else h - delta

        return cls.from_conditionals(k, conditional, mode)

    @classmethod
    def random_sv_source(
        cls,
        k: int,
        delta,
        rng: RandomStream,
        resolution: int = 3,
    ) -> "NoiseDistribution":
        """Random rational delta-SV source.

        Each conditional is 1/2 + delta * j / 2^resolution for an independent
        uniform integer j in [-2^resolution, 2^resolution]; dyadic delta gives
        dyadic entries.
        """
        delta = Fraction(delta)
        scale = 1 << resolution
        conditionals = {}
        for i in range(1, k + 1):
            draws = rng.integers(-scale, scale + 1, 1 << (i - 1))
            for prefix_value, j in enumerate(draws):
                conditionals[(i, prefix_value)] = HALF + delta * Fraction(int(j), scale)
        return cls.from_conditionals(k, lambda i, prefix: conditionals[(i, prefix.value)])

    # --- views ----------------------------------------------------------

    def probability(self, z: Union[BitVector, int]) -> Number:
        if isinstance(z, BitVector):
            if z.length != self.k:
                raise DimensionMismatchError(f"outcome has length {z.length}, expected {self.k}")
            z = z.value
        return self.table[z]

    def to_float(self) -> "NoiseDistribution":
        return NoiseDistribution(self.k, tuple(float(x) for x in self.table), FLOAT_MODE)

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "mode": self.mode,
            "table": [format_number(x) for x in self.table],
        }

    def digest(self) -> str:
        return sha256_text(canonical_json(self.to_json()))


def sample_from_table(table: Sequence[Number], rng: RandomStream) -> int:
    """Inverse-CDF draw of an index from a probability table"""
    r = rng.random()
    acc = 0
    last_positive = 0
    for index, mass in enumerate(table):
        if mass > 0:
            last_positive = index
        acc += mass
        if r < acc:
            return index
    # float round-off can leave acc a hair below 1
    return last_positive


def marginal_prefix(p: NoiseDistribution, i: int) -> NoiseDistribution:
    """Exact marginal of the first i coordinates"""
    if not 1 <= i <= p.k:
        raise ParameterRangeError(f"prefix length {i} outside [1, {p.k}]")
    mask = (1 << i) - 1
    table = [to_mode(0, p.mode)] * (1 << i)
    for z, mass in enumerate(p.table):
        table[z & mask] += mass
    return NoiseDistribution(i, tuple(table), p.mode)


def _prefix_table(p: NoiseDistribution, i: int) -> Tuple[Number, ...]:
    """Marginal of the first i coordinates, or of nothing when i == 0"""
    if i == 0:
        return (to_mode(1, p.mode),)
    return marginal_prefix(p, i).table


def conditional_bit(p: NoiseDistribution, i: int, prefix: BitVector) -> Number:
    """Pr_{X ~ p}[X_i = 1 | X_<i = prefix]"""
    if not 1 <= i <= p.k:
        raise ParameterRangeError(f"bit index {i} outside [1, {p.k}]")
    if prefix.length != i - 1:
        raise DimensionMismatchError(f"prefix has length {prefix.length}, expected {i - 1}")
    joint = marginal_prefix(p, i).table
    ones = joint[prefix.value | (1 << (i - 1))]
    mass = joint[prefix.value] + ones
    if mass == 0:
        raise ZeroMassPrefixError(i, str(prefix))
    return ones / mass


def conditional_table(p: NoiseDistribution, i: int) -> Tuple[Optional[Number], ...]:
    """All conditionals for bit i, indexed by prefix encoding; None for zero-mass prefixes"""
    joint = marginal_prefix(p, i).table
    top = 1 << (i - 1)
    result = []
    for x in range(top):
        mass = joint[x] + joint[x | top]
        result.append(None if mass == 0 else joint[x | top] / mass)
    return tuple(result)


def sv_parameter(p: NoiseDistribution) -> Number:
    """Smallest delta for which p is a delta-Santha-Vazirani source"""
    worst = to_mode(0, p.mode)
    h = half(p.mode)
    for i in range(1, p.k + 1):
        for c in conditional_table(p, i):
            if c is not None:
                worst = max(worst, abs(c - h))
    return worst


def chain_rule_probability(p: NoiseDistribution, z: BitVector) -> Number:
    """Product of the conditionals of each coordinate of z given its prefix"""
    if z.length != p.k:
        raise DimensionMismatchError(f"outcome has length {z.length}, expected {p.k}")
    prob = to_mode(1, p.mode)
    for i in range(1, p.k + 1):
        prefix = BitVector(i - 1, z.value & ((1 << (i - 1)) - 1))
        c = conditional_bit(p, i, prefix)
        prob *= c if z.bits[i - 1] else 1 - c
    return prob


def convolve_bernoulli(delta_1, delta_2):
    """Bias of Ber(1/2 - delta_1) + Ber(1/2 - delta_2) mod 2, namely 2 delta_1 delta_2"""
    for d in (delta_1, delta_2):
        if not -HALF <= d <= HALF:
            raise ParameterRangeError(f"bias {d} outside [-1/2, 1/2]")
    return 2 * delta_1 * delta_2


def tv_distance(p, q) -> Number:
    """Half the L1 distance between two tables of equal shape"""
    if len(p.table) != len(q.table):
        raise DimensionMismatchError(
            f"tables have {len(p.table)} and {len(q.table)} entries"
        )
    return sum((abs(a - b) for a, b in zip(p.table, q.table)), Fraction(0)) / 2


def pushforward_xor(p: NoiseDistribution, weights: BitVector) -> NoiseDistribution:
    """Law of <weights, Z> mod 2 for Z ~ p"""
    if weights.length != p.k:
        raise DimensionMismatchError(f"weights have length {weights.length}, expected {p.k}")
    table = [to_mode(0, p.mode), to_mode(0, p.mode)]
    for z, mass in enumerate(p.table):
        table[parity(z & weights.value)] += mass
    return NoiseDistribution(1, tuple(table), p.mode)
