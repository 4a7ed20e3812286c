# core/lpn.py
"""Reference samplers for standard and batch LPN, residual extraction and exact batch laws"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Tuple

import numpy as np

from config.settings import MAX_PACKED_DIMENSION, RATIONAL_MODE, TARGET_SIZE_GUARD
from core.distributions import HALF, NoiseDistribution, sample_from_table
from core.gf2 import (
    BitVector,
    RandomStream,
    inner_product,
    parity,
    parity_array,
    sample_bernoulli,
    sample_uniform,
)
from models.data_models import Batch, LpnSample, SecretKey
from models.exceptions import DimensionMismatchError, ParameterRangeError, SizeGuardError

logger = logging.getLogger(__name__)


def _check_key(n: int, sk: SecretKey):
    if sk.n != n:
        raise DimensionMismatchError(f"secret has length {sk.n}, expected n = {n}")


def check_bias(delta, allow_noiseless: bool = False):
    """LPN bias must lie in (0, 1/2); 1/2 itself only when noiseless mode is requested"""
    if allow_noiseless and delta == HALF:
        return
    if not 0 < delta < HALF:
        raise ParameterRangeError(f"bias {delta} outside (0, 1/2)")


def sample_lpn(
    n: int,
    delta,
    sk: SecretKey,
    rng: RandomStream,
    allow_noiseless: bool = False,
) -> LpnSample:
    """One sample of LPN_{n,delta}(sk): (u, <u, sk> + e), e ~ Ber(1/2 - delta)"""
    check_bias(delta, allow_noiseless)
    _check_key(n, sk)
    noise_level = 0.5 - delta if isinstance(delta, float) else HALF - Fraction(delta)
    u = sample_uniform(n, rng)
    e = sample_bernoulli(noise_level, rng)
    return LpnSample(u, inner_product(u, sk.sk) ^ e)


def sample_batch_lpn(n: int, p: NoiseDistribution, sk: SecretKey, rng: RandomStream) -> Batch:
    """One batch of LPN_{n,p}(sk): k uniform u-vectors and a joint noise vector drawn from p"""
    _check_key(n, sk)
    us = [sample_uniform(n, rng) for _ in range(p.k)]
    noise = sample_from_table(p.table, rng)
    return Batch(tuple(
        LpnSample(u, inner_product(u, sk.sk) ^ ((noise >> i) & 1))
        for i, u in enumerate(us)
    ))


def residuals(batch: Batch, sk: SecretKey) -> BitVector:
    """The noise vector (y^i + <u^i, sk>)_i of a batch under the key sk"""
    _check_key(batch.n, sk)
    return BitVector.from_bits(s.y ^ inner_product(s.u, sk.sk) for s in batch.samples)


# --- vectorised sampling path ------------------------------------------------

def _check_packed(n: int):
    if not 1 <= n <= MAX_PACKED_DIMENSION:
        raise ParameterRangeError(
            f"vectorised sampling supports 1 <= n <= {MAX_PACKED_DIMENSION}, got {n}"
        )


def sample_lpn_arrays(
    n: int,
    delta: float,
    sk: SecretKey,
    count: int,
    rng: RandomStream,
) -> Tuple[np.ndarray, np.ndarray]:
    """``count`` independent LPN_{n,delta}(sk) samples as packed arrays (u: uint64, y: uint8)"""
    check_bias(delta)
    _check_key(n, sk)
    _check_packed(n)
    u = rng.packed_uniform(n, count)
    e = (rng.random_array(count) < 0.5 - float(delta)).astype(np.uint8)
    return u, parity_array(u & np.uint64(sk.sk.value)) ^ e


def residual_arrays(u: np.ndarray, y: np.ndarray, sk: SecretKey) -> np.ndarray:
    return parity_array(u & np.uint64(sk.sk.value)) ^ y


# --- exact batch laws ------------------------------------------------------

@dataclass(frozen=True)
class BatchLaw:
    """Exact law over (F_2^n x F_2)^k.

    Sample i occupies bits [(n+1)(i-1), (n+1)i) of the outcome index: its
    u-encoding in the low n bits of that block and y in the top bit.
    """
    n: int
    k: int
    table: Tuple[Fraction, ...]

    @property
    def block_width(self) -> int:
        return self.n + 1

    @staticmethod
    def outcome_index(batch: Batch) -> int:
        index = 0
        for i, s in enumerate(batch.samples):
            index |= (s.u.value | (s.y << s.n)) << ((s.n + 1) * i)
        return index

    def decode(self, index: int) -> Batch:
        samples = []
        mask = (1 << self.n) - 1
        for i in range(self.k):
            block = index >> (self.block_width * i)
            samples.append(LpnSample(BitVector(self.n, block & mask), (block >> self.n) & 1))
        return Batch(tuple(samples))

    def total_mass(self) -> Fraction:
        return sum(self.table, Fraction(0))


def check_size_guard(n: int, k: int, guard: int):
    if (n + 1) * k > guard:
        raise SizeGuardError(f"(n+1)k = {(n + 1) * k} exceeds the exact-table guard {guard}")


def _block_residuals(n: int, sk: SecretKey) -> List[int]:
    """Residual bit of every (u, y) block value"""
    return [((b >> n) & 1) ^ parity(b & sk.sk.value & ((1 << n) - 1)) for b in range(1 << (n + 1))]


def exact_target_distribution(n: int, p: NoiseDistribution, sk: SecretKey) -> BatchLaw:
    """Exact law of LPN_{n,p}(sk): Pr[(u, y)] = 2^(-nk) p(residuals)"""
    _check_key(n, sk)
    k = p.k
    check_size_guard(n, k, TARGET_SIZE_GUARD)
    if p.mode != RATIONAL_MODE:
        logger.warning("exact target law requested for a float table; converting entries exactly")
    weights = [Fraction(x) / (1 << (n * k)) for x in p.table]
    width = n + 1
    block_mask = (1 << width) - 1
    block_residual = _block_residuals(n, sk)

    table = []
    for index in range(1 << (width * k)):
        residual = 0
        for i in range(k):
            residual |= block_residual[(index >> (width * i)) & block_mask] << i
        table.append(weights[residual])
    return BatchLaw(n, k, tuple(table))


def residual_pushforward(law: BatchLaw, sk: SecretKey) -> NoiseDistribution:
    """Law of the residual vector under the key sk"""
    _check_key(law.n, sk)
    width = law.block_width
    block_mask = (1 << width) - 1
    block_residual = _block_residuals(law.n, sk)
    table = [Fraction(0)] * (1 << law.k)
    for index, mass in enumerate(law.table):
        residual = 0
        for i in range(law.k):
            residual |= block_residual[(index >> (width * i)) & block_mask] << i
        table[residual] += mass
    return NoiseDistribution(law.k, tuple(table))


def u_marginal(law: BatchLaw, i: int) -> NoiseDistribution:
    """Law of the i-th u-vector (1-based), as a table over F_2^n"""
    if not 1 <= i <= law.k:
        raise ParameterRangeError(f"sample index {i} outside [1, {law.k}]")
    shift = law.block_width * (i - 1)
    mask = (1 << law.n) - 1
    table = [Fraction(0)] * (1 << law.n)
    for index, mass in enumerate(law.table):
        table[(index >> shift) & mask] += mass
    return NoiseDistribution(law.n, tuple(table))
