# core/linearize.py
"""Linearization of a near-uniform bias function into a random affine function.

Given q: F_2^k -> [1/2 - 2^-(k+3), 1/2 + 2^-(k+3)], ``build_mu_star`` returns a
distribution over coefficient vectors f = (f_0, ..., f_k) such that the affine
evaluation f_0 + <f_{1:k}, z> is Ber(q(z)) at every z. Coefficient vectors are
encoded with f_0 as the least significant bit, so the entry for
(0, z) sits at index 2 * encode(z).
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence, Tuple

import numpy as np

from config.settings import ELIMINATION_CROSSCHECK_MAX_K, FLOAT_MODE, FLOAT_TOLERANCE, RATIONAL_MODE
from core.distributions import Number, half, sample_from_table, to_mode
from core.gf2 import BitVector, RandomStream, parity, parity_array
from models.exceptions import (
    BiasRangeError,
    InvalidDistributionError,
    ParameterRangeError,
    SimplexViolationError,
)
from utils.helpers import format_number

logger = logging.getLogger(__name__)

# Dense matrices: int64 arrays for 0/1 matrices, object arrays of Fraction otherwise
RationalMatrix = np.ndarray


@dataclass(frozen=True)
class BiasFunction:
    """Table q: F_2^k -> [0, 1] indexed by encode(z)"""
    k: int
    table: Tuple[Number, ...]
    mode: str = RATIONAL_MODE

    def __post_init__(self):
        if self.k < 0:
            raise ParameterRangeError(f"arity must be non-negative, got {self.k}")
        if len(self.table) != 1 << self.k:
            raise InvalidDistributionError(
                f"bias table has {len(self.table)} entries, expected 2^{self.k}"
            )
        object.__setattr__(self, "table", tuple(to_mode(x, self.mode) for x in self.table))

    @classmethod
    def constant(cls, k: int, value, mode: str = RATIONAL_MODE) -> "BiasFunction":
        return cls(k, (value,) * (1 << k), mode)

    @property
    def bound(self) -> Number:
        """Largest deviation from 1/2 the linearization accepts: 2^-(k+3)"""
        return to_mode(Fraction(1, 1 << (self.k + 3)), self.mode)

    def sup_deviation(self) -> Number:
        h = half(self.mode)
        return max(abs(x - h) for x in self.table)

    def in_lemma_range(self) -> bool:
        if self.mode == FLOAT_MODE:
            return self.sup_deviation() <= self.bound + FLOAT_TOLERANCE
        return self.sup_deviation() <= self.bound

    def to_float(self) -> "BiasFunction":
        return BiasFunction(self.k, tuple(float(x) for x in self.table), FLOAT_MODE)


@dataclass(frozen=True)
class AffineCoeffDistribution:
    """Distribution over coefficient vectors (f_0, ..., f_k), 2^(k+1) entries"""
    k: int
    table: Tuple[Number, ...]
    mode: str = RATIONAL_MODE

    def __post_init__(self):
        if len(self.table) != 1 << (self.k + 1):
            raise InvalidDistributionError(
                f"coefficient table has {len(self.table)} entries, expected 2^{self.k + 1}"
            )
        table = tuple(to_mode(x, self.mode) for x in self.table)
        object.__setattr__(self, "table", table)
        if any(x < 0 for x in table):
            raise InvalidDistributionError("negative probability in coefficient table")
        total = sum(table, to_mode(0, self.mode))
        if self.mode == RATIONAL_MODE and total != 1:
            raise InvalidDistributionError(f"total mass is {total}, expected exactly 1")
        if self.mode == FLOAT_MODE and abs(total - 1.0) > FLOAT_TOLERANCE:
            raise InvalidDistributionError(f"total mass is {total!r}, expected 1")

    @classmethod
    def uniform(cls, k: int, mode: str = RATIONAL_MODE) -> "AffineCoeffDistribution":
        size = 1 << (k + 1)
        return cls(k, (to_mode(Fraction(1, size), mode),) * size, mode)

    @classmethod
    def point_mass(cls, k: int, index: int, mode: str = RATIONAL_MODE) -> "AffineCoeffDistribution":
        return cls(k, tuple(int(f == index) for f in range(1 << (k + 1))), mode)

    def to_float(self) -> "AffineCoeffDistribution":
        return AffineCoeffDistribution(self.k, tuple(float(x) for x in self.table), FLOAT_MODE)

    def to_json(self) -> dict:
        return {"k": self.k, "table": [format_number(x) for x in self.table]}


def evaluate_affine(f: int, z: int) -> int:
    """f_0 + f_1 z_1 + ... + f_k z_k mod 2, with f and z given by their encodings"""
    return (f & 1) ^ parity((f >> 1) & z)


def build_matrix_A(k: int) -> RationalMatrix:
    """A[f, z] = 1 iff the affine function f evaluates to 1 at z"""
    if k < 0:
        raise ParameterRangeError(f"arity must be non-negative, got {k}")
    f = np.arange(1 << (k + 1), dtype=np.uint64)
    z = np.arange(1 << k, dtype=np.uint64)
    linear = parity_array((f[:, None] >> np.uint64(1)) & z[None, :])
    return (linear ^ (f[:, None] & np.uint64(1)).astype(np.uint8)).astype(np.int64)


@lru_cache(maxsize=None)
def _matrix_B(k: int) -> np.ndarray:
    index = np.arange(1, 1 << k, dtype=np.uint64)
    matrix = parity_array(index[:, None] & index[None, :]).astype(np.int64)
    matrix.flags.writeable = False
    return matrix


def build_matrix_B(k: int) -> RationalMatrix:
    """B[u, v] = <u, v> mod 2 over nonzero u, v in F_2^k, as a real 0/1 matrix.

    Row and column r correspond to the vector with encoding r + 1.
    """
    if k < 1:
        raise ParameterRangeError(f"arity must be at least 1, got {k}")
    return _matrix_B(k).copy()


def identity_matrix(size: int) -> RationalMatrix:
    return np.array([[Fraction(int(i == j)) for j in range(size)] for i in range(size)], dtype=object)


def invert_by_elimination(matrix: RationalMatrix) -> RationalMatrix:
    """Exact Gauss-Jordan inverse of a square rational matrix"""
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ParameterRangeError(f"matrix is not square (shape = {matrix.shape})")

    size = matrix.shape[0]
    X = np.array([[Fraction(x) for x in row] for row in matrix], dtype=object)
    Y = identity_matrix(size)

    # Downward elimination: zero the lower triangle, unit diagonal.
    for i in range(size):
        for j in range(i, size):
            if X[j, i] != 0:
                if i != j:
                    X[[i, j]] = X[[j, i]]
                    Y[[i, j]] = Y[[j, i]]
                break
        else:
            raise ParameterRangeError("matrix is not invertible")

        pivot = X[i, i]
        Y[i, :] /= pivot
        X[i, :] /= pivot
        for j in range(i + 1, size):
            factor = X[j, i]
            if factor != 0:
                Y[j, :] -= factor * Y[i, :]
                X[j, :] -= factor * X[i, :]

    # Upward elimination: zero the upper triangle.
    for j in range(size - 2, -1, -1):
        for i in range(j + 1, size):
            factor = X[j, i]
            if factor != 0:
                Y[j, :] -= factor * Y[i, :]
                X[j, :] -= factor * X[i, :]

    return Y


def _closed_form_inverse(k: int) -> RationalMatrix:
    # B^-1 = 2^(2-k) (B - J/2) = 2^(1-k) (2B - J)
    scale = Fraction(2, 1 << k)
    return np.array(
        [[scale * (2 * int(b) - 1) for b in row] for row in _matrix_B(k)],
        dtype=object,
    )


@lru_cache(maxsize=None)
def _closed_form_validated(k: int) -> bool:
    """Compare the closed-form inverse with elimination for small k"""
    if k <= ELIMINATION_CROSSCHECK_MAX_K:
        if not np.array_equal(_closed_form_inverse(k), invert_by_elimination(_matrix_B(k))):
            raise RuntimeError(f"closed-form B^-1 disagrees with elimination at k = {k}")
        logger.debug(f"closed-form B^-1 matches elimination at k = {k}")
    return True


def invert_matrix_B(k: int, method: str = "closed_form") -> RationalMatrix:
    """Exact rational inverse of B, by closed form or Gauss-Jordan elimination"""
    if k < 1:
        raise ParameterRangeError(f"arity must be at least 1, got {k}")
    if method == "elimination":
        return invert_by_elimination(_matrix_B(k))
    if method != "closed_form":
        raise ParameterRangeError(f"unknown inversion method {method!r}")
    _closed_form_validated(k)
    return _closed_form_inverse(k)


def apply_B_inverse(k: int, v: Sequence[Number]) -> Tuple[Number, ...]:
    """B^-1 v computed as 2^(2-k) (B v - (sum v / 2) 1) without forming B^-1"""
    if len(v) != (1 << k) - 1:
        raise ParameterRangeError(f"vector has {len(v)} entries, expected 2^{k} - 1")
    _closed_form_validated(k)
    exact = not any(isinstance(x, float) for x in v)
    if exact:
        vector = np.array([Fraction(x) for x in v], dtype=object)
        Bv = _matrix_B(k).astype(object).dot(vector)
        shift = sum(vector, Fraction(0)) / 2
        scale = Fraction(4, 1 << k)
        return tuple(scale * (x - shift) for x in Bv)
    vector = np.array(v, dtype=np.float64)
    Bv = _matrix_B(k).dot(vector)
    return tuple(float(x) for x in (4.0 / (1 << k)) * (Bv - vector.sum() / 2))


def perturbation(q: BiasFunction) -> Tuple[Number, ...]:
    """B^-1 (q_Z - 1/2), indexed by nonzero z in encoding order"""
    if q.k == 0:
        return ()
    h = half(q.mode)
    return apply_B_inverse(q.k, [q.table[z] - h for z in range(1, 1 << q.k)])


def base_distribution(q: BiasFunction) -> Tuple[Number, ...]:
    """Ber(q(0)) x Ber(1/2)^k over coefficient vectors"""
    q0 = q.table[0]
    size = to_mode(1 << q.k, q.mode)
    return tuple((q0 if f & 1 else 1 - q0) / size for f in range(1 << (q.k + 1)))


def build_mu_star(q: BiasFunction) -> AffineCoeffDistribution:
    """Coefficient distribution whose affine evaluation at z is Ber(q(z))"""
    if not q.in_lemma_range():
        raise BiasRangeError(q.sup_deviation(), q.bound, q.k)

    mu = list(base_distribution(q))
    shift = perturbation(q)
    for offset, z in enumerate(range(1, 1 << q.k)):
        mu[z << 1] += shift[offset]
    mu[0] -= sum(shift, to_mode(0, q.mode))

    if any(x < 0 for x in mu):
        raise SimplexViolationError(f"mu* has a negative entry for in-range q (k = {q.k})")
    total = sum(mu, to_mode(0, q.mode))
    if (q.mode == RATIONAL_MODE and total != 1) or abs(total - 1) > FLOAT_TOLERANCE:
        raise SimplexViolationError(f"mu* has total mass {total} for in-range q (k = {q.k})")
    return AffineCoeffDistribution(q.k, tuple(mu), q.mode)


def sample_affine_coeffs(mu: AffineCoeffDistribution, rng: RandomStream) -> BitVector:
    """Draw F = (F_0, ..., F_k) from mu by inverse CDF"""
    return BitVector(mu.k + 1, sample_from_table(mu.table, rng))


def apply_A_transpose(mu: AffineCoeffDistribution) -> Tuple[Number, ...]:
    """(A^T mu)_z = Pr_{F ~ mu}[F_0 + <F_{1:k}, z> = 1] for every z"""
    A = build_matrix_A(mu.k)
    if mu.mode == RATIONAL_MODE:
        values = A.T.astype(object).dot(np.array(mu.table, dtype=object))
        return tuple(Fraction(x) for x in values)
    return tuple(float(x) for x in A.T.dot(np.array(mu.table, dtype=np.float64)))
