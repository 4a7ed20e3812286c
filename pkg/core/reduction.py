# core/reduction.py
"""EntLPN: k independent LPN samples in, one batch-LPN sample with SV noise out.

Input samples must come from LPN_{n, 2^(k+2) delta}(sk); for a delta-SV
source p with 0 < delta < 2^-(k+3) the output batch is distributed exactly as
LPN_{n,p}(sk). Nothing here takes the secret, except the exact oracle, which
needs it to model the input samples.
"""

import logging
import time
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple

import numpy as np

from config.settings import FLOAT_MODE, FLOAT_TOLERANCE, ORACLE_SIZE_GUARD, RATIONAL_MODE
from core.distributions import (
    NoiseDistribution,
    Number,
    conditional_table,
    half,
    marginal_prefix,
    to_mode,
)
from core.gf2 import BitVector, RandomStream, parity, sample_bernoulli
from core.linearize import AffineCoeffDistribution, BiasFunction, build_mu_star, sample_affine_coeffs
from core.lpn import BatchLaw, check_size_guard
from models.data_models import Batch, LpnSample, ReductionConfig, SecretKey
from models.exceptions import (
    DimensionMismatchError,
    NotSanthaVaziraniError,
    ParameterRangeError,
    ZeroMassPrefixError,
)

logger = logging.getLogger(__name__)


def check_delta_range(k: int, delta):
    if not 0 < delta < Fraction(1, 1 << (k + 3)):
        raise ParameterRangeError(f"delta = {delta} outside (0, 2^-{k + 3}) for k = {k}")


def check_santha_vazirani(p: NoiseDistribution, delta):
    """Raise on the first prefix whose conditional bias exceeds delta"""
    h = half(p.mode)
    tolerance = FLOAT_TOLERANCE if p.mode == FLOAT_MODE else 0
    for i in range(1, p.k + 1):
        for prefix, c in enumerate(conditional_table(p, i)):
            if c is None:
                raise ZeroMassPrefixError(i, str(BitVector(i - 1, prefix)))
            if abs(c - h) > delta + tolerance:
                raise NotSanthaVaziraniError(i, str(BitVector(i - 1, prefix)), abs(c - h), delta)


def validate_config(config: ReductionConfig):
    if config.n < 1:
        raise ParameterRangeError(f"dimension must be at least 1, got {config.n}")
    if config.p.k != config.k:
        raise DimensionMismatchError(f"p is over F_2^{config.p.k}, expected k = {config.k}")
    check_delta_range(config.k, config.delta)
    check_santha_vazirani(config.p, config.delta)


def compute_p_i(p: NoiseDistribution, i: int, delta) -> BiasFunction:
    """p^(i)(z) = 1/2 - (1/2 - Pr[Z_i = 1 | Z_<i = z]) / (2^(k+3) delta), over F_2^(i-1)"""
    if not 1 <= i <= p.k:
        raise ParameterRangeError(f"step {i} outside [1, {p.k}]")
    h = half(p.mode)
    delta = to_mode(delta, p.mode)
    scale = (1 << (p.k + 3)) * delta
    tolerance = FLOAT_TOLERANCE if p.mode == FLOAT_MODE else 0
    values = []
    for prefix, c in enumerate(conditional_table(p, i)):
        if c is None:
            raise ZeroMassPrefixError(i, str(BitVector(i - 1, prefix)))
        if abs(c - h) > delta + tolerance:
            raise NotSanthaVaziraniError(i, str(BitVector(i - 1, prefix)), abs(c - h), delta)
        values.append(h - (h - c) / scale)
    return BiasFunction(i - 1, tuple(values), p.mode)


def first_step_noise(p: NoiseDistribution, delta) -> Number:
    """Pr[e'_1 = 1] = 1/2 - (1/2)(1/2 - p_1(1)) / (2^(k+2) delta)"""
    h = half(p.mode)
    p1 = marginal_prefix(p, 1).table[1]
    return h - h * (h - p1) / ((1 << (p.k + 2)) * to_mode(delta, p.mode))


def affine_step(
    f: int,
    a_i: int,
    y_i: int,
    prev_a: Sequence[int],
    prev_y: Sequence[int],
) -> Tuple[int, int]:
    """a'_i = a_i + sum_j F_j a'_j and y'_i = y_i + F_0 + sum_j F_j y'_j.

    With beta = sum_j F_j a'_j and alpha = F_0 + sum_j F_j y'_j this is the
    affine-noise move (a_i - beta, y_i + alpha); over F_2 minus is plus.
    """
    a, y = a_i, y_i ^ (f & 1)
    for j in range(1, len(prev_a) + 1):
        if (f >> j) & 1:
            a ^= prev_a[j - 1]
            y ^= prev_y[j - 1]
    return a, y


@dataclass(frozen=True)
class ReductionPlan:
    """Everything EntLPN precomputes from (p, delta) before touching any sample.

    Index i - 1 of the per-step tuples belongs to step i. ``coefficient_tables``
    and ``bias_functions`` are exact (None for float inputs); ``float_tables``
    drive sampling.
    """
    p: NoiseDistribution
    delta: Number
    bias_functions: Optional[Tuple[BiasFunction, ...]]
    coefficient_tables: Optional[Tuple[AffineCoeffDistribution, ...]]
    float_tables: Tuple[AffineCoeffDistribution, ...]
    first_noise: Optional[Fraction]
    first_noise_float: float

    @property
    def k(self) -> int:
        return self.p.k

    @property
    def input_bias(self) -> Number:
        return (1 << (self.k + 2)) * self.delta

    @property
    def exact(self) -> bool:
        return self.coefficient_tables is not None

    @classmethod
    def build(cls, p: NoiseDistribution, delta) -> "ReductionPlan":
        check_delta_range(p.k, delta)
        check_santha_vazirani(p, delta)
        start = time.perf_counter()

        exact = p.mode == RATIONAL_MODE and not isinstance(delta, float)
        bias_functions = coefficient_tables = first_noise = None
        if exact:
            delta = Fraction(delta)
            bias_functions = tuple(compute_p_i(p, i, delta) for i in range(1, p.k + 1))
            coefficient_tables = tuple(build_mu_star(q) for q in bias_functions)
            first_noise = first_step_noise(p, delta)

        p_float = p if p.mode == FLOAT_MODE else p.to_float()
        float_tables = tuple(
            build_mu_star(compute_p_i(p_float, i, float(delta))) for i in range(1, p.k + 1)
        )
        first_noise_float = float(first_step_noise(p_float, float(delta)))

        logger.debug(
            f"reduction plan for k = {p.k}, delta = {delta} built in "
            f"{time.perf_counter() - start:.4f}s (exact = {exact})"
        )
        return cls(p, delta, bias_functions, coefficient_tables, float_tables,
                   first_noise, first_noise_float)


def _check_batch(batch: Batch, k: int):
    if batch.k != k:
        raise DimensionMismatchError(f"input batch has {batch.k} samples, expected k = {k}")


def ent_lpn(
    batch: Batch,
    p: NoiseDistribution,
    delta,
    rng: RandomStream,
    plan: Optional[ReductionPlan] = None,
) -> Batch:
    """Transform k samples of LPN_{n, 2^(k+2) delta}(sk) into one batch of LPN_{n,p}(sk)"""
    if plan is None:
        plan = ReductionPlan.build(p, delta)
    elif plan.p != p or plan.delta != delta:
        raise ParameterRangeError(
            f"plan was built for k = {plan.k}, delta = {plan.delta}; "
            f"called with k = {p.k}, delta = {delta}"
        )
    _check_batch(batch, plan.k)
    n = batch.n
    out_a, out_y = [], []

    for i, sample in enumerate(batch.samples, start=1):
        if i == 1:
            # a'_1 = a_1, y'_1 = y_1 + e'_1
            e1 = sample_bernoulli(plan.first_noise_float, rng)
            a, y = sample.u.value, sample.y ^ e1
        else:
            f = sample_affine_coeffs(plan.float_tables[i - 1], rng)
            a, y = affine_step(f.value, sample.u.value, sample.y, out_a, out_y)
        out_a.append(a)
        out_y.append(y)

    return Batch(tuple(LpnSample(BitVector(n, a), y) for a, y in zip(out_a, out_y)))


def _draw_indices(table: Sequence[float], rng: RandomStream, count: int) -> np.ndarray:
    cdf = np.cumsum(np.asarray(table, dtype=np.float64))
    draws = rng.random_array(count)
    indices = np.searchsorted(cdf, draws, side="right")
    return np.minimum(indices, len(table) - 1).astype(np.uint64)


def ent_lpn_arrays(
    u: np.ndarray,
    y: np.ndarray,
    plan: ReductionPlan,
    rng: RandomStream,
) -> Tuple[np.ndarray, np.ndarray]:
    """EntLPN over many batches at once.

    ``u`` (uint64) and ``y`` (uint8) have shape (count, k); row r holds the k
    input samples of batch r, u-vectors packed by their encoding.
    """
    if u.shape != y.shape or u.ndim != 2 or u.shape[1] != plan.k:
        raise DimensionMismatchError(
            f"expected input arrays of shape (count, {plan.k}), got {u.shape} and {y.shape}"
        )
    count = u.shape[0]
    out_u = np.empty_like(u, dtype=np.uint64)
    out_y = np.empty_like(y, dtype=np.uint8)

    e1 = (rng.random_array(count) < plan.first_noise_float).astype(np.uint8)
    out_u[:, 0] = u[:, 0]
    out_y[:, 0] = y[:, 0] ^ e1

    for i in range(2, plan.k + 1):
        f = _draw_indices(plan.float_tables[i - 1].table, rng, count)
        a_i = u[:, i - 1].astype(np.uint64)
        y_i = y[:, i - 1] ^ (f & np.uint64(1)).astype(np.uint8)
        for j in range(1, i):
            bit = ((f >> np.uint64(j)) & np.uint64(1)).astype(bool)
            a_i = a_i ^ np.where(bit, out_u[:, j - 1], np.uint64(0))
            y_i = y_i ^ (bit.astype(np.uint8) & out_y[:, j - 1])
        out_u[:, i - 1] = a_i
        out_y[:, i - 1] = y_i

    return out_u, out_y


def ent_lpn_exact_distribution(
    n: int,
    p: NoiseDistribution,
    delta,
    sk: SecretKey,
    steps: Optional[int] = None,
    input_bias=None,
) -> BatchLaw:
    """Exact law of EntLPN's output when fed iid LPN_{n, input_bias}(sk) samples.

    Every source of randomness is enumerated: input u-vectors, input noise,
    e'_1 and each F^(i), weighted by their exact laws. Each step only reads the
    outputs of earlier steps, so executions are merged by output prefix as they
    are pushed forward. ``steps`` truncates after that many steps;
    ``input_bias`` defaults to 2^(k+2) delta.
    """
    if sk.n != n:
        raise DimensionMismatchError(f"secret has length {sk.n}, expected n = {n}")
    plan = ReductionPlan.build(p, delta)
    if not plan.exact:
        raise ParameterRangeError("the exact oracle needs a rational p and delta")
    k = plan.k
    check_size_guard(n, k, ORACLE_SIZE_GUARD)
    steps = k if steps is None else steps
    if not 1 <= steps <= k:
        raise ParameterRangeError(f"steps = {steps} outside [1, {k}]")
    input_bias = plan.input_bias if input_bias is None else Fraction(input_bias)
    if not 0 <= input_bias <= Fraction(1, 2):
        raise ParameterRangeError(f"input bias {input_bias} outside [0, 1/2]")

    noise_one = Fraction(1, 2) - input_bias
    noise_law = ((0, 1 - noise_one), (1, noise_one))
    u_weight = Fraction(1, 1 << n)
    width = n + 1
    u_mask = (1 << n) - 1
    states = {0: Fraction(1)}

    for i in range(1, steps + 1):
        if i == 1:
            # F^(1) = (e'_1): the affine step with no earlier samples
            coefficients = ((0, 1 - plan.first_noise), (1, plan.first_noise))
        else:
            coefficients = tuple(
                (f, mass) for f, mass in enumerate(plan.coefficient_tables[i - 1].table) if mass
            )
        shift = width * (i - 1)
        pushed = defaultdict(Fraction)
        for prefix, weight in states.items():
            prev_a = [(prefix >> (width * j)) & u_mask for j in range(i - 1)]
            prev_y = [(prefix >> (width * j + n)) & 1 for j in range(i - 1)]
            for a_i in range(1 << n):
                inner = parity(a_i & sk.sk.value)
                for e_i, pe in noise_law:
                    w = weight * u_weight * pe
                    if not w:
                        continue
                    for f, pf in coefficients:
                        a, y = affine_step(f, a_i, inner ^ e_i, prev_a, prev_y)
                        pushed[prefix | ((a | (y << n)) << shift)] += w * pf
        states = pushed

    table = tuple(states.get(index, Fraction(0)) for index in range(1 << (width * steps)))
    return BatchLaw(n, steps, table)
