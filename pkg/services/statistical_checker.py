# services/statistical_checker.py
"""Chi-square check of the vectorised EntLPN pipeline at realistic dimensions"""

import logging
import time
from typing import Optional

import numpy as np
import pandas as pd
from scipy.stats import chisquare

from config.settings import CHI_SQUARE_MIN_EXPECTED, DEFAULT_SIGNIFICANCE, UNIFORMITY_LOW_BITS
from core.distributions import NoiseDistribution
from core.gf2 import RandomStream
from core.lpn import residual_arrays, sample_lpn_arrays
from core.reduction import ReductionPlan, ent_lpn_arrays, validate_config
from models.data_models import ChiSquareResult, ReductionConfig, SecretKey, VerificationReport
from models.exceptions import DimensionMismatchError, InsufficientSamplesError, ParameterRangeError

logger = logging.getLogger(__name__)


def histogram(values: np.ndarray, cells: int) -> np.ndarray:
    """Counts of each value in [0, cells), zero-filled"""
    counts = pd.Series(values).value_counts().sort_index()
    return counts.reindex(np.arange(cells), fill_value=0).astype(np.int64).to_numpy()


class StatisticalChecker:
    """Runs EntLPN on fresh LPN samples and tests residuals and u-vectors by Pearson chi-square"""

    def __init__(
        self,
        significance: float = DEFAULT_SIGNIFICANCE,
        min_expected: float = CHI_SQUARE_MIN_EXPECTED,
        low_bits: int = UNIFORMITY_LOW_BITS,
    ):
        if not 0 < significance < 1:
            raise ParameterRangeError(f"significance {significance} outside (0, 1)")
        self.significance = significance
        self.min_expected = min_expected
        self.low_bits = low_bits

    def check(
        self,
        n: int,
        p: NoiseDistribution,
        delta,
        sk: SecretKey,
        num_batches: int,
        rng: RandomStream,
        target: Optional[NoiseDistribution] = None,
    ) -> VerificationReport:
        """``target`` replaces p as the residual hypothesis (power checks)"""
        if sk.n != n:
            raise DimensionMismatchError(f"secret has length {sk.n}, expected n = {n}")
        target = target or p
        if target.k != p.k:
            raise DimensionMismatchError(f"target is over F_2^{target.k}, expected k = {p.k}")

        k = p.k
        config = ReductionConfig(n, k, delta, p)
        validate_config(config)
        plan = ReductionPlan.build(p, delta)
        target_probs = np.array([float(x) for x in target.table])
        uniform_cells = 1 << min(n, self.low_bits)
        self._check_sample_size(num_batches, target_probs, uniform_cells)
        threshold = self.significance / (k + 1)

        logger.info(
            f"statistical check: n = {n}, k = {k}, delta = {delta}, "
            f"{num_batches} batches, seed = {rng.seed}"
        )
        start = time.perf_counter()

        u, y = sample_lpn_arrays(n, float(plan.input_bias), sk, num_batches * k, rng)
        out_u, out_y = ent_lpn_arrays(u.reshape(num_batches, k), y.reshape(num_batches, k), plan, rng)

        bits = residual_arrays(out_u, out_y, sk).astype(np.int64)
        codes = (bits << np.arange(k, dtype=np.int64)).sum(axis=1)
        observed = histogram(codes, 1 << k)

        results = [self._residual_fit(observed, target_probs, num_batches, threshold)]
        mask = np.uint64(uniform_cells - 1)
        for i in range(k):
            low = (out_u[:, i] & mask).astype(np.int64)
            results.append(self._uniformity(f"u_{i + 1}", histogram(low, uniform_cells), threshold))

        tv = 0.5 * float(np.abs(observed / num_batches - target_probs).sum())
        report = VerificationReport(
            instance=config.descriptor(),
            mode="statistical",
            tv_distance=tv,
            passed=all(r.passed for r in results),
            runtime=time.perf_counter() - start,
            chi_square=results,
            significance=self.significance,
            seed=rng.seed,
        )
        if report.passed:
            logger.info(f"statistical check passed in {report.runtime:.2f}s")
        else:
            failed = [r.name for r in results if not r.passed]
            logger.error(f"statistical check failed: {failed}")
        return report

    def _check_sample_size(self, num_batches: int, target_probs: np.ndarray, uniform_cells: int):
        if num_batches < 1:
            raise InsufficientSamplesError(f"need at least one batch, got {num_batches}")
        smallest = target_probs[target_probs > 0].min()
        if num_batches * smallest < self.min_expected:
            raise InsufficientSamplesError(
                f"{num_batches} batches give an expected residual count of "
                f"{num_batches * smallest:.3g} < {self.min_expected}"
            )
        if num_batches / uniform_cells < self.min_expected:
            raise InsufficientSamplesError(
                f"{num_batches} batches give an expected u-cell count of "
                f"{num_batches / uniform_cells:.3g} < {self.min_expected}"
            )

    @staticmethod
    def _residual_fit(
        observed: np.ndarray,
        target_probs: np.ndarray,
        num_batches: int,
        threshold: float,
    ) -> ChiSquareResult:
        support = target_probs > 0
        cells = int(support.sum())
        if observed[~support].any():
            # mass where the target has none: the fit fails outright
            return ChiSquareResult("residuals", float("inf"), cells - 1, 0.0, cells, False)
        expected = target_probs[support] * num_batches
        expected *= observed[support].sum() / expected.sum()
        statistic, p_value = chisquare(f_obs=observed[support], f_exp=expected)
        return ChiSquareResult(
            "residuals", float(statistic), cells - 1, float(p_value), cells, bool(p_value > threshold)
        )

    @staticmethod
    def _uniformity(name: str, observed: np.ndarray, threshold: float) -> ChiSquareResult:
        statistic, p_value = chisquare(f_obs=observed)
        cells = len(observed)
        return ChiSquareResult(
            name, float(statistic), cells - 1, float(p_value), cells, bool(p_value > threshold)
        )


def check_reduction_statistical(
    n: int,
    p: NoiseDistribution,
    delta,
    sk: SecretKey,
    num_batches: int,
    significance: float,
    rng: RandomStream,
    target: Optional[NoiseDistribution] = None,
) -> VerificationReport:
    checker = StatisticalChecker(significance)
    return checker.check(n, p, delta, sk, num_batches, rng, target=target)
