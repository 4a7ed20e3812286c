# services/exact_checker.py
"""Exact distributional check of EntLPN against the batch-LPN target law"""

import logging
import time
from typing import Optional

from config.settings import RATIONAL_MODE
from core.distributions import NoiseDistribution, marginal_prefix, tv_distance
from core.lpn import exact_target_distribution
from core.reduction import ent_lpn_exact_distribution, validate_config
from models.data_models import ReductionConfig, SecretKey, VerificationReport
from utils.helpers import format_rational

logger = logging.getLogger(__name__)


class ExactChecker:
    """Compares the exact EntLPN output law with LPN_{n,p}(sk), zero tolerance"""

    def check(
        self,
        n: int,
        p: NoiseDistribution,
        delta,
        sk: SecretKey,
        input_bias=None,
        steps: Optional[int] = None,
    ) -> VerificationReport:
        if p.mode != RATIONAL_MODE:
            logger.warning("exact check requested for a float-mode p; results are not certified")
        start = time.perf_counter()
        config = ReductionConfig(n, p.k, delta, p)
        validate_config(config)

        output_law = ent_lpn_exact_distribution(n, p, delta, sk, steps=steps, input_bias=input_bias)
        target_p = p if steps is None or steps == p.k else marginal_prefix(p, steps)
        target_law = exact_target_distribution(n, target_p, sk)
        tv = tv_distance(output_law, target_law)

        instance = config.descriptor(sk)
        if input_bias is not None:
            instance["input_bias"] = format_rational(input_bias)
        if steps is not None:
            instance["steps"] = steps

        report = VerificationReport(
            instance=instance,
            mode="exact",
            tv_distance=tv,
            passed=tv == 0,
            runtime=time.perf_counter() - start,
        )
        if report.passed:
            logger.info(f"exact check passed for n = {n}, k = {p.k}, sk = {sk.sk} ({report.runtime:.2f}s)")
        else:
            logger.error(f"exact check failed for n = {n}, k = {p.k}, sk = {sk.sk}: TV = {tv}")
        return report


def check_reduction_exact(
    n: int,
    p: NoiseDistribution,
    delta,
    sk: SecretKey,
    input_bias=None,
    steps: Optional[int] = None,
) -> VerificationReport:
    return ExactChecker().check(n, p, delta, sk, input_bias=input_bias, steps=steps)
