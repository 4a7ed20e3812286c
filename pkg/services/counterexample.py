# services/counterexample.py
"""Statistics of the two-bit shared-coin source.

Z = (e_1 + b, e_2 + b) with e_i ~ Ber(1/2 - sqrt(delta)) and a fair coin b is
O(delta)-SV, yet Z_1 + Z_2 = e_1 + e_2 is 2 delta far from uniform. Product
noise matching that XOR statistic needs per-bit bias sqrt(delta).
"""

import logging
import math
from fractions import Fraction
from typing import Optional

from config.settings import FLOAT_MODE, RATIONAL_MODE
from core.distributions import NoiseDistribution, pushforward_xor, sv_parameter, tv_distance
from core.gf2 import BitVector
from models.data_models import CounterexampleReport
from models.exceptions import ParameterRangeError

logger = logging.getLogger(__name__)


def exact_sqrt(value: Fraction) -> Optional[Fraction]:
    """Rational square root of a non-negative Fraction, or None when irrational"""
    num, den = value.numerator, value.denominator
    root_num, root_den = math.isqrt(num), math.isqrt(den)
    if root_num * root_num == num and root_den * root_den == den:
        return Fraction(root_num, root_den)
    return None


def _sqrt(value, mode: str):
    if mode == RATIONAL_MODE:
        root = exact_sqrt(Fraction(value))
        if root is not None:
            return root
    return math.sqrt(float(value))


def counterexample_report(delta) -> CounterexampleReport:
    delta = Fraction(delta)
    if not 0 <= delta < Fraction(1, 16):
        raise ParameterRangeError(f"delta = {delta} outside [0, 1/16)")

    s = exact_sqrt(delta)
    mode = RATIONAL_MODE
    if s is None:
        logger.warning(f"sqrt({delta}) is irrational; reporting float statistics")
        mode, s = FLOAT_MODE, math.sqrt(delta)

    p = NoiseDistribution.shared_coin(2, s, mode)
    sv = sv_parameter(p)
    xor_law = pushforward_xor(p, BitVector(2, 0b11))
    tv_xor = tv_distance(xor_law, NoiseDistribution.uniform(1, mode))
    implied = _sqrt(tv_xor / 2, mode)

    report = CounterexampleReport(
        delta=delta if mode == RATIONAL_MODE else float(delta),
        sv_param=sv,
        tv_xor=tv_xor,
        implied_min_product_bias=implied,
        exact=mode == RATIONAL_MODE and not isinstance(implied, float),
    )
    logger.info(f"shared-coin source at delta = {delta}: sv = {sv}, tv_xor = {tv_xor}")
    return report
