# core/verification_engine.py
"""Verification engine coordinating the exact, statistical and matrix checkers"""

import logging
import time
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Tuple

import pandas as pd

from config.settings import DEFAULT_SIGNIFICANCE
from core.distributions import NoiseDistribution
from core.gf2 import BitVector, RandomStream
from models.data_models import (
    CounterexampleReport,
    Lemma2Report,
    SecretKey,
    VerificationReport,
)
from services.counterexample import counterexample_report, exact_sqrt
from services.exact_checker import ExactChecker
from services.lemma_checker import LemmaChecker
from services.statistical_checker import StatisticalChecker

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = [
    "n", "k", "source", "sk", "delta", "tv", "passed",
    "control_tv", "control_required", "control_detected",
]


def sweep_delta(k: int) -> Fraction:
    """2^-(k+4): strictly inside the admissible range for batch size k"""
    return Fraction(1, 1 << (k + 4))


def sweep_sources(
    k: int,
    delta: Fraction,
    rng: RandomStream,
    random_sources: int,
) -> List[Tuple[str, NoiseDistribution]]:
    sources = [("uniform", NoiseDistribution.uniform(k))]
    if k >= 2:
        sources.append(("correlated", NoiseDistribution.correlated_with_first(k, delta)))
    if k == 2:
        # two-bit shared coin, SV parameter 2 s^2 = delta / 2
        s = exact_sqrt(delta / 4)
        if s is not None:
            sources.append(("shared-coin", NoiseDistribution.shared_coin(2, s)))
    for index in range(random_sources):
        sources.append((f"random-{index}", NoiseDistribution.random_sv_source(k, delta, rng)))
    return sources


class VerificationEngine:
    """Main verification engine that coordinates all checkers"""

    def __init__(self, significance: float = DEFAULT_SIGNIFICANCE):
        self.exact_checker = ExactChecker()
        self.statistical_checker = StatisticalChecker(significance)
        self.lemma_checker = LemmaChecker()

    def run_exact(self, n: int, p: NoiseDistribution, delta, sk: SecretKey, **options) -> VerificationReport:
        return self.exact_checker.check(n, p, delta, sk, **options)

    def run_statistical(
        self,
        n: int,
        p: NoiseDistribution,
        delta,
        sk: SecretKey,
        num_batches: int,
        rng: RandomStream,
        target: Optional[NoiseDistribution] = None,
    ) -> VerificationReport:
        return self.statistical_checker.check(n, p, delta, sk, num_batches, rng, target=target)

    def run_lemma2(self, k: int) -> Lemma2Report:
        return self.lemma_checker.check(k)

    def run_counterexample(self, delta) -> CounterexampleReport:
        return counterexample_report(delta)

    def exact_sweep(
        self,
        rng: RandomStream,
        ns: Iterable[int] = (1, 2),
        ks: Iterable[int] = (1, 2, 3),
        random_sources: int = 20,
        with_control: bool = True,
    ) -> pd.DataFrame:
        """Exact check over every (n, k, sk) and a family of SV sources.

        Each row also carries the negative control: the same instance fed
        inputs at bias 2^(k+1) delta, which must give TV > 0 whenever p is
        not uniform.
        """
        start = time.perf_counter()
        rows = []
        for n in ns:
            for k in ks:
                delta = sweep_delta(k)
                for name, p in sweep_sources(k, delta, rng, random_sources):
                    uniform = p == NoiseDistribution.uniform(k)
                    for value in range(1 << n):
                        sk = SecretKey(BitVector(n, value))
                        report = self.exact_checker.check(n, p, delta, sk)
                        row = {
                            "n": n, "k": k, "source": name, "sk": str(sk.sk),
                            "delta": str(delta), "tv": report.tv_distance, "passed": report.passed,
                            "control_tv": None, "control_required": not uniform,
                            "control_detected": None,
                        }
                        if with_control:
                            control = self.exact_checker.check(
                                n, p, delta, sk, input_bias=(1 << (k + 1)) * delta
                            )
                            row["control_tv"] = control.tv_distance
                            row["control_detected"] = control.tv_distance > 0
                        rows.append(row)
        frame = pd.DataFrame(rows, columns=SWEEP_COLUMNS)
        logger.info(
            f"exact sweep: {len(frame)} instances in {time.perf_counter() - start:.1f}s, "
            f"{int((~frame['passed']).sum())} failures"
        )
        return frame

    @staticmethod
    def sweep_passed(frame: pd.DataFrame) -> bool:
        """Every instance exact, and every required control detected"""
        if not frame["passed"].all():
            return False
        if frame["control_detected"].isna().all():
            return True
        required = frame[frame["control_required"]]
        return bool(required["control_detected"].eq(True).all())

    @staticmethod
    def summarize_sweep(frame: pd.DataFrame) -> List[Dict]:
        """Per-(n, k) counts of instances, failures and detected controls"""
        frame = frame.assign(
            detected=frame["control_required"] & frame["control_detected"].eq(True)
        )
        summary = frame.groupby(["n", "k"]).agg(
            instances=("passed", "size"),
            passed=("passed", "sum"),
            controls_required=("control_required", "sum"),
            controls_detected=("detected", "sum"),
        ).reset_index()
        return [
            {key: int(value) for key, value in record.items()}
            for record in summary.to_dict(orient="records")
        ]

    def self_test(self) -> Dict[str, Dict]:
        """Quick check of every checker on a tiny instance"""
        results = {}
        rng = RandomStream(0)
        checks = {
            "exact": lambda: self.run_exact(
                1, NoiseDistribution.product_bernoulli([Fraction(1, 64)]),
                Fraction(1, 32), SecretKey(BitVector(1, 1)),
            ).passed,
            "statistical": lambda: self.run_statistical(
                4, NoiseDistribution.uniform(2), Fraction(1, 64),
                SecretKey(BitVector(4, 5)), 2000, rng,
            ).passed,
            "lemma2": lambda: self.run_lemma2(3).passed,
            "counterexample": lambda: self.run_counterexample(Fraction(1, 64)).tv_xor == Fraction(1, 32),
        }
        for name, check in checks.items():
            try:
                ok = check()
                results[name] = {"status": "success" if ok else "failed"}
            except Exception as e:
                logger.error(f"self test {name} raised: {e}")
                results[name] = {"status": "error", "details": str(e)}
        return results
