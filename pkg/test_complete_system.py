# test_complete_system.py
"""Complete system test for the batch-LPN reduction toolkit.

Runs under pytest, or directly as a script for a PASSED/FAILED summary.
"""

import itertools
import os
import sys
import tempfile
import time
from fractions import Fraction

sys.path.append(os.path.dirname(os.path.abspath(__file__)))

import pytest

from conftest import DATA_DIR, all_keys, random_in_range_q
from core.distributions import NoiseDistribution, convolve_bernoulli, pushforward_xor
from core.gf2 import BitVector, RandomStream
from core.linearize import apply_A_transpose, build_mu_star, perturbation
from core.lpn import residual_pushforward
from core.reduction import ent_lpn_exact_distribution
from core.verification_engine import VerificationEngine
from services.counterexample import counterexample_report
from services.lemma_checker import check_lemma2
from main import run

HALF = Fraction(1, 2)
SWEEP_SEED = 20240101


def check_exact_sweep() -> bool:
    """Every (n, k, sk) and SV source: TV exactly 0, and the halved-bias control detected"""
    print("\n Exact sweep over n in {1, 2}, k in {1, 2, 3}...")
    engine = VerificationEngine()
    start = time.perf_counter()
    frame = engine.exact_sweep(RandomStream(SWEEP_SEED))
    for row in engine.summarize_sweep(frame):
        print(f"   n = {row['n']}, k = {row['k']}: {row['passed']}/{row['instances']} exact, "
              f"{row['controls_detected']}/{row['controls_required']} controls detected")
    print(f"   {len(frame)} instances in {time.perf_counter() - start:.1f}s")
    ok = bool(frame["passed"].all())
    print(f" Exact correctness: {'SUCCESS' if ok else 'FAILED'}")
    controls = engine.sweep_passed(frame)
    print(f" Negative control: {'SUCCESS' if controls else 'FAILED'}")
    return ok and controls


def check_mu_star() -> bool:
    print("\n Linearization over 50 random q per k in 1..6...")
    rng = RandomStream(31337)
    for k in range(1, 7):
        for _ in range(50):
            q = random_in_range_q(k, rng)
            mu = build_mu_star(q)
            if min(mu.table) < 0 or sum(mu.table) != 1 or apply_A_transpose(mu) != q.table:
                print(f" mu* failed for k = {k}")
                return False
            deviation = max(abs(q.table[z] - HALF) for z in range(1, 1 << k))
            if max(abs(x) for x in perturbation(q)) > 2 * deviation:
                print(f" perturbation bound failed for k = {k}")
                return False
    print(" Linearization: SUCCESS")
    return True


def check_matrix_identities() -> bool:
    print("\n Matrix identities for k in 1..10...")
    reports = [check_lemma2(k) for k in range(1, 11)]
    for report in reports:
        print(f"   k = {report.k}: sigma_min = {report.sigma_min}, pass = {report.passed}")
    return all(r.passed for r in reports)


def check_bernoulli_convolution() -> bool:
    print("\n Bernoulli XOR convolution on the 33x33 dyadic grid...")
    grid = [Fraction(j, 64) for j in range(-16, 17)]
    for d1, d2 in itertools.product(grid, grid):
        xor_law = pushforward_xor(NoiseDistribution.product_bernoulli([d1, d2]), BitVector(2, 0b11))
        if xor_law.table[1] != HALF - convolve_bernoulli(d1, d2):
            print(f" mismatch at ({d1}, {d2})")
            return False
    print(" Convolution identity: SUCCESS")
    return True


def check_single_sample_closed_form() -> bool:
    print("\n k = 1 closed form...")
    delta = Fraction(1, 32)
    for delta_prime in (Fraction(0), Fraction(1, 128), Fraction(1, 64), delta):
        p = NoiseDistribution.bernoulli(HALF - delta_prime)
        for sk in all_keys(2):
            law = ent_lpn_exact_distribution(2, p, delta, sk)
            if residual_pushforward(law, sk) != p:
                print(f" residual law differs for delta' = {delta_prime}, sk = {sk.sk}")
                return False
        # bias 8 delta in, scaled by delta' / (16 delta) through the coefficient noise
        assert 2 * (8 * delta) * (delta_prime / (16 * delta)) == delta_prime
    print(" Closed form: SUCCESS")
    return True


def check_statistical_pipeline() -> bool:
    """Full CLI pipeline at n = 16, then a byte-exact replay"""
    print("\n Statistical pipeline at n = 16, k = 3, 10^6 batches...")
    with tempfile.TemporaryDirectory() as workdir:
        out = os.path.join(workdir, "statistical.json")
        start = time.perf_counter()
        code = run([
            "verify", "--mode", "statistical",
            "--p", os.path.join(DATA_DIR, "p_k3_sv.json"), "--delta", "1/128",
            "--sk", os.path.join(DATA_DIR, "sk_n16.json"),
            "--count", "1000000", "--seed", str(SWEEP_SEED), "--significance", "0.001",
            "--out", out,
        ])
        print(f"   verify exited with {code} after {time.perf_counter() - start:.1f}s")
        if code != 0:
            return False
        replayed = run(["replay", out + ".manifest.json"])
        print(f"   replay exited with {replayed}")
        return replayed == 0


def check_counterexample() -> bool:
    print("\n Shared-coin counterexample at delta = 1/64...")
    report = counterexample_report(Fraction(1, 64))
    print(f"   sv = {report.sv_param}, tv_xor = {report.tv_xor}, "
          f"implied product bias = {report.implied_min_product_bias}")
    return report.tv_xor == Fraction(1, 32) and report.implied_min_product_bias == Fraction(1, 8)


@pytest.mark.slow
def test_exact_sweep_and_negative_control():
    assert check_exact_sweep()


def test_mu_star_exactness():
    assert check_mu_star()


def test_matrix_identities():
    assert check_matrix_identities()


def test_bernoulli_convolution():
    assert check_bernoulli_convolution()


def test_single_sample_closed_form():
    assert check_single_sample_closed_form()


@pytest.mark.slow
def test_statistical_pipeline():
    assert check_statistical_pipeline()


def test_counterexample():
    assert check_counterexample()


def main():
    """Run all tests"""
    print(" Starting batch-LPN system tests")
    print("=" * 50)

    tests = [
        ("Exact sweep", check_exact_sweep),
        ("Linearization", check_mu_star),
        ("Matrix identities", check_matrix_identities),
        ("Bernoulli convolution", check_bernoulli_convolution),
        ("k = 1 closed form", check_single_sample_closed_form),
        ("Statistical pipeline", check_statistical_pipeline),
        ("Counterexample", check_counterexample),
    ]

    results = []
    for test_name, test_func in tests:
        try:
            results.append((test_name, test_func()))
        except Exception as e:
            print(f" {test_name} test crashed: {e}")
            results.append((test_name, False))

    print("\n" + "=" * 50)
    print(" TEST SUMMARY")
    print("=" * 50)

    passed = 0
    for test_name, result in results:
        print(f"{test_name}: {' PASSED' if result else ' FAILED'}")
        if result:
            passed += 1

    print(f"\nOverall: {passed}/{len(results)} tests passed")
    if passed != len(results):
        print(" Some tests failed. Check the errors above.")
        sys.exit(1)
    print(" ALL TESTS PASSED!")


if __name__ == "__main__":
    main()
