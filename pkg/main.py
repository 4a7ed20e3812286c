# main.py
"""Command-line interface for the batch-LPN reduction toolkit"""

import argparse
import json
import logging
import os
import sys
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from config.settings import (
    DEFAULT_NUM_BATCHES,
    DEFAULT_SEED,
    DEFAULT_SIGNIFICANCE,
    EXIT_FAIL,
    EXIT_PASS,
    EXIT_PRECONDITION,
    LOGGING_FORMAT,
    LOGGING_LEVEL,
    MANIFEST_SUFFIX,
    MAX_PACKED_DIMENSION,
    TOOL_NAME,
    TOOL_VERSION,
)
from core.gf2 import BitVector, RandomStream
from core.linearize import apply_A_transpose, build_mu_star
from core.lpn import sample_batch_lpn, sample_lpn, sample_lpn_arrays
from core.reduction import ReductionPlan, ent_lpn, ent_lpn_arrays, validate_config
from core.verification_engine import VerificationEngine
from models.data_models import Batch, LpnSample, ReductionConfig, RunManifest
from models.exceptions import BatchLpnError, DimensionMismatchError, FileFormatError, ParameterRangeError
from utils.formats import (
    read_bias_function,
    read_distribution,
    read_samples,
    read_secret_key,
    reduction_descriptor,
    write_batches,
    write_coefficients,
)
from utils.helpers import format_number, output_digest, parse_rational, read_json, write_json

logger = logging.getLogger(__name__)

# (exit code, {input path: role}, [output paths], extra manifest parameters)
CommandResult = Tuple[int, Dict[str, str], List[str], Dict]


def configure_logging(verbose: bool = False):
    logging.basicConfig(
        level=logging.DEBUG if verbose else getattr(logging, LOGGING_LEVEL.upper(), logging.INFO),
        format=LOGGING_FORMAT,
    )


def rational(text: str) -> Fraction:
    return parse_rational(text)


def _require(args: argparse.Namespace, *names: str):
    for name in names:
        if getattr(args, name, None) is None:
            flag = "--" + name.replace("_", "-")
            raise ParameterRangeError(f"{flag} is required for {args.command}"
                                      + (f" --mode {args.mode}" if getattr(args, "mode", None) else ""))


def _emit(data: Dict, out: Optional[str]) -> List[str]:
    if out:
        write_json(out, data)
        return [out]
    print(json.dumps(data, indent=2, sort_keys=True))
    return []


# --- sample ------------------------------------------------------------------------

def cmd_sample(args: argparse.Namespace) -> CommandResult:
    _require(args, "sk", "out")
    sk = read_secret_key(args.sk)
    n = args.n if args.n is not None else sk.n
    if sk.n != n:
        raise DimensionMismatchError(f"--n {n} disagrees with the {sk.n}-bit secret in {args.sk}")
    if args.count < 0:
        raise ParameterRangeError(f"--count must be non-negative, got {args.count}")
    rng = RandomStream(args.seed)
    inputs = {args.sk: "sk"}

    if args.mode == "standard":
        _require(args, "delta")
        if args.count and n <= MAX_PACKED_DIMENSION:
            u, y = sample_lpn_arrays(n, float(args.delta), sk, args.count, rng)
            batches = (
                Batch((LpnSample(BitVector(n, int(a)), int(b)),)) for a, b in zip(u, y)
            )
        else:
            batches = (Batch((sample_lpn(n, args.delta, sk, rng),)) for _ in range(args.count))
    else:
        _require(args, "p")
        p = read_distribution(args.p)
        if args.k is not None and args.k != p.k:
            raise DimensionMismatchError(f"--k {args.k} disagrees with p over F_2^{p.k}")
        inputs[args.p] = "p"
        batches = (sample_batch_lpn(n, p, sk, rng) for _ in range(args.count))

    write_batches(args.out, batches)
    logger.info(f"wrote {args.count} {args.mode} line(s) to {args.out}")
    return EXIT_PASS, inputs, [args.out], {}


# --- reduce ------------------------------------------------------------------------

def cmd_reduce(args: argparse.Namespace) -> CommandResult:
    _require(args, "p", "delta", "input", "out")
    p = read_distribution(args.p)
    samples = read_samples(args.input)
    k = p.k
    if len(samples) % k:
        raise ParameterRangeError(
            f"{args.input} holds {len(samples)} samples, not a multiple of k = {k}"
        )
    dims = {s.n for s in samples}
    if len(dims) > 1:
        raise DimensionMismatchError(f"{args.input} mixes dimensions {sorted(dims)}")
    n = dims.pop() if dims else 0
    m = len(samples) // k
    config = ReductionConfig(n, k, args.delta, p)
    if m:
        validate_config(config)

    plan = ReductionPlan.build(p, args.delta)
    rng = RandomStream(args.seed)
    logger.info(f"reducing {m} batch(es): n = {n}, k = {k}, delta = {args.delta}")

    if m and n <= MAX_PACKED_DIMENSION:
        u = np.array([s.u.value for s in samples], dtype=np.uint64).reshape(m, k)
        y = np.array([s.y for s in samples], dtype=np.uint8).reshape(m, k)
        out_u, out_y = ent_lpn_arrays(u, y, plan, rng)
        batches = (
            Batch(tuple(LpnSample(BitVector(n, int(a)), int(b)) for a, b in zip(row_u, row_y)))
            for row_u, row_y in zip(out_u, out_y)
        )
    else:
        batches = (
            ent_lpn(Batch(tuple(samples[r * k:(r + 1) * k])), p, args.delta, rng, plan=plan)
            for r in range(m)
        )

    write_batches(args.out, batches)
    descriptor = reduction_descriptor(config) if m else {}
    return EXIT_PASS, {args.p: "p", args.input: "samples"}, [args.out], {"reduction": descriptor}


# --- mu-star -------------------------------------------------------------------------

def cmd_mu_star(args: argparse.Namespace) -> CommandResult:
    _require(args, "q", "out")
    q = read_bias_function(args.q)
    mu = build_mu_star(q)
    write_coefficients(args.out, mu)
    exact = apply_A_transpose(mu) == q.table
    print(f"A^T mu = q: {'exact' if exact else 'MISMATCH'}")
    return (EXIT_PASS if exact else EXIT_FAIL), {args.q: "q"}, [args.out], {}


# --- verify ----------------------------------------------------------------------------

def cmd_verify(args: argparse.Namespace) -> CommandResult:
    engine = VerificationEngine(args.significance)
    inputs: Dict[str, str] = {}

    if args.mode in ("exact", "statistical"):
        _require(args, "p", "delta", "sk")
        p = read_distribution(args.p)
        sk = read_secret_key(args.sk)
        inputs.update({args.p: "p", args.sk: "sk"})
        n = args.n if args.n is not None else sk.n
        if args.mode == "exact":
            report = engine.run_exact(n, p, args.delta, sk)
        else:
            target = None
            if args.target:
                target = read_distribution(args.target)
                inputs[args.target] = "target"
            count = args.count if args.count is not None else DEFAULT_NUM_BATCHES
            report = engine.run_statistical(n, p, args.delta, sk, count, RandomStream(args.seed), target)
        data, passed = report.to_json(), report.passed
        print(f"{args.mode}: tv = {format_number(report.tv_distance)}, pass = {passed}")

    elif args.mode == "lemma2":
        _require(args, "k")
        report = engine.run_lemma2(args.k)
        data, passed = report.to_json(), report.passed
        print(f"lemma2: k = {args.k}, sigma_min = {report.sigma_min}, pass = {passed}")

    elif args.mode == "counterexample":
        _require(args, "delta")
        report = engine.run_counterexample(args.delta)
        data, passed = report.to_json(), True
        print(f"counterexample: tv_xor = {data['tv_xor']}, "
              f"implied_min_product_bias = {data['implied_min_product_bias']}")

    else:
        frame = engine.exact_sweep(RandomStream(args.seed))
        passed = engine.sweep_passed(frame)
        data = {
            "mode": "sweep",
            "seed": args.seed,
            "summary": engine.summarize_sweep(frame),
            "failures": frame[~frame["passed"]][["n", "k", "source", "sk"]].to_dict(orient="records"),
            "pass": passed,
        }
        print(f"sweep: {len(frame)} instances, pass = {passed}")

    outputs = _emit(data, args.out)
    return (EXIT_PASS if passed else EXIT_FAIL), inputs, outputs, {}


# --- replay -----------------------------------------------------------------------------

def cmd_replay(args: argparse.Namespace) -> CommandResult:
    data = read_json(args.manifest)
    if not isinstance(data, dict) or "argv" not in data:
        raise FileFormatError(f"{args.manifest}: not a run manifest")
    if data.get("tool_version") != TOOL_VERSION:
        logger.warning(f"manifest written by {TOOL_NAME} {data.get('tool_version')}, running {TOOL_VERSION}")

    for path, digest in data.get("inputs", {}).items():
        if not os.path.exists(path) or output_digest(path) != digest:
            raise FileFormatError(f"input {path} is missing or differs from the manifest")

    code = run(data["argv"])
    mismatched = [
        path for path, digest in data.get("outputs", {}).items()
        if not os.path.exists(path) or output_digest(path) != digest
    ]
    for path in mismatched:
        logger.error(f"replayed output {path} differs from the manifest")
    print(f"replay: {len(data.get('outputs', {})) - len(mismatched)} of "
          f"{len(data.get('outputs', {}))} output(s) reproduced")
    if code == EXIT_PRECONDITION:
        return code, {}, [], {}
    return (EXIT_FAIL if mismatched else EXIT_PASS), {}, [], {}


# --- wiring -------------------------------------------------------------------------------

COMMANDS: Dict[str, Callable[[argparse.Namespace], CommandResult]] = {
    "sample": cmd_sample,
    "reduce": cmd_reduce,
    "mu-star": cmd_mu_star,
    "verify": cmd_verify,
    "replay": cmd_replay,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=TOOL_NAME,
        description="Batch LPN with Santha-Vazirani noise: samplers, the EntLPN reduction and its verification",
    )
    parser.add_argument("--version", action="version", version=f"{TOOL_NAME} {TOOL_VERSION}")
    parser.add_argument("--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    sample = sub.add_parser(
        "sample",
        help="draw LPN_{n,delta}(sk) samples or LPN_{n,p}(sk) batches",
        description="Standard mode draws (u, <u, sk> + e) with e ~ Ber(1/2 - delta); "
                    "batch mode draws k samples whose noise vector is jointly distributed as p.",
    )
    sample.add_argument("--mode", choices=("standard", "batch"), default="standard")
    sample.add_argument("--n", type=int)
    sample.add_argument("--k", type=int, help="batch size (must match --p)")
    sample.add_argument("--delta", type=rational, help="bias as NUM/DEN (standard mode)")
    sample.add_argument("--p", help="noise distribution file (batch mode)")
    sample.add_argument("--sk", help="secret-key file")
    sample.add_argument("--count", type=int, default=1)
    sample.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sample.add_argument("--out", help="JSON Lines output file")

    reduce = sub.add_parser(
        "reduce",
        help="run EntLPN: k standard LPN samples in, one batch with SV noise p out",
        description="EntLPN consumes k samples of LPN_{n, 2^(k+2) delta}(sk) per output batch and "
                    "emits batches of LPN_{n,p}(sk) for a delta-SV source p, never reading sk.",
    )
    reduce.add_argument("--p", help="delta-SV noise distribution file")
    reduce.add_argument("--delta", type=rational, help="SV parameter as NUM/DEN, below 2^-(k+3)")
    reduce.add_argument("--in", dest="input", help="JSON Lines file of standard LPN samples")
    reduce.add_argument("--seed", type=int, default=DEFAULT_SEED)
    reduce.add_argument("--out", help="JSON Lines output file")

    mu_star = sub.add_parser(
        "mu-star",
        help="linearize a bias function q into the coefficient distribution mu*",
        description="Builds mu* over affine functions f_0 + <f, z> with Pr[f(z) = 1] = q(z) "
                    "for q within 2^-(k+3) of 1/2, and checks A^T mu* = q exactly.",
    )
    mu_star.add_argument("--q", help="bias function file")
    mu_star.add_argument("--out", help="coefficient table output file")

    verify = sub.add_parser(
        "verify",
        help="check EntLPN exactly or statistically, certify the B identities, "
             "or report the shared-coin counterexample",
        description="exact: TV between the EntLPN output law and LPN_{n,p}(sk); statistical: chi-square "
                    "fit of residuals and u-uniformity; lemma2: B 1, B^2 and B^-1 identities behind the "
                    "singular-value bound; counterexample: two-bit shared-coin source; sweep: exact "
                    "check over small (n, k) with a negative control.",
    )
    verify.add_argument(
        "--mode", choices=("exact", "statistical", "lemma2", "counterexample", "sweep"), default="exact"
    )
    verify.add_argument("--n", type=int)
    verify.add_argument("--k", type=int)
    verify.add_argument("--delta", type=rational)
    verify.add_argument("--p", help="noise distribution file")
    verify.add_argument("--target", help="alternative residual hypothesis (statistical mode)")
    verify.add_argument("--sk", help="secret-key file")
    verify.add_argument("--count", type=int, help="number of batches (statistical mode)")
    verify.add_argument("--seed", type=int, default=DEFAULT_SEED)
    verify.add_argument("--significance", type=float, default=DEFAULT_SIGNIFICANCE)
    verify.add_argument("--out", help="JSON report file (stdout when omitted)")

    replay = sub.add_parser(
        "replay",
        help="rerun the command recorded in a run manifest and compare outputs",
    )
    replay.add_argument("manifest")
    return parser


def _manifest_parameters(args: argparse.Namespace) -> Dict:
    params = {}
    for key, value in sorted(vars(args).items()):
        if isinstance(value, Fraction):
            value = format_number(value)
        params[key] = value
    return params


def write_manifest(
    args: argparse.Namespace,
    argv: List[str],
    inputs: Dict[str, str],
    outputs: List[str],
    extra: Dict,
):
    manifest = RunManifest(
        command=args.command,
        argv=list(argv),
        parameters={**_manifest_parameters(args), **extra},
        seed=getattr(args, "seed", None),
        tool_version=TOOL_VERSION,
        inputs={path: output_digest(path) for path in inputs},
        outputs={path: output_digest(path) for path in outputs},
    )
    for path in outputs:
        write_json(path + MANIFEST_SUFFIX, manifest.to_json())


def run(argv: List[str]) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose)
    logger.info(f"{TOOL_NAME} {args.command} started")

    try:
        code, inputs, outputs, extra = COMMANDS[args.command](args)
    except BatchLpnError as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PRECONDITION

    if outputs:
        write_manifest(args, argv, inputs, outputs, extra)
    logger.info(f"{TOOL_NAME} {args.command} finished with exit code {code}")
    return code


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
