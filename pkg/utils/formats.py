# utils/formats.py
"""Readers and writers for every file the CLI consumes or produces.

Probabilities are stored as "num/den" strings; parsing errors surface as
FileFormatError with the offending path and line.
"""

import json
import logging
from typing import Any, Dict, Iterable, Iterator, List

from config.settings import FLOAT_MODE, RATIONAL_MODE
from core.distributions import NoiseDistribution
from core.gf2 import BitVector
from core.linearize import AffineCoeffDistribution, BiasFunction
from models.data_models import Batch, LpnSample, ReductionConfig, SecretKey
from models.exceptions import BatchLpnError, FileFormatError
from utils.helpers import atomic_write_lines, format_number, parse_rational, read_json, write_json

logger = logging.getLogger(__name__)


def _require(data: Any, keys: Iterable[str], where: str) -> Dict[str, Any]:
    if not isinstance(data, dict):
        raise FileFormatError(f"{where}: expected a JSON object")
    missing = [key for key in keys if key not in data]
    if missing:
        raise FileFormatError(f"{where}: missing field(s) {', '.join(missing)}")
    return data


def _int(data: Dict[str, Any], key: str, where: str) -> int:
    value = data[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise FileFormatError(f"{where}: \"{key}\" must be an integer, got {value!r}")
    return value


def _parse_table(entries: Any, mode: str, where: str) -> List:
    if not isinstance(entries, list):
        raise FileFormatError(f"{where}: \"table\" must be a list")
    if mode == FLOAT_MODE:
        try:
            return [float(x) for x in entries]
        except (TypeError, ValueError) as e:
            raise FileFormatError(f"{where}: non-numeric table entry ({e})") from e
    return [parse_rational(x) for x in entries]


def _bits(text: Any, where: str) -> BitVector:
    if not isinstance(text, str):
        raise FileFormatError(f"{where}: expected a bit string, got {text!r}")
    try:
        return BitVector.from_string(text)
    except BatchLpnError as e:
        raise FileFormatError(f"{where}: {e}") from e


# --- noise distributions -----------------------------------------------------

def parse_distribution(data: Any, where: str = "distribution") -> NoiseDistribution:
    data = _require(data, ("k", "table"), where)
    mode = data.get("mode", RATIONAL_MODE)
    if mode not in (RATIONAL_MODE, FLOAT_MODE):
        raise FileFormatError(f"{where}: unknown mode {mode!r}")
    k = _int(data, "k", where)
    table = _parse_table(data["table"], mode, where)
    return NoiseDistribution(k, tuple(table), mode)


def read_distribution(path: str) -> NoiseDistribution:
    return parse_distribution(read_json(path), path)


# --- secret keys ---------------------------------------------------------------

def read_secret_key(path: str) -> SecretKey:
    data = _require(read_json(path), ("n", "sk"), path)
    n = _int(data, "n", path)
    sk = _bits(data["sk"], path)
    if sk.length != n:
        raise FileFormatError(f"{path}: \"sk\" has {sk.length} bits but n = {n}")
    return SecretKey(sk)


# --- samples and batches (JSON Lines) ----------------------------------------------

def batch_to_line(batch: Batch) -> str:
    return json.dumps(batch.to_json(), separators=(",", ":")) + "\n"


def parse_batch(data: Any, where: str = "batch") -> Batch:
    data = _require(data, ("n", "k", "samples"), where)
    n = _int(data, "n", where)
    k = _int(data, "k", where)
    if not isinstance(data["samples"], list):
        raise FileFormatError(f"{where}: \"samples\" must be a list")
    samples = []
    for entry in data["samples"]:
        entry = _require(entry, ("u", "y"), where)
        u = _bits(entry["u"], where)
        if u.length != n:
            raise FileFormatError(f"{where}: u has {u.length} bits but n = {n}")
        y = entry["y"]
        if isinstance(y, bool) or y not in (0, 1):
            raise FileFormatError(f"{where}: y must be 0 or 1, got {y!r}")
        samples.append(LpnSample(u, int(y)))
    if len(samples) != k:
        raise FileFormatError(f"{where}: {len(samples)} samples but k = {k}")
    return Batch(tuple(samples))


def iter_batches(path: str) -> Iterator[Batch]:
    try:
        with open(path, "r", encoding="utf-8") as f:
            for number, line in enumerate(f, start=1):
                if not line.strip():
                    continue
                where = f"{path}:{number}"
                try:
                    data = json.loads(line)
                except json.JSONDecodeError as e:
                    raise FileFormatError(f"{where}: invalid JSON ({e})") from e
                yield parse_batch(data, where)
    except UnicodeDecodeError as e:
        raise FileFormatError(f"{path}: not valid UTF-8 ({e})") from e
    except OSError as e:
        raise FileFormatError(f"{path}: cannot read ({e})") from e


def read_samples(path: str) -> List[LpnSample]:
    """Every sample in a JSON Lines file, batches flattened in file order"""
    return [s for batch in iter_batches(path) for s in batch.samples]


def write_batches(path: str, batches: Iterable[Batch]):
    atomic_write_lines(path, (batch_to_line(b) for b in batches))


# --- bias functions and coefficient tables -------------------------------------

def read_bias_function(path: str) -> BiasFunction:
    data = _require(read_json(path), ("k", "table"), path)
    k = _int(data, "k", path)
    return BiasFunction(k, tuple(_parse_table(data["table"], RATIONAL_MODE, path)))


def write_coefficients(path: str, mu: AffineCoeffDistribution):
    write_json(path, mu.to_json())


# --- reduction descriptor ----------------------------------------------------------

def reduction_descriptor(config: ReductionConfig) -> Dict[str, Any]:
    return {
        "n": config.n,
        "k": config.k,
        "delta": format_number(config.delta),
        "p": config.p.to_json(),
    }
