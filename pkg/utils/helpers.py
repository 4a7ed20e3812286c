# utils/helpers.py
"""Helper functions for number formatting, digests and safe file output"""

import hashlib
import json
import os
import tempfile
from fractions import Fraction
from typing import Any, Dict, Iterable, Union

from models.exceptions import FileFormatError

Number = Union[Fraction, float, int]


def format_rational(value: Number) -> str:
    """Render an exact value as "num/den", always with an explicit denominator"""
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def format_number(value: Number) -> Union[str, float]:
    """Rationals become "num/den" strings, floats stay floats"""
    if isinstance(value, float):
        return value
    return format_rational(value)


def parse_rational(text: Union[str, int]) -> Fraction:
    """Parse "num/den" (or an integer / decimal literal) into an exact Fraction"""
    if isinstance(text, bool):
        raise FileFormatError(f"not a rational: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise FileFormatError(f"expected a \"num/den\" string, got {text!r}")
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as e:
        raise FileFormatError(f"not a rational: {text!r}") from e


def canonical_json(data: Any) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def file_digest(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def output_digest(path: str) -> str:
    """Digest of an output file; JSON reports are hashed without their wall-clock runtime"""
    if path.endswith(".json"):
        try:
            data = read_json(path)
        except FileFormatError:
            return file_digest(path)
        if isinstance(data, dict) and "runtime" in data:
            data = {key: value for key, value in data.items() if key != "runtime"}
            return sha256_text(canonical_json(data))
    return file_digest(path)


def atomic_write_text(path: str, text: str):
    atomic_write_lines(path, [text])


def atomic_write_lines(path: str, chunks: Iterable[str]):
    """Write to a temp file beside ``path`` and rename it into place"""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            for chunk in chunks:
                f.write(chunk)
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise


def write_json(path: str, data: Dict[str, Any]):
    atomic_write_text(path, json.dumps(data, indent=2, sort_keys=True) + "\n")


def read_json(path: str) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise FileFormatError(f"{path}: invalid JSON ({e})") from e
    except UnicodeDecodeError as e:
        raise FileFormatError(f"{path}: not valid UTF-8 ({e})") from e
    except OSError as e:
        raise FileFormatError(f"{path}: cannot read ({e})") from e
