# utils/__init__.py
"""Utilities package initialization"""

from .helpers import atomic_write_text, canonical_json, file_digest, format_rational, parse_rational

__all__ = [
    'atomic_write_text',
    'canonical_json',
    'file_digest',
    'format_rational',
    'parse_rational'
]
