"""JSON helpers: exact rationals as "p/q" strings, deterministic dumps.

Every number that crosses a file boundary is an exact rational rendered as
a string; floats never appear in artifacts. The distinguished infinite
ratio serializes as the string "infinity".
"""

from __future__ import annotations

import json
import math
from fractions import Fraction
from pathlib import Path

from .errors import ConfigError


def format_rational(q) -> str:
    """Render a rational as "p/q" (always with an explicit denominator)."""
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(s) -> Fraction:
    """Parse "p/q", "p", or an int into a Fraction; floats are rejected."""
    if isinstance(s, bool) or isinstance(s, float):
        raise ConfigError(f"expected an exact rational, got {s!r}")
    if isinstance(s, int):
        return Fraction(s)
    try:
        return Fraction(str(s))
    except (ValueError, ZeroDivisionError) as e:
        raise ConfigError(f"not a rational: {s!r}") from e


def format_ratio(v) -> str:
    """Like format_rational but maps the infinite ratio to "infinity"."""
    if v == math.inf:
        return "infinity"
    return format_rational(v)


def parse_ratio(s):
    if s == "infinity":
        return math.inf
    return parse_rational(s)


def dump_json(obj, path=None) -> str:
    """Deterministic JSON text (sorted keys, trailing newline)."""
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


def load_json(path):
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError as e:
        raise ConfigError(f"no such file: {path}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"malformed JSON in {path}: {e}") from e
