"""Exact rational scalars and their canonical string form.

Scalars serialize as "p/q" in lowest terms with q > 0, or "p" when q == 1.
Both forms are accepted on input.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .errors import SchemaError

_SCALAR_RE = re.compile(r"^(-?\d+)(?:/([1-9]\d*))?$")


def parse_scalar(text, pointer: str = "") -> Fraction:
    """Parse "p" or "p/q" into a Fraction; ints pass through."""
    if isinstance(text, bool):
        raise SchemaError(pointer, f"expected scalar string, got {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, Fraction):
        return text
    if not isinstance(text, str):
        raise SchemaError(pointer, f"expected scalar string, got {type(text).__name__}")
    m = _SCALAR_RE.match(text.strip())
    if m is None:
        raise SchemaError(pointer, f"malformed scalar {text!r}")
    p = int(m.group(1))
    q = int(m.group(2)) if m.group(2) else 1
    return Fraction(p, q)


def format_scalar(x: Fraction) -> str:
    """Render a Fraction as "p/q", or "p" when the denominator is 1."""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"
