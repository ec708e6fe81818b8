"""Exact rational arithmetic helpers.

All weights, costs, bids, budgets, rates and payments in this package are
exact rationals.  gmpy2.mpq is used when available (much faster), with
fractions.Fraction as a drop-in fallback.
"""

import math
from decimal import Decimal, localcontext
from fractions import Fraction
from math import lcm

try:
    from gmpy2 import mpq
except ImportError:  # pragma: no cover
    mpq = Fraction

ZERO = mpq(0)
ONE = mpq(1)


def rat(numerator, denominator=1):
    """Build an exact rational."""
    return mpq(numerator, denominator)


def parse_rational(value, field="value"):
    """Parse an int, or a string like ``"7"`` or ``"50/9"``, into a rational.

    Raises ValueError mentioning ``field`` on malformed input.  Floats are
    rejected on purpose: they would silently break exactness.
    """
    if isinstance(value, bool):
        raise ValueError(f"{field}: booleans are not rationals")
    if isinstance(value, int):
        return mpq(value)
    if isinstance(value, str):
        text = value.strip()
        try:
            if "/" in text:
                num, den = text.split("/")
                return mpq(int(num), int(den))
            return mpq(int(text))
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"{field}: cannot parse rational {value!r}") from exc
    raise ValueError(f"{field}: expected int or 'p/q' string, got {type(value).__name__}")


def format_rational(q):
    """Render a rational as ``"p/q"`` (or ``"p"`` when the denominator is 1)."""
    return str(mpq(q))


def to_decimal(q, significant_digits=12):
    """Display-only decimal rendering at a fixed number of significant digits."""
    q = mpq(q)
    with localcontext() as ctx:
        ctx.prec = significant_digits
        d = Decimal(int(q.numerator)) / Decimal(int(q.denominator))
    return str(d)


def common_denominator(values):
    """Least common multiple of the denominators of ``values`` (≥ 1)."""
    result = 1
    for v in values:
        result = lcm(result, int(mpq(v).denominator))
    return result


def rational_isqrt(q, digits=24):
    """Rational approximation of sqrt(q) accurate to ~``digits`` decimal digits."""
    q = mpq(q)
    if q < 0:
        raise ValueError("square root of a negative rational")
    scale = 10 ** digits
    n = math.isqrt(int(q.numerator * scale * scale // q.denominator))
    return mpq(n, scale)
