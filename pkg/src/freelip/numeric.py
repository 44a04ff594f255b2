"""Scalar handling shared by every module.

A space is either in ``float`` mode (Python floats) or ``exact`` mode
(:class:`fractions.Fraction`). Values created for a space are coerced into
its mode so that arithmetic never silently mixes the two.
"""

from __future__ import annotations

import math
import os
from decimal import Decimal
from fractions import Fraction
from numbers import Rational, Real
from typing import Union

Number = Union[float, Fraction]

FLOAT = "float"
EXACT = "exact"
MODES = (FLOAT, EXACT)


def default_mode() -> str:
    """Numeric mode taken from ``FREELIP_NUMERIC`` (``float`` when unset)."""
    mode = os.environ.get("FREELIP_NUMERIC", FLOAT).strip().lower() or FLOAT
    if mode not in MODES:
        raise ValueError(f"FREELIP_NUMERIC must be one of {MODES}, got {mode!r}")
    return mode


def to_exact(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not numeric values here")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, Decimal):
        if not value.is_finite():
            raise ValueError(f"non-finite value {value}")
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"cannot parse {value!r} as a rational") from exc
    if isinstance(value, Real):
        value = float(value)
        if not math.isfinite(value):
            raise ValueError(f"non-finite value {value}")
        return Fraction(value)
    raise TypeError(f"unsupported numeric value {value!r}")


def to_float(value) -> float:
    if isinstance(value, bool):
        raise TypeError("booleans are not numeric values here")
    if isinstance(value, str):
        value = Fraction(value.strip())
    out = float(value)
    if not math.isfinite(out):
        raise ValueError(f"non-finite value {value}")
    return out


def coerce(value, mode: str) -> Number:
    if mode == EXACT:
        return to_exact(value)
    if mode == FLOAT:
        return to_float(value)
    raise ValueError(f"unknown numeric mode {mode!r}")


def zero(mode: str) -> Number:
    return Fraction(0) if mode == EXACT else 0.0


def is_zero(value: Number, atol: float = 0.0) -> bool:
    if isinstance(value, Fraction) or atol == 0.0:
        return value == 0
    return abs(value) <= atol


def to_json(value):
    """JSON form of a scalar: floats stay floats, rationals become strings.

    Rationals with a terminating decimal expansion are written as decimal
    strings, anything else as ``"p/q"``.
    """
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return str(value.numerator)
        den = value.denominator
        twos = fives = 0
        while den % 2 == 0:
            den //= 2
            twos += 1
        while den % 5 == 0:
            den //= 5
            fives += 1
        if den != 1:
            return f"{value.numerator}/{value.denominator}"
        places = max(twos, fives)
        scaled = value * 10**places
        digits = str(abs(scaled.numerator)).rjust(places + 1, "0")
        sign = "-" if value < 0 else ""
        return f"{sign}{digits[:-places]}.{digits[-places:]}"
    if isinstance(value, int) and not isinstance(value, bool):
        return value
    return float(value)
