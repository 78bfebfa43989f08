import math
import re
from decimal import Decimal, InvalidOperation
from fractions import Fraction

from src.errors import DatasetParseError

_RATIONAL = re.compile(r"^\s*([+-]?\d+)\s*/\s*(\d+)\s*$")


def parse_rational(value):
    """Exact rational from "a/b", a decimal string, an int or a Fraction.

    Floats are read through their shortest repr so 0.1 becomes 1/10.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise DatasetParseError(f"not a number: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise DatasetParseError(f"not a finite number: {value!r}")
        return Fraction(repr(value))
    if not isinstance(value, str):
        raise DatasetParseError(f"not a number: {value!r}")

    match = _RATIONAL.match(value)
    if match:
        denominator = int(match.group(2))
        if denominator == 0:
            raise DatasetParseError(f"zero denominator in {value!r}")
        return Fraction(int(match.group(1)), denominator)
    try:
        number = Decimal(value.strip())
    except InvalidOperation:
        raise DatasetParseError(f"cannot parse {value!r} as a rational") from None
    if not number.is_finite():
        raise DatasetParseError(f"not a finite number: {value!r}")
    return Fraction(number)


def parse_rational_list(text):
    return [parse_rational(part) for part in text.split(",") if part.strip()]


def format_rational(value):
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def format_ratio(value):
    # always "a/b", the certificate format
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"
