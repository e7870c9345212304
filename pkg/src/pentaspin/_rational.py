"""Arbitrary-precision rational backend.

Uses gmpy2.mpq when available (markedly faster pivoting), falling back to
fractions.Fraction.  Both expose .numerator/.denominator and full arithmetic,
so the rest of the package is backend-agnostic.  Floats convert exactly
(binary expansion), decimal strings convert exactly in base 10.
"""

from fractions import Fraction

from .errors import ValidationError

try:
    from gmpy2 import mpq as _mpq

    QQ = _mpq
    RATIONAL_BACKEND = "gmpy2"
except ImportError:
    QQ = Fraction
    RATIONAL_BACKEND = "fractions"

__all__ = ["QQ", "RATIONAL_BACKEND", "qq", "qq_str", "qq_limit_denominator"]

_ZERO = QQ(0)
_RATIONAL_TYPES = (int, Fraction, type(_ZERO))


def qq(x) -> "QQ":
    """Coerce to an exact rational.

    Accepts rationals, ints, floats (exact binary value), and strings like
    "3/4", "-2", or "0.25" (exact decimal value).
    """
    if isinstance(x, _RATIONAL_TYPES):
        return QQ(x)
    if isinstance(x, float):
        if x != x or x in (float("inf"), float("-inf")):
            raise ValidationError(f"cannot convert non-finite float {x!r} to rational")
        f = Fraction(x)
        return QQ(f.numerator, f.denominator)
    if isinstance(x, str):
        try:
            f = Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError(f"not a rational literal: {x!r}") from exc
        return QQ(f.numerator, f.denominator)
    raise ValidationError(f"cannot interpret {type(x).__name__} as rational")


def qq_str(x) -> str:
    """Serialize as "p/q", or "p" when the denominator is 1."""
    x = qq(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def qq_limit_denominator(x, max_denominator: int = 10 ** 9) -> "QQ":
    """Closest rational with denominator bounded by max_denominator."""
    x = qq(x)
    f = Fraction(x.numerator, x.denominator).limit_denominator(max_denominator)
    return QQ(f.numerator, f.denominator)
