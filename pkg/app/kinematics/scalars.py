"""Scalar kinds shared by the whole kinematics tower.

Three interchangeable fields carry every coefficient:

* ``EXACT`` - sympy numbers: rationals, quadratic surds ``(a + b*sqrt(n))/m``
  and, for quad polynomials, the imaginary unit.
* ``MP`` - mpmath reals/complexes at a configurable precision (256 bits by default).
* ``FLOAT`` - IEEE doubles, used by the continuation code.

Example:
    from app.kinematics.scalars import ScalarMode, parse_scalar, convert
    w5 = parse_scalar("sqrt(54083849)/6619")
    approx = convert(w5, ScalarMode.MP)
"""

from __future__ import annotations

import math
import re
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Any

import mpmath
import sympy
from mpmath.ctx_mp import MPContext


DEFAULT_PRECISION_BITS = 256

_TERM_PATTERN = re.compile(
    r"\s*(?P<sign>[+-]?)\s*"
    r"(?:"
    r"(?:(?P<coef>\d+(?:\.\d+)?)\*)?sqrt\(\s*(?P<rad>\d+)\s*\)(?:/(?P<den>\d+))?"
    r"|"
    r"(?P<num>\d+(?:\.\d*)?(?:[eE][-+]?\d+)?)(?:/(?P<num_den>\d+))?"
    r")\s*"
)


class ScalarMode(str, Enum):
    """The field over which dual quaternion coefficients live."""

    EXACT = "exact"
    MP = "mp"
    FLOAT = "float"


class ScalarModeError(TypeError):
    """Raised when scalars of different kinds meet without explicit promotion."""


class ParameterError(ValueError):
    """Raised when a parameter value or file cannot be interpreted."""


class ParallelAxesError(ParameterError):
    """Raised for a zero half-twist cotangent (adjacent axes parallel)."""


@lru_cache(maxsize=8)
def mp_context(bits: int = DEFAULT_PRECISION_BITS) -> MPContext:
    """Return a private mpmath context running at ``bits`` of mantissa."""

    ctx = MPContext()
    ctx.prec = bits
    return ctx


def mode_of(value: Any) -> ScalarMode:
    """Classify a single scalar value."""

    if isinstance(value, sympy.Basic):
        return ScalarMode.EXACT
    if isinstance(value, (mpmath.mpf, mpmath.mpc)) or hasattr(value, "_mpf_") or hasattr(value, "_mpc_"):
        return ScalarMode.MP
    if isinstance(value, bool):
        raise ScalarModeError("booleans are not scalars")
    if isinstance(value, (int, Fraction)):
        return ScalarMode.EXACT
    if isinstance(value, (float, complex)):
        return ScalarMode.FLOAT
    raise ScalarModeError(f"Unsupported scalar type: {type(value).__name__}")


def exact(value: Any) -> sympy.Expr:
    """Coerce an exact Python/sympy number into a sympy expression."""

    if isinstance(value, sympy.Basic):
        return value
    if isinstance(value, bool):
        raise ScalarModeError("booleans are not scalars")
    if isinstance(value, int):
        return sympy.Integer(value)
    if isinstance(value, Fraction):
        return sympy.Rational(value.numerator, value.denominator)
    raise ScalarModeError(
        f"Cannot treat {type(value).__name__} as exact; parse it or convert explicitly"
    )


def _mp_digits(bits: int) -> int:
    return int(bits * math.log10(2)) + 10


def convert(value: Any, mode: ScalarMode, bits: int = DEFAULT_PRECISION_BITS) -> Any:
    """Explicitly promote a scalar into ``mode``.

    Exact values can move to any mode; MP and FLOAT values can move between
    each other but never back to EXACT.
    """

    source = mode_of(value)
    if mode is ScalarMode.EXACT:
        if source is not ScalarMode.EXACT:
            raise ScalarModeError("Floating scalars cannot be promoted to exact scalars")
        return exact(value)

    if source is ScalarMode.EXACT:
        expr = exact(value)
        if mode is ScalarMode.MP:
            ctx = mp_context(bits)
            evaluated = expr.evalf(_mp_digits(bits))
            real, imag = evaluated.as_real_imag()
            real_part = ctx.mpf(sympy.Float(real, _mp_digits(bits)))
            if imag == 0:
                return real_part
            return ctx.mpc(real_part, ctx.mpf(sympy.Float(imag, _mp_digits(bits))))
        number = complex(expr.evalf(20))
        return number.real if number.imag == 0 else number

    if mode is ScalarMode.MP:
        ctx = mp_context(bits)
        return ctx.mpmathify(value)
    if isinstance(value, mpmath.mpc) or hasattr(value, "_mpc_"):
        return complex(value)
    if isinstance(value, complex):
        return value
    return float(value)


def imag_unit(mode: ScalarMode, bits: int = DEFAULT_PRECISION_BITS) -> Any:
    """Return the imaginary unit of the complexified field."""

    if mode is ScalarMode.EXACT:
        return sympy.I
    if mode is ScalarMode.MP:
        return mp_context(bits).mpc(0, 1)
    return 1j


def sqrt(value: Any, mode: ScalarMode, bits: int = DEFAULT_PRECISION_BITS) -> Any:
    if mode is ScalarMode.EXACT:
        return sympy.sqrt(exact(value))
    if mode is ScalarMode.MP:
        return mp_context(bits).sqrt(value)
    return math.sqrt(value)


def is_exact_zero(value: Any) -> bool:
    """Decide ``value == 0`` without tolerance for exact scalars."""

    expr = exact(value)
    if expr == 0:
        return True
    expanded = sympy.expand(expr)
    if expanded == 0:
        return True
    if expanded.is_Rational:
        return False
    return bool(expanded.equals(0))


def magnitude(value: Any) -> float:
    """Absolute value as a float, for any scalar kind."""

    if isinstance(value, sympy.Basic):
        return abs(complex(value.evalf(30)))
    return float(abs(value))


def is_zero(value: Any, mode: ScalarMode, tol: float = 0.0, scale: float = 1.0) -> bool:
    """Zero test: exact in EXACT mode, relative to ``scale`` otherwise."""

    if mode is ScalarMode.EXACT:
        return is_exact_zero(value)
    return magnitude(value) <= tol * max(scale, 1.0)


def parse_scalar(token: Any) -> sympy.Expr:
    """Parse one parameter value into an exact sympy number.

    Accepted: JSON integers and decimals, and strings made of signed terms
    ``n``, ``d.ddd``, ``p/q``, ``sqrt(n)``, ``sqrt(n)/m``, ``a*sqrt(n)/m``.
    """

    if isinstance(token, bool):
        raise ParameterError("Boolean is not a valid parameter value")
    if isinstance(token, int):
        return sympy.Integer(token)
    if isinstance(token, float):
        if not math.isfinite(token):
            raise ParameterError(f"Non-finite parameter value: {token!r}")
        return sympy.Rational(Fraction(repr(token)))
    if not isinstance(token, str):
        raise ParameterError(f"Unsupported parameter value: {token!r}")

    text = token.strip()
    if not text:
        raise ParameterError("Parameter value cannot be empty")

    total: sympy.Expr = sympy.Integer(0)
    position = 0
    first = True
    while position < len(text):
        match = _TERM_PATTERN.match(text, position)
        if match is None or match.end() == position:
            raise ParameterError(f"Malformed parameter value: {token!r}")
        if not first and not match.group("sign"):
            raise ParameterError(f"Malformed parameter value: {token!r}")
        total += _term_value(match, token)
        position = match.end()
        first = False
    return total


def _term_value(match: re.Match[str], token: str) -> sympy.Expr:
    sign = -1 if match.group("sign") == "-" else 1
    try:
        if match.group("rad") is not None:
            coef = sympy.Rational(Fraction(match.group("coef") or "1"))
            den = int(match.group("den") or "1")
            if den == 0:
                raise ZeroDivisionError
            return sign * coef * sympy.sqrt(sympy.Integer(int(match.group("rad")))) / den
        value = Fraction(match.group("num"))
        den = int(match.group("num_den") or "1")
        if den == 0:
            raise ZeroDivisionError
        return sign * sympy.Rational(value) / den
    except ZeroDivisionError as exc:
        raise ParameterError(f"Zero denominator in parameter value: {token!r}") from exc


def format_token(value: Any) -> str:
    """Write an exact scalar back in the parameter-file grammar."""

    expr = sympy.expand(exact(value))
    if expr == 0:
        return "0"
    parts: list[tuple[int, sympy.Rational]] = []
    for key, coef in expr.as_coefficients_dict().items():
        if not coef.is_Rational:
            raise ParameterError(f"Value {expr} cannot be written in the parameter grammar")
        if key == 1:
            parts.append((1, coef))
        elif key.is_Pow and key.exp == sympy.Rational(1, 2) and key.base.is_Integer:
            parts.append((int(key.base), coef))
        else:
            raise ParameterError(f"Value {expr} cannot be written in the parameter grammar")

    pieces: list[str] = []
    for radicand, coef in sorted(parts):
        negative = coef < 0
        magnitude_ = -coef if negative else coef
        num, den = int(magnitude_.p), int(magnitude_.q)
        if radicand == 1:
            body = f"{num}" if den == 1 else f"{num}/{den}"
        else:
            body = f"sqrt({radicand})" if num == 1 else f"{num}*sqrt({radicand})"
            if den != 1:
                body = f"{body}/{den}"
        if pieces:
            pieces.append(f"-{body}" if negative else f"+{body}")
        else:
            pieces.append(f"-{body}" if negative else body)
    return "".join(pieces)


def format_scalar(value: Any, mode: ScalarMode, digits: int = 30) -> str:
    """Human/JSON rendering: exact strings, or ``digits`` significant digits."""

    if mode is ScalarMode.EXACT:
        return str(exact(value))
    if mode is ScalarMode.MP:
        return mpmath.nstr(value, digits)
    return repr(value)
