"""Quad polynomials of far joint pairs and the resultant machinery.

``Q_i^+`` is the monic quadratic in the bond abscissa ``x`` attached to joint
``i``; ``Q_i^-`` is the same closed form after negating every ``b``, every
``c`` and the offsets ``s_2, s_4, s_6``. A far pair ``(k, k+3)`` can only
carry bonds with ``t_k = +-t_{k+3} = i`` if the corresponding quadratics
share roots.

Example:
    q1 = quad_plus(params, 1)
    q4 = quad_plus(params, 4)
    gcd_degree(q1, q4, tol=1e-10)
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Sequence

import numpy as np
import sympy

from .linkage import JOINTS, LinkageParams, cyclic
from .scalars import (
    DEFAULT_PRECISION_BITS,
    ScalarMode,
    convert,
    format_scalar,
    imag_unit,
    is_exact_zero,
    magnitude,
    mp_context,
)


FAR_PAIRS = (1, 2, 3)


class Sign(str, Enum):
    PLUS = "plus"
    MINUS = "minus"

    @property
    def symbol(self) -> str:
        return "+" if self is Sign.PLUS else "-"


@dataclass(frozen=True)
class QuadPoly:
    """Monic complex quadratic ``x**2 + a1*x + a0``."""

    a1: Any
    a0: Any
    mode: ScalarMode = ScalarMode.EXACT
    bits: int = DEFAULT_PRECISION_BITS

    @property
    def coefficients(self) -> tuple[Any, Any, Any]:
        return (convert(1, self.mode, self.bits), self.a1, self.a0)

    def evaluate(self, x: Any) -> Any:
        return x * x + self.a1 * x + self.a0

    def scale(self) -> float:
        """Root-size normalizer: max(1, |a1|, sqrt|a0|)."""

        return max(1.0, magnitude(self.a1), math.sqrt(magnitude(self.a0)))

    def as_dict(self, digits: int = 30) -> dict[str, str]:
        return {
            "a1": format_scalar(self.a1, self.mode, digits),
            "a0": format_scalar(self.a0, self.mode, digits),
        }


def _substituted(p: LinkageParams, sign: Sign) -> tuple[tuple[Any, ...], tuple[Any, ...], tuple[Any, ...]]:
    if sign is Sign.PLUS:
        return p.b, p.c, p.s
    b = tuple(-value for value in p.b)
    c = tuple(-value for value in p.c)
    s = tuple(-value if index % 2 == 0 else value for index, value in enumerate(p.s, start=1))
    return b, c, s


def _closed_form(
    b: Sequence[Any],
    c: Sequence[Any],
    s: Sequence[Any],
    i: int,
    mode: ScalarMode,
    bits: int,
) -> QuadPoly:
    unit = imag_unit(mode, bits)
    half = convert(sympy.Rational(1, 2), mode, bits)
    quarter = convert(sympy.Rational(1, 4), mode, bits)

    b0, b1, b2 = cyclic(b, i), cyclic(b, i + 1), cyclic(b, i + 2)
    c1, c2 = cyclic(c, i + 1), cyclic(c, i + 2)
    c0 = cyclic(c, i)
    s0, s1, s2 = cyclic(s, i), cyclic(s, i + 1), cyclic(s, i + 2)

    shift = (b2 * c2 - b0 * c0) * half - s0 * half * unit
    constant = (
        unit * half * (b0 * s1 + b2 * s2 + s1 * b2 * c1 + s2 * b0 * c1)
        - (b0 * b2 * c1 - s1 * s2 * c1) * half
        + (s1 * s1 + s2 * s2 - b0 * b0 + b1 * b1 - b2 * b2 - b1 * b1 * c1 * c1) * quarter
    )
    a1 = 2 * shift
    a0 = shift * shift + constant
    if mode is ScalarMode.EXACT:
        a1 = sympy.expand(a1)
        a0 = sympy.expand(a0)
    return QuadPoly(a1=a1, a0=a0, mode=mode, bits=bits)


def quad(p: LinkageParams, i: int, sign: Sign | str) -> QuadPoly:
    """``Q_i^+`` or ``Q_i^-`` of joint ``i`` (1-based, cyclic)."""

    if not 1 <= i <= JOINTS:
        raise ValueError(f"Joint index must be in 1..{JOINTS}, got {i}")
    sign = Sign(sign)
    b, c, s = _substituted(p, sign)
    return _closed_form(b, c, s, i, p.mode, p.bits)


def quad_plus(p: LinkageParams, i: int) -> QuadPoly:
    return quad(p, i, Sign.PLUS)


def quad_minus(p: LinkageParams, i: int) -> QuadPoly:
    return quad(p, i, Sign.MINUS)


def sylvester_matrix(p: QuadPoly, q: QuadPoly) -> list[list[Any]]:
    """4x4 Sylvester matrix of two monic quadratics."""

    if p.mode is not q.mode:
        raise ValueError("Quad polynomials live in different scalar modes")
    one, zero = convert(1, p.mode, p.bits), convert(0, p.mode, p.bits)
    return [
        [one, p.a1, p.a0, zero],
        [zero, one, p.a1, p.a0],
        [one, q.a1, q.a0, zero],
        [zero, one, q.a1, q.a0],
    ]


def resultant(p: QuadPoly, q: QuadPoly) -> Any:
    """Sylvester determinant, computed with the backend of the scalar mode."""

    rows = sylvester_matrix(p, q)
    if p.mode is ScalarMode.EXACT:
        return sympy.expand(sympy.Matrix(rows).det(method="bareiss"))
    if p.mode is ScalarMode.MP:
        ctx = mp_context(p.bits)
        return ctx.det(ctx.matrix(rows))
    return complex(np.linalg.det(np.asarray(rows, dtype=np.complex128)))


def resultant_scale(p: QuadPoly, q: QuadPoly) -> float:
    """Magnitude-balanced normalizer for |resultant| (fourth power of root size)."""

    return max(p.scale(), q.scale()) ** 4


def coefficients_equal(p: QuadPoly, q: QuadPoly, tol: float) -> bool:
    if p.mode is ScalarMode.EXACT:
        return is_exact_zero(p.a1 - q.a1) and is_exact_zero(p.a0 - q.a0)
    scale = max(p.scale(), q.scale())
    return magnitude(p.a1 - q.a1) <= tol * scale and magnitude(p.a0 - q.a0) <= tol * scale * scale


def gcd_degree(p: QuadPoly, q: QuadPoly, tol: float = 1e-10) -> int:
    """Degree of gcd(p, q): 2 when equal, 1 when the resultant vanishes, else 0."""

    if tol < 0:
        raise ValueError("tol must be non-negative")
    if coefficients_equal(p, q, tol):
        return 2
    value = resultant(p, q)
    if p.mode is ScalarMode.EXACT:
        return 1 if is_exact_zero(value) else 0
    return 1 if magnitude(value) <= tol * resultant_scale(p, q) else 0


def pair_quads(p: LinkageParams, pair: int, sign: Sign | str) -> tuple[QuadPoly, QuadPoly]:
    if pair not in FAR_PAIRS:
        raise ValueError(f"Far pair must be one of {FAR_PAIRS}, got {pair}")
    return quad(p, pair, sign), quad(p, pair + 3, sign)


def far_bound(p: LinkageParams, pair: int, tol: float = 1e-10) -> int:
    """Upper bound 0..4 on the bond connections of joints ``pair`` and ``pair + 3``."""

    total = 0
    for sign in Sign:
        first, second = pair_quads(p, pair, sign)
        total += gcd_degree(first, second, tol)
    return total
