"""Dual quaternion arithmetic over exchangeable scalar fields.

Coefficients are ordered ``1, i, j, k, e, ei, ej, ek`` where ``e`` is the
dual unit (``e*e == 0``, central).

Example:
    from app.kinematics.dualquat import DualQuaternion
    from app.kinematics.scalars import ScalarMode
    i = DualQuaternion.basis("i", ScalarMode.EXACT)
    k = DualQuaternion.basis("k", ScalarMode.EXACT)
    assert (i * k) == -DualQuaternion.basis("j", ScalarMode.EXACT)
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterable, Sequence

import numpy as np

from .scalars import (
    DEFAULT_PRECISION_BITS,
    ScalarMode,
    ScalarModeError,
    convert,
    is_exact_zero,
    magnitude,
)


BASIS_NAMES = ("1", "i", "j", "k", "e", "ei", "ej", "ek")


def _quat_mul(a: Sequence[Any], b: Sequence[Any]) -> tuple[Any, Any, Any, Any]:
    a0, a1, a2, a3 = a
    b0, b1, b2, b3 = b
    return (
        a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
        a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
        a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
        a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
    )


@dataclass(frozen=True, slots=True)
class DualQuaternion:
    """An element of the 8-dimensional algebra of dual quaternions."""

    coeffs: tuple[Any, ...]
    mode: ScalarMode = ScalarMode.EXACT
    bits: int = DEFAULT_PRECISION_BITS

    def __post_init__(self) -> None:
        if len(self.coeffs) != 8:
            raise ValueError(f"Dual quaternion needs 8 coefficients, got {len(self.coeffs)}")

    @classmethod
    def from_coeffs(
        cls,
        values: Iterable[Any],
        mode: ScalarMode = ScalarMode.EXACT,
        bits: int = DEFAULT_PRECISION_BITS,
    ) -> "DualQuaternion":
        """Build from raw numbers, promoting each one into ``mode``."""

        return cls(tuple(convert(value, mode, bits) for value in values), mode, bits)

    @classmethod
    def scalar(cls, value: Any, mode: ScalarMode = ScalarMode.EXACT, bits: int = DEFAULT_PRECISION_BITS) -> "DualQuaternion":
        return cls.from_coeffs((value, 0, 0, 0, 0, 0, 0, 0), mode, bits)

    @classmethod
    def basis(cls, name: str, mode: ScalarMode = ScalarMode.EXACT, bits: int = DEFAULT_PRECISION_BITS) -> "DualQuaternion":
        """Return the basis element named ``1``, ``i`` ... ``ek``."""

        try:
            position = BASIS_NAMES.index(name)
        except ValueError as exc:
            raise ValueError(f"Unknown basis element: {name}") from exc
        values = [0] * 8
        values[position] = 1
        return cls.from_coeffs(values, mode, bits)

    @property
    def primal(self) -> tuple[Any, ...]:
        return self.coeffs[:4]

    @property
    def dual(self) -> tuple[Any, ...]:
        return self.coeffs[4:]

    def promote(self, mode: ScalarMode, bits: int | None = None) -> "DualQuaternion":
        """Explicit conversion into another scalar field."""

        return DualQuaternion.from_coeffs(self.coeffs, mode, bits or self.bits)

    def _check_compatible(self, other: "DualQuaternion") -> None:
        if self.mode is not other.mode:
            raise ScalarModeError(
                f"Cannot combine {self.mode.value} and {other.mode.value} dual quaternions; promote explicitly"
            )

    def __mul__(self, other: Any) -> "DualQuaternion":
        if isinstance(other, DualQuaternion):
            return mul(self, other)
        return self.scale(other)

    def __rmul__(self, other: Any) -> "DualQuaternion":
        return self.scale(other)

    def __add__(self, other: "DualQuaternion") -> "DualQuaternion":
        self._check_compatible(other)
        return DualQuaternion(tuple(x + y for x, y in zip(self.coeffs, other.coeffs)), self.mode, self.bits)

    def __sub__(self, other: "DualQuaternion") -> "DualQuaternion":
        self._check_compatible(other)
        return DualQuaternion(tuple(x - y for x, y in zip(self.coeffs, other.coeffs)), self.mode, self.bits)

    def __neg__(self) -> "DualQuaternion":
        return DualQuaternion(tuple(-x for x in self.coeffs), self.mode, self.bits)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DualQuaternion):
            return NotImplemented
        if self.mode is not other.mode:
            return False
        if self.mode is ScalarMode.EXACT:
            return all(is_exact_zero(x - y) for x, y in zip(self.coeffs, other.coeffs))
        return all(x == y for x, y in zip(self.coeffs, other.coeffs))

    __hash__ = None  # type: ignore[assignment]

    def scale(self, factor: Any) -> "DualQuaternion":
        """Multiply every coefficient by a scalar of the same field."""

        value = convert(factor, self.mode, self.bits)
        return DualQuaternion(tuple(value * x for x in self.coeffs), self.mode, self.bits)

    def eps_shift(self) -> "DualQuaternion":
        """Return ``e * self`` (the primal part moved into the dual slot)."""

        zero = convert(0, self.mode, self.bits)
        return DualQuaternion((zero,) * 4 + self.primal, self.mode, self.bits)

    def max_abs(self) -> float:
        return max(magnitude(x) for x in self.coeffs)

    def is_close(self, other: "DualQuaternion", tol: float = 1e-12) -> bool:
        """Coefficient-wise comparison relative to the larger operand."""

        self._check_compatible(other)
        if self.mode is ScalarMode.EXACT:
            return self == other
        scale = max(self.max_abs(), other.max_abs(), 1.0)
        return all(magnitude(x - y) <= tol * scale for x, y in zip(self.coeffs, other.coeffs))

    def to_array(self) -> np.ndarray:
        """Real coefficients as a float64 vector of length 8."""

        values = [convert(x, ScalarMode.FLOAT) for x in self.coeffs]
        if any(isinstance(x, complex) for x in values):
            raise ScalarModeError("Complex coefficients have no real array form")
        return np.asarray(values, dtype=np.float64)

    @classmethod
    def from_array(cls, values: np.ndarray) -> "DualQuaternion":
        return cls(tuple(float(x) for x in values), ScalarMode.FLOAT)


def mul(a: DualQuaternion, b: DualQuaternion) -> DualQuaternion:
    """Product under ``e*e == 0``: (p + e q)(p' + e q') = p p' + e (p q' + q p')."""

    a._check_compatible(b)
    p, q = a.primal, a.dual
    p2, q2 = b.primal, b.dual
    primal = _quat_mul(p, p2)
    left = _quat_mul(p, q2)
    right = _quat_mul(q, p2)
    dual = tuple(x + y for x, y in zip(left, right))
    return DualQuaternion(primal + dual, a.mode, a.bits)


def mul_array(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Float fast path of :func:`mul` on length-8 coefficient vectors."""

    primal = np.asarray(_quat_mul(a[:4], b[:4]))
    dual = np.asarray(_quat_mul(a[:4], b[4:])) + np.asarray(_quat_mul(a[4:], b[:4]))
    return np.concatenate((primal, dual))


def product(factors: Iterable[DualQuaternion]) -> DualQuaternion:
    """Left-to-right product of a non-empty sequence."""

    iterator = iter(factors)
    try:
        result = next(iterator)
    except StopIteration as exc:
        raise ValueError("product() needs at least one factor") from exc
    for factor in iterator:
        result = mul(result, factor)
    return result


def quat_conjugate(a: DualQuaternion) -> DualQuaternion:
    """Negate the i, j, k and ei, ej, ek coefficients."""

    c = a.coeffs
    return DualQuaternion((c[0], -c[1], -c[2], -c[3], c[4], -c[5], -c[6], -c[7]), a.mode, a.bits)


def norm(a: DualQuaternion) -> DualQuaternion:
    """``a * conj(a)``; a dual number (only the 1 and e slots are non-zero)."""

    return mul(a, quat_conjugate(a))


def primal_norm(a: DualQuaternion) -> Any:
    p0, p1, p2, p3 = a.primal
    return p0 * p0 + p1 * p1 + p2 * p2 + p3 * p3


def study_defect(a: DualQuaternion) -> Any:
    """The e-part of ``a * conj(a)``; zero exactly on the Study quadric."""

    return norm(a).coeffs[4]


def is_real_nonzero(a: DualQuaternion, tol: float = 0.0) -> bool:
    """True iff coefficients 2..8 vanish and coefficient 1 does not.

    In EXACT mode the decision is exact and ``tol`` is ignored; otherwise
    vanishing is judged relative to the largest coefficient magnitude.
    """

    if tol < 0:
        raise ValueError("tol must be non-negative")
    head, tail = a.coeffs[0], a.coeffs[1:]
    if a.mode is ScalarMode.EXACT:
        return not is_exact_zero(head) and all(is_exact_zero(x) for x in tail)
    scale = a.max_abs()
    if scale == 0.0:
        return False
    if magnitude(head) <= tol * scale:
        return False
    return all(magnitude(x) <= tol * scale for x in tail)
