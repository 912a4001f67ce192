"""Denavit-Hartenberg model of a closed 6R loop and its closure equation.

Index arithmetic is cyclic: joint 7 is joint 1. Public helpers take
1-based indices; tuples are stored 0-based.

Example:
    from app.kinematics.families import builtin_instance
    from app.kinematics.linkage import ClosureModel, ConfigurationPoint
    model = ClosureModel.from_params(builtin_instance("bricard_example"))
    model.residual(ConfigurationPoint.zero().theta)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np
import sympy

from .dualquat import DualQuaternion, mul, mul_array
from .scalars import (
    DEFAULT_PRECISION_BITS,
    ParallelAxesError,
    ParameterError,
    ScalarMode,
    convert,
    exact,
    is_zero,
    mp_context,
)


JOINTS = 6
RESIDUAL_COORDS = (1, 2, 3, 5, 6, 7)
FD_STEP = 1e-7


def cyclic(values: Sequence[Any], i: int) -> Any:
    """Return ``values[i]`` for a 1-based cyclic joint index."""

    return values[(i - 1) % len(values)]


def wrap_angle(angle: float) -> float:
    """Map an angle into (-pi, pi]."""

    return -((-angle + math.pi) % (2.0 * math.pi) - math.pi)


def wrap_angles(angles: np.ndarray) -> np.ndarray:
    return -np.mod(-np.asarray(angles, dtype=np.float64) + np.pi, 2.0 * np.pi) + np.pi


def _canonical(value: Any, mode: ScalarMode) -> Any:
    if mode is ScalarMode.EXACT:
        return sympy.radsimp(sympy.cancel(value))
    return value


def w_from_phi_degrees(phi: Any, mode: ScalarMode, bits: int = DEFAULT_PRECISION_BITS) -> Any:
    """Cotangent of the half twist angle, for a twist given in degrees."""

    if mode is ScalarMode.EXACT:
        angle = exact(phi)
        if is_zero(sympy.Mod(angle, 180), mode):
            raise ParallelAxesError("parallel adjacent axes unsupported")
        return sympy.cot(sympy.pi * angle / 360)
    if mode is ScalarMode.MP:
        ctx = mp_context(bits)
        angle = ctx.mpf(convert(phi, ScalarMode.MP, bits))
        if ctx.fmod(angle, 180) == 0:
            raise ParallelAxesError("parallel adjacent axes unsupported")
        return ctx.cot(ctx.pi * angle / 360)
    angle = float(convert(phi, ScalarMode.FLOAT))
    if math.fmod(angle, 180.0) == 0.0:
        raise ParallelAxesError("parallel adjacent axes unsupported")
    return 1.0 / math.tan(math.radians(angle) / 2.0)


def phi_from_w(w: float) -> float:
    """Twist angle in radians, in (0, 2*pi), for a float cotangent value."""

    return 2.0 * math.atan2(1.0, w)


@dataclass(frozen=True)
class LinkageParams:
    """Normal distances ``d``, offsets ``s`` and half-twist cotangents ``w``.

    ``c`` (cosine of twist), ``sin_phi``, ``b`` (Bennett ratio) and
    ``f = c*b`` are derived on construction in the same scalar mode.
    """

    d: tuple[Any, ...]
    s: tuple[Any, ...]
    w: tuple[Any, ...]
    mode: ScalarMode = ScalarMode.EXACT
    bits: int = DEFAULT_PRECISION_BITS
    c: tuple[Any, ...] = field(init=False, repr=False, compare=False)
    sin_phi: tuple[Any, ...] = field(init=False, repr=False, compare=False)
    b: tuple[Any, ...] = field(init=False, repr=False, compare=False)
    f: tuple[Any, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        for name in ("d", "s", "w"):
            values = getattr(self, name)
            if len(values) != JOINTS:
                raise ParameterError(f"Expected {JOINTS} values for {name}, got {len(values)}")
            object.__setattr__(self, name, tuple(convert(x, self.mode, self.bits) for x in values))

        c_values, sin_values, b_values, f_values = [], [], [], []
        for index, (d_i, w_i) in enumerate(zip(self.d, self.w), start=1):
            if self.mode is not ScalarMode.EXACT and isinstance(w_i, complex):
                raise ParameterError(f"w_{index} must be real")
            if self.mode is ScalarMode.EXACT and exact(w_i).is_real is False:
                raise ParameterError(f"w_{index} must be real")
            if is_zero(w_i, self.mode):
                raise ParallelAxesError("parallel adjacent axes unsupported")
            square = w_i * w_i
            c_i = _canonical((square - 1) / (square + 1), self.mode)
            sin_i = _canonical(2 * w_i / (square + 1), self.mode)
            b_i = _canonical(d_i * (square + 1) / (2 * w_i), self.mode)
            c_values.append(c_i)
            sin_values.append(sin_i)
            b_values.append(b_i)
            f_values.append(_canonical(c_i * b_i, self.mode))
        object.__setattr__(self, "c", tuple(c_values))
        object.__setattr__(self, "sin_phi", tuple(sin_values))
        object.__setattr__(self, "b", tuple(b_values))
        object.__setattr__(self, "f", tuple(f_values))

    @classmethod
    def from_ratios(
        cls,
        b: Sequence[Any],
        w: Sequence[Any],
        s: Sequence[Any],
        mode: ScalarMode = ScalarMode.EXACT,
        bits: int = DEFAULT_PRECISION_BITS,
    ) -> "LinkageParams":
        """Build from Bennett ratios instead of normal distances (``d = b*sin(phi)``)."""

        if len(b) != JOINTS or len(w) != JOINTS:
            raise ParameterError(f"Expected {JOINTS} Bennett ratios and twists")
        d_values = []
        for b_i, w_i in zip(b, w):
            b_i = convert(b_i, mode, bits)
            w_i = convert(w_i, mode, bits)
            if is_zero(w_i, mode):
                raise ParallelAxesError("parallel adjacent axes unsupported")
            d_values.append(_canonical(b_i * 2 * w_i / (w_i * w_i + 1), mode))
        return cls(tuple(d_values), tuple(s), tuple(w), mode, bits)

    @classmethod
    def from_phi_degrees(
        cls,
        d: Sequence[Any],
        s: Sequence[Any],
        phi_degrees: Sequence[Any],
        mode: ScalarMode = ScalarMode.EXACT,
        bits: int = DEFAULT_PRECISION_BITS,
    ) -> "LinkageParams":
        if len(phi_degrees) != JOINTS:
            raise ParameterError(f"Expected {JOINTS} values for phi_degrees, got {len(phi_degrees)}")
        w = tuple(w_from_phi_degrees(value, mode, bits) for value in phi_degrees)
        return cls(tuple(d), tuple(s), w, mode, bits)

    def converted(self, mode: ScalarMode, bits: int | None = None) -> "LinkageParams":
        """Explicitly promote every parameter into another scalar mode."""

        if mode is self.mode and (bits is None or bits == self.bits):
            return self
        return LinkageParams(self.d, self.s, self.w, mode, bits or self.bits)

    def shifted(self, offset: int) -> "LinkageParams":
        """Relabel joints so that new joint ``i`` is old joint ``i + offset``."""

        def rotate(values: tuple[Any, ...]) -> tuple[Any, ...]:
            k = offset % JOINTS
            return values[k:] + values[:k]

        return LinkageParams(rotate(self.d), rotate(self.s), rotate(self.w), self.mode, self.bits)

    def with_values(self, **changes: Sequence[Any]) -> "LinkageParams":
        return LinkageParams(
            tuple(changes.get("d", self.d)),
            tuple(changes.get("s", self.s)),
            tuple(changes.get("w", self.w)),
            self.mode,
            self.bits,
        )


@dataclass(frozen=True)
class JointTransfer:
    g: DualQuaternion
    index: int
    normalized: bool = False


@dataclass(frozen=True)
class ConfigurationPoint:
    """Joint angles ``theta`` (radians, wrapped to (-pi, pi])."""

    theta: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.theta) != JOINTS:
            raise ValueError(f"Expected {JOINTS} joint angles, got {len(self.theta)}")
        object.__setattr__(self, "theta", tuple(wrap_angle(float(x)) for x in self.theta))

    @classmethod
    def zero(cls) -> "ConfigurationPoint":
        return cls((0.0,) * JOINTS)

    @classmethod
    def from_t(cls, values: Sequence[float]) -> "ConfigurationPoint":
        """Build from projective coordinates ``t_i = cot(theta_i / 2)`` (``inf`` allowed)."""

        return cls(tuple(2.0 * math.atan2(1.0, float(t)) for t in values))

    @property
    def t(self) -> tuple[float, ...]:
        values = []
        for angle in self.theta:
            half = angle / 2.0
            values.append(math.inf if angle == 0.0 else math.cos(half) / math.sin(half))
        return tuple(values)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.theta, dtype=np.float64)


def build_g(p: LinkageParams, i: int, normalized: bool = False) -> JointTransfer:
    """Transfer element ``(1 - s/2 e i)(w - k)(1 - d/2 e k)`` of joint ``i``."""

    if not 1 <= i <= JOINTS:
        raise ValueError(f"Joint index must be in 1..{JOINTS}, got {i}")
    mode, bits = p.mode, p.bits
    s_i, w_i, d_i = p.s[i - 1], p.w[i - 1], p.d[i - 1]
    half = convert(sympy.Rational(1, 2), mode, bits)
    zero = convert(0, mode, bits)
    one = convert(1, mode, bits)

    offset = DualQuaternion((one, zero, zero, zero, zero, -s_i * half, zero, zero), mode, bits)
    twist = DualQuaternion((w_i, zero, zero, -one, zero, zero, zero, zero), mode, bits)
    distance = DualQuaternion((one, zero, zero, zero, zero, zero, zero, -d_i * half), mode, bits)
    g = mul(mul(offset, twist), distance)
    if mode is ScalarMode.EXACT:
        g = DualQuaternion(tuple(sympy.expand(x) for x in g.coeffs), mode, bits)
    if normalized:
        if mode is ScalarMode.EXACT:
            scale = 1 / sympy.sqrt(w_i * w_i + 1)
        elif mode is ScalarMode.MP:
            scale = 1 / mp_context(bits).sqrt(w_i * w_i + 1)
        else:
            scale = 1.0 / math.sqrt(w_i * w_i + 1.0)
        g = g.scale(scale)
    return JointTransfer(g=g, index=i, normalized=normalized)


def _rotation(angle: Any, mode: ScalarMode, bits: int) -> DualQuaternion:
    if mode is ScalarMode.EXACT:
        half = exact(angle) / 2
        cos_h, sin_h = sympy.cos(half), sympy.sin(half)
    elif mode is ScalarMode.MP:
        ctx = mp_context(bits)
        half = ctx.mpf(angle) / 2
        cos_h, sin_h = ctx.cos(half), ctx.sin(half)
    else:
        half = float(angle) / 2.0
        cos_h, sin_h = math.cos(half), math.sin(half)
    return DualQuaternion.from_coeffs((cos_h, -sin_h, 0, 0, 0, 0, 0, 0), mode, bits)


def closure_product(p: LinkageParams, cfg: ConfigurationPoint | Sequence[Any]) -> DualQuaternion:
    """``r_1 g_1 r_2 g_2 ... r_6 g_6`` with normalized transfer elements.

    ``cfg`` may also be a sequence of exact angles when ``p`` is exact.
    """

    angles = cfg.theta if isinstance(cfg, ConfigurationPoint) else tuple(cfg)
    result = DualQuaternion.scalar(1, p.mode, p.bits)
    for index, angle in enumerate(angles, start=1):
        result = mul(result, _rotation(angle, p.mode, p.bits))
        result = mul(result, build_g(p, index, normalized=True).g)
    return result


@dataclass(frozen=True)
class ClosureModel:
    """Float evaluation of the closure equation with cached transfer elements."""

    transfers: tuple[np.ndarray, ...]

    @classmethod
    def from_params(cls, p: LinkageParams) -> "ClosureModel":
        floats = p.converted(ScalarMode.FLOAT)
        arrays = tuple(build_g(floats, i, normalized=True).g.to_array() for i in range(1, JOINTS + 1))
        return cls(arrays)

    @property
    def joints(self) -> int:
        return len(self.transfers)

    def factors(self, theta: np.ndarray) -> list[np.ndarray]:
        items: list[np.ndarray] = []
        for angle, g in zip(theta, self.transfers):
            half = 0.5 * angle
            rotation = np.zeros(8)
            rotation[0] = math.cos(half)
            rotation[1] = -math.sin(half)
            items.append(rotation)
            items.append(g)
        return items

    def product(self, theta: np.ndarray) -> np.ndarray:
        result = np.zeros(8)
        result[0] = 1.0
        for factor in self.factors(theta):
            result = mul_array(result, factor)
        return result

    def residual(self, theta: Sequence[float] | np.ndarray) -> np.ndarray:
        """Coordinates 2, 3, 4, 6, 7, 8 of the closure product."""

        return self.product(np.asarray(theta, dtype=np.float64))[list(RESIDUAL_COORDS)]

    def jacobian(self, theta: Sequence[float] | np.ndarray, method: str = "analytic", step: float = FD_STEP) -> np.ndarray:
        """Derivative of :meth:`residual` with respect to the joint angles."""

        angles = np.asarray(theta, dtype=np.float64)
        if method == "fd":
            return self._jacobian_fd(angles, step)
        if method != "analytic":
            raise ValueError(f"Unknown jacobian method: {method}")

        items = self.factors(angles)
        count = len(items)
        identity = np.zeros(8)
        identity[0] = 1.0
        prefix = [identity]
        for factor in items:
            prefix.append(mul_array(prefix[-1], factor))
        suffix = [identity] * (count + 1)
        for position in range(count - 1, -1, -1):
            suffix[position] = mul_array(items[position], suffix[position + 1])

        matrix = np.zeros((len(RESIDUAL_COORDS), self.joints))
        for joint, angle in enumerate(angles):
            half = 0.5 * angle
            derivative = np.zeros(8)
            derivative[0] = -0.5 * math.sin(half)
            derivative[1] = -0.5 * math.cos(half)
            position = 2 * joint
            column = mul_array(mul_array(prefix[position], derivative), suffix[position + 1])
            matrix[:, joint] = column[list(RESIDUAL_COORDS)]
        return matrix

    def _jacobian_fd(self, angles: np.ndarray, step: float) -> np.ndarray:
        matrix = np.zeros((len(RESIDUAL_COORDS), self.joints))
        for joint in range(self.joints):
            forward = angles.copy()
            backward = angles.copy()
            forward[joint] += step
            backward[joint] -= step
            matrix[:, joint] = (self.residual(forward) - self.residual(backward)) / (2.0 * step)
        return matrix


def closure_residual(p: LinkageParams, cfg: ConfigurationPoint | Sequence[float]) -> np.ndarray:
    angles = cfg.as_array() if isinstance(cfg, ConfigurationPoint) else np.asarray(cfg, dtype=np.float64)
    return ClosureModel.from_params(p).residual(angles)


def closure_jacobian(
    p: LinkageParams,
    cfg: ConfigurationPoint | Sequence[float],
    method: str = "analytic",
) -> np.ndarray:
    angles = cfg.as_array() if isinstance(cfg, ConfigurationPoint) else np.asarray(cfg, dtype=np.float64)
    return ClosureModel.from_params(p).jacobian(angles, method=method)
