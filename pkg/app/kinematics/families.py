"""Known mobile 6R families: seeded generators and membership tests.

Generators draw small random rationals for the free parameters and solve
the remaining ones in closed form, so every sample satisfies its family
equations exactly. A non-zero ``perturbation`` shifts the last solved
equation and yields a near-miss that must fail membership.

Example:
    from app.kinematics.families import FamilyName, membership, sample
    params = sample(FamilyName.ORTHOGONAL, seed=7)
    assert membership(params, FamilyName.ORTHOGONAL).member
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable

import sympy

from .linkage import JOINTS, LinkageParams, cyclic
from .scalars import ParallelAxesError, ScalarMode, exact, is_exact_zero, magnitude, parse_scalar


logger = logging.getLogger("linkage_bonds.families")

RESAMPLE_BUDGET = 1000
DRAW_LIMIT = 9


class FamilyError(ValueError):
    """Raised for unknown families or exhausted resampling budgets."""


class FamilyName(str, Enum):
    LINE_SYMMETRIC = "line_symmetric"
    HOOKE = "hooke"
    DIETMAIER = "dietmaier"
    DIETMAIER_SECOND = "dietmaier_second"
    PLANE_SYMMETRIC = "plane_symmetric"
    ORTHOGONAL = "orthogonal"
    NEW_FAMILY = "new_family"


BUILTIN_INSTANCES = ("bricard_example", "new_example")


def family_name(name: str | FamilyName) -> FamilyName:
    try:
        return FamilyName(name)
    except ValueError as exc:
        raise FamilyError(f"Unknown family: {name}") from exc


class _Rejected(Exception):
    """A draw that violates an admissibility condition."""


def _draw(rng: random.Random, limit: int = DRAW_LIMIT) -> sympy.Rational:
    numerator = rng.choice([n for n in range(-limit, limit + 1) if n != 0])
    return sympy.Rational(numerator, rng.randint(1, limit))


def _draw_twist(rng: random.Random) -> sympy.Rational:
    """Half-twist cotangent avoiding right angles (w = +-1)."""

    while True:
        value = _draw(rng)
        if abs(value) != 1:
            return value


def _w_from_cos(c: sympy.Expr) -> sympy.Expr:
    if not c.is_finite or not -1 < c < 1:
        raise _Rejected
    return sympy.sqrt((1 + c) / (1 - c))


def _cos(w: sympy.Expr) -> sympy.Expr:
    return sympy.radsimp((w * w - 1) / (w * w + 1))


def _sin(w: sympy.Expr) -> sympy.Expr:
    return sympy.radsimp(2 * w / (w * w + 1))


def _line_symmetric(rng: random.Random, delta: sympy.Expr) -> LinkageParams:
    b = [_draw(rng) for _ in range(3)]
    w = [_draw(rng) for _ in range(3)]
    s = [_draw(rng) for _ in range(3)]
    shifted = [s[0] + delta, s[1], s[2]]
    return LinkageParams.from_ratios(b + b, w + w, s + shifted)


def _hooke(rng: random.Random, delta: sympy.Expr) -> LinkageParams:
    zero = sympy.Integer(0)
    w = [_draw(rng) for _ in range(JOINTS)]
    b2, b5 = _draw(rng), _draw(rng)
    s2, s3, s5 = _draw(rng), _draw(rng), _draw(rng)
    c2, c5 = _cos(w[1]), _cos(w[4])
    left = s2**2 + s3**2 + b2**2 * (1 - c2**2) + 2 * s2 * s3 * c2
    discriminant = left + delta - (1 - c5**2) * (s5**2 + b5**2)
    if discriminant < 0:
        raise _Rejected
    s6 = sympy.radsimp(-s5 * c5 + sympy.sqrt(discriminant))
    b = [zero, b2, zero, zero, b5, zero]
    s = [zero, s2, s3, zero, s5, s6]
    return LinkageParams.from_ratios(b, w, s)


def _dietmaier(rng: random.Random, delta: sympy.Expr, second: bool) -> LinkageParams:
    zero = sympy.Integer(0)
    b1, b2, b3 = _draw(rng), _draw(rng), _draw(rng)
    w1, w2, w3, w4 = (_draw(rng) for _ in range(4))
    s2, s3 = _draw(rng), _draw(rng)
    c1, c3, c4 = _cos(w1), _cos(w3), _cos(w4)
    c6 = (b3 * (c3 + c4) - b1 * c1 + delta) / b1
    w6 = _w_from_cos(c6)
    b5 = -b2 if second else b2
    b = [b1, b2, b3, b3, b5, b1]
    w = [w1, w2, w3, w4, w2, w6]
    s = [zero, s2, s3, zero, s3, s2]
    return LinkageParams.from_ratios(b, w, s)


def _plane_symmetric(rng: random.Random, delta: sympy.Expr) -> LinkageParams:
    zero = sympy.Integer(0)
    b1, b2, b3 = _draw(rng), _draw(rng), _draw(rng)
    w1, w2, w3 = _draw_twist(rng), _draw(rng), _draw_twist(rng)
    s2, s3 = _draw(rng), _draw(rng)
    if delta == 0:
        w4, w6 = 1 / w3, 1 / w1
    else:
        c1, c3 = _cos(w1), _cos(w3)
        c6 = -c1 + delta
        w6 = _w_from_cos(c6)
        w4 = _w_from_cos(b1 * delta / b3 - c3)
    b = [b1, b2, b3, b3, -b2, b1]
    w = [w1, w2, w3, w4, w2, w6]
    s = [zero, s2, s3, zero, s3, s2]
    return LinkageParams.from_ratios(b, w, s)


def _orthogonal(rng: random.Random, delta: sympy.Expr) -> LinkageParams:
    zero = sympy.Integer(0)
    b1, b2, b3, b4, b5 = (_draw(rng) for _ in range(5))
    square = b1**2 + b3**2 + b5**2 - b2**2 - b4**2 + delta
    if square <= 0:
        raise _Rejected
    b6 = sympy.sqrt(square)
    return LinkageParams.from_ratios([b1, b2, b3, b4, b5, b6], [1] * JOINTS, [zero] * JOINTS)


def _new_family(rng: random.Random, delta: sympy.Expr) -> LinkageParams:
    zero = sympy.Integer(0)
    b2 = _draw(rng)
    w1, w3 = _draw_twist(rng), _draw_twist(rng)
    w2, w4, w6 = _draw(rng), _draw(rng), _draw(rng)
    c1, c2, c3, c4, c6 = (_cos(w) for w in (w1, w2, w3, w4, w6))
    sin1, sin3, sin4, sin6 = (_sin(w) for w in (w1, w3, w4, w6))
    b1, b3 = b2 * c3, b2 * c1
    b5 = rng.choice((1, -1)) * b2 * sin1 * sin3 / (sin4 * sin6)
    b6, b4 = b5 * c4, b5 * c6
    if any(value == 0 for value in (b4, b6)):
        raise _Rejected
    c5 = (b2 * c2 + b3 * c3 - b6 * c6 + delta) / b5
    w5 = _w_from_cos(c5)
    s1 = _draw(rng)
    b = [b1, b2, b3, b4, b5, b6]
    w = [w1, w2, w3, w4, w5, w6]
    s = [s1, zero, zero, s1, zero, zero]
    return LinkageParams.from_ratios(b, w, s)


_GENERATORS: dict[FamilyName, Callable[[random.Random, sympy.Expr], LinkageParams]] = {
    FamilyName.LINE_SYMMETRIC: _line_symmetric,
    FamilyName.HOOKE: _hooke,
    FamilyName.DIETMAIER: lambda rng, delta: _dietmaier(rng, delta, second=False),
    FamilyName.DIETMAIER_SECOND: lambda rng, delta: _dietmaier(rng, delta, second=True),
    FamilyName.PLANE_SYMMETRIC: _plane_symmetric,
    FamilyName.ORTHOGONAL: _orthogonal,
    FamilyName.NEW_FAMILY: _new_family,
}


def sample(
    name: str | FamilyName,
    seed: int,
    perturbation: Any = 0,
    mode: ScalarMode = ScalarMode.EXACT,
) -> LinkageParams:
    """Seed-deterministic member of a family (or a near-miss when perturbed)."""

    family = family_name(name)
    generator = _GENERATORS[family]
    delta = parse_scalar(perturbation) if isinstance(perturbation, str) else exact(perturbation)
    rng = random.Random(f"{family.value}:{seed}")
    for attempt in range(1, RESAMPLE_BUDGET + 1):
        try:
            params = generator(rng, delta)
        except (_Rejected, ParallelAxesError, ZeroDivisionError):
            continue
        if any(x.has(sympy.zoo, sympy.nan) for x in params.b + params.w + params.s):
            continue
        logger.debug("family_sampled", extra={"family": family.value, "seed": seed, "attempt": attempt})
        return params.converted(mode)
    raise FamilyError(f"Resampling budget exhausted for {family.value} (seed {seed})")


def _equations(p: LinkageParams, family: FamilyName) -> list[tuple[str, Any]]:
    b, c, s, f, w = p.b, p.c, p.s, p.f, p.w

    def at(values: tuple[Any, ...], i: int) -> Any:
        return cyclic(values, i)

    def zeros(values: tuple[Any, ...], symbol: str, indices: tuple[int, ...]) -> list[tuple[str, Any]]:
        return [(f"{symbol}_{i} = 0", at(values, i)) for i in indices]

    if family is FamilyName.LINE_SYMMETRIC:
        eqs = []
        for i in (1, 2, 3):
            eqs.append((f"b_{i} = b_{i + 3}", at(b, i) - at(b, i + 3)))
            eqs.append((f"w_{i} = w_{i + 3}", at(w, i) - at(w, i + 3)))
            eqs.append((f"s_{i} = s_{i + 3}", at(s, i) - at(s, i + 3)))
        return eqs

    if family is FamilyName.HOOKE:
        left = s[1] ** 2 + s[2] ** 2 + b[1] ** 2 - f[1] ** 2 + 2 * s[1] * s[2] * c[1]
        right = s[4] ** 2 + s[5] ** 2 + b[4] ** 2 - f[4] ** 2 + 2 * s[4] * s[5] * c[4]
        return (
            zeros(b, "b", (1, 3, 4, 6))
            + zeros(s, "s", (1, 4))
            + [("s_2^2+s_3^2+b_2^2-f_2^2+2s_2s_3c_2 = s_5^2+s_6^2+b_5^2-f_5^2+2s_5s_6c_5", left - right)]
        )

    if family in (FamilyName.DIETMAIER, FamilyName.DIETMAIER_SECOND, FamilyName.PLANE_SYMMETRIC):
        second = family is not FamilyName.DIETMAIER
        eqs = [
            ("b_6 = b_1", b[5] - b[0]),
            ("b_3 = b_4", b[2] - b[3]),
            ("b_2 = -b_5" if second else "b_2 = b_5", b[1] + b[4] if second else b[1] - b[4]),
            ("c_2 = c_5", c[1] - c[4]),
            ("f_6 + f_1 = f_3 + f_4", f[5] + f[0] - f[2] - f[3]),
            ("s_6 = s_2", s[5] - s[1]),
            ("s_3 = s_5", s[2] - s[4]),
        ] + zeros(s, "s", (1, 4))
        if family is FamilyName.PLANE_SYMMETRIC:
            eqs.append(("f_1 + f_6 = 0", f[0] + f[5]))
        return eqs

    if family is FamilyName.ORTHOGONAL:
        sphere = b[0] ** 2 + b[2] ** 2 + b[4] ** 2 - b[1] ** 2 - b[3] ** 2 - b[5] ** 2
        return (
            zeros(s, "s", tuple(range(1, JOINTS + 1)))
            + zeros(c, "c", tuple(range(1, JOINTS + 1)))
            + [("b_1^2+b_3^2+b_5^2 = b_2^2+b_4^2+b_6^2", sphere)]
        )

    sphere = (
        b[0] ** 2 + b[2] ** 2 + b[4] ** 2 + f[5] ** 2
        - b[1] ** 2 - b[3] ** 2 - b[5] ** 2 - f[2] ** 2
    )
    return [
        ("b_1^2+b_3^2+b_5^2+f_6^2 = b_2^2+b_4^2+b_6^2+f_3^2", sphere),
        ("f_2 + f_3 = f_5 + f_6", f[1] + f[2] - f[4] - f[5]),
        ("b_2 c_1 = b_3", b[1] * c[0] - b[2]),
        ("b_2 c_3 = b_1", b[1] * c[2] - b[0]),
        ("b_5 c_4 = b_6", b[4] * c[3] - b[5]),
        ("b_5 c_6 = b_4", b[4] * c[5] - b[3]),
        ("s_1 = s_4", s[0] - s[3]),
    ] + zeros(s, "s", (2, 3, 5, 6))


@dataclass(frozen=True)
class MembershipReport:
    family: FamilyName
    residuals: list[tuple[str, float, bool]]

    @property
    def member(self) -> bool:
        return all(passed for _, _, passed in self.residuals)

    def as_dict(self) -> dict[str, Any]:
        return {
            "family": self.family.value,
            "member": self.member,
            "equations": [
                {"equation": label, "residual": residual, "pass": passed}
                for label, residual, passed in self.residuals
            ],
        }


def membership(p: LinkageParams, name: str | FamilyName, tol: float = 1e-10) -> MembershipReport:
    """Check the family equations: exactly in EXACT mode, else relative to the length scale."""

    family = family_name(name)
    scale = max([1.0, *(magnitude(x) for x in p.b + p.s)]) ** 2
    rows: list[tuple[str, float, bool]] = []
    for label, value in _equations(p, family):
        if p.mode is ScalarMode.EXACT:
            passed = is_exact_zero(value)
        else:
            passed = magnitude(value) <= tol * scale
        rows.append((label, magnitude(value), passed))
    return MembershipReport(family, rows)


def classify(p: LinkageParams, tol: float = 1e-10) -> list[str]:
    """Names of every family whose equations ``p`` satisfies."""

    return [family.value for family in FamilyName if membership(p, family, tol).member]


def builtin_instance(name: str) -> LinkageParams:
    """The two printed instances: a line-symmetric Bricard linkage and the new-family example."""

    if name == "bricard_example":
        d = [sympy.Rational(3, 5), sympy.Rational(24, 13), sympy.Rational(72, 25)] * 2
        w = [sympy.Rational(1, 3), sympy.Rational(2, 3), sympy.Rational(3, 4)] * 2
        s = [sympy.Integer(4), sympy.Integer(5), sympy.Integer(1)] * 2
        return LinkageParams(tuple(d), tuple(s), tuple(w))
    if name == "new_example":
        R = sympy.Rational
        b = [R(-1, 3), R(-61, 33), R(305, 429), R(2000, 1001), R(-2900, 1001), R(1740, 1001)]
        w = [R(2, 3), sympy.Integer(-4), R(6, 5), R(1, 2), sympy.sqrt(54083849) / 6619, R(3, 7)]
        s = [R(2, 3), 0, 0, R(2, 3), 0, 0]
        return LinkageParams.from_ratios(b, w, s)
    raise FamilyError(f"Unknown builtin instance: {name}")
