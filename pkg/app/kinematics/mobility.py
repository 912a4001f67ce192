"""Numerical mobility evidence: seed search, curve tracing and rank checks.

All work here happens in float64. A linkage with a one-dimensional
configuration curve shows a closure Jacobian of rank 5 along the curve;
the tracer follows it by pseudo-arclength continuation.

Example:
    from app.kinematics.families import builtin_instance
    from app.kinematics.mobility import find_seed, trace
    params = builtin_instance("new_example")
    start = find_seed(params, attempts=50, seed=0, require_curve=True)
    curve = trace(params, start, steps=400, step_size=0.05)
"""

from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np
import sympy
from pydantic import BaseModel, ConfigDict, Field, ValidationError
from scipy.optimize import least_squares

from .linkage import JOINTS, ClosureModel, ConfigurationPoint, LinkageParams, wrap_angles
from .params import read_json
from .scalars import ParameterError


logger = logging.getLogger("linkage_bonds.mobility")

SEED_TOL = 1e-11
TRACE_TOL = 1e-9
RANK_GAP = 1e6
DEFAULT_STEP_SIZE = 0.05
DEFAULT_MAX_STEPS = 2000
MAX_HALVINGS = 8
CORRECTOR_ITERS = 12
CLOSURE_ALIGNMENT = 0.9
T_SYMBOLS = sympy.symbols("t1:7")


class TraceError(RuntimeError):
    """Raised when the continuation preconditions do not hold."""


@dataclass
class ConfigCurve:
    """Ordered closure configurations along a traced one-dimensional component."""

    points: list[ConfigurationPoint] = field(default_factory=list)
    residuals: list[float] = field(default_factory=list)
    rank_gaps: list[float] = field(default_factory=list)
    closed: bool = False
    diagnostic: str | None = None

    def __len__(self) -> int:
        return len(self.points)

    def angles(self) -> np.ndarray:
        if not self.points:
            return np.zeros((0, JOINTS))
        return np.asarray([point.theta for point in self.points], dtype=np.float64)

    def max_residual(self) -> float | None:
        return max(self.residuals) if self.residuals else None

    def min_rank_gap(self) -> float | None:
        return min(self.rank_gaps) if self.rank_gaps else None

    def max_angle_difference(self, first: int, second: int) -> float | None:
        """max |theta_first - theta_second| over the curve, wrapped to (-pi, pi]."""

        if not self.points:
            return None
        angles = self.angles()
        return float(np.max(np.abs(wrap_angles(angles[:, first - 1] - angles[:, second - 1]))))


def singular_values(jacobian: np.ndarray) -> np.ndarray:
    return np.linalg.svd(jacobian, compute_uv=False)


def rank_gap_of(values: np.ndarray) -> float:
    """sigma_5 / sigma_6 (descending singular values)."""

    return float(values[-2] / max(values[-1], np.finfo(np.float64).tiny))


def rank_profile(p: LinkageParams, cfg: ConfigurationPoint) -> np.ndarray:
    """Singular values of the closure Jacobian at ``cfg``, descending."""

    return singular_values(ClosureModel.from_params(p).jacobian(cfg.as_array()))


def _newton_polish(model: ClosureModel, x: np.ndarray, iters: int = 6) -> np.ndarray:
    current = x.copy()
    for _ in range(iters):
        residual = model.residual(current)
        if np.max(np.abs(residual)) < 1e-14:
            break
        delta = np.linalg.lstsq(model.jacobian(current), -residual, rcond=None)[0]
        current = current + delta
    return current


def find_seed(
    p: LinkageParams,
    attempts: int = 200,
    seed: int = 0,
    tol: float = SEED_TOL,
    require_curve: bool = False,
    rank_gap: float = RANK_GAP,
    model: ClosureModel | None = None,
) -> ConfigurationPoint | None:
    """Closure configuration from random starts by damped least squares.

    With ``require_curve`` the search continues past isolated solutions until
    the Jacobian shows the rank-5 signature of a curve.
    """

    if attempts < 1:
        raise ValueError("attempts must be at least 1")
    model = model or ClosureModel.from_params(p)
    rng = np.random.default_rng(seed)
    for attempt in range(1, attempts + 1):
        start = rng.uniform(-math.pi, math.pi, JOINTS)
        result = least_squares(
            model.residual,
            start,
            jac=model.jacobian,
            method="lm",
            xtol=1e-15,
            ftol=1e-15,
            gtol=1e-15,
            max_nfev=400,
        )
        x = _newton_polish(model, result.x)
        residual = float(np.max(np.abs(model.residual(x))))
        if not math.isfinite(residual) or residual >= tol:
            continue
        gap = rank_gap_of(singular_values(model.jacobian(x)))
        if require_curve and gap <= rank_gap:
            logger.debug("isolated_solution_skipped", extra={"attempt": attempt, "rank_gap": gap})
            continue
        logger.info("seed_found", extra={"attempt": attempt, "residual": residual, "rank_gap": gap})
        return ConfigurationPoint(tuple(x))
    logger.info("seed_not_found", extra={"attempts": attempts})
    return None


def _tangent(jacobian: np.ndarray) -> np.ndarray:
    _, _, vt = np.linalg.svd(jacobian)
    return vt[-1]


def _correct(
    model: ClosureModel,
    predicted: np.ndarray,
    tangent: np.ndarray,
    tol: float,
) -> tuple[np.ndarray, bool, int]:
    """Newton on the closure equations restricted to the hyperplane normal to ``tangent``."""

    current = predicted.copy()
    iteration = 0
    for iteration in range(1, CORRECTOR_ITERS + 1):
        residual = model.residual(current)
        system = np.concatenate((residual, [tangent @ (current - predicted)]))
        if not np.all(np.isfinite(system)):
            return current, False, iteration
        matrix = np.vstack((model.jacobian(current), tangent))
        delta = np.linalg.lstsq(matrix, -system, rcond=None)[0]
        current = current + delta
        if np.linalg.norm(delta) < 1e-14:
            break
    final = float(np.max(np.abs(model.residual(current))))
    return current, final < tol, iteration


def trace(
    p: LinkageParams,
    start: ConfigurationPoint,
    steps: int = DEFAULT_MAX_STEPS,
    step_size: float = DEFAULT_STEP_SIZE,
    direction: int = 1,
    tol: float = TRACE_TOL,
    rank_gap: float = RANK_GAP,
    model: ClosureModel | None = None,
) -> ConfigCurve:
    """Pseudo-arclength continuation from ``start`` along the configuration curve."""

    if step_size <= 0:
        raise ValueError("step_size must be positive")
    if direction not in (1, -1):
        raise ValueError("direction must be +1 or -1")
    model = model or ClosureModel.from_params(p)
    origin = start.as_array()

    start_residual = float(np.max(np.abs(model.residual(origin))))
    if start_residual >= tol:
        raise TraceError(f"start is not a closure configuration (residual {start_residual:.3e})")
    start_values = singular_values(model.jacobian(origin))
    start_gap = rank_gap_of(start_values)
    if start_gap <= rank_gap:
        raise TraceError(f"start is isolated or singular (rank gap {start_gap:.3e})")

    tangent = _tangent(model.jacobian(origin))
    if tangent[np.argmax(np.abs(tangent))] < 0:
        tangent = -tangent
    tangent = direction * tangent
    initial_tangent = tangent.copy()

    curve = ConfigCurve(points=[start], residuals=[start_residual], rank_gaps=[start_gap])
    x = origin.copy()
    h = step_size
    farthest = 0.0
    for step in range(1, steps + 1):
        accepted: np.ndarray | None = None
        for _ in range(MAX_HALVINGS + 1):
            predicted = x + h * tangent
            corrected, ok, _ = _correct(model, predicted, tangent, tol)
            if ok and np.linalg.norm(corrected - x) <= 2.0 * h:
                accepted = corrected
                break
            h *= 0.5
        if accepted is None:
            curve.diagnostic = f"corrector diverged after {MAX_HALVINGS} halvings at step {step}"
            logger.warning("trace_corrector_failed", extra={"step": step, "points": len(curve)})
            break

        jacobian = model.jacobian(accepted)
        values = singular_values(jacobian)
        new_tangent = _tangent(jacobian)
        if new_tangent @ tangent < 0:
            new_tangent = -new_tangent

        curve.points.append(ConfigurationPoint(tuple(accepted)))
        curve.residuals.append(float(np.max(np.abs(model.residual(accepted)))))
        curve.rank_gaps.append(rank_gap_of(values))

        distance = float(np.linalg.norm(wrap_angles(accepted - origin)))
        farthest = max(farthest, distance)
        if farthest > 2.0 * step_size and distance < step_size and new_tangent @ initial_tangent > CLOSURE_ALIGNMENT:
            curve.closed = True
            break

        x, tangent = accepted, new_tangent
        h = min(h * 1.5, step_size)

    logger.info(
        "trace_finished",
        extra={"points": len(curve), "closed": curve.closed, "diagnostic": curve.diagnostic},
    )
    return curve


def trace_both_ways(
    p: LinkageParams,
    start: ConfigurationPoint,
    steps: int = DEFAULT_MAX_STEPS,
    step_size: float = DEFAULT_STEP_SIZE,
    tol: float = TRACE_TOL,
    rank_gap: float = RANK_GAP,
) -> ConfigCurve:
    """Trace forward; if the curve does not close, also trace backward and join."""

    model = ClosureModel.from_params(p)
    forward = trace(p, start, steps, step_size, 1, tol, rank_gap, model)
    if forward.closed:
        return forward
    backward = trace(p, start, steps, step_size, -1, tol, rank_gap, model)
    return ConfigCurve(
        points=list(reversed(backward.points[1:])) + forward.points,
        residuals=list(reversed(backward.residuals[1:])) + forward.residuals,
        rank_gaps=list(reversed(backward.rank_gaps[1:])) + forward.rank_gaps,
        closed=False,
        diagnostic=forward.diagnostic or backward.diagnostic,
    )


class PolynomialFile(BaseModel):
    """Polynomials in ``t1..t6`` (``t_1`` spelling accepted) expected to vanish on the curve."""

    model_config = ConfigDict(extra="forbid")

    polynomials: list[str] = Field(min_length=1)


@dataclass(frozen=True)
class PolynomialCheck:
    """A polynomial in the joint coordinates, evaluated projectively."""

    text: str
    expression: sympy.Expr
    degrees: tuple[int, ...]
    _homogeneous: Any = field(repr=False, compare=False)

    @classmethod
    def parse(cls, text: str) -> "PolynomialCheck":
        cleaned = re.sub(r"t_(\d)", r"t\1", text).replace("^", "**")
        names = {f"t{i}": symbol for i, symbol in enumerate(T_SYMBOLS, start=1)}
        try:
            expression = sympy.sympify(cleaned, locals=names)
        except (sympy.SympifyError, SyntaxError, TypeError) as exc:
            raise ParameterError(f"Malformed polynomial: {text!r}") from exc
        if expression.free_symbols - set(T_SYMBOLS):
            raise ParameterError(f"Polynomial {text!r} uses symbols other than t1..t6")
        try:
            poly = sympy.Poly(expression, *T_SYMBOLS)
        except sympy.PolynomialError as exc:
            raise ParameterError(f"Not a polynomial: {text!r}") from exc

        degrees = tuple(poly.degree(symbol) for symbol in T_SYMBOLS)
        cos_symbols = sympy.symbols("c1:7")
        sin_symbols = sympy.symbols("s1:7")
        homogeneous = sympy.Integer(0)
        for monomial, coeff in poly.terms():
            term = sympy.Float(coeff) if not coeff.is_Rational else coeff
            for power, degree, c_sym, s_sym in zip(monomial, degrees, cos_symbols, sin_symbols):
                term *= c_sym**power * s_sym ** (degree - power)
            homogeneous += term
        function = sympy.lambdify((*cos_symbols, *sin_symbols), homogeneous, modules="numpy")
        return cls(text, expression, degrees, function)

    def evaluate(self, theta: Sequence[float]) -> float:
        """|p| at ``t_i = cos(theta_i/2) / sin(theta_i/2)``, times prod sin(theta_i/2)**deg_i."""

        halves = np.asarray(theta, dtype=np.float64) / 2.0
        return float(abs(self._homogeneous(*np.cos(halves), *np.sin(halves))))


def parse_polynomials(texts: Iterable[str]) -> list[PolynomialCheck]:
    return [PolynomialCheck.parse(text) for text in texts]


def load_polynomials(path: Path) -> list[PolynomialCheck]:
    try:
        document = PolynomialFile.model_validate(read_json(path))
    except ValidationError as exc:
        raise ParameterError(f"Invalid polynomial file: {exc.errors()[0]['msg']}") from exc
    return parse_polynomials(document.polynomials)


@dataclass(frozen=True)
class CurveReport:
    point_count: int
    max_residual: float | None
    max_coordinate5: float | None
    polynomials: dict[str, float]

    def as_dict(self) -> dict[str, Any]:
        return {
            "point_count": self.point_count,
            "max_residual": self.max_residual,
            "max_coordinate5": self.max_coordinate5,
            "polynomials": dict(self.polynomials),
        }


def verify_curve(
    p: LinkageParams,
    curve: ConfigCurve,
    polys: Sequence[PolynomialCheck] | None = None,
) -> CurveReport:
    """Recompute closure residuals and polynomial maxima over every curve point."""

    if not curve.points:
        return CurveReport(0, None, None, {})
    model = ClosureModel.from_params(p)
    residual_max = 0.0
    coordinate5_max = 0.0
    for point in curve.points:
        product = model.product(point.as_array())
        residual_max = max(residual_max, float(np.max(np.abs(product[[1, 2, 3, 5, 6, 7]]))))
        coordinate5_max = max(coordinate5_max, abs(float(product[4])))
    maxima: dict[str, float] = {}
    for check in polys or []:
        maxima[check.text] = max(check.evaluate(point.theta) for point in curve.points)
    return CurveReport(len(curve.points), residual_max, coordinate5_max, maxima)
