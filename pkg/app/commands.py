"""Command orchestration shared by the CLI and the HTTP routers.

Every producer returns a :class:`CommandReport`; domain errors propagate as
exceptions so each front end can map them (exit code 2 / HTTP 4xx).

Example:
    from app.commands import run_check
    report = run_check({"d": [...], "s": [...], "w": [...]}, exact=True)
    print(report.to_json())
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence

from app.config import Settings, get_settings
from app.kinematics.diagram import (
    HypothesisError,
    bennett_report,
    builtin_hypothesis,
    conditions_for,
    dump_hypothesis,
    enumerate_hypotheses,
    evaluate,
    parse_hypothesis,
    rigidity_certificate,
)
from app.kinematics.export import curve_rows
from app.kinematics.families import (
    FamilyError,
    FamilyName,
    builtin_instance,
    classify,
    family_name,
    membership,
    sample,
)
from app.kinematics.linkage import JOINTS, LinkageParams
from app.kinematics.mobility import (
    ConfigCurve,
    PolynomialCheck,
    TraceError,
    find_seed,
    trace_both_ways,
    verify_curve,
)
from app.kinematics.params import digest_document, dump_params, is_rational_document, parse_params
from app.kinematics.quadpoly import FAR_PAIRS, Sign, far_bound, gcd_degree, pair_quads, quad, resultant
from app.kinematics.scalars import ParameterError, ScalarMode, ScalarModeError, magnitude


logger = logging.getLogger("linkage_bonds.commands")

EXIT_OK = 0
EXIT_EXCLUDED = 1
EXIT_INPUT_ERROR = 2

INPUT_ERRORS = (ParameterError, HypothesisError, FamilyError, ScalarModeError)


@dataclass
class CommandReport:
    """Command echo, input digest, structured results and exit code."""

    command: str
    inputs_digest: str
    results: dict[str, Any] = field(default_factory=dict)
    exit_code: int = EXIT_OK

    def as_dict(self) -> dict[str, Any]:
        return {
            "command": self.command,
            "inputs_digest": self.inputs_digest,
            "results": self.results,
            "exit_code": self.exit_code,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True)


def error_report(command: str, inputs_digest: str, exc: Exception) -> CommandReport:
    return CommandReport(
        command=command,
        inputs_digest=inputs_digest,
        results={"error": str(exc), "error_type": type(exc).__name__},
        exit_code=EXIT_INPUT_ERROR,
    )


def _mode(exact: bool) -> ScalarMode:
    return ScalarMode.EXACT if exact else ScalarMode.MP


def _require_tolerance(tol: float) -> float:
    if not tol >= 0:
        raise ParameterError(f"Tolerance must be non-negative, got {tol}")
    return tol


def _require_positive(name: str, value: float) -> None:
    if not value > 0:
        raise ParameterError(f"{name} must be positive, got {value}")


def far_pair_summary(p: LinkageParams, tol: float) -> list[dict[str, Any]]:
    rows = []
    for pair in FAR_PAIRS:
        row: dict[str, Any] = {"pair": [pair, pair + 3], "far_bound": far_bound(p, pair, tol)}
        for sign in Sign:
            first, second = pair_quads(p, pair, sign)
            row[sign.value] = {
                "gcd_degree": gcd_degree(first, second, tol),
                "resultant_abs": magnitude(resultant(first, second)),
            }
        rows.append(row)
    return rows


def run_check(
    params_document: Mapping[str, Any],
    hypothesis_document: Mapping[str, Any] | None = None,
    tol: float | None = None,
    exact: bool = False,
    inputs_digest: str | None = None,
    settings: Settings | None = None,
) -> CommandReport:
    """Rigidity certificate and far bounds, or a hypothesis evaluation."""

    settings = settings or get_settings()
    tol = _require_tolerance(settings.tol if tol is None else tol)
    digest = inputs_digest or digest_document([params_document, hypothesis_document])
    params = parse_params(params_document, _mode(exact), settings.precision_bits)

    if hypothesis_document is not None:
        hypothesis = parse_hypothesis(hypothesis_document)
        report = evaluate(hypothesis, params, tol)
        logger.info("hypothesis_checked", extra={"verdict": report.verdict})
        return CommandReport(
            command="check",
            inputs_digest=digest,
            results={"hypothesis": dump_hypothesis(hypothesis), **report.as_dict()},
            exit_code=EXIT_OK if report.holds else EXIT_EXCLUDED,
        )

    certificate = rigidity_certificate(params, tol)
    results = {
        "mode": params.mode.value,
        "bennett": [status.as_dict() for status in bennett_report(params, tol)],
        "far_pairs": far_pair_summary(params, tol),
        "families": classify(params, tol),
        "rigid": certificate is not None,
        "certificate": certificate.as_dict() if certificate else None,
    }
    logger.info("rigidity_checked", extra={"rigid": certificate is not None})
    return CommandReport(
        command="check",
        inputs_digest=digest,
        results=results,
        exit_code=EXIT_EXCLUDED if certificate else EXIT_OK,
    )


def run_quad(
    params_document: Mapping[str, Any],
    index: int,
    sign: str,
    exact: bool = False,
    inputs_digest: str | None = None,
    settings: Settings | None = None,
) -> CommandReport:
    """Coefficients of ``Q_index^sign``; exact whenever every input is rational."""

    settings = settings or get_settings()
    if not 1 <= index <= JOINTS:
        raise ParameterError(f"Index must be in 1..{JOINTS}, got {index}")
    try:
        chosen = Sign(sign)
    except ValueError as exc:
        raise ParameterError(f"Sign must be 'plus' or 'minus', got {sign!r}") from exc
    mode = _mode(exact or is_rational_document(params_document))
    params = parse_params(params_document, mode, settings.precision_bits)
    polynomial = quad(params, index, chosen)
    coefficients = polynomial.as_dict()
    return CommandReport(
        command="quad",
        inputs_digest=inputs_digest or digest_document(params_document),
        results={
            "index": index,
            "sign": chosen.value,
            "mode": params.mode.value,
            **coefficients,
            "polynomial": f"x^2 + ({coefficients['a1']})*x + ({coefficients['a0']})",
        },
    )


def run_diagram_enumerate(limit: int | None = None) -> tuple[CommandReport, list[dict[str, Any]]]:
    """Valid hypotheses: the report carries the count, the list carries the records."""

    records = [dump_hypothesis(hypothesis) for hypothesis in enumerate_hypotheses()]
    shown = records if limit is None else records[:limit]
    report = CommandReport(
        command="diagram enumerate",
        inputs_digest=digest_document({"limit": limit}),
        results={"count": len(records), "hypotheses": shown},
    )
    return report, records


def run_diagram_conditions(hypothesis_document: Mapping[str, Any], inputs_digest: str | None = None) -> CommandReport:
    hypothesis = parse_hypothesis(hypothesis_document)
    system = conditions_for(hypothesis)
    return CommandReport(
        command="diagram conditions",
        inputs_digest=inputs_digest or digest_document(hypothesis_document),
        results={"hypothesis": dump_hypothesis(hypothesis), **system.as_dict()},
    )


def run_diagram_show(name: str) -> CommandReport:
    hypothesis = builtin_hypothesis(name)
    return CommandReport(
        command="diagram show",
        inputs_digest=digest_document({"builtin": name}),
        results={"name": name, "hypothesis": dump_hypothesis(hypothesis)},
    )


def run_family(
    name: str | None = None,
    seed: int = 0,
    builtin: str | None = None,
    perturbation: str | int = 0,
    tol: float | None = None,
    settings: Settings | None = None,
) -> CommandReport:
    """Generate (or look up) a parameter set and echo family membership."""

    settings = settings or get_settings()
    tol = _require_tolerance(settings.tol if tol is None else tol)
    if (name is None) == (builtin is None):
        raise ParameterError("Give exactly one of a family name and a builtin instance")

    if builtin is not None:
        params = builtin_instance(builtin)
        families = classify(params, tol)
        results = {"builtin": builtin, "params": dump_params(params), "families": families}
        return CommandReport(
            command="family",
            inputs_digest=digest_document({"builtin": builtin}),
            results=results,
        )

    family = family_name(name or "")
    params = sample(family, seed, perturbation=perturbation)
    report = membership(params, family, tol)
    results = {
        "family": family.value,
        "seed": seed,
        "perturbation": str(perturbation),
        "params": dump_params(params),
        "membership": report.as_dict(),
        "families": classify(params, tol),
    }
    return CommandReport(
        command="family",
        inputs_digest=digest_document({"family": family.value, "seed": seed, "perturbation": str(perturbation)}),
        results=results,
        exit_code=EXIT_OK if report.member else EXIT_EXCLUDED,
    )


def family_names() -> list[str]:
    return [family.value for family in FamilyName]


def run_trace(
    params_document: Mapping[str, Any],
    steps: int | None = None,
    step_size: float | None = None,
    attempts: int | None = None,
    seed: int = 0,
    polynomials: Sequence[PolynomialCheck] | None = None,
    diff_pairs: Iterable[tuple[int, int]] = (),
    include_rows: bool = False,
    inputs_digest: str | None = None,
    settings: Settings | None = None,
) -> tuple[CommandReport, ConfigCurve | None]:
    """find_seed, trace in both directions, verify; returns the report and the curve."""

    settings = settings or get_settings()
    steps = settings.max_steps if steps is None else steps
    step_size = settings.step_size if step_size is None else step_size
    attempts = settings.seed_attempts if attempts is None else attempts
    _require_positive("steps", steps)
    _require_positive("step_size", step_size)
    _require_positive("attempts", attempts)
    pairs = list(diff_pairs)
    for first, second in pairs:
        if not (1 <= first <= JOINTS and 1 <= second <= JOINTS):
            raise ParameterError(f"Joint indices must be in 1..{JOINTS}, got {first} {second}")
    digest = inputs_digest or digest_document(params_document)
    params = parse_params(params_document, ScalarMode.FLOAT)

    start = find_seed(
        params,
        attempts=attempts,
        seed=seed,
        tol=settings.seed_tol,
        require_curve=True,
        rank_gap=settings.rank_gap,
    )
    if start is None:
        return (
            CommandReport(
                command="trace",
                inputs_digest=digest,
                results={"error": f"no curve seed found in {attempts} attempts", "attempts": attempts},
                exit_code=EXIT_EXCLUDED,
            ),
            None,
        )

    try:
        curve = trace_both_ways(params, start, steps, step_size, settings.trace_tol, settings.rank_gap)
    except TraceError as exc:
        return (
            CommandReport(
                command="trace",
                inputs_digest=digest,
                results={"error": str(exc), "seed": list(start.theta)},
                exit_code=EXIT_EXCLUDED,
            ),
            None,
        )

    verification = verify_curve(params, curve, polynomials)
    results: dict[str, Any] = {
        "seed": list(start.theta),
        "point_count": len(curve),
        "closed": curve.closed,
        "diagnostic": curve.diagnostic,
        "max_residual": curve.max_residual(),
        "min_rank_gap": curve.min_rank_gap(),
        "verification": verification.as_dict(),
        "angle_differences": {
            f"{first}-{second}": curve.max_angle_difference(first, second) for first, second in pairs
        },
    }
    if include_rows:
        results["rows"] = curve_rows(curve)
    succeeded = len(curve) > 1 and (curve.max_residual() or 0.0) < settings.trace_tol
    return (
        CommandReport(
            command="trace",
            inputs_digest=digest,
            results=results,
            exit_code=EXIT_OK if succeeded else EXIT_EXCLUDED,
        ),
        curve,
    )
