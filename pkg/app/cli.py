"""Command-line front end for linkage-bonds.

Usage:
    python -m app.cli check bricard.json --exact
    python -m app.cli quad bricard.json --index 1 --sign plus
    python -m app.cli diagram enumerate --out hypotheses.jsonl
    python -m app.cli diagram conditions new.json
    python -m app.cli diagram show --builtin waldron
    python -m app.cli family --name orthogonal --seed 7 --out orthogonal.json
    python -m app.cli trace new.json --out curve.csv --report-diff 1 4

The report is printed to stdout as JSON; logs go to stderr. The process exit
code is the report's exit code (0 holds, 1 excluded or failed, 2 input error).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
from pathlib import Path
from typing import Callable, Sequence

from app.commands import (
    EXIT_OK,
    INPUT_ERRORS,
    CommandReport,
    error_report,
    family_names,
    run_check,
    run_diagram_conditions,
    run_diagram_enumerate,
    run_diagram_show,
    run_family,
    run_quad,
    run_trace,
)
from app.config import Settings, configure_logging, get_settings, resolve_output_path
from app.kinematics.diagram import figure_diagrams
from app.kinematics.export import write_curve_csv
from app.kinematics.families import BUILTIN_INSTANCES
from app.kinematics.mobility import load_polynomials
from app.kinematics.params import compute_sha256_from_path, read_json, write_json
from app.kinematics.scalars import ParameterError


logger = logging.getLogger("linkage_bonds.cli")

REPORT_OUTPUT_COMMANDS = ("check", "quad", "diagram conditions", "diagram show")


def digest_paths(paths: Sequence[Path]) -> str:
    """sha256 of one input file, or of the concatenated per-file digests."""

    digests = [compute_sha256_from_path(path) for path in paths if path.is_file()]
    if len(digests) == 1:
        return digests[0]
    return hashlib.sha256("".join(digests).encode("ascii")).hexdigest()


def _object(path: Path) -> dict:
    document = read_json(path)
    if not isinstance(document, dict):
        raise ParameterError(f"{path} must hold a JSON object")
    return document


def _settings_for(args: argparse.Namespace) -> Settings:
    settings = get_settings()
    if args.tol is not None:
        settings = settings.model_copy(update={"tol": args.tol})
    return settings


def _cmd_check(args: argparse.Namespace) -> CommandReport:
    inputs = [args.params] + ([args.hypothesis] if args.hypothesis else [])
    digest = digest_paths(inputs)
    hypothesis = _object(args.hypothesis) if args.hypothesis else None
    return run_check(
        _object(args.params),
        hypothesis,
        tol=args.tol,
        exact=args.exact,
        inputs_digest=digest,
        settings=_settings_for(args),
    )


def _cmd_quad(args: argparse.Namespace) -> CommandReport:
    return run_quad(
        _object(args.params),
        args.index,
        args.sign,
        exact=args.exact,
        inputs_digest=digest_paths([args.params]),
        settings=_settings_for(args),
    )


def _cmd_diagram(args: argparse.Namespace) -> CommandReport:
    if args.diagram_command == "enumerate":
        report, records = run_diagram_enumerate(args.limit)
        if args.out:
            target = resolve_output_path(args.out)
            with target.open("w", encoding="utf-8") as handle:
                for record in records:
                    handle.write(json.dumps(record, sort_keys=True) + "\n")
            report.results["written"] = str(target)
            logger.info("hypotheses_written", extra={"path": str(target), "count": len(records)})
        return report
    if args.diagram_command == "conditions":
        return run_diagram_conditions(_object(args.hypothesis), inputs_digest=digest_paths([args.hypothesis]))
    return run_diagram_show(args.builtin)


def _cmd_family(args: argparse.Namespace) -> CommandReport:
    report = run_family(
        name=args.name,
        seed=args.seed,
        builtin=args.builtin,
        perturbation=args.perturbation,
        tol=args.tol,
        settings=_settings_for(args),
    )
    if args.out:
        target = write_json(resolve_output_path(args.out), report.results["params"])
        report.results["written"] = str(target)
    return report


def _cmd_trace(args: argparse.Namespace) -> CommandReport:
    inputs = [args.params] + ([args.verify_poly] if args.verify_poly else [])
    digest = digest_paths(inputs)
    polynomials = load_polynomials(args.verify_poly) if args.verify_poly else None
    report, curve = run_trace(
        _object(args.params),
        steps=args.steps,
        step_size=args.step_size,
        attempts=args.attempts,
        seed=args.seed,
        polynomials=polynomials,
        diff_pairs=[tuple(pair) for pair in args.report_diff or []],
        inputs_digest=digest,
        settings=_settings_for(args),
    )
    if curve is not None and args.out:
        target = write_curve_csv(resolve_output_path(args.out), curve)
        report.results["written"] = str(target)
    return report


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None, help="Numeric tolerance (default from settings)")
    common.add_argument("--exact", action="store_true", help="Exact scalars instead of high precision")
    common.add_argument("--out", type=Path, default=None, help="Output file")
    common.add_argument("--seed", type=int, default=0, help="Random seed")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="linkage-bonds", description="Bond-theory checks for closed 6R linkages")
    commands = parser.add_subparsers(dest="command", required=True)

    check = commands.add_parser("check", parents=[common], help="Rigidity certificate or hypothesis check")
    check.add_argument("params", type=Path)
    check.add_argument("--hypothesis", type=Path, default=None)
    check.set_defaults(handler=_cmd_check)

    quad = commands.add_parser("quad", parents=[common], help="Quad polynomial coefficients")
    quad.add_argument("params", type=Path)
    quad.add_argument("--index", type=int, required=True)
    quad.add_argument("--sign", choices=["plus", "minus"], default="plus")
    quad.set_defaults(handler=_cmd_quad)

    diagram = commands.add_parser("diagram", help="Bond-diagram hypotheses")
    diagram_commands = diagram.add_subparsers(dest="diagram_command", required=True)
    enumerate_cmd = diagram_commands.add_parser("enumerate", parents=[common])
    enumerate_cmd.add_argument("--limit", type=int, default=20, help="Hypotheses echoed in the report")
    conditions = diagram_commands.add_parser("conditions", parents=[common])
    conditions.add_argument("hypothesis", type=Path)
    show = diagram_commands.add_parser("show", parents=[common])
    show.add_argument("--builtin", required=True, choices=sorted(figure_diagrams()))
    diagram.set_defaults(handler=_cmd_diagram)

    family = commands.add_parser("family", parents=[common], help=f"Sample one of: {', '.join(family_names())}")
    family.add_argument("--name", default=None)
    family.add_argument("--builtin", default=None, help=f"One of: {', '.join(BUILTIN_INSTANCES)}")
    family.add_argument("--perturbation", default="0", help="Shift of the last solved equation")
    family.set_defaults(handler=_cmd_family)

    trace = commands.add_parser("trace", parents=[common], help="Trace the configuration curve")
    trace.add_argument("params", type=Path)
    trace.add_argument("--steps", type=int, default=None)
    trace.add_argument("--step-size", type=float, default=None)
    trace.add_argument("--attempts", type=int, default=None)
    trace.add_argument("--verify-poly", type=Path, default=None)
    trace.add_argument("--report-diff", type=int, nargs=2, action="append", metavar=("I", "J"))
    trace.set_defaults(handler=_cmd_trace)
    return parser


def _input_paths(args: argparse.Namespace) -> list[Path]:
    names = ("params", "hypothesis", "verify_poly")
    return [getattr(args, name) for name in names if isinstance(getattr(args, name, None), Path)]


def _command_label(args: argparse.Namespace) -> str:
    sub = getattr(args, "diagram_command", None)
    return f"{args.command} {sub}" if sub else args.command


def main(argv: Sequence[str] | None = None) -> int:
    configure_logging()
    args = build_parser().parse_args(argv)
    handler: Callable[[argparse.Namespace], CommandReport] = args.handler
    try:
        report = handler(args)
    except INPUT_ERRORS as exc:
        logger.warning("input_error", extra={"command": _command_label(args), "error": str(exc)})
        report = error_report(_command_label(args), digest_paths(_input_paths(args)), exc)
    if args.out and report.command in REPORT_OUTPUT_COMMANDS:
        write_json(resolve_output_path(args.out), report.as_dict())
    print(report.to_json())
    if report.exit_code != EXIT_OK:
        logger.info("command_finished", extra={"command": report.command, "exit_code": report.exit_code})
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
