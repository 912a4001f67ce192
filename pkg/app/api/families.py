"""Family sampling endpoints.

Example call (seeded orthogonal linkage):
    curl http://localhost:8790/api/families/orthogonal?seed=7
"""

from __future__ import annotations

import logging

from fastapi import APIRouter, Query

from app.api.reports import ReportResponse, http_error
from app.commands import INPUT_ERRORS, run_family


logger = logging.getLogger("linkage_bonds.api.families")

router = APIRouter(prefix="/api/families", tags=["families"])


@router.get("/builtin/{name}", response_model=ReportResponse)
def builtin(name: str) -> ReportResponse:
    try:
        report = run_family(builtin=name)
    except INPUT_ERRORS as exc:
        raise http_error(exc) from exc
    return ReportResponse.from_report(report)


@router.get("/{name}", response_model=ReportResponse)
def sample_family(
    name: str,
    seed: int = Query(default=0),
    perturbation: str = Query(default="0", description="Shift of the last solved equation"),
) -> ReportResponse:
    try:
        report = run_family(name=name, seed=seed, perturbation=perturbation)
    except INPUT_ERRORS as exc:
        raise http_error(exc) from exc
    logger.info("family_sampled", extra={"family": name, "seed": seed, "exit_code": report.exit_code})
    return ReportResponse.from_report(report)
