"""Bond-diagram endpoints: enumeration, induced conditions, catalogue."""

from __future__ import annotations

import logging
from typing import Any

from fastapi import APIRouter, HTTPException, Query
from pydantic import BaseModel

from app.api.reports import ReportResponse, http_error
from app.commands import INPUT_ERRORS, run_diagram_conditions, run_diagram_enumerate, run_diagram_show
from app.kinematics.diagram import HypothesisError


logger = logging.getLogger("linkage_bonds.api.diagram")

router = APIRouter(prefix="/api/diagram", tags=["diagram"])


class ConditionsRequest(BaseModel):
    hypothesis: dict[str, Any]


@router.post("/conditions", response_model=ReportResponse)
async def conditions(payload: ConditionsRequest) -> ReportResponse:
    try:
        report = run_diagram_conditions(payload.hypothesis)
    except INPUT_ERRORS as exc:
        raise http_error(exc) from exc
    return ReportResponse.from_report(report)


@router.get("/enumerate", response_model=ReportResponse)
def enumerate_valid(limit: int = Query(default=20, ge=0, le=50000)) -> ReportResponse:
    report, _ = run_diagram_enumerate(limit)
    logger.info("hypotheses_enumerated", extra={"count": report.results["count"]})
    return ReportResponse.from_report(report)


@router.get("/builtin/{name}", response_model=ReportResponse)
async def builtin(name: str) -> ReportResponse:
    try:
        report = run_diagram_show(name)
    except HypothesisError as exc:
        raise HTTPException(status_code=404, detail=str(exc)) from exc
    return ReportResponse.from_report(report)
