"""Rigidity and quad-polynomial endpoints for linkage-bonds.

Example call (certificate for a parameter document):
    curl -X POST http://localhost:8790/api/check \
        -H 'Content-Type: application/json' \
        -d '{"params": {"d": [...], "s": [...], "w": [...]}, "exact": true}'
"""

from __future__ import annotations

import logging
from typing import Any, Literal

from fastapi import APIRouter
from pydantic import BaseModel, Field

from app.api.reports import ReportResponse, http_error
from app.commands import INPUT_ERRORS, run_check, run_quad
from app.config import get_settings


logger = logging.getLogger("linkage_bonds.api.check")

router = APIRouter(prefix="/api", tags=["check"])


class CheckRequest(BaseModel):
    params: dict[str, Any] = Field(description="Parameter document with d, s and w (or phi_degrees)")
    hypothesis: dict[str, Any] | None = Field(default=None, description="Optional bond hypothesis")
    tol: float | None = Field(default=None, gt=0, description="Tolerance override")
    exact: bool = Field(default=False, description="Exact scalars instead of high precision")


class QuadRequest(BaseModel):
    params: dict[str, Any]
    index: int = Field(description="Joint index 1..6")
    sign: Literal["plus", "minus"] = "plus"
    exact: bool = False


@router.post("/check", response_model=ReportResponse)
def check(payload: CheckRequest) -> ReportResponse:
    settings = get_settings()
    if payload.tol is not None:
        settings = settings.model_copy(update={"tol": payload.tol})
    try:
        report = run_check(payload.params, payload.hypothesis, exact=payload.exact, settings=settings)
    except INPUT_ERRORS as exc:
        logger.warning("check_rejected", extra={"error": str(exc)})
        raise http_error(exc) from exc
    logger.info("check_completed", extra={"exit_code": report.exit_code})
    return ReportResponse.from_report(report)


@router.post("/quad", response_model=ReportResponse)
def quad(payload: QuadRequest) -> ReportResponse:
    try:
        report = run_quad(payload.params, payload.index, payload.sign, exact=payload.exact)
    except INPUT_ERRORS as exc:
        raise http_error(exc) from exc
    return ReportResponse.from_report(report)
