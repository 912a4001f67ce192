"""Configuration-curve tracing endpoint."""

from __future__ import annotations

import logging
from typing import Any

from fastapi import APIRouter
from pydantic import BaseModel, Field

from app.api.reports import ReportResponse, http_error
from app.commands import INPUT_ERRORS, run_trace
from app.kinematics.mobility import parse_polynomials


logger = logging.getLogger("linkage_bonds.api.trace")

router = APIRouter(prefix="/api", tags=["trace"])


class TraceRequest(BaseModel):
    params: dict[str, Any]
    steps: int | None = Field(default=None, gt=0)
    step_size: float | None = Field(default=None, gt=0)
    attempts: int | None = Field(default=None, gt=0)
    seed: int = 0
    polynomials: list[str] = Field(default_factory=list, description="Polynomials in t1..t6 expected to vanish")
    diff_pairs: list[tuple[int, int]] = Field(default_factory=list, description="Joint pairs for max |theta_i - theta_j|")


@router.post("/trace", response_model=ReportResponse)
def trace(payload: TraceRequest) -> ReportResponse:
    try:
        report, _ = run_trace(
            payload.params,
            steps=payload.steps,
            step_size=payload.step_size,
            attempts=payload.attempts,
            seed=payload.seed,
            polynomials=parse_polynomials(payload.polynomials),
            diff_pairs=payload.diff_pairs,
            include_rows=True,
        )
    except INPUT_ERRORS as exc:
        raise http_error(exc) from exc
    logger.info("trace_served", extra={"exit_code": report.exit_code})
    return ReportResponse.from_report(report)
