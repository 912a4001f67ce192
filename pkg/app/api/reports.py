"""Shared response model and error mapping for the linkage-bonds routers."""

from __future__ import annotations

from typing import Any

from fastapi import HTTPException
from pydantic import BaseModel, Field

from app.commands import CommandReport
from app.kinematics.diagram import HypothesisError
from app.kinematics.families import FamilyError


class ReportResponse(BaseModel):
    command: str
    inputs_digest: str = Field(description="sha256 of the canonical JSON request body")
    results: dict[str, Any]
    exit_code: int = Field(description="0 holds, 1 excluded or failed, 2 input error")

    @classmethod
    def from_report(cls, report: CommandReport) -> "ReportResponse":
        return cls(**report.as_dict())


def http_error(exc: Exception) -> HTTPException:
    """400 for malformed input, 422 for invalid hypotheses, 404 for unknown names."""

    if isinstance(exc, HypothesisError):
        return HTTPException(status_code=422, detail=str(exc))
    if isinstance(exc, FamilyError):
        return HTTPException(status_code=404, detail=str(exc))
    return HTTPException(status_code=400, detail=str(exc))
