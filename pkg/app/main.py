"""Entry point for the linkage-bonds FastAPI application.

Usage:
    uvicorn app.main:app --host 0.0.0.0 --port 8790
    python -m app.main
"""

from __future__ import annotations

import logging

import uvicorn
from fastapi import FastAPI

from app.api.check import router as check_router
from app.api.diagram import router as diagram_router
from app.api.families import router as families_router
from app.api.trace import router as trace_router
from app.config import configure_logging, get_settings


def _configure_logging() -> None:
    """Initialize structured logging once for the service."""

    configure_logging()
    logging.getLogger("uvicorn.error").setLevel(logging.INFO)
    logging.getLogger("uvicorn.access").setLevel(logging.INFO)


def create_app() -> FastAPI:
    """Create a new FastAPI instance with registered routers."""

    _configure_logging()
    application = FastAPI(title="linkage-bonds", version="0.1.0")
    application.include_router(check_router)
    application.include_router(diagram_router)
    application.include_router(families_router)
    application.include_router(trace_router)

    @application.get("/health")
    async def healthcheck():
        settings = get_settings()
        return {
            "ok": True,
            "service": "linkage-bonds",
            "tol": settings.tol,
            "precision_bits": settings.precision_bits,
            "instructions": "POST a parameter document to /api/check or /api/trace.",
        }

    return application


app = create_app()


if __name__ == "__main__":
    settings = get_settings()
    uvicorn.run("app.main:app", host="0.0.0.0", port=settings.port, reload=False)
