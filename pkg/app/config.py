"""Application configuration helpers for linkage-bonds.

Usage:
    from app.config import get_settings
    settings = get_settings()
    print(settings.tol, settings.precision_bits)
"""

from __future__ import annotations

import logging
import os
import sys
from functools import lru_cache
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field


ENV_PREFIX = "LINKAGE_BONDS_"
LOG_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"


def _env(name: str, default: str) -> str:
    return os.getenv(f"{ENV_PREFIX}{name}", default)


class Settings(BaseModel):
    """Strongly-typed settings loaded from environment variables."""

    model_config = ConfigDict(frozen=True)

    tol: float = Field(default_factory=lambda: float(_env("TOL", "1e-10")))
    precision_bits: int = Field(default_factory=lambda: int(_env("PRECISION_BITS", "256")))
    step_size: float = Field(default_factory=lambda: float(_env("STEP_SIZE", "0.05")))
    max_steps: int = Field(default_factory=lambda: int(_env("MAX_STEPS", "2000")))
    seed_attempts: int = Field(default_factory=lambda: int(_env("SEED_ATTEMPTS", "200")))
    rank_gap: float = Field(default_factory=lambda: float(_env("RANK_GAP", "1e6")))
    trace_tol: float = Field(default_factory=lambda: float(_env("TRACE_TOL", "1e-9")))
    seed_tol: float = Field(default_factory=lambda: float(_env("SEED_TOL", "1e-11")))
    port: int = Field(default_factory=lambda: int(_env("PORT", os.getenv("PORT", "8790"))))
    output_root: Path = Field(default_factory=lambda: Path(_env("OUTPUT_ROOT", ".")))


def ensure_output_root(path: Path) -> None:
    """Ensure the configured output root exists and is a directory."""

    path.mkdir(parents=True, exist_ok=True)


def resolve_output_path(target: str | Path, settings: Settings | None = None) -> Path:
    """Resolve an output path against the configured output root."""

    settings = settings or get_settings()
    candidate = Path(target).expanduser()
    if not candidate.is_absolute():
        candidate = settings.output_root / candidate
    candidate.parent.mkdir(parents=True, exist_ok=True)
    return candidate


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Return cached settings loaded from environment variables."""

    settings = Settings()
    ensure_output_root(settings.output_root)
    return settings


def reset_settings_cache() -> None:
    """Clear cached settings (useful for tests when environment changes)."""

    get_settings.cache_clear()


def configure_logging(stream=None) -> None:
    """Install one root handler (stderr by default) unless one already exists."""

    if not logging.getLogger().handlers:
        logging.basicConfig(level=logging.INFO, format=LOG_FORMAT, stream=stream or sys.stderr)
    logging.getLogger("linkage_bonds").setLevel(logging.INFO)
