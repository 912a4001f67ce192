from __future__ import annotations

import importlib
import json
from pathlib import Path
import sys
from typing import Any, Callable

import pytest
from fastapi.testclient import TestClient

REPO_ROOT = Path(__file__).resolve().parents[1]
if str(REPO_ROOT) not in sys.path:
    sys.path.insert(0, str(REPO_ROOT))

from app import config
from app.kinematics.families import builtin_instance
from app.kinematics.linkage import LinkageParams
from app.kinematics.params import dump_params


GENERIC_DOCUMENT = {
    "d": [1, 2, "3/2", 1, "5/2", 2],
    "s": [1, "1/2", 2, "3/2", 1, "2/3"],
    "w": [2, 3, "1/2", 5, "1/3", "7/4"],
}

BRICARD_POLYNOMIALS = [
    "171*t_1^2*t_2^2-134*t_1^2*t_2+40*t_1*t_2^2+49*t_1^2-160*t_1*t_2-5*t_2^2-24*t_1+90*t_2-255",
    "171*t_1*t_2^2+19*t_2^2*t_3-134*t_1*t_2+40*t_2^2-222*t_2*t_3+49*t_1-288*t_2+105*t_3",
    "171*t_1*t_2-133*t_1*t_3+19*t_2*t_3-134*t_1+40*t_2-222*t_3-323",
    "t_1-t_4",
    "t_2-t_5",
    "t_3-t_6",
]


@pytest.fixture()
def env_settings(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> Path:
    root = tmp_path / "output"
    monkeypatch.setenv("LINKAGE_BONDS_OUTPUT_ROOT", str(root))
    monkeypatch.setenv("LINKAGE_BONDS_TOL", "1e-10")
    monkeypatch.setenv("LINKAGE_BONDS_SEED_ATTEMPTS", "60")
    config.reset_settings_cache()
    config.get_settings()
    return root


@pytest.fixture()
def client(env_settings: Path) -> TestClient:
    module = importlib.import_module("app.main")
    importlib.reload(module)
    application = module.create_app()
    return TestClient(application)


@pytest.fixture()
def bricard() -> LinkageParams:
    return builtin_instance("bricard_example")


@pytest.fixture()
def new_example() -> LinkageParams:
    return builtin_instance("new_example")


@pytest.fixture()
def generic_document() -> dict[str, Any]:
    return json.loads(json.dumps(GENERIC_DOCUMENT))


@pytest.fixture()
def write_document(tmp_path: Path) -> Callable[[str, Any], Path]:
    def _write(name: str, document: Any) -> Path:
        path = tmp_path / name
        path.write_text(json.dumps(document), encoding="utf-8")
        return path

    return _write


@pytest.fixture()
def builtin_files(write_document) -> dict[str, Path]:
    return {
        "bricard_example": write_document("bricard.json", dump_params(builtin_instance("bricard_example"))),
        "new_example": write_document("new_example.json", dump_params(builtin_instance("new_example"))),
        "generic": write_document("generic.json", GENERIC_DOCUMENT),
    }
