"""Parameter files for 6R linkages.

Format (JSON)::

    {"d": [6 values], "s": [6 values], "w": [6 values]}

with ``"phi_degrees"`` allowed instead of ``"w"``. Values are JSON numbers
or strings in the exact grammar of :func:`app.kinematics.scalars.parse_scalar`.

Example:
    from app.kinematics.params import load_params
    params = load_params(Path("bricard.json"))
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any, Iterable, Mapping, Union

from pydantic import BaseModel, ConfigDict, Field, StrictFloat, StrictInt, StrictStr, ValidationError, model_validator

from .linkage import JOINTS, LinkageParams
from .scalars import (
    DEFAULT_PRECISION_BITS,
    ParameterError,
    ScalarMode,
    convert,
    format_scalar,
    format_token,
    parse_scalar,
)


Value = Union[StrictInt, StrictFloat, StrictStr]


class ParamsFile(BaseModel):
    """Validated shape of a parameter document (values still unparsed)."""

    model_config = ConfigDict(extra="forbid")

    d: list[Value] = Field(min_length=JOINTS, max_length=JOINTS, description="Normal distances")
    s: list[Value] = Field(min_length=JOINTS, max_length=JOINTS, description="Offsets along the axes")
    w: list[Value] | None = Field(default=None, description="Cotangents of half twist angles")
    phi_degrees: list[Value] | None = Field(default=None, description="Twist angles in degrees")

    @model_validator(mode="after")
    def _one_twist_description(self) -> "ParamsFile":
        if (self.w is None) == (self.phi_degrees is None):
            raise ValueError("Exactly one of 'w' and 'phi_degrees' must be present")
        twist = self.w if self.w is not None else self.phi_degrees
        if twist is not None and len(twist) != JOINTS:
            raise ValueError(f"Twist list must have {JOINTS} values")
        return self


def _values(raw: Iterable[Any], mode: ScalarMode, bits: int) -> tuple[Any, ...]:
    return tuple(convert(parse_scalar(token), mode, bits) for token in raw)


def parse_params(
    document: Mapping[str, Any],
    mode: ScalarMode = ScalarMode.EXACT,
    bits: int = DEFAULT_PRECISION_BITS,
) -> LinkageParams:
    """Turn a parameter document into :class:`LinkageParams` in ``mode``."""

    try:
        model = ParamsFile.model_validate(document)
    except ValidationError as exc:
        raise ParameterError(f"Invalid parameter file: {exc.errors()[0]['msg']}") from exc

    d = _values(model.d, mode, bits)
    s = _values(model.s, mode, bits)
    if model.w is not None:
        return LinkageParams(d, s, _values(model.w, mode, bits), mode, bits)
    phi = _values(model.phi_degrees or [], mode, bits)
    return LinkageParams.from_phi_degrees(d, s, phi, mode, bits)


def is_rational_document(document: Mapping[str, Any]) -> bool:
    """True when ``d``, ``s`` and ``w`` hold only rational values (no surds, no ``phi_degrees``)."""

    try:
        model = ParamsFile.model_validate(document)
    except ValidationError as exc:
        raise ParameterError(f"Invalid parameter file: {exc.errors()[0]['msg']}") from exc
    if model.w is None:
        return False
    return all(parse_scalar(token).is_Rational for token in [*model.d, *model.s, *model.w])


def read_json(path: Path) -> Any:
    """Load a JSON input file, mapping I/O and syntax failures to ParameterError."""

    try:
        with path.open("r", encoding="utf-8") as handle:
            return json.load(handle)
    except FileNotFoundError as exc:
        raise ParameterError(f"File not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ParameterError(f"Malformed JSON in {path}: {exc.msg}") from exc


def load_params(
    path: Path,
    mode: ScalarMode = ScalarMode.EXACT,
    bits: int = DEFAULT_PRECISION_BITS,
) -> LinkageParams:
    document = read_json(path)
    if not isinstance(document, dict):
        raise ParameterError(f"Parameter file {path} must hold a JSON object")
    return parse_params(document, mode, bits)


def dump_params(p: LinkageParams) -> dict[str, list[Any]]:
    """Parameter document for ``p``; exact values are written as grammar tokens."""

    def render(values: tuple[Any, ...]) -> list[Any]:
        if p.mode is ScalarMode.EXACT:
            return [format_token(value) for value in values]
        if p.mode is ScalarMode.MP:
            return [format_scalar(value, p.mode) for value in values]
        return [float(value) for value in values]

    return {"d": render(p.d), "s": render(p.s), "w": render(p.w)}


def write_json(path: Path, payload: Any) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")
    return path


def write_params(path: Path, p: LinkageParams) -> Path:
    return write_json(path, dump_params(p))


def compute_sha256_from_path(path: Path) -> str:
    """Compute the sha256 of a file on disk using a streaming approach."""

    hash_obj = hashlib.sha256()
    with path.open("rb") as f:
        for chunk in iter(lambda: f.read(1024 * 1024), b""):
            hash_obj.update(chunk)
    return hash_obj.hexdigest()


def digest_document(document: Any) -> str:
    """sha256 of the canonical JSON form of an in-memory document."""

    encoded = json.dumps(document, sort_keys=True, separators=(",", ":")).encode("utf-8")
    return hashlib.sha256(encoded).hexdigest()
