"""CSV export of traced configuration curves."""

from __future__ import annotations

import csv
import io
import math
from pathlib import Path
from typing import Any

from .linkage import JOINTS
from .mobility import ConfigCurve


CURVE_COLUMNS = (
    [f"theta_{i}" for i in range(1, JOINTS + 1)]
    + [f"t_{i}" for i in range(1, JOINTS + 1)]
    + ["residual", "rank_gap"]
)


def _cell(value: float) -> str:
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return repr(float(value))


def curve_rows(curve: ConfigCurve) -> list[dict[str, Any]]:
    """One mapping per point, keyed by :data:`CURVE_COLUMNS`."""

    rows = []
    for point, residual, gap in zip(curve.points, curve.residuals, curve.rank_gaps):
        values = list(point.theta) + list(point.t) + [residual, gap]
        rows.append({column: _cell(value) for column, value in zip(CURVE_COLUMNS, values)})
    return rows


def curve_csv(curve: ConfigCurve) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=CURVE_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(curve_rows(curve))
    return buffer.getvalue()


def write_curve_csv(path: Path, curve: ConfigCurve) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(curve_csv(curve), encoding="utf-8")
    return path
