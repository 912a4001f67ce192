"""Bond-diagram hypotheses and the necessary conditions they induce.

A hypothesis states, for each near pair ``(J_i, J_{i+2})``, whether it is
connected and, for each far pair ``(J_k, J_{k+3})``, how many connections
carry ``t_k = t_{k+3} = i`` (plus) and ``t_k = -t_{k+3} = i`` (minus).

Example:
    from app.kinematics.diagram import builtin_hypothesis, conditions_for
    system = conditions_for(builtin_hypothesis("new"))
    [condition.describe() for condition in system.far_conditions]
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Annotated, Any, Callable, Iterator

from pydantic import BaseModel, ConfigDict, Field, StrictBool, StrictInt, ValidationError

from .linkage import JOINTS, LinkageParams, cyclic
from .params import read_json
from .quadpoly import (
    FAR_PAIRS,
    Sign,
    coefficients_equal,
    pair_quads,
    resultant,
    resultant_scale,
)
from .scalars import ScalarMode, is_exact_zero, magnitude


logger = logging.getLogger("linkage_bonds.diagram")

RAW_HYPOTHESIS_COUNT = 2**JOINTS * 3**3 * 3**3
VERDICT_HOLD = "necessary conditions hold"
VERDICT_EXCLUDED = "hypothesis excluded"

Count = Annotated[StrictInt, Field(ge=0, le=2)]


class HypothesisError(ValueError):
    """Raised for bond hypotheses that break the coverage rule or cannot be read."""


class BondHypothesis(BaseModel):
    """Assumed connections of one bond diagram."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    near: tuple[StrictBool, StrictBool, StrictBool, StrictBool, StrictBool, StrictBool] = Field(
        default=(False,) * JOINTS,
        description="near[i-1]: joints i and i+2 connected",
    )
    far_plus: tuple[Count, Count, Count] = Field(default=(0, 0, 0), description="connections of (k, k+3) with t_k = t_{k+3}")
    far_minus: tuple[Count, Count, Count] = Field(default=(0, 0, 0), description="connections of (k, k+3) with t_k = -t_{k+3}")

    def far_count(self, pair: int, sign: Sign) -> int:
        counts = self.far_plus if sign is Sign.PLUS else self.far_minus
        return counts[pair - 1]

    def connected_pairs(self) -> list[tuple[int, int]]:
        """Joint pairs (1-based) carrying at least one assumed connection."""

        pairs = []
        for index, flag in enumerate(self.near, start=1):
            if flag:
                pairs.append((index, (index + 1) % JOINTS + 1))
        for pair in FAR_PAIRS:
            if self.far_plus[pair - 1] + self.far_minus[pair - 1] > 0:
                pairs.append((pair, pair + 3))
        return pairs

    def covered_joints(self) -> set[int]:
        return {joint for pair in self.connected_pairs() for joint in pair}


def validate(h: BondHypothesis) -> bool:
    """Every joint must be connected to at least one other joint."""

    return h.covered_joints() == set(range(1, JOINTS + 1))


def raw_hypotheses() -> Iterator[BondHypothesis]:
    """All combinations of near flags and far counts, in a fixed order."""

    for near in itertools.product((False, True), repeat=JOINTS):
        for plus in itertools.product(range(3), repeat=3):
            for minus in itertools.product(range(3), repeat=3):
                yield BondHypothesis.model_construct(near=near, far_plus=plus, far_minus=minus)


def enumerate_hypotheses(
    predicate: Callable[[BondHypothesis], bool] | None = None,
) -> Iterator[BondHypothesis]:
    """Valid hypotheses (optionally filtered), deterministic and duplicate-free."""

    for hypothesis in raw_hypotheses():
        if not validate(hypothesis):
            continue
        if predicate is not None and not predicate(hypothesis):
            continue
        yield hypothesis


class ConditionKind(str, Enum):
    BENNETT = "bennett"
    EQUALITY = "equality"
    RESULTANT = "resultant"


@dataclass(frozen=True)
class BennettCondition:
    """``s_{i+1} = 0`` and ``b_i**2 = b_{i+1}**2`` for near pair ``(i, i+2)``."""

    index: int

    @property
    def joints(self) -> tuple[int, int]:
        return (self.index, (self.index + 1) % JOINTS + 1)

    def equations(self) -> list[str]:
        nxt = self.index % JOINTS + 1
        return [f"s_{nxt} = 0", f"b_{self.index}^2 = b_{nxt}^2"]

    def as_dict(self) -> dict[str, Any]:
        return {
            "kind": ConditionKind.BENNETT.value,
            "index": self.index,
            "joints": list(self.joints),
            "equations": self.equations(),
        }


@dataclass(frozen=True)
class FarCondition:
    pair: int
    sign: Sign
    kind: ConditionKind

    @property
    def joints(self) -> tuple[int, int]:
        return (self.pair, self.pair + 3)

    def describe(self) -> str:
        first, second = self.joints
        mark = self.sign.symbol
        if self.kind is ConditionKind.EQUALITY:
            return f"Q_{first}^{mark} = Q_{second}^{mark}"
        return f"Res(Q_{first}^{mark}, Q_{second}^{mark}) = 0"

    def equations(self) -> list[str]:
        first, second = self.joints
        mark = self.sign.symbol
        if self.kind is ConditionKind.EQUALITY:
            return [
                f"{part}(a{degree} of Q_{first}^{mark}) = {part}(a{degree} of Q_{second}^{mark})"
                for degree in (1, 0)
                for part in ("Re", "Im")
            ]
        return [
            f"Re Res(Q_{first}^{mark}, Q_{second}^{mark}) = 0",
            f"Im Res(Q_{first}^{mark}, Q_{second}^{mark}) = 0",
        ]

    def as_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind.value,
            "pair": self.pair,
            "sign": self.sign.value,
            "joints": list(self.joints),
            "condition": self.describe(),
            "equations": self.equations(),
        }


@dataclass(frozen=True)
class ConditionSystem:
    bennett_conditions: list[BennettCondition] = field(default_factory=list)
    far_conditions: list[FarCondition] = field(default_factory=list)

    def targets(self) -> set[tuple[Any, ...]]:
        """Constrained near indices and far (pair, sign) slots."""

        keys: set[tuple[Any, ...]] = {("near", item.index) for item in self.bennett_conditions}
        keys.update(("far", item.pair, item.sign.value) for item in self.far_conditions)
        return keys

    def as_dict(self) -> dict[str, Any]:
        return {
            "bennett_conditions": [item.as_dict() for item in self.bennett_conditions],
            "far_conditions": [item.as_dict() for item in self.far_conditions],
            "equation_count": sum(len(item.equations()) for item in self.bennett_conditions)
            + sum(len(item.equations()) for item in self.far_conditions),
        }


def conditions_for(h: BondHypothesis) -> ConditionSystem:
    """Necessary parameter conditions implied by the assumed connections."""

    if not validate(h):
        uncovered = sorted(set(range(1, JOINTS + 1)) - h.covered_joints())
        raise HypothesisError(f"Hypothesis leaves joints uncovered: {uncovered}")

    bennett = [BennettCondition(index) for index, flag in enumerate(h.near, start=1) if flag]
    far: list[FarCondition] = []
    for pair in FAR_PAIRS:
        for sign in Sign:
            count = h.far_count(pair, sign)
            if count == 2:
                far.append(FarCondition(pair, sign, ConditionKind.EQUALITY))
            elif count == 1:
                far.append(FarCondition(pair, sign, ConditionKind.RESULTANT))
    return ConditionSystem(bennett_conditions=bennett, far_conditions=far)


@dataclass(frozen=True)
class ConditionRecord:
    kind: str
    indices: tuple[int, ...]
    residual: float
    passed: bool
    label: str = ""

    def as_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "indices": list(self.indices),
            "label": self.label,
            "residual": self.residual,
            "pass": self.passed,
        }


def _length_scale(p: LinkageParams) -> float:
    values = [magnitude(x) for x in p.b + p.s]
    return max([1.0, *values])


def _offset_record(p: LinkageParams, index: int, tol: float) -> ConditionRecord:
    nxt = index % JOINTS + 1
    value = cyclic(p.s, nxt)
    if p.mode is ScalarMode.EXACT:
        passed = is_exact_zero(value)
    else:
        passed = magnitude(value) <= tol * _length_scale(p)
    return ConditionRecord("offset_zero", (nxt,), magnitude(value), passed, f"s_{nxt} = 0")


def _ratio_record(p: LinkageParams, index: int, tol: float) -> ConditionRecord:
    nxt = index % JOINTS + 1
    first, second = cyclic(p.b, index), cyclic(p.b, nxt)
    difference = first * first - second * second
    if p.mode is ScalarMode.EXACT:
        passed = is_exact_zero(difference)
    else:
        passed = magnitude(difference) <= tol * _length_scale(p) ** 2
    return ConditionRecord(
        "bennett_ratio", (index, nxt), magnitude(difference), passed, f"b_{index}^2 = b_{nxt}^2"
    )


def _equality_record(p: LinkageParams, condition: FarCondition, tol: float) -> ConditionRecord:
    first, second = pair_quads(p, condition.pair, condition.sign)
    residual = max(magnitude(first.a1 - second.a1), magnitude(first.a0 - second.a0))
    return ConditionRecord(
        ConditionKind.EQUALITY.value,
        condition.joints,
        residual,
        coefficients_equal(first, second, tol),
        condition.describe(),
    )


def _resultant_record(p: LinkageParams, pair: int, sign: Sign, tol: float) -> ConditionRecord:
    first, second = pair_quads(p, pair, sign)
    value = resultant(first, second)
    if p.mode is ScalarMode.EXACT:
        passed = is_exact_zero(value)
    else:
        passed = magnitude(value) <= tol * resultant_scale(first, second)
    label = FarCondition(pair, sign, ConditionKind.RESULTANT).describe()
    return ConditionRecord(ConditionKind.RESULTANT.value, (pair, pair + 3), magnitude(value), passed, label)


@dataclass(frozen=True)
class DiagramReport:
    records: list[ConditionRecord]

    @property
    def holds(self) -> bool:
        return all(record.passed for record in self.records)

    @property
    def verdict(self) -> str:
        return VERDICT_HOLD if self.holds else VERDICT_EXCLUDED

    def as_dict(self) -> dict[str, Any]:
        return {"records": [record.as_dict() for record in self.records], "verdict": self.verdict}


def evaluate(h: BondHypothesis, p: LinkageParams, tol: float = 1e-10) -> DiagramReport:
    """Check the conditions of ``h`` on concrete parameters (necessity only)."""

    system = conditions_for(h)
    records: list[ConditionRecord] = []
    for bennett in system.bennett_conditions:
        records.append(_offset_record(p, bennett.index, tol))
        records.append(_ratio_record(p, bennett.index, tol))
    for condition in system.far_conditions:
        if condition.kind is ConditionKind.EQUALITY:
            records.append(_equality_record(p, condition, tol))
        else:
            records.append(_resultant_record(p, condition.pair, condition.sign, tol))
    report = DiagramReport(records)
    logger.debug("hypothesis_evaluated", extra={"verdict": report.verdict, "conditions": len(records)})
    return report


@dataclass(frozen=True)
class BennettStatus:
    index: int
    offset: ConditionRecord
    ratio: ConditionRecord

    @property
    def holds(self) -> bool:
        return self.offset.passed and self.ratio.passed

    def as_dict(self) -> dict[str, Any]:
        return {
            "index": self.index,
            "joints": [self.index, (self.index + 1) % JOINTS + 1],
            "holds": self.holds,
            "offset_residual": self.offset.residual,
            "ratio_residual": self.ratio.residual,
        }


def bennett_report(p: LinkageParams, tol: float = 1e-10) -> list[BennettStatus]:
    """Bennett condition status of all six near pairs."""

    return [
        BennettStatus(index, _offset_record(p, index, tol), _ratio_record(p, index, tol))
        for index in range(1, JOINTS + 1)
    ]


@dataclass(frozen=True)
class RigidityCertificate:
    """Evidence that no bond exists: every connection type is excluded."""

    bennett_violations: list[BennettStatus]
    resultants: list[ConditionRecord]
    offset_product: float

    def as_dict(self) -> dict[str, Any]:
        return {
            "bennett_violations": [status.as_dict() for status in self.bennett_violations],
            "resultants": [record.as_dict() for record in self.resultants],
            "offset_product": self.offset_product,
        }


def far_resultants(p: LinkageParams, tol: float = 1e-10) -> list[ConditionRecord]:
    return [_resultant_record(p, pair, sign, tol) for pair in FAR_PAIRS for sign in Sign]


def rigidity_certificate(p: LinkageParams, tol: float = 1e-10) -> RigidityCertificate | None:
    """Certificate when every near pair violates Bennett and every far resultant is nonzero."""

    statuses = bennett_report(p, tol)
    if any(status.holds for status in statuses):
        return None
    resultants = far_resultants(p, tol)
    if any(record.passed for record in resultants):
        return None
    product = math.prod(magnitude(value) for value in p.s)
    logger.info("rigidity_certificate_issued", extra={"min_resultant": min(r.residual for r in resultants)})
    return RigidityCertificate(statuses, resultants, product)


def _near(*indices: int) -> tuple[bool, ...]:
    return tuple(index in indices for index in range(1, JOINTS + 1))


FIGURE_DIAGRAMS: dict[str, BondHypothesis] = {
    "cube": BondHypothesis(near=_near(1, 2, 3, 4, 5, 6)),
    "line_symmetric": BondHypothesis(far_plus=(2, 2, 2)),
    "new": BondHypothesis(far_plus=(2, 2, 2), far_minus=(0, 2, 2)),
    "waldron": BondHypothesis(near=_near(1, 3, 5), far_plus=(1, 1, 1), far_minus=(1, 1, 1)),
    "plane_symmetric": BondHypothesis(near=_near(3, 6), far_minus=(2, 0, 0)),
    "hooke": BondHypothesis(near=_near(3, 6), far_plus=(2, 0, 0), far_minus=(2, 0, 0)),
    "dietmaier": BondHypothesis(near=_near(3, 6), far_plus=(2, 0, 0), far_minus=(2, 0, 0)),
    "orthogonal": BondHypothesis(far_plus=(2, 2, 2), far_minus=(2, 2, 2)),
}


def figure_diagrams() -> dict[str, BondHypothesis]:
    """The published bond diagrams of the known mobile families, by name.

    The Hooke and Dietmaier families share one diagram, so their entries are
    equal and only parameters can tell them apart.
    """

    return dict(FIGURE_DIAGRAMS)


def builtin_hypothesis(name: str) -> BondHypothesis:
    try:
        return FIGURE_DIAGRAMS[name]
    except KeyError as exc:
        raise HypothesisError(f"Unknown diagram: {name}") from exc


def parse_hypothesis(document: Any) -> BondHypothesis:
    try:
        return BondHypothesis.model_validate(document)
    except ValidationError as exc:
        raise HypothesisError(f"Invalid hypothesis file: {exc.errors()[0]['msg']}") from exc


def load_hypothesis(path: Path) -> BondHypothesis:
    return parse_hypothesis(read_json(path))


def dump_hypothesis(h: BondHypothesis) -> dict[str, Any]:
    return {"near": list(h.near), "far_plus": list(h.far_plus), "far_minus": list(h.far_minus)}
