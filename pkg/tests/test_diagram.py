from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from app.kinematics.diagram import (
    RAW_HYPOTHESIS_COUNT,
    VERDICT_EXCLUDED,
    VERDICT_HOLD,
    BennettCondition,
    BondHypothesis,
    ConditionKind,
    FarCondition,
    HypothesisError,
    bennett_report,
    builtin_hypothesis,
    conditions_for,
    dump_hypothesis,
    enumerate_hypotheses,
    evaluate,
    figure_diagrams,
    load_hypothesis,
    parse_hypothesis,
    raw_hypotheses,
    rigidity_certificate,
    validate,
)
from app.kinematics.families import FamilyName, sample
from app.kinematics.params import parse_params
from app.kinematics.quadpoly import Sign, gcd_degree, pair_quads
from app.kinematics.scalars import ScalarMode

VALID_HYPOTHESIS_COUNT = 40296


def near(*indices: int) -> tuple[bool, ...]:
    return tuple(index in indices for index in range(1, 7))


hypotheses = st.builds(
    lambda flags, plus, minus: BondHypothesis(near=tuple(flags), far_plus=tuple(plus), far_minus=tuple(minus)),
    st.lists(st.booleans(), min_size=6, max_size=6),
    st.lists(st.integers(min_value=0, max_value=2), min_size=3, max_size=3),
    st.lists(st.integers(min_value=0, max_value=2), min_size=3, max_size=3),
).filter(validate)


def test_enumeration_counts():
    assert RAW_HYPOTHESIS_COUNT == 46656
    assert sum(1 for _ in raw_hypotheses()) == RAW_HYPOTHESIS_COUNT
    emitted = list(enumerate_hypotheses())
    assert len(emitted) == VALID_HYPOTHESIS_COUNT
    assert all(validate(h) for h in emitted)
    keys = {(h.near, h.far_plus, h.far_minus) for h in emitted}
    assert len(keys) == len(emitted)


def test_enumeration_contains_published_diagrams():
    keys = {(tuple(h.near), tuple(h.far_plus), tuple(h.far_minus)) for h in enumerate_hypotheses()}
    for name, diagram in figure_diagrams().items():
        assert (diagram.near, diagram.far_plus, diagram.far_minus) in keys, name


def test_hooke_and_dietmaier_share_a_diagram():
    assert builtin_hypothesis("hooke") == builtin_hypothesis("dietmaier")
    assert builtin_hypothesis("hooke") != builtin_hypothesis("plane_symmetric")


def test_enumeration_filter():
    only_near = list(enumerate_hypotheses(lambda h: sum(h.far_plus) + sum(h.far_minus) == 0))
    assert len(only_near) == 16
    assert all(all(count == 0 for count in h.far_plus) for h in only_near)


def test_validate_examples():
    assert validate(BondHypothesis(far_plus=(1, 2, 2), far_minus=(0, 2, 2)))
    assert not validate(BondHypothesis())
    assert not validate(BondHypothesis(near=near(1)))
    assert builtin_hypothesis("waldron").connected_pairs()[:3] == [(1, 3), (3, 5), (5, 1)]


def test_new_diagram_conditions_are_five_equalities():
    system = conditions_for(builtin_hypothesis("new"))
    assert system.bennett_conditions == []
    described = sorted(condition.describe() for condition in system.far_conditions)
    assert described == sorted(
        [
            "Q_1^+ = Q_4^+",
            "Q_2^+ = Q_5^+",
            "Q_3^+ = Q_6^+",
            "Q_2^- = Q_5^-",
            "Q_3^- = Q_6^-",
        ]
    )
    assert all(condition.kind is ConditionKind.EQUALITY for condition in system.far_conditions)
    assert system.as_dict()["equation_count"] == 20


def test_near_and_resultant_condition_equations():
    system = conditions_for(BondHypothesis(near=near(1, 2, 3, 4, 5, 6), far_plus=(1, 0, 0)))
    assert BennettCondition(1) in system.bennett_conditions
    assert BennettCondition(1).equations() == ["s_2 = 0", "b_1^2 = b_2^2"]
    assert BennettCondition(6).joints == (6, 2)
    resultant = FarCondition(1, Sign.PLUS, ConditionKind.RESULTANT)
    assert resultant in system.far_conditions
    assert resultant.equations() == ["Re Res(Q_1^+, Q_4^+) = 0", "Im Res(Q_1^+, Q_4^+) = 0"]


def test_conditions_for_invalid_hypothesis():
    with pytest.raises(HypothesisError, match="uncovered"):
        conditions_for(BondHypothesis(near=near(1)))


@pytest.mark.parametrize(
    "document",
    [
        {"near": [True] * 5},
        {"far_plus": [3, 0, 0]},
        {"far_minus": [0, -1, 0]},
        {"near": [1, 0, 0, 0, 0, 0]},
        {"bonds": []},
    ],
)
def test_parse_hypothesis_rejects(document):
    with pytest.raises(HypothesisError):
        parse_hypothesis(document)


def test_hypothesis_files(tmp_path):
    path = tmp_path / "new.json"
    path.write_text('{"far_plus": [2, 2, 2], "far_minus": [0, 2, 2]}')
    loaded = load_hypothesis(path)
    assert loaded == builtin_hypothesis("new")
    assert dump_hypothesis(loaded)["near"] == [False] * 6
    with pytest.raises(HypothesisError):
        builtin_hypothesis("pentagon")


@settings(max_examples=60, deadline=None)
@given(hypotheses, st.integers(min_value=0, max_value=11))
def test_adding_a_connection_never_drops_a_condition(h, slot):
    if slot < 6:
        flags = list(h.near)
        flags[slot] = True
        bigger = h.model_copy(update={"near": tuple(flags)})
    else:
        counts = list(h.far_plus if slot < 9 else h.far_minus)
        position = (slot - 6) % 3
        counts[position] = min(2, counts[position] + 1)
        field = "far_plus" if slot < 9 else "far_minus"
        bigger = h.model_copy(update={field: tuple(counts)})
    assert conditions_for(h).targets() <= conditions_for(bigger).targets()


def test_new_example_satisfies_its_diagram(new_example):
    report = evaluate(builtin_hypothesis("new"), new_example)
    assert report.holds
    assert report.verdict == VERDICT_HOLD
    for record in report.records:
        pair = record.indices[0]
        sign = Sign.PLUS if "^+" in record.label else Sign.MINUS
        assert gcd_degree(*pair_quads(new_example, pair, sign)) >= 2


def test_line_symmetric_sample_satisfies_its_diagram():
    p = sample(FamilyName.LINE_SYMMETRIC, 3)
    assert evaluate(builtin_hypothesis("line_symmetric"), p).holds


def test_generic_parameters_exclude_hypotheses(generic_document):
    p = parse_params(generic_document)
    candidates = list(itertools.islice(enumerate_hypotheses(), 40)) + list(figure_diagrams().values())
    for h in candidates:
        report = evaluate(h, p)
        assert not report.holds
        assert report.verdict == VERDICT_EXCLUDED


def test_mp_evaluation_matches_exact(new_example, generic_document):
    mp_new = new_example.converted(ScalarMode.MP)
    assert evaluate(builtin_hypothesis("new"), mp_new, tol=1e-10).holds
    mp_generic = parse_params(generic_document, ScalarMode.MP)
    assert not evaluate(builtin_hypothesis("new"), mp_generic, tol=1e-10).holds


def test_rigidity_certificate_for_generic_parameters(generic_document):
    p = parse_params(generic_document)
    certificate = rigidity_certificate(p)
    assert certificate is not None
    assert len(certificate.bennett_violations) == 6
    assert len(certificate.resultants) == 6
    assert all(record.residual > 0 for record in certificate.resultants)
    assert certificate.offset_product != 0
    assert certificate.as_dict()["offset_product"] == certificate.offset_product


def test_no_certificate_for_mobile_linkages(new_example, bricard):
    assert rigidity_certificate(new_example) is None
    assert rigidity_certificate(bricard) is None
    assert not any(status.holds for status in bennett_report(new_example))


@pytest.mark.parametrize("family", list(FamilyName))
@pytest.mark.parametrize("seed", [0, 1])
def test_family_samples_never_certified_rigid(family, seed):
    assert rigidity_certificate(sample(family, seed)) is None


def random_document(rng: random.Random) -> dict[str, list[str]]:
    def value() -> str:
        sign = rng.choice((-1, 1))
        return f"{sign * rng.randint(1, 50)}/{rng.randint(1, 50)}"

    return {"d": [value() for _ in range(6)], "s": [value() for _ in range(6)], "w": [value() for _ in range(6)]}


def test_random_parameters_are_almost_always_certified():
    rng = random.Random(2024)
    certified = sum(
        rigidity_certificate(parse_params(random_document(rng), ScalarMode.MP)) is not None for _ in range(100)
    )
    assert certified >= 99
