from __future__ import annotations

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from app.kinematics.families import FamilyName, sample
from app.kinematics.linkage import LinkageParams
from app.kinematics.params import parse_params
from app.kinematics.quadpoly import (
    QuadPoly,
    Sign,
    far_bound,
    gcd_degree,
    pair_quads,
    quad,
    quad_minus,
    quad_plus,
    resultant,
    resultant_scale,
    sylvester_matrix,
)
from app.kinematics.scalars import ScalarMode, convert, is_exact_zero, magnitude


def same(p: QuadPoly, q: QuadPoly) -> bool:
    return is_exact_zero(p.a1 - q.a1) and is_exact_zero(p.a0 - q.a0)


def mirrored(p: LinkageParams) -> LinkageParams:
    """Parameters whose b and c are negated, with s_2, s_4, s_6 negated."""

    s = tuple(-value if index % 2 == 1 else value for index, value in enumerate(p.s))
    return LinkageParams(tuple(-d for d in p.d), s, tuple(1 / w for w in p.w))


def test_bricard_first_quad_matches_closed_form(bricard):
    x = sympy.Symbol("x")
    shift = sympy.Rational(-1, 50) - 2 * sympy.I
    expected = sympy.Poly(sympy.expand((x + shift) ** 2 + sympy.Rational(755, 169) + sympy.Rational(12, 13) * sympy.I), x)
    _, a1, a0 = expected.all_coeffs()
    q1 = quad_plus(bricard, 1)
    assert is_exact_zero(q1.a1 - a1)
    assert is_exact_zero(q1.a0 - a0)


def test_line_symmetric_quads_repeat(bricard):
    for i in (1, 2, 3):
        assert same(quad_plus(bricard, i), quad_plus(bricard, i + 3))
        assert gcd_degree(*pair_quads(bricard, i, Sign.PLUS)) == 2


def test_single_ratio_isolates_constant_term():
    p = LinkageParams((0, 2, 0, 0, 0, 0), (0,) * 6, (1,) * 6)
    q = quad_plus(p, 1)
    assert q.a1 == 0
    assert q.a0 == 1


ratios = st.fractions(min_value=-50, max_value=50, max_denominator=50).filter(lambda x: x != 0)
parameter_lists = st.lists(ratios.map(sympy.Rational), min_size=6, max_size=6)


def printed_first_minus(p: LinkageParams) -> tuple[sympy.Expr, sympy.Expr]:
    """a1 and a0 of the closed form of Q_1^- expanded by hand."""

    b1, b2, b3 = p.b[0], p.b[1], p.b[2]
    c1, c2, c3 = p.c[0], p.c[1], p.c[2]
    s1, s2, s3 = p.s[0], p.s[1], p.s[2]
    shift = (b3 * c3 - b1 * c1) / 2 - s1 / 2 * sympy.I
    constant = (
        sympy.I / 2 * (b1 * s2 - b3 * s3 - s2 * b3 * c2 + s3 * b1 * c2)
        - (-b1 * b3 * c2 - s2 * s3 * c2) / 2
        + (s2**2 + s3**2 - b1**2 + b2**2 - b3**2 - b2**2 * c2**2) / 4
    )
    return sympy.expand(2 * shift), sympy.expand(shift**2 + constant)


@settings(max_examples=100, deadline=None)
@given(parameter_lists, parameter_lists, parameter_lists)
def test_minus_substitution_matches_printed_closed_form(d, s, w):
    p = LinkageParams(tuple(d), tuple(s), tuple(w))
    q = quad_minus(p, 1)
    a1, a0 = printed_first_minus(p)
    assert is_exact_zero(q.a1 - a1)
    assert is_exact_zero(q.a0 - a0)


def test_minus_substitution_is_an_involution(generic_document):
    p = parse_params(generic_document)
    twin = mirrored(p)
    for i in range(1, 7):
        assert same(quad_minus(twin, i), quad_plus(p, i))
        assert same(quad_plus(twin, i), quad_minus(p, i))


@pytest.mark.parametrize("offset", [1, 2, 5])
def test_cyclic_shift_commutes_with_index(generic_document, offset):
    p = parse_params(generic_document)
    shifted = p.shifted(offset)
    for i in range(1, 7):
        assert same(quad_plus(shifted, i), quad_plus(p, (i + offset - 1) % 6 + 1))


def test_quad_rejects_bad_index(bricard):
    with pytest.raises(ValueError):
        quad(bricard, 0, Sign.PLUS)
    with pytest.raises(ValueError):
        quad(bricard, 1, "sideways")


def test_resultant_examples():
    p = QuadPoly(sympy.Integer(0), sympy.Integer(-1))
    q = QuadPoly(sympy.Integer(0), sympy.Integer(-4))
    assert resultant(p, q) == 9
    assert resultant(p, p) == 0
    shared = QuadPoly(sympy.Integer(-3), sympy.Integer(2)), QuadPoly(sympy.Integer(-4), sympy.Integer(3))
    assert resultant(*shared) == 0
    assert gcd_degree(*shared) == 1
    assert gcd_degree(p, QuadPoly(sympy.Integer(-1), sympy.Integer(0))) == 1
    assert gcd_degree(p, q) == 0
    assert gcd_degree(p, p) == 2
    assert len(sylvester_matrix(p, q)) == 4


@pytest.mark.parametrize("mode", [ScalarMode.MP, ScalarMode.FLOAT])
def test_numeric_backends_agree_with_exact(mode):
    p = QuadPoly(convert(0, mode), convert(-1, mode), mode)
    q = QuadPoly(convert(0, mode), convert(-4, mode), mode)
    assert magnitude(resultant(p, q)) == pytest.approx(9.0)


def test_mp_quads_match_exact(new_example):
    mp_params = new_example.converted(ScalarMode.MP)
    for i in range(1, 7):
        exact_q, mp_q = quad_minus(new_example, i), quad_minus(mp_params, i)
        assert magnitude(mp_q.a1) == pytest.approx(magnitude(exact_q.a1), rel=1e-12, abs=1e-30)
        assert magnitude(mp_q.a0) == pytest.approx(magnitude(exact_q.a0), rel=1e-12, abs=1e-30)


def test_far_bounds_of_new_example(new_example):
    assert far_bound(new_example, 1) >= 2
    assert far_bound(new_example, 2) == 4
    assert far_bound(new_example, 3) == 4
    assert same(quad_minus(new_example, 2), quad_minus(new_example, 5))
    assert same(quad_minus(new_example, 3), quad_minus(new_example, 6))


@pytest.mark.parametrize("seed", [0, 1, 7])
def test_orthogonal_samples_have_all_far_connections(seed):
    p = sample(FamilyName.ORTHOGONAL, seed)
    assert [far_bound(p, pair) for pair in (1, 2, 3)] == [4, 4, 4]


def test_generic_parameters_have_no_far_connections(generic_document):
    p = parse_params(generic_document)
    assert [far_bound(p, pair) for pair in (1, 2, 3)] == [0, 0, 0]
    mp_params = parse_params(generic_document, ScalarMode.MP)
    assert [far_bound(mp_params, pair, tol=1e-10) for pair in (1, 2, 3)] == [0, 0, 0]


roots = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)


@settings(max_examples=1000, deadline=None)
@given(roots, roots, roots, roots)
def test_resultant_matches_root_products(r1, r2, u1, u2):
    p = QuadPoly(-(r1 + r2), r1 * r2, ScalarMode.FLOAT)
    q = QuadPoly(-(u1 + u2), u1 * u2, ScalarMode.FLOAT)
    oracle = (r1 - u1) * (r1 - u2) * (r2 - u1) * (r2 - u2)
    assert abs(resultant(p, q) - oracle) <= 1e-10 * resultant_scale(p, q)


def test_high_precision_quads_agree_with_exact_to_twenty_digits(new_example):
    mp_params = new_example.converted(ScalarMode.MP, 256)
    for i in range(1, 7):
        for sign in Sign:
            exact_q, mp_q = quad(new_example, i, sign), quad(mp_params, i, sign)
            assert magnitude(mp_q.a1 - convert(exact_q.a1, ScalarMode.MP, 256)) < 1e-20
            assert magnitude(mp_q.a0 - convert(exact_q.a0, ScalarMode.MP, 256)) < 1e-20
    for pair in (2, 3):
        first, second = pair_quads(mp_params, pair, Sign.MINUS)
        assert magnitude(first.a1 - second.a1) < 1e-20
        assert magnitude(first.a0 - second.a0) < 1e-20
