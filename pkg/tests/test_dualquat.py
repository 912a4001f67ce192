from __future__ import annotations

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from app.kinematics.dualquat import (
    DualQuaternion,
    is_real_nonzero,
    mul,
    mul_array,
    norm,
    primal_norm,
    product,
    quat_conjugate,
    study_defect,
)
from app.kinematics.scalars import ScalarMode, ScalarModeError

coefficients = st.lists(st.integers(min_value=-6, max_value=6), min_size=8, max_size=8)
dual_quaternions = coefficients.map(DualQuaternion.from_coeffs)


def basis(name: str) -> DualQuaternion:
    return DualQuaternion.basis(name)


def motion(s: int, w: int, d: int) -> DualQuaternion:
    one = DualQuaternion.scalar(1)
    offset = one - basis("ei").scale(sympy.Rational(s, 2))
    twist = DualQuaternion.scalar(w) - basis("k")
    distance = one - basis("ek").scale(sympy.Rational(d, 2))
    return product([offset, twist, distance])


motions = st.builds(
    motion,
    st.integers(min_value=-5, max_value=5),
    st.integers(min_value=1, max_value=5),
    st.integers(min_value=-5, max_value=5),
)


def test_multiplication_table():
    assert basis("i") * basis("k") == -basis("j")
    assert basis("i") * basis("j") == basis("k")
    assert basis("ei") * basis("ek") == DualQuaternion.scalar(0)
    assert basis("e") * basis("e") == DualQuaternion.scalar(0)


def test_printed_transfer_element():
    one = DualQuaternion.scalar(1)
    left = one - basis("ei").scale(2)
    middle = DualQuaternion.scalar(sympy.Rational(1, 3)) - basis("k")
    right = one - basis("ek").scale(sympy.Rational(3, 10))
    expected = DualQuaternion.from_coeffs(
        (sympy.Rational(1, 3), 0, 0, -1, sympy.Rational(-3, 10), sympy.Rational(-2, 3), -2, sympy.Rational(-1, 10))
    )
    assert product([left, middle, right]) == expected


def test_conjugate_and_defect_examples():
    assert quat_conjugate(DualQuaternion.scalar(1)) == DualQuaternion.scalar(1)
    assert quat_conjugate(basis("j")) == -basis("j")
    assert study_defect(DualQuaternion.scalar(1) + basis("e")) == 2
    half = sympy.pi / 7
    rotation = DualQuaternion.from_coeffs((sympy.cos(half), -sympy.sin(half), 0, 0, 0, 0, 0, 0))
    assert sympy.simplify(study_defect(rotation)) == 0


def test_is_real_nonzero_examples():
    assert is_real_nonzero(DualQuaternion.scalar(5))
    assert not is_real_nonzero(basis("k"))
    assert not is_real_nonzero(DualQuaternion.scalar(0))
    floats = DualQuaternion.from_coeffs((2.0, 1e-13, 0, 0, 0, 0, 0, 0), ScalarMode.FLOAT)
    assert is_real_nonzero(floats, tol=1e-9)
    assert not is_real_nonzero(floats, tol=0.0)
    with pytest.raises(ValueError):
        is_real_nonzero(floats, tol=-1.0)


def test_mixing_modes_requires_promotion():
    exact = DualQuaternion.scalar(1)
    floating = DualQuaternion.scalar(1.0, ScalarMode.FLOAT)
    with pytest.raises(ScalarModeError):
        mul(exact, floating)
    assert mul(exact.promote(ScalarMode.FLOAT), floating).is_close(floating)


@settings(max_examples=40, deadline=None)
@given(dual_quaternions, dual_quaternions)
def test_conjugate_reverses_products(a, b):
    assert quat_conjugate(a * b) == quat_conjugate(b) * quat_conjugate(a)


@settings(max_examples=40, deadline=None)
@given(dual_quaternions, dual_quaternions)
def test_dual_unit_is_nilpotent(a, b):
    assert a.eps_shift() * b.eps_shift() == DualQuaternion.scalar(0)


@settings(max_examples=40, deadline=None)
@given(dual_quaternions, dual_quaternions)
def test_primal_norm_is_multiplicative(a, b):
    assert sympy.expand(norm(a * b).coeffs[0] - primal_norm(a) * primal_norm(b)) == 0


@settings(max_examples=40, deadline=None)
@given(motions, motions)
def test_study_quadric_closed_under_products(a, b):
    assert study_defect(a) == 0
    assert study_defect(b) == 0
    assert sympy.expand(study_defect(a * b)) == 0


@settings(max_examples=30, deadline=None)
@given(coefficients, coefficients)
def test_float_fast_path_matches_generic_product(left, right):
    a = DualQuaternion.from_coeffs(left, ScalarMode.FLOAT)
    b = DualQuaternion.from_coeffs(right, ScalarMode.FLOAT)
    expected = mul(a, b).to_array()
    assert np.allclose(mul_array(a.to_array(), b.to_array()), expected)
