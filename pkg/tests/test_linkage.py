from __future__ import annotations

import math

import numpy as np
import pytest
import sympy

from app.kinematics.dualquat import DualQuaternion, is_real_nonzero, study_defect
from app.kinematics.linkage import (
    ClosureModel,
    ConfigurationPoint,
    LinkageParams,
    build_g,
    closure_jacobian,
    closure_product,
    closure_residual,
    phi_from_w,
    w_from_phi_degrees,
)
from app.kinematics.params import parse_params
from app.kinematics.scalars import ScalarMode


def bricard_curve_point(t1: float, root: int = 0) -> ConfigurationPoint:
    """Point of the printed one-dimensional component, solved for t2 and t3."""

    a = 171 * t1**2 + 40 * t1 - 5
    b = -134 * t1**2 - 160 * t1 + 90
    c = 49 * t1**2 - 24 * t1 - 255
    discriminant = b * b - 4 * a * c
    assert discriminant > 0
    t2 = (-b + (1 if root == 0 else -1) * math.sqrt(discriminant)) / (2 * a)
    denominator = 133 * t1 - 19 * t2 + 222
    assert abs(denominator) > 1e-6
    t3 = (171 * t1 * t2 - 134 * t1 + 40 * t2 - 323) / denominator
    return ConfigurationPoint.from_t((t1, t2, t3, t1, t2, t3))


def test_printed_transfer_elements(bricard):
    g1 = build_g(bricard, 1).g
    g2 = build_g(bricard, 2).g
    R = sympy.Rational
    assert g1 == DualQuaternion.from_coeffs((R(1, 3), 0, 0, -1, R(-3, 10), R(-2, 3), -2, R(-1, 10)))
    assert g2 == DualQuaternion.from_coeffs((R(2, 3), 0, 0, -1, R(-12, 13), R(-5, 3), R(-5, 2), R(-8, 13)))
    assert study_defect(g1) == 0


def test_right_angle_transfer_without_offsets():
    p = LinkageParams((0,) * 6, (0,) * 6, (1,) * 6)
    assert build_g(p, 3).g == DualQuaternion.scalar(1) - DualQuaternion.basis("k")
    with pytest.raises(ValueError):
        build_g(p, 7)


@pytest.mark.parametrize("t1, root", [(0.0, 0), (0.0, 1), (0.5, 0), (1.0, 1), (-1.0, 0)])
def test_printed_bricard_curve_closes(bricard, t1, root):
    point = bricard_curve_point(t1, root)
    floats = bricard.converted(ScalarMode.FLOAT)
    assert np.max(np.abs(closure_residual(floats, point))) < 1e-9
    assert is_real_nonzero(closure_product(floats, point), tol=1e-9)
    product = ClosureModel.from_params(bricard).product(point.as_array())
    assert abs(product[4]) < 1e-9


def test_printed_bricard_curve_closes_on_two_hundred_points(bricard):
    floats = bricard.converted(ScalarMode.FLOAT)
    points = []
    for t1 in np.linspace(-1.0, 1.0, 150):
        for root in (0, 1):
            a = 171 * t1**2 + 40 * t1 - 5
            if abs(a) < 0.1:
                continue
            point = bricard_curve_point(t1, root)
            points.append(point)
    points = points[:200]
    assert len(points) == 200
    worst = max(float(np.max(np.abs(closure_residual(floats, point)))) for point in points)
    assert worst < 1e-8


def test_generic_linkage_is_not_closed_at_identity(generic_document):
    p = parse_params(generic_document, ScalarMode.FLOAT)
    assert np.max(np.abs(closure_residual(p, ConfigurationPoint.zero()))) > 0.1
    rng = np.random.default_rng(3)
    cfg = ConfigurationPoint(tuple(rng.uniform(-math.pi, math.pi, 6)))
    assert not is_real_nonzero(closure_product(p, cfg), tol=1e-9)


def test_residual_is_periodic_in_four_pi(bricard):
    rng = np.random.default_rng(11)
    theta = rng.uniform(-math.pi, math.pi, 6)
    shifted = theta + 4.0 * math.pi
    assert np.allclose(closure_residual(bricard, theta), closure_residual(bricard, shifted), atol=1e-12)
    flipped = theta.copy()
    flipped[2] += 2.0 * math.pi
    assert np.allclose(closure_residual(bricard, theta), -closure_residual(bricard, flipped), atol=1e-12)


def test_closure_product_stays_on_study_quadric(bricard):
    rng = np.random.default_rng(5)
    floats = bricard.converted(ScalarMode.FLOAT)
    for _ in range(10):
        cfg = ConfigurationPoint(tuple(rng.uniform(-math.pi, math.pi, 6)))
        assert abs(study_defect(closure_product(floats, cfg))) < 1e-12


def test_exact_closure_product_at_zero(bricard):
    exact_product = closure_product(bricard, (0,) * 6)
    assert sympy.simplify(study_defect(exact_product)) == 0


def test_analytic_jacobian_matches_finite_differences(generic_document):
    p = parse_params(generic_document, ScalarMode.FLOAT)
    model = ClosureModel.from_params(p)
    rng = np.random.default_rng(7)
    for _ in range(100):
        theta = rng.uniform(-math.pi, math.pi, 6)
        analytic = model.jacobian(theta)
        numeric = model.jacobian(theta, method="fd")
        scale = max(1.0, float(np.max(np.abs(analytic))))
        assert np.max(np.abs(analytic - numeric)) <= 1e-6 * scale


def test_jacobian_full_rank_off_the_curve(generic_document):
    p = parse_params(generic_document, ScalarMode.FLOAT)
    values = np.linalg.svd(closure_jacobian(p, [0.3, -1.2, 2.0, 0.7, -0.4, 1.1]), compute_uv=False)
    assert values[-1] / values[0] > 1e-4
    with pytest.raises(ValueError):
        closure_jacobian(p, [0.0] * 6, method="spline")


def test_configuration_point_charts():
    point = ConfigurationPoint.from_t((1.0, -1.0, math.inf, 0.0, 2.0, -3.0))
    assert point.theta[0] == pytest.approx(math.pi / 2)
    assert point.theta[2] == 0.0
    assert point.t[2] == math.inf
    assert point.t[4] == pytest.approx(2.0)
    assert ConfigurationPoint((3 * math.pi,) * 6).theta[0] == pytest.approx(math.pi)
    with pytest.raises(ValueError):
        ConfigurationPoint((0.0,) * 5)


@pytest.mark.parametrize("phi", [30, 90, 135, 200])
def test_twist_angle_round_trip(phi):
    w = w_from_phi_degrees(phi, ScalarMode.FLOAT)
    assert math.degrees(phi_from_w(w)) == pytest.approx(phi)


def test_shifted_relabels_joints(bricard):
    shifted = bricard.shifted(2)
    assert shifted.d[0] == bricard.d[2]
    assert shifted.w[5] == bricard.w[1]
