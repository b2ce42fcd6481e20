"""
Integral identity tests: coarea, divergence, Minkowski and first variation
"""

import numpy as np
import pytest

from carnot_lab.errors import CapabilityError, ConfigError, DomainError
from carnot_lab.fields import (BumpField, BumpFunction, ConstantFunction, CoordinateFunction,
                               LeftInvariantField, PolynomialFunction, PositionField, RadialField,
                               ZeroField)
from carnot_lab.inequality_lab import (LevelSetMeasure, Verdict, coarea_check, divergence_check,
                                       first_variation_check, minkowski_check)
from carnot_lab.polynomials import Polynomial
from carnot_lab.surface_presets import build_surface


def test_level_set_measure_on_square(square, h1):
    levels = LevelSetMeasure(square, CoordinateFunction(h1, 1), grid=64)
    assert levels.value_range() == pytest.approx((-1.0, 1.0))
    # each level {x2 = s} is a vertical segment of t-length 2
    assert levels(0.3) == pytest.approx(2.0, rel=1e-9)


def test_coarea_on_square(square, h1, spec):
    result = coarea_check(square, CoordinateFunction(h1, 1), spec)
    (report,) = result.reports
    assert report.lhs == pytest.approx(4.0, rel=1e-8)
    assert report.rhs == pytest.approx(4.0, rel=1e-3)
    assert result.verdict is Verdict.HOLDS
    assert "levels" in result.tables


def test_coarea_with_constant_function(square, h1, spec):
    result = coarea_check(square, ConstantFunction(h1, 2.0), spec)
    assert result.reports[0].lhs == pytest.approx(0.0)
    assert result.reports[0].rhs == 0.0
    assert result.verdict is Verdict.HOLDS


def test_coarea_with_vertical_coordinate(square, h1, spec):
    # grad_HS t vanishes on {x1 = 0} and every level {t = s} is a horizontal segment
    result = coarea_check(square, CoordinateFunction(h1, 2), spec)
    (report,) = result.reports
    assert report.lhs == pytest.approx(0.0, abs=1e-6)
    assert report.rhs == pytest.approx(0.0, abs=1e-6)
    assert result.verdict is Verdict.HOLDS


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(10))
def test_coarea_with_random_polynomials(vertical_plane, h1, spec, seed):
    rng = np.random.default_rng(seed)
    # d phi / d x2 stays above 0.4 on the plane, so phi has no critical points
    terms = {(0, 1, 0): rng.uniform(1.0, 2.0), (0, 0, 1): rng.uniform(-0.5, 0.5),
             (0, 2, 0): rng.uniform(-0.1, 0.1), (0, 1, 1): rng.uniform(-0.1, 0.1),
             (0, 0, 2): rng.uniform(-0.1, 0.1), (0, 0, 0): rng.uniform(-1.0, 1.0)}
    phi = PolynomialFunction(h1, Polynomial(terms, 3), name=f"random-{seed}")
    result = coarea_check(vertical_plane, phi, spec)
    (report,) = result.reports
    assert report.lhs > 1.0
    assert abs(report.lhs - report.rhs) < 1e-3 * report.lhs
    assert result.verdict is Verdict.HOLDS


def test_coarea_needs_surfaces_in_three_dimensions(engel, spec):
    plane = build_surface("engel-vertical-plane", engel)
    with pytest.raises(CapabilityError):
        coarea_check(plane, CoordinateFunction(engel, 1), spec)


def test_minkowski_on_square(square, spec):
    result = minkowski_check(square, spec)
    (report,) = result.reports
    # div_HS x_H = h - 1 = 1 and both vertical edges carry <x_H, eta_HS> = 1
    assert report.lhs == pytest.approx(4.0, rel=1e-6)
    assert report.rhs == pytest.approx(4.0, rel=1e-6)
    assert report.terms["h_minus_one"] == 1.0
    assert result.verdict is Verdict.HOLDS


def test_divergence_of_left_invariant_field(square, h1, spec):
    result = divergence_check(square, LeftInvariantField(h1, [0.0, 1.0, 0.0]), spec)
    assert len(result.reports) == 2
    for report in result.reports:
        assert report.lhs == pytest.approx(0.0, abs=1e-9)
        assert report.rhs == pytest.approx(0.0, abs=1e-9)
    assert result.verdict is Verdict.HOLDS
    assert not result.warnings


def test_divergence_warns_about_vertical_part(square, h1, spec):
    result = divergence_check(square, LeftInvariantField(h1, [0.0, 0.0, 1.0]), spec, refine=False)
    assert result.warnings
    assert result.verdict is Verdict.HOLDS


def test_divergence_of_zero_field(disk, h1, spec):
    result = divergence_check(disk, ZeroField(h1), spec, refine=False)
    assert result.reports[0].lhs == 0.0
    assert result.verdict is Verdict.HOLDS


def test_divergence_on_cylinder_with_compact_support(cylinder, korany, spec):
    bump = BumpFunction(korany, [2.0, 0.0, 0.0], 0.7)
    result = divergence_check(cylinder, BumpField(bump, 0), spec, refine=False)
    (report,) = result.reports
    assert report.rhs == pytest.approx(0.0, abs=1e-12)
    assert report.lhs == pytest.approx(0.0, abs=1e-3)
    # the curvature term is what balances the divergence term on a curved surface
    assert report.terms["curvature"] != pytest.approx(0.0, abs=1e-3)
    assert report.verdict is not Verdict.VIOLATED


@pytest.mark.slow
def test_divergence_residual_falls_under_refinement(cylinder, korany, spec):
    bump = BumpFunction(korany, [2.0, 0.0, 0.0], 0.7)
    result = divergence_check(cylinder, BumpField(bump, 1), spec)
    assert [r.tag for r in result.reports] == ["horizontal-divergence",
                                               "horizontal-divergence-refined"]
    coarse, fine = abs(result.data["residual"]), abs(result.data["residual_refined"])
    assert fine <= max(coarse, 1e-10)
    assert result.reports[1].lhs_error <= result.reports[0].lhs_error
    assert result.verdict is not Verdict.VIOLATED


def test_first_variation_of_plane(square, spec):
    result = first_variation_check(square, [1.0, 0.0, 0.0], spec)
    assert result.data["derivative"] == pytest.approx(0.0, abs=1e-6)
    assert [r.tag for r in result.reports] == ["first-variation", "first-variation-horizontal"]
    assert all(r.verdict is not Verdict.VIOLATED for r in result.reports)


def test_first_variation_vertical_direction(square, spec):
    result = first_variation_check(square, [0.0, 0.0, 1.0], spec)
    assert [r.tag for r in result.reports] == ["first-variation"]
    assert result.data["derivative"] == pytest.approx(0.0, abs=1e-6)


def test_first_variation_checks_direction_shape(square, spec):
    with pytest.raises(DomainError):
        first_variation_check(square, [1.0, 0.0], spec)


def test_fields(h1, korany):
    y = np.array([[1.0, 2.0, 0.5], [0.0, 0.0, 3.0]])
    np.testing.assert_allclose(PositionField(h1)(y)[:, :2], y[:, :2])
    radial = RadialField(h1)(y)
    np.testing.assert_allclose(np.linalg.norm(radial[0]), 1.0)
    np.testing.assert_allclose(radial[1], 0.0)
    with pytest.raises(ConfigError):
        LeftInvariantField(h1, [1.0, 0.0])
    with pytest.raises(ConfigError):
        BumpFunction(korany, np.zeros(3), 0.0)
    with pytest.raises(ConfigError):
        CoordinateFunction(h1, 3)


def test_bump_gradient_matches_finite_differences(h1, korany):
    bump = BumpFunction(korany, [0.1, -0.2, 0.05], 1.0, amplitude=2.0)
    y = np.array([[0.4, 0.1, -0.1]])
    analytic = bump.frame_gradient(y)
    numeric = super(BumpFunction, bump).frame_gradient(y)
    np.testing.assert_allclose(analytic, numeric, atol=1e-6)
    assert bump(np.array([[5.0, 0.0, 0.0]]))[0] == 0.0
