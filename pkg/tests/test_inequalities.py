"""
Inequality check tests: linear, isoperimetric, Sobolev, monotonicity, Poincare and Rayleigh
"""

import math

import numpy as np
import pytest

from carnot_lab.errors import AdmissibilityError, DomainError, PreconditionError
from carnot_lab.fields import BumpFunction, ConstantFunction
from carnot_lab.homogeneous_metrics import metric_factor_bounds
from carnot_lab.hypersurface import dilate_surface
from carnot_lab.inequality_lab import (CoordinateSplit, Verdict, admissible_radius,
                                       asymptotic_check, isoperimetric_constants,
                                       isoperimetric_report, linear_isoperimetric_check,
                                       linear_isoperimetric_variants, monotonicity_scan,
                                       poincare_check, poincare_constant, rayleigh_isop_estimate,
                                       rayleigh_quotient, sobolev_check, strong_linear_check)
from carnot_lab.inequality_lab.monotonicity import SCAN_COLUMNS
from carnot_lab.inequality_lab.poincare import CUTOFF_COLUMNS, CUTOFF_EPSILONS
from carnot_lab.surface_presets import build_surface, surface_from_config

ORIGIN = [0.0, 0.0, 0.0]


@pytest.fixture(scope="module")
def bump(korany):
    return BumpFunction(korany, ORIGIN, 0.7)


# ---------------------------------------------------------------------------
# linear isoperimetric
# ---------------------------------------------------------------------------

def test_linear_isoperimetric_on_square(square, korany, spec):
    result = linear_isoperimetric_check(square, korany, spec)
    (report,) = result.reports
    assert report.tag == "linear-isoperimetric"
    # (h - 1) sigma_H = 4; the plane is minimal so only the two vertical edges count
    assert report.lhs == pytest.approx(4.0, rel=1e-6)
    assert report.terms["boundary"] == pytest.approx(4.0, rel=1e-6)
    assert report.rhs == pytest.approx(4.0 * result.data["R"], rel=1e-6)
    # every point of the square lies within rho = 17^(1/4) of the identity
    assert 1.0 <= result.data["R"] <= 1.05 * 17.0 ** 0.25
    assert result.verdict is Verdict.HOLDS


def test_linear_variants_on_square(square, korany, spec):
    result = linear_isoperimetric_variants(square, korany, spec)
    tags = [r.tag for r in result.reports]
    assert tags == ["linear-isoperimetric-minimal", "linear-isoperimetric-sup-curvature",
                    "circumradius-lower-bound", "perimeter-upper-bound"]
    assert result.data["H0"] == pytest.approx(0.0, abs=1e-6)
    lower = next(r for r in result.reports if r.tag == "circumradius-lower-bound")
    assert lower.lhs == pytest.approx(1.0, rel=1e-5)
    assert result.verdict is Verdict.HOLDS


def test_linear_variants_on_cylinder(cylinder, korany, spec):
    result = linear_isoperimetric_variants(cylinder, korany, spec)
    tags = [r.tag for r in result.reports]
    assert "linear-isoperimetric-minimal" not in tags
    assert any("minimal-surface form skipped" in w for w in result.warnings)
    assert result.data["H0"] == pytest.approx(0.5, rel=1e-3)
    assert result.verdict is not Verdict.VIOLATED


def test_strong_linear_on_square(square, korany, spec):
    result = strong_linear_check(square, korany, spec)
    assert [r.tag for r in result.reports] == ["strong-linear-dilation", "strong-linear-layers"]
    assert all(r.lhs == pytest.approx(4.0, rel=1e-6) for r in result.reports)
    assert "dilation_term_below_layer_term" in result.data
    assert result.verdict is not Verdict.VIOLATED


def test_linear_isoperimetric_on_disk(disk, korany, spec):
    result = linear_isoperimetric_check(disk, korany, spec)
    (report,) = result.reports
    # |C_H nu_H| = |varpi| = 2 / |x_H| against the density |x_H| / 2: the integral is the area
    skew = report.terms["skew"]
    assert skew == pytest.approx(math.pi, rel=1e-2)
    assert skew <= math.pi * (1.0 + 1e-6)
    assert report.lhs == pytest.approx(math.pi / 3.0, rel=1e-5)
    assert result.verdict is Verdict.HOLDS


# ---------------------------------------------------------------------------
# isoperimetric and Sobolev
# ---------------------------------------------------------------------------

def test_isoperimetric_constants(korany):
    consts = isoperimetric_constants(korany)
    k1 = metric_factor_bounds(korany).k1
    assert consts["Q"] == 4
    assert consts["C_S"] == pytest.approx(16.0 * k1 ** (-1.0 / 3.0))
    assert consts["C_I"] == pytest.approx(consts["C_S"] ** 1.5)


def test_isoperimetric_on_square(square, korany, spec):
    result = isoperimetric_report(square, korany, spec)
    assert [r.tag for r in result.reports] == ["isoperimetric", "isoperimetric-boundary-measure"]
    # the top and bottom edges are characteristic for the boundary
    assert result.data["characteristic_boundary_fraction"] == pytest.approx(0.5, rel=1e-2)
    assert result.warnings
    assert result.reports[0].lhs == pytest.approx(4.0 ** (2.0 / 3.0), rel=1e-6)
    assert result.verdict is Verdict.HOLDS


def test_isoperimetric_on_closed_surface(h1, korany, spec):
    closed = build_surface("h1-capped-cylinder", h1)
    result = isoperimetric_report(closed, korany, spec)
    assert result.reports[0].tag == "isoperimetric-closed"
    assert result.data["characteristic_boundary_fraction"] == 0.0
    assert result.verdict is not Verdict.VIOLATED


def test_sobolev_with_bump(square, korany, spec, bump):
    result = sobolev_check(square, bump, korany, spec)
    assert [r.tag for r in result.reports] == ["sobolev-full", "sobolev"]
    assert result.data["C1_prime"] > 0
    assert result.warnings
    assert result.verdict is Verdict.HOLDS


def test_sobolev_needs_vanishing_boundary_values(square, h1, korany, spec):
    with pytest.raises(PreconditionError):
        sobolev_check(square, ConstantFunction(h1, 1.0), korany, spec)


def _ratio(report):
    return report.lhs / report.rhs


@pytest.mark.slow
@pytest.mark.parametrize("t", [0.5, 2.0])
def test_isoperimetric_ratio_is_dilation_invariant(square, korany, spec, t):
    base = isoperimetric_report(square, korany, spec)
    scaled = isoperimetric_report(dilate_surface(square, t), korany, spec)
    assert [r.tag for r in scaled.reports] == [r.tag for r in base.reports]
    for ours, theirs in zip(scaled.reports, base.reports):
        assert _ratio(ours) == pytest.approx(_ratio(theirs), rel=1e-4)
        assert ours.verdict is theirs.verdict


@pytest.mark.slow
@pytest.mark.parametrize("t", [0.5, 2.0])
def test_sobolev_ratio_is_dilation_invariant(square, korany, spec, t):
    base = sobolev_check(square, BumpFunction(korany, ORIGIN, 0.7), korany, spec)
    # psi composed with delta_{1/t} is the bump of radius 0.7 t
    scaled = sobolev_check(dilate_surface(square, t), BumpFunction(korany, ORIGIN, 0.7 * t),
                           korany, spec)
    full, base_full = scaled.reports[0], base.reports[0]
    assert full.tag == base_full.tag == "sobolev-full"
    assert _ratio(full) == pytest.approx(_ratio(base_full), rel=1e-4)
    assert full.verdict is base_full.verdict


@pytest.mark.slow
def test_sobolev_on_closed_surface(h1, korany, spec):
    closed = build_surface("h1-capped-cylinder", h1)
    bump = BumpFunction(korany, [1.0, 0.0, 0.0], 0.4)
    result = sobolev_check(closed, bump, korany, spec)
    assert [r.tag for r in result.reports] == ["sobolev-full", "sobolev"]
    assert not result.warnings
    assert result.verdict is not Verdict.VIOLATED

    # both sides are homogeneous of degree one in psi
    tripled = sobolev_check(closed, bump.scaled(3.0), korany, spec)
    for ours, theirs in zip(tripled.reports, result.reports):
        assert ours.lhs == pytest.approx(3.0 * theirs.lhs, rel=1e-6)
        assert _ratio(ours) == pytest.approx(_ratio(theirs), rel=1e-6)
    assert tripled.data["C1_prime"] == pytest.approx(result.data["C1_prime"])


# ---------------------------------------------------------------------------
# monotonicity and asymptotics
# ---------------------------------------------------------------------------

def test_monotonicity_on_plane(vertical_plane, korany, spec):
    result = monotonicity_scan(vertical_plane, ORIGIN, korany, [0.25, 0.5, 1.0], spec)
    strong = [r for r in result.reports if r.tag == "monotonicity"]
    assert len(strong) == 3
    kappa = strong[0].terms["m"]
    # sigma_H(S_t) / t^3 does not depend on t on a vertical plane
    for report in strong:
        assert report.terms["m"] == pytest.approx(kappa, rel=1e-4)
    assert result.verdict is not Verdict.VIOLATED
    assert result.tables["monotonicity"].columns == SCAN_COLUMNS
    assert len(result.tables["monotonicity_weak"].rows) == 3
    assert sum(r.tag == "monotonicity-integrated" for r in result.reports) == 2
    assert result.data["characteristic_point"] is False


def test_monotonicity_trims_radii_on_untraced_boundary(h1, korany, spec):
    # the box faces stand in for the clipped boundary and sit at distance 2
    clipped = surface_from_config(h1, {"alpha": 1, "boxes": [[[-2, -2], [2, 2]]],
                                       "clip_radius": 1.5})
    result = monotonicity_scan(clipped, ORIGIN, korany, [0.5, 2.0], spec)
    assert result.warnings and "trimmed" in result.warnings[0]
    assert [row["t"] for row in result.tables["monotonicity"].rows] == [0.5]
    # the kept ball stays clear of the boundary, so no boundary term enters
    strong = [r for r in result.reports if r.tag == "monotonicity"]
    assert len(strong) == 1 and strong[0].terms["B_inf"] == 0.0


def test_monotonicity_on_cylinder(cylinder, korany, spec):
    result = monotonicity_scan(cylinder, [2.0, 0.0, 0.0], korany, [0.2, 0.4], spec)
    assert sum(r.tag == "monotonicity" for r in result.reports) == 2
    assert not result.warnings
    assert result.data["characteristic_point"] is False
    assert result.verdict is not Verdict.VIOLATED


@pytest.mark.parametrize("preset", ["h1-paraboloid", "h1-t0-plane"])
def test_monotonicity_at_characteristic_origin(h1, korany, spec, preset):
    surface = build_surface(preset, h1)
    result = monotonicity_scan(surface, ORIGIN, korany, [0.2, 0.4], spec)
    assert result.data["characteristic_point"] is True
    # both surfaces are dilation invariant, so m(t) is the blow-up density at every t
    kappa = math.pi / 3.0 if preset == "h1-t0-plane" else math.pi / (3.0 * 17.0 ** 0.25)
    strong = [r for r in result.reports if r.tag == "monotonicity"]
    for report in strong:
        assert report.terms["m"] == pytest.approx(kappa, rel=1e-4)
    assert result.verdict is not Verdict.VIOLATED


def test_monotonicity_rejects_bad_radii(vertical_plane, korany, spec):
    with pytest.raises(DomainError):
        monotonicity_scan(vertical_plane, ORIGIN, korany, [], spec)
    with pytest.raises(DomainError):
        monotonicity_scan(vertical_plane, ORIGIN, korany, [0.0, 0.5], spec)


def test_asymptotic_on_plane(vertical_plane, korany, spec):
    result = asymptotic_check(vertical_plane, ORIGIN, korany, [0.5, 1.0], spec)
    assert [r.tag for r in result.reports] == ["asymptotic", "asymptotic"]
    # H0 = 0 so the bound is kappa t^3 and meets sigma_H(S_t)
    for report in result.reports:
        assert report.lhs == pytest.approx(report.rhs, rel=1e-4)
    assert result.verdict is not Verdict.VIOLATED
    assert len(result.tables["asymptotic"].rows) == 2


def test_asymptotic_radius_must_stay_inside(vertical_plane, korany, spec):
    with pytest.raises(DomainError):
        asymptotic_check(vertical_plane, ORIGIN, korany, [1.0, 2.0], spec)


# ---------------------------------------------------------------------------
# Poincare
# ---------------------------------------------------------------------------

def test_poincare_constant():
    assert poincare_constant(1.0, 2) == pytest.approx(2.0)
    assert poincare_constant(2.0, 3) == pytest.approx(4.0 / 3.0)


def test_admissible_radius_on_square(square, korany):
    radius = admissible_radius(square, ORIGIN, 0.8, korany)
    assert radius.curvature_radius == math.inf
    assert radius.reach == pytest.approx(1.0, rel=1e-6)
    assert radius.bound == pytest.approx(1.0, rel=1e-6)
    assert not radius.characteristic


def test_admissible_radius_on_cylinder(h1, korany):
    cylinder = build_surface("h1-cylinder", h1, {"radius": 1.0, "half_height": 1.0})
    radius = admissible_radius(cylinder, [1.0, 0.0, 0.0], 0.3, korany)
    # H = 1 and varpi = 0 on the unit cylinder
    assert radius.curvature_radius == pytest.approx(0.5, rel=1e-3)
    assert radius.as_dict()["bound"] == radius.bound


@pytest.mark.parametrize("p", [1.0, 2.0])
def test_poincare_with_bump(square, korany, spec, bump, p):
    result = poincare_check(square, ORIGIN, 0.8, p, bump, korany, spec)
    assert [r.tag for r in result.reports] == ["poincare", "poincare-diameter"]
    assert result.data["C_p"] == pytest.approx(poincare_constant(p, 2))
    assert result.verdict is Verdict.HOLDS


def test_poincare_radius_past_admissible(square, korany, spec, bump):
    with pytest.raises(PreconditionError):
        poincare_check(square, ORIGIN, 1.2, 1.0, bump, korany, spec)


def test_poincare_support_must_fit(square, korany, spec):
    wide = BumpFunction(korany, ORIGIN, 1.0)
    with pytest.raises(AdmissibilityError):
        poincare_check(square, ORIGIN, 0.8, 1.0, wide, korany, spec)


def test_poincare_exponent(square, korany, spec, bump):
    with pytest.raises(DomainError):
        poincare_check(square, ORIGIN, 0.8, 0.5, bump, korany, spec)


# ---------------------------------------------------------------------------
# Rayleigh quotients
# ---------------------------------------------------------------------------

@pytest.mark.slow
def test_rayleigh_split_of_square(square, korany, spec):
    result = rayleigh_isop_estimate(square, korany, spec, splits=[CoordinateSplit(1)])
    # the distance to {x2 = 0} is |x2|, so each cutoff quotient is 2 / (2 - eps)
    first = [row for row in result.tables["cutoff"].rows if row["family"] == "first"]
    expected = [2.0 / (2.0 - eps) for eps in CUTOFF_EPSILONS]
    np.testing.assert_allclose([row["quotient"] for row in first], expected, rtol=1e-3)
    assert result.tables["cutoff"].columns == CUTOFF_COLUMNS
    assert result.data["isop0_geometric"] == pytest.approx(1.0, rel=1e-6)
    assert result.data["isop_limit"] == pytest.approx(1.0, rel=1e-6)
    assert result.data["lambda1_lower"] == pytest.approx(0.25, rel=1e-6)
    tags = [r.tag for r in result.reports]
    assert tags == ["cutoff-trend", "cutoff-trend", "cutoff-limit"]
    assert result.verdict is Verdict.HOLDS


def test_rayleigh_quotient_needs_admissible_function(square, h1, spec):
    with pytest.raises(AdmissibilityError):
        rayleigh_quotient(square, ConstantFunction(h1, 1.0), spec)


def test_rayleigh_needs_input(square, korany, spec):
    with pytest.raises(DomainError):
        rayleigh_isop_estimate(square, korany, spec)
    with pytest.raises(DomainError):
        rayleigh_isop_estimate(square, korany, spec, splits=[CoordinateSplit(1)],
                               epsilons=[0.05, 0.1])


def test_rayleigh_split_missing_the_surface(square, korany, spec):
    result = rayleigh_isop_estimate(square, korany, spec, splits=[CoordinateSplit(1, 5.0)])
    assert result.warnings and "does not meet" in result.warnings[0]
    assert "isop_estimate" not in result.data
