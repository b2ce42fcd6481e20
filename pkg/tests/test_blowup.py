"""
Blow-up density tests
"""

import math

import numpy as np
import pytest
from scipy import integrate as sp_integrate

from carnot_lab.blowup import (BlowupKind, blowup_density, blowup_scan, reach, scanned_density,
                               taylor_data, vertical_hyperplane)
from carnot_lab.errors import CapabilityError, DomainError
from carnot_lab.homogeneous_metrics import metric_factor_bounds
from carnot_lab.surface_presets import build_surface, surface_from_config


@pytest.fixture(scope="module")
def plane_kappa():
    value, _ = sp_integrate.quad(lambda u: math.sqrt(1.0 - u ** 4), 0.0, 1.0)
    return value


def test_vertical_plane_is_case_a(vertical_plane, korany, spec, plane_kappa):
    result = blowup_density(vertical_plane, [0.0, 0.0, 0.0], korany, spec)
    assert result.kind is BlowupKind.CASE_A
    assert result.kappa == pytest.approx(plane_kappa, rel=1e-5)
    bounds = metric_factor_bounds(korany)
    assert bounds.k1 <= result.kappa <= bounds.k2
    assert result.details["k1"] == pytest.approx(bounds.k1)


def test_case_a_density_does_not_depend_on_the_point(vertical_plane, cylinder, korany, spec,
                                                     plane_kappa):
    elsewhere = blowup_density(vertical_plane, [0.0, 0.5, -0.3], korany, spec)
    on_cylinder = blowup_density(cylinder, [2.0, 0.0, 0.0], korany, spec)
    assert elsewhere.kappa == pytest.approx(plane_kappa, rel=1e-5)
    assert on_cylinder.kind is BlowupKind.CASE_A
    assert on_cylinder.kappa == pytest.approx(plane_kappa, rel=1e-5)


def test_horizontal_plane_is_case_b(t0_plane, korany, spec):
    result = blowup_density(t0_plane, [0.0, 0.0, 0.0], korany, spec)
    assert result.kind is BlowupKind.CASE_B
    assert result.taylor.exact and result.taylor.admissible
    assert result.kappa == pytest.approx(math.pi / 3.0, rel=1e-5)


def test_paraboloid_is_case_b(h1, korany, spec):
    paraboloid = build_surface("h1-paraboloid", h1)
    result = blowup_density(paraboloid, [0.0, 0.0, 0.0], korany, spec)
    assert result.kind is BlowupKind.CASE_B
    # t = |x_H|^2: sigma_H density |x_H| sqrt(17) / 2 inside |x_H| < 17^(-1/4)
    assert result.kappa == pytest.approx(math.pi / (3.0 * 17.0 ** 0.25), rel=1e-4)
    assert result.limit_surface.height.terms == {(0, 2): 1.0, (2, 0): 1.0}


def test_low_order_terms_make_a_degenerate_point(engel, engel_norm, spec):
    # x4 = x3 has a weight-2 term below the graph order 3
    surface = surface_from_config(engel, {"alpha": 4, "boxes": [[[-1, -1, -1], [1, 1, 1]]],
                                          "height": {"0,0,1": 1.0}})
    result = blowup_density(surface, np.zeros(4), engel_norm, spec)
    assert result.kind is BlowupKind.DEGENERATE
    assert result.kappa is None
    assert result.taylor.low_order == {(0, 0, 1): 1.0}


def test_taylor_data_needs_a_vertical_graph(engel):
    plane = build_surface("engel-vertical-plane", engel)
    with pytest.raises(CapabilityError):
        taylor_data(plane.patches[0], np.zeros(4))


def test_taylor_data_away_from_identity(h1):
    paraboloid = build_surface("h1-paraboloid", h1).patches[0]
    x = np.array([0.5, 0.0, 0.25])
    data = taylor_data(paraboloid, x)
    w = np.array([[0.1, -0.2], [0.05, 0.3]])
    # x^{-1} S is the graph of h((x * w)_H) - (x * w)_t over horizontal w
    points = np.stack([w[:, 0], w[:, 1], np.zeros(2)], axis=1)
    shifted = h1.mul(x, points)
    expected = shifted[:, 0] ** 2 + shifted[:, 1] ** 2 - shifted[:, 2]
    np.testing.assert_allclose(data.polynomial(w), expected, atol=1e-12)


def test_vertical_hyperplane_orientation(korany):
    plane = vertical_hyperplane(korany, np.array([0.0, -1.0]))
    assert plane.alpha == 1 and plane.orientation == -1


def test_reach(vertical_plane, korany, h1):
    assert reach(vertical_plane, [0.0, 0.0, 0.0], korany) == pytest.approx(2.0)
    closed = build_surface("h1-capped-cylinder", h1)
    assert reach(closed, [1.0, 0.0, 0.0], korany) == math.inf


def test_scan_ratios_are_constant_on_a_plane(vertical_plane, korany, spec, plane_kappa):
    scan = blowup_scan(vertical_plane, [0.0, 0.0, 0.0], korany, [0.25, 0.5, 1.0], spec, workers=2)
    assert [p.radius for p in scan] == [0.25, 0.5, 1.0]
    for point in scan:
        assert point.ratio == pytest.approx(plane_kappa, rel=1e-5)


def test_scan_ratios_are_constant_on_the_paraboloid(h1, korany, spec):
    # t = |x_H|^2 is invariant under the dilations, so every ratio is kappa itself
    paraboloid = build_surface("h1-paraboloid", h1)
    kappa = math.pi / (3.0 * 17.0 ** 0.25)
    scan = blowup_scan(paraboloid, [0.0, 0.0, 0.0], korany, [0.05, 0.1, 0.2, 0.4], spec)
    assert len(scan) == 4
    for point in scan:
        assert point.ratio == pytest.approx(kappa, rel=1e-5)


def test_scan_rejects_radii_past_the_boundary(vertical_plane, korany, spec):
    with pytest.raises(DomainError):
        blowup_scan(vertical_plane, [0.0, 0.0, 0.0], korany, [1.0, 2.5], spec)
    with pytest.raises(DomainError):
        blowup_scan(vertical_plane, [0.0, 0.0, 0.0], korany, [-1.0], spec)


def test_point_must_lie_on_surface(vertical_plane, korany, spec):
    with pytest.raises(DomainError):
        blowup_density(vertical_plane, [1.0, 0.0, 0.0], korany, spec)


def test_scanned_density(vertical_plane, korany, spec):
    result = scanned_density(vertical_plane, [0.0, 0.0, 0.0], korany, [0.5], spec)
    assert len(result.scan) == 1
    payload = result.as_dict()
    assert payload["kind"] == "case-a"
    assert payload["scan"][0]["R"] == 0.5
