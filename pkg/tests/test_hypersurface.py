"""
Hypersurface frames, measures and characteristic locus tests
"""

import math

import numpy as np
import pytest
from scipy import integrate as sp_integrate

from carnot_lab.errors import (CapabilityError, CharacteristicPointError, ConfigError,
                               DomainError, GeometryError)
from carnot_lab.hypersurface import (BallRegion, BoundaryCurve, FrameBatch, Measure,
                                     boundary_frame, boundary_measure, ch_nu,
                                     characteristic_locus, dilate_surface, excised_integral,
                                     h_perimeter, horizontal_mean_curvature,
                                     left_translate_surface, locate, riemannian_area,
                                     right_translate_surface, surface_frame)
from carnot_lab.surface_presets import SURFACE_PRESETS, build_surface, surface_from_config


def ball_section_area():
    # sigma_H of {x1 = 0} inside the unit Korany ball
    value, _ = sp_integrate.quad(lambda u: math.sqrt(1.0 - u ** 4), 0.0, 1.0)
    return value


# ---------------------------------------------------------------------------
# frames
# ---------------------------------------------------------------------------

def test_vertical_plane_frame(square):
    data = surface_frame(square, [0.3, -0.4])
    np.testing.assert_allclose(data.nu, [1.0, 0.0, 0.0])
    np.testing.assert_allclose(data.nuH, [1.0, 0.0])
    assert data.pH_nu == pytest.approx(1.0)
    assert data.varpi_norm == pytest.approx(0.0)
    assert not data.characteristic
    np.testing.assert_allclose(data.point.coords, [0.0, 0.3, -0.4])


def test_horizontal_plane_frame(t0_plane):
    # at (1, 0, 0) the frame normal is X3 + X2 / 2
    data = surface_frame(t0_plane, [1.0, 0.0])
    np.testing.assert_allclose(data.nuH, [0.0, 1.0], atol=1e-12)
    assert data.pH_nu == pytest.approx(0.5 / math.sqrt(1.25))
    assert data.varpi_layers[2][0] == pytest.approx(2.0)
    vec, size = ch_nu(t0_plane, [1.0, 0.0])
    np.testing.assert_allclose(vec, [2.0, 0.0], atol=1e-12)
    assert size == pytest.approx(2.0)


def test_characteristic_point(t0_plane):
    data = surface_frame(t0_plane, [0.0, 0.0])
    assert data.characteristic
    assert data.nuH is None and data.pH_nu == 0.0
    with pytest.raises(CharacteristicPointError):
        horizontal_mean_curvature(t0_plane, [0.0, 0.0])
    with pytest.raises(CharacteristicPointError):
        ch_nu(t0_plane, [0.0, 0.0])


def test_parameter_outside_domain(square):
    with pytest.raises(DomainError):
        surface_frame(square, [1.5, 0.0])
    with pytest.raises(DomainError):
        surface_frame(square, [0.0, 0.0], patch=3)


def test_batch_quantities(disk):
    fb = FrameBatch(disk.patches[0], np.array([[0.5, 0.0], [0.0, -0.25]]))
    np.testing.assert_allclose(fb.sigma_h, [0.25, 0.125])
    np.testing.assert_allclose(np.linalg.norm(fb.nu_h, axis=1), 1.0)
    assert fb.density(Measure.R)[0] == pytest.approx(math.sqrt(1.0 + 0.0625))


# ---------------------------------------------------------------------------
# curvature
# ---------------------------------------------------------------------------

def test_plane_is_minimal(square, vertical_plane):
    assert horizontal_mean_curvature(square, [0.2, 0.1]) == pytest.approx(0.0, abs=1e-6)
    assert horizontal_mean_curvature(vertical_plane, [-1.0, 1.5]) == pytest.approx(0.0, abs=1e-6)


def test_cylinder_curvature(cylinder):
    # |x_H| = R has H = 1/R
    assert horizontal_mean_curvature(cylinder, [0.0, 0.0], patch=0) == pytest.approx(0.5, rel=1e-4)
    assert horizontal_mean_curvature(cylinder, [0.3, 0.4], patch=3) == pytest.approx(0.5, rel=1e-4)


@pytest.mark.parametrize("radius", [0.5, 1.0])
def test_cylinder_curvature_is_inverse_radius(h1, radius):
    cylinder = build_surface("h1-cylinder", h1, {"radius": radius, "half_height": 1.0})
    for index in range(len(cylinder.patches)):
        H = horizontal_mean_curvature(cylinder, [0.2 * radius, 0.4], patch=index)
        assert H == pytest.approx(1.0 / radius, rel=1e-4)


def test_cylinder_geometry(cylinder):
    patch = cylinder.patches[0]
    np.testing.assert_allclose(patch.points(np.array([[0.0, 0.0]])), [[2.0, 0.0, 0.0]])
    data = surface_frame(cylinder, [0.0, 0.0], patch=0)
    np.testing.assert_allclose(data.nuH, [1.0, 0.0], atol=1e-12)
    assert data.varpi_norm == pytest.approx(0.0, abs=1e-12)


# ---------------------------------------------------------------------------
# locate
# ---------------------------------------------------------------------------

def test_locate(square, cylinder):
    index, zeta = locate(square, [0.0, 0.5, 0.2])
    assert index == 0
    np.testing.assert_allclose(zeta, [0.5, 0.2])
    index, zeta = locate(cylinder, [0.0, -2.0, 0.5])
    assert cylinder.patches[index].name == "cyl[y-]"


def test_locate_rejects_points_off_or_on_edge(square):
    with pytest.raises(DomainError, match="not on surface"):
        locate(square, [0.5, 0.0, 0.0])
    with pytest.raises(DomainError, match="patch boundary"):
        locate(square, [0.0, 1.0, 0.0])
    assert locate(square, [0.0, 1.0, 0.0], interior=False)[0] == 0


# ---------------------------------------------------------------------------
# measures
# ---------------------------------------------------------------------------

def test_square_perimeter(square, spec):
    est = h_perimeter(square, spec)
    assert est.converged
    assert est.value == pytest.approx(4.0, rel=1e-10)
    assert riemannian_area(square, spec).value == pytest.approx(4.0, rel=1e-10)


def test_disk_perimeter(disk, spec):
    assert h_perimeter(disk, spec).value == pytest.approx(math.pi / 3.0, rel=1e-5)
    expected = 8.0 * math.pi / 3.0 * (1.25 ** 1.5 - 1.0)
    assert riemannian_area(disk, spec).value == pytest.approx(expected, rel=1e-5)


def test_perimeter_inside_ball(vertical_plane, korany, spec):
    ball = BallRegion(korany, np.zeros(3), 1.0)
    est = h_perimeter(vertical_plane, spec, region=ball)
    assert est.value == pytest.approx(ball_section_area(), rel=1e-5)


def test_ball_radius_must_be_positive(korany):
    with pytest.raises(DomainError):
        BallRegion(korany, np.zeros(3), 0.0)


def test_box_region(square, spec):
    est = h_perimeter(square, spec, region=(np.array([0.0, -1.0]), np.array([1.0, 1.0])))
    assert est.value == pytest.approx(2.0)


def test_engel_plane_perimeter(engel, spec):
    plane = build_surface("engel-vertical-plane", engel)
    assert plane.patches[0].dim == 3
    assert h_perimeter(plane, spec).value == pytest.approx(64.0, rel=1e-10)
    with pytest.raises(CapabilityError):
        plane.boundary_curves()


def test_left_translation_invariance(square, spec):
    moved = left_translate_surface(square, [0.3, -0.2, 0.5])
    assert h_perimeter(moved, spec).value == pytest.approx(4.0, rel=1e-8)
    index, _ = locate(moved, moved.patches[0].points(np.array([[0.1, 0.2]]))[0])
    assert index == 0


def test_right_translation_keeps_plane_area(square, spec):
    # right translation by a vertical element is also a left translation
    moved = right_translate_surface(square, [0.0, 0.0, 0.7])
    assert h_perimeter(moved, spec).value == pytest.approx(4.0, rel=1e-8)


def test_dilation_scales_perimeter(square, disk, spec):
    assert h_perimeter(dilate_surface(square, 2.0), spec).value == pytest.approx(32.0, rel=1e-8)
    assert h_perimeter(dilate_surface(disk, 0.5), spec).value == pytest.approx(
        math.pi / 3.0 / 8.0, rel=1e-5)


def test_square_boundary_measure(square, spec):
    # only the two vertical edges carry sigma_H
    assert boundary_measure(square, spec).value == pytest.approx(4.0, rel=1e-8)
    assert boundary_measure(square, spec, measure=Measure.R).value == pytest.approx(8.0, rel=1e-8)
    top = [c for c in square.boundary if c.name.startswith("top")]
    assert boundary_measure(square, spec, curves=top).value == pytest.approx(0.0, abs=1e-12)


def test_boundary_frame(square):
    right = next(c for c in square.boundary if c.name.startswith("right"))
    data = boundary_frame(square, right, 0.5)
    np.testing.assert_allclose(data.eta, [0.0, 1.0, 0.0], atol=1e-12)
    np.testing.assert_allclose(data.eta_HS, [0.0, 1.0], atol=1e-12)
    assert data.pHS_eta == pytest.approx(1.0)
    bottom = next(c for c in square.boundary if c.name.startswith("bottom"))
    assert boundary_frame(square, bottom, 0.5).eta_HS is None


def test_curve_from_ambient(square):
    curve = BoundaryCurve.from_ambient(square, 0, lambda s: np.stack(
        [np.zeros_like(s), s, 0.5 * s], axis=-1), -1.0, 1.0)
    np.testing.assert_allclose(curve.zeta(np.array([0.5])), [[0.5, 0.25]])
    with pytest.raises(GeometryError):
        BoundaryCurve.from_ambient(square, 0, lambda s: np.stack(
            [s, s, 0.0 * s], axis=-1), -1.0, 1.0)


# ---------------------------------------------------------------------------
# characteristic locus
# ---------------------------------------------------------------------------

def test_locus_empty_on_vertical_plane(square):
    locus = characteristic_locus(square)
    assert locus.empty
    assert locus.cluster_count == 0


def test_locus_of_disk(disk):
    locus = characteristic_locus(disk)
    assert not locus.empty
    assert locus.cluster_count == 1
    (point,) = locus.cluster_points(disk)
    np.testing.assert_allclose(point, [0.0, 0.0, 0.0], atol=0.05)


def test_excised_integral_accounts_for_mass(disk, spec):
    result = excised_integral(disk, lambda fb: np.ones(len(fb)), spec)
    assert result.flagged_cells > 0
    assert result.excised_mass > 0
    assert result.estimate.value + result.excised_mass == pytest.approx(math.pi / 3.0, rel=1e-5)


# ---------------------------------------------------------------------------
# presets
# ---------------------------------------------------------------------------

def test_presets_require_their_group(engel):
    with pytest.raises(ConfigError) as info:
        build_surface("h1-disk", engel)
    assert info.value.key == "surface"


def test_unknown_preset(h1):
    with pytest.raises(ConfigError):
        build_surface("h1-torus", h1)


def test_every_h1_preset_builds(h1):
    for name in SURFACE_PRESETS:
        if name.startswith("h1-"):
            surface = build_surface(name, h1)
            assert surface.patches
    assert build_surface("h1-capped-cylinder", h1).closed
    assert not build_surface("h1-square", h1).closed


def test_graph_from_config(h1, spec):
    surface = surface_from_config(h1, {"alpha": 1, "boxes": [[[-1, -1], [1, 1]]],
                                       "name": "plane"})
    assert h_perimeter(surface, spec).value == pytest.approx(4.0)
    assert len(surface.boundary) == 4
    clipped = surface_from_config(h1, {"alpha": 3, "boxes": [[[-1, -1], [1, 1]]],
                                       "clip_radius": 1.0})
    assert not clipped.boundary_traced
    assert h_perimeter(clipped, spec).value == pytest.approx(math.pi / 3.0, rel=1e-5)
    with pytest.raises(ConfigError):
        surface_from_config(h1, {"boxes": []})
