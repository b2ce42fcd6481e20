"""
Adaptive quadrature and worker pool tests
"""

import math

import numpy as np
import pytest

from carnot_lab.errors import ConvergenceWarning, DomainError
from carnot_lab.parallel import default_workers, fsum_rows, ordered_map, set_default_workers
from carnot_lab.quadrature import (Estimate, QuadratureSpec, composite_gauss, grid_cells,
                                   integrate)

UNIT_SQUARE = [(np.zeros(2), np.ones(2))]
BIG_SQUARE = [(-np.ones(2), np.ones(2))]


def disk_level(pts):
    return np.sum(pts ** 2, axis=1) - 1.0


def test_polynomial_is_exact(spec):
    est = integrate(lambda p: p[:, 0] ** 2 + p[:, 1] ** 2, UNIT_SQUARE, spec)
    assert est.converged
    assert est.value == pytest.approx(2.0 / 3.0, rel=1e-12)
    assert isinstance(est.value, float)


def test_vector_integrand(spec):
    est = integrate(lambda p: np.stack([np.ones(len(p)), p[:, 0]], axis=1), UNIT_SQUARE, spec)
    np.testing.assert_allclose(est.value, [1.0, 0.5])
    assert est.component(1).value == pytest.approx(0.5)


def test_clipped_disk_area(spec):
    est = integrate(lambda p: np.ones(len(p)), BIG_SQUARE, spec, level=disk_level)
    assert est.converged
    assert est.value == pytest.approx(math.pi, rel=1e-5)


def test_centroid_clip_rule():
    spec = QuadratureSpec(rel_tol=1e-3, clip_rule="centroid", max_cells=20_000)
    est = integrate(lambda p: np.ones(len(p)), BIG_SQUARE, spec, level=disk_level)
    assert est.value == pytest.approx(math.pi, rel=2e-2)


def test_centroid_rule_refines_cut_cells():
    spec = QuadratureSpec(rel_tol=1e-3, clip_rule="centroid", max_cells=2_000)
    est = integrate(lambda p: np.ones(len(p)), BIG_SQUARE, spec, level=disk_level)
    # a single cell would keep the whole square
    assert est.cells > 100
    assert est.value < 3.5
    assert est.error > 0.0


def test_error_off_the_crossing_axis_is_measured():
    # the clipped area carries a square-root kink along the outer axis only
    loose = integrate(lambda p: np.ones(len(p)), BIG_SQUARE, QuadratureSpec(rel_tol=1e-4),
                      level=disk_level)
    tight = integrate(lambda p: np.ones(len(p)), BIG_SQUARE, QuadratureSpec(rel_tol=1e-9),
                      level=disk_level)
    assert loose.converged and tight.converged
    assert abs(loose.value - math.pi) <= loose.error
    assert tight.value == pytest.approx(math.pi, rel=1e-8)
    assert tight.cells > loose.cells


def test_sliver_between_crossing_knots(spec):
    # thin ellipse centred between the sample knots of the last axis
    def sliver(pts):
        return (pts[:, 0] / 0.9) ** 2 + ((pts[:, 1] - 0.1) / 0.01) ** 2 - 1.0

    est = integrate(lambda p: np.ones(len(p)), BIG_SQUARE, spec, level=sliver)
    assert est.converged
    assert est.value == pytest.approx(math.pi * 0.9 * 0.01, rel=1e-5)


def test_result_independent_of_workers(spec):
    def f(p):
        return np.exp(p[:, 0]) * np.cos(3 * p[:, 1])

    one = integrate(f, BIG_SQUARE, spec, level=disk_level, workers=1)
    four = integrate(f, BIG_SQUARE, spec, level=disk_level, workers=4)
    assert one.value == four.value
    assert one.cells == four.cells


def test_cell_budget_stops_with_warning():
    spec = QuadratureSpec(rel_tol=1e-10, max_cells=2)
    with pytest.warns(ConvergenceWarning):
        est = integrate(lambda p: np.ones(len(p)), BIG_SQUARE, spec, level=disk_level)
    assert not est.converged
    assert est.warnings and est.warnings[0].startswith("not converged")


def test_empty_cells(spec):
    est = integrate(lambda p: np.ones(len(p)), [(np.zeros(2), np.zeros(2))], spec)
    assert est.value == 0.0 and est.converged


def test_estimate_arithmetic():
    a = Estimate(1.0, 0.1, True, 3, ["x"])
    b = Estimate(2.0, 0.2, False, 4, ["y"])
    total = a + b
    assert total.value == pytest.approx(3.0)
    assert not total.converged
    assert total.warnings == ["x", "y"]
    assert a.scaled(-2.0).error == pytest.approx(0.2)


@pytest.mark.parametrize("kwargs", [{"rel_tol": 0.0}, {"base_order": 0},
                                    {"crossing_samples": 0}, {"clip_rule": "nearest"}])
def test_spec_validation(kwargs):
    with pytest.raises(DomainError):
        QuadratureSpec(**kwargs)


def test_refined_spec(spec):
    finer = spec.refined()
    assert finer.rel_tol == pytest.approx(spec.rel_tol * 0.01)
    assert finer.max_depth == spec.max_depth + 8
    assert spec.as_dict()["rel_tol"] == spec.rel_tol


def test_composite_gauss():
    value = composite_gauss(np.sin, 0.0, math.pi, panels=8)
    assert value[0] == pytest.approx(2.0, rel=1e-12)
    assert composite_gauss(np.sin, 1.0, 1.0, panels=4)[0] == 0.0


def test_grid_cells():
    cells = grid_cells([0.0, 0.0], [1.0, 2.0], [2, 4])
    assert len(cells) == 8
    np.testing.assert_allclose(cells[-1][1], [1.0, 2.0])
    np.testing.assert_allclose(cells[0][1], [0.5, 0.5])


def test_ordered_map_keeps_order():
    items = list(range(50))
    assert ordered_map(lambda i: i * i, items, workers=8) == [i * i for i in items]


def test_default_workers_override():
    try:
        set_default_workers(3)
        assert default_workers() == 3
        with pytest.raises(ValueError):
            set_default_workers(0)
    finally:
        set_default_workers(None)


def test_fsum_rows_is_exact():
    rows = [np.array([1e16, 1.0]), np.array([1.0, 1.0]), np.array([-1e16, 1.0])]
    np.testing.assert_array_equal(fsum_rows(rows), [1.0, 3.0])
