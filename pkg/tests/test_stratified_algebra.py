"""
Stratified algebra and group law tests
"""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from carnot_lab.errors import CapabilityError, ConfigError, DomainError, StructureError
from carnot_lab.stratified_algebra import (CarnotGroup, algebra_from_triples, bracket, dilate,
                                           engel_algebra, group_inverse, group_mul,
                                           heisenberg_algebra, left_invariant_frame, load_algebra,
                                           resolve_group, verify_structure)

coordinate = st.floats(min_value=-2.0, max_value=2.0, allow_nan=False, allow_infinity=False)


def points(n):
    return st.lists(coordinate, min_size=n, max_size=n).map(np.array)


# ---------------------------------------------------------------------------
# algebras
# ---------------------------------------------------------------------------

def test_presets_have_expected_dimensions():
    h1 = heisenberg_algebra(1)
    engel = engel_algebra()
    assert (h1.n, h1.k, h1.Q) == (3, 2, 4)
    assert (engel.n, engel.k, engel.Q) == (4, 3, 7)
    assert heisenberg_algebra(2).Q == 6
    assert list(engel.ord) == [1, 1, 2, 3]


def test_presets_pass_verification():
    for alg in (heisenberg_algebra(1), heisenberg_algebra(3), engel_algebra()):
        report = verify_structure(alg)
        assert report.passed, report.failures
        assert report.Q == alg.Q


def test_grading_violation_is_reported():
    # [X1, X2] landing on X1 breaks the grading
    alg = algebra_from_triples((2, 1), [[1, 1, 2, 1.0]])
    report = verify_structure(alg)
    assert not report.passed
    assert not report.checks["grading"]
    assert report.Q is None


def test_missing_generation_is_reported():
    alg = algebra_from_triples((2, 1, 1), [[3, 1, 2, 1.0]])
    report = verify_structure(alg)
    assert not report.checks["generation"]
    assert any("H3" in failure for failure in report.failures)


def test_group_rejects_invalid_algebra():
    with pytest.raises(StructureError):
        CarnotGroup(algebra_from_triples((2, 1), [[1, 1, 2, 1.0]]))


def test_step_five_is_out_of_scope():
    filiform = algebra_from_triples((2, 1, 1, 1, 1),
                                    [[3, 1, 2, 1.0], [4, 1, 3, 1.0], [5, 1, 4, 1.0], [6, 1, 5, 1.0]])
    assert verify_structure(filiform).passed
    with pytest.raises(CapabilityError):
        CarnotGroup(filiform)


def test_unknown_preset():
    with pytest.raises(DomainError):
        resolve_group("h9")


# ---------------------------------------------------------------------------
# group law
# ---------------------------------------------------------------------------

@settings(max_examples=50, deadline=None)
@given(points(3), points(3), points(3))
def test_heisenberg_associativity(a, b, c):
    g = resolve_group("h1")
    np.testing.assert_allclose(g.mul(g.mul(a, b), c), g.mul(a, g.mul(b, c)), atol=1e-9)


@settings(max_examples=50, deadline=None)
@given(points(4), points(4), points(4))
def test_engel_associativity(a, b, c):
    g = resolve_group("engel")
    np.testing.assert_allclose(g.mul(g.mul(a, b), c), g.mul(a, g.mul(b, c)), atol=1e-9)


@settings(max_examples=50, deadline=None)
@given(points(4))
def test_inverse_and_identity(x):
    g = resolve_group("engel")
    np.testing.assert_allclose(g.mul(x, g.inverse(x)), g.identity(), atol=1e-12)
    np.testing.assert_allclose(g.mul(g.identity(), x), x, atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(points(4), points(4), st.floats(min_value=0.1, max_value=3.0))
def test_dilations_are_automorphisms(a, b, t):
    g = resolve_group("engel")
    np.testing.assert_allclose(g.dilate(t, g.mul(a, b)), g.mul(g.dilate(t, a), g.dilate(t, b)),
                               atol=1e-8)


def test_heisenberg_product_formula(h1):
    a = np.array([1.0, 2.0, 3.0])
    b = np.array([-0.5, 4.0, 1.0])
    expected = np.array([0.5, 6.0, 4.0 + 0.5 * (1.0 * 4.0 - 2.0 * -0.5)])
    np.testing.assert_allclose(h1.mul(a, b), expected)


def test_dilate_rejects_non_positive(h1):
    with pytest.raises(DomainError):
        h1.dilate(0.0, np.zeros(3))


def test_shape_mismatch(h1):
    with pytest.raises(StructureError):
        h1.mul(np.zeros(4), np.zeros(3))


@pytest.mark.parametrize("name", ["h1", "engel"])
def test_frame_is_left_invariant_derivative(name):
    g = resolve_group(name)
    x = np.linspace(0.3, -0.7, g.n)
    M = g.frame(x)
    h = 1e-6
    for i in range(g.n):
        e = np.zeros(g.n)
        e[i] = h
        fd = (g.mul(x, e) - g.mul(x, -e)) / (2 * h)
        np.testing.assert_allclose(M[:, i], fd, atol=1e-6)
    np.testing.assert_allclose(g.frame_inverse(x) @ M, np.eye(g.n), atol=1e-12)


def test_curvature_constant(h1, engel):
    # C^alpha_H is the standard symplectic matrix on H1
    assert h1.curvature_constant() == pytest.approx(1.0)
    assert engel.curvature_constant() == pytest.approx(1.0)


def test_point_wrappers(h1):
    x = h1.point([1.0, 0.0, 0.0])
    y = h1.point([0.0, 1.0, 0.0])
    np.testing.assert_allclose(group_mul(x, y).coords, [1.0, 1.0, 0.5])
    np.testing.assert_allclose(group_inverse(x).coords, [-1.0, 0.0, 0.0])
    np.testing.assert_allclose(dilate(2.0, y).coords, [0.0, 2.0, 0.0])
    v = h1.vector([1.0, 0.0, 0.0])
    w = h1.vector([0.0, 1.0, 0.0])
    np.testing.assert_allclose(bracket(v, w).frame_coords, [0.0, 0.0, 1.0])
    np.testing.assert_allclose(x.layer(1), [1.0, 0.0])
    # X1 = dx - y/2 dt, X2 = dy + x/2 dt at (1, 0, 0)
    np.testing.assert_allclose(left_invariant_frame(x), [[1.0, 0.0, 0.0],
                                                         [0.0, 1.0, 0.0],
                                                         [0.0, 0.5, 1.0]])


# ---------------------------------------------------------------------------
# algebra files
# ---------------------------------------------------------------------------

def test_load_algebra(tmp_path):
    path = tmp_path / "heis.yaml"
    path.write_text("growth: [2, 1]\nconstants:\n  - [3, 1, 2, 1.0]\n", encoding="utf-8")
    alg = load_algebra(str(path))
    assert alg.name == "heis"
    assert alg.Q == 4
    assert CarnotGroup(alg).curvature_constant() == pytest.approx(1.0)


def test_load_algebra_rejects_bad_grading(tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text("growth: [2, 1]\nconstants:\n  - [1, 1, 2, 1.0]\n", encoding="utf-8")
    with pytest.raises(StructureError):
        load_algebra(str(path))


def test_load_algebra_missing_keys(tmp_path):
    path = tmp_path / "empty.yaml"
    path.write_text("growth: [2, 1]\n", encoding="utf-8")
    with pytest.raises(ConfigError) as info:
        load_algebra(str(path))
    assert info.value.key == "group"


def test_load_algebra_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_algebra(str(tmp_path / "absent.yaml"))
