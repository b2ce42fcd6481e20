"""
Shared fixtures - Carnot Lab tests
"""

import pytest

from carnot_lab.homogeneous_metrics import make_norm
from carnot_lab.quadrature import QuadratureSpec
from carnot_lab.stratified_algebra import resolve_group
from carnot_lab.surface_presets import build_surface


@pytest.fixture(scope="session")
def h1():
    return resolve_group("h1")


@pytest.fixture(scope="session")
def engel():
    return resolve_group("engel")


@pytest.fixture(scope="session")
def korany(h1):
    return make_norm(h1, "korany")


@pytest.fixture(scope="session")
def engel_norm(engel):
    return make_norm(engel, "power-lambda", 6)


@pytest.fixture(scope="session")
def spec():
    """Coarser than the default so the suite stays quick"""
    return QuadratureSpec(rel_tol=1e-6, abs_tol=1e-10)


@pytest.fixture(scope="session")
def square(h1):
    return build_surface("h1-square", h1)


@pytest.fixture(scope="session")
def vertical_plane(h1):
    return build_surface("h1-vertical-plane", h1)


@pytest.fixture(scope="session")
def disk(h1):
    return build_surface("h1-disk", h1, {"radius": 1.0})


@pytest.fixture(scope="session")
def t0_plane(h1):
    return build_surface("h1-t0-plane", h1)


@pytest.fixture(scope="session")
def cylinder(h1):
    return build_surface("h1-cylinder", h1, {"radius": 2.0, "half_height": 1.0})
