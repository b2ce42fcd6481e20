#!/usr/bin/env python3
"""
Hypersurface - Carnot Lab
Hypersurface patches, per-point frames and normals, characteristic detection and
adaptive quadrature of the horizontal perimeter, boundary measures and curvature integrals.

Every patch is parametrized by a point zeta of an (n-1)-dimensional parameter box. The
central per-point quantity is the area normal N(zeta): the Riemannian normal in frame
coordinates, scaled so that |N| is the Riemannian area density with respect to d zeta.
Its horizontal part N_H gives the H-perimeter density |N_H| = |P_H nu| * |N|.
"""

import math
import logging
from typing import Callable, Dict, List, Optional, Any, Sequence, Tuple, Union
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property

import numpy as np
from scipy import ndimage

from carnot_lab.errors import (CapabilityError, CharacteristicPointError, DomainError,
                               GeometryError)
from carnot_lab.fields import VectorField
from carnot_lab.homogeneous_metrics import HomogeneousNorm
from carnot_lab.polynomials import Polynomial
from carnot_lab.quadrature import (Box, Estimate, QuadratureSpec, gauss_rule, grid_cells,
                                   integrate, zero_estimate)
from carnot_lab.stratified_algebra import CarnotGroup, GroupPoint

logger = logging.getLogger(__name__)

CHAR_EPS = 1e-8
CURVATURE_STEP = 1e-5
DOMAIN_TOL = 1e-12
BALL_SAMPLES = 4096
BALL_PAD = 0.10
BALL_PRESPLIT = 4
LOCUS_RESOLUTION = 64


class Measure(Enum):
    H = "horizontal"
    R = "riemannian"


# ---------------------------------------------------------------------------
# heights and parameter domains
# ---------------------------------------------------------------------------

class CallableHeight:
    """Smooth height given as a vectorized callable; gradient by central differences if absent"""

    def __init__(self, value: Callable[[np.ndarray], np.ndarray], nvars: int,
                 gradient: Optional[Callable[[np.ndarray], np.ndarray]] = None,
                 name: str = "callable", step: float = 1e-6):
        self.value = value
        self.nvars = nvars
        self._gradient = gradient
        self.name = name
        self.step = step

    def __call__(self, z: np.ndarray) -> np.ndarray:
        return np.asarray(self.value(np.asarray(z, dtype=float)), dtype=float)

    def gradient(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        if self._gradient is not None:
            return np.asarray(self._gradient(z), dtype=float)
        out = np.empty(z.shape)
        for j in range(self.nvars):
            e = np.zeros(self.nvars)
            e[j] = self.step
            out[..., j] = (self(z + e) - self(z - e)) / (2 * self.step)
        return out


Height = Union[Polynomial, CallableHeight]


@dataclass
class ParameterDomain:
    """Union of parameter boxes, optionally clipped by a level function (inside where < 0)"""
    boxes: List[Box]
    clip: Optional[Callable[[np.ndarray], np.ndarray]] = None
    name: str = "boxes"

    def __post_init__(self):
        self.boxes = [(np.asarray(a, dtype=float), np.asarray(b, dtype=float)) for a, b in self.boxes]
        if not self.boxes:
            raise DomainError("a parameter domain needs at least one box")
        dims = {len(a) for a, _ in self.boxes}
        if len(dims) != 1:
            raise DomainError("parameter boxes have different dimensions")
        for a, b in self.boxes:
            if len(b) != len(a) or np.any(b < a):
                raise DomainError(f"box {a.tolist()}..{b.tolist()} is malformed")

    @classmethod
    def box(cls, lo: Sequence[float], hi: Sequence[float], **kwargs) -> "ParameterDomain":
        return cls([(np.asarray(lo, dtype=float), np.asarray(hi, dtype=float))], **kwargs)

    @property
    def dim(self) -> int:
        return len(self.boxes[0][0])

    def contains(self, zeta: np.ndarray, tol: float = DOMAIN_TOL) -> np.ndarray:
        zeta = np.atleast_2d(np.asarray(zeta, dtype=float))
        inside = np.zeros(len(zeta), dtype=bool)
        for a, b in self.boxes:
            inside |= np.all((zeta >= a - tol) & (zeta <= b + tol), axis=1)
        if self.clip is not None:
            inside &= np.asarray(self.clip(zeta)) <= tol
        return inside

    def bounds(self) -> Box:
        lo = np.min([a for a, _ in self.boxes], axis=0)
        hi = np.max([b for _, b in self.boxes], axis=0)
        return lo, hi


# ---------------------------------------------------------------------------
# patches
# ---------------------------------------------------------------------------

class SurfacePatch:
    """Parametrized piece of a hypersurface"""

    group: CarnotGroup
    domain: ParameterDomain
    name: str

    @property
    def dim(self) -> int:
        return self.group.n - 1

    def points(self, zeta: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def frame_normal(self, zeta: np.ndarray) -> np.ndarray:
        """Area normal N in frame coordinates, |N| = Riemannian density per d zeta"""
        raise NotImplementedError

    def tangents(self, zeta: np.ndarray) -> np.ndarray:
        """Frame coordinates of the coordinate tangent vectors, shape (N, d, n)"""
        raise NotImplementedError

    def to_param(self, y: np.ndarray) -> np.ndarray:
        """Parameter of a point on (or near) the patch"""
        raise NotImplementedError

    def describe(self) -> Dict[str, Any]:
        return {"name": self.name}


class GraphSurface(SurfacePatch):
    """Graph x_alpha = height(zeta) over the coordinate hyperplane e_alpha^perp (alpha 0-based)"""

    def __init__(self, group: CarnotGroup, alpha: int, domain: ParameterDomain, height: Height,
                 orientation: int = 1, name: str = "graph"):
        if not 0 <= alpha < group.n:
            raise DomainError(f"graph direction {alpha + 1} outside 1..{group.n}")
        if domain.dim != group.n - 1:
            raise DomainError(f"domain has dimension {domain.dim}, expected {group.n - 1}")
        if height.nvars != group.n - 1:
            raise DomainError(f"height has {height.nvars} variables, expected {group.n - 1}")
        if orientation not in (1, -1):
            raise DomainError(f"orientation must be +1 or -1, got {orientation}")
        self.group = group
        self.alpha = alpha
        self.domain = domain
        self.height = height
        self.orientation = orientation
        self.name = name
        self._free = [j for j in range(group.n) if j != alpha]

    def __repr__(self) -> str:
        return f"GraphSurface({self.name}, alpha={self.alpha + 1}, group={self.group.name})"

    @property
    def is_vertical_graph(self) -> bool:
        return int(self.group.ord[self.alpha]) >= 2

    def points(self, zeta):
        zeta = np.asarray(zeta, dtype=float)
        y = np.empty(zeta.shape[:-1] + (self.group.n,))
        y[..., self._free] = zeta
        y[..., self.alpha] = self.height(zeta)
        return y

    def euclidean_normal(self, zeta: np.ndarray) -> np.ndarray:
        zeta = np.asarray(zeta, dtype=float)
        grad = self.height.gradient(zeta)
        n_e = np.zeros(zeta.shape[:-1] + (self.group.n,))
        n_e[..., self.alpha] = 1.0
        n_e[..., self._free] = -grad
        return self.orientation * n_e

    def frame_normal(self, zeta):
        y = self.points(zeta)
        return np.einsum("...ij,...i->...j", self.group.frame(y), self.euclidean_normal(zeta))

    def tangents(self, zeta):
        zeta = np.asarray(zeta, dtype=float)
        y = self.points(zeta)
        grad = self.height.gradient(zeta)
        t = np.zeros(zeta.shape[:-1] + (self.dim, self.group.n))
        for j, col in enumerate(self._free):
            t[..., j, col] = 1.0
            t[..., j, self.alpha] = grad[..., j]
        return np.einsum("...ij,...kj->...ki", self.group.frame_inverse(y), t)

    def to_param(self, y):
        return np.asarray(y, dtype=float)[..., self._free]

    def describe(self):
        out = {"name": self.name, "kind": "graph", "alpha": self.alpha + 1,
               "orientation": self.orientation,
               "boxes": [[a.tolist(), b.tolist()] for a, b in self.domain.boxes]}
        if isinstance(self.height, Polynomial):
            out["height"] = self.height.as_config()
        else:
            out["height"] = getattr(self.height, "name", "callable")
        return out


class _WrappedPatch(SurfacePatch):

    def __init__(self, base: SurfacePatch, name: str):
        self.base = base
        self.group = base.group
        self.domain = base.domain
        self.name = name


class LeftTranslatedPatch(_WrappedPatch):
    """Points c * p(zeta); frame data are left-invariant"""

    def __init__(self, base: SurfacePatch, c: Sequence[float]):
        super().__init__(base, f"L({base.name})")
        self.c = np.asarray(c, dtype=float)

    def points(self, zeta):
        return self.group.mul(self.c, self.base.points(zeta))

    def frame_normal(self, zeta):
        return self.base.frame_normal(zeta)

    def tangents(self, zeta):
        return self.base.tangents(zeta)

    def to_param(self, y):
        return self.base.to_param(self.group.mul(self.group.inverse(self.c), y))


class RightTranslatedPatch(_WrappedPatch):
    """Points p(zeta) * g, the time-one flow of a left-invariant field"""

    def __init__(self, base: SurfacePatch, g: Sequence[float]):
        super().__init__(base, f"R({base.name})")
        self.g = np.asarray(g, dtype=float)
        self._ad = self.group.adjoint(self.g)
        self._ad_inv = self.group.adjoint(-self.g)

    def points(self, zeta):
        return self.group.mul(self.base.points(zeta), self.g)

    def frame_normal(self, zeta):
        return np.einsum("ij,...i->...j", self._ad, self.base.frame_normal(zeta))

    def tangents(self, zeta):
        return np.einsum("ij,...kj->...ki", self._ad_inv, self.base.tangents(zeta))

    def to_param(self, y):
        return self.base.to_param(self.group.mul(y, self.group.inverse(self.g)))


class DilatedPatch(_WrappedPatch):
    """Points dilate(t, p(zeta))"""

    def __init__(self, base: SurfacePatch, t: float):
        if not t > 0:
            raise DomainError(f"dilation factor must be positive, got {t}")
        super().__init__(base, f"D{t:g}({base.name})")
        self.t = float(t)
        self._scale = np.power(self.t, self.group.ord.astype(float))

    def points(self, zeta):
        return self.group.dilate(self.t, self.base.points(zeta))

    def frame_normal(self, zeta):
        return self.t ** self.group.Q / self._scale * self.base.frame_normal(zeta)

    def tangents(self, zeta):
        return self._scale * self.base.tangents(zeta)

    def to_param(self, y):
        return self.base.to_param(self.group.dilate(1.0 / self.t, y))


# ---------------------------------------------------------------------------
# boundary curves and assembled surfaces
# ---------------------------------------------------------------------------

@dataclass
class BoundaryCurve:
    """Boundary arc s -> zeta(s) in the parameter plane of one patch

    outward_sign = +1 when the surface lies to the left of the direction of travel.
    """
    patch: int
    param: Callable[[np.ndarray], np.ndarray]
    t0: float
    t1: float
    outward_sign: int = 1
    velocity: Optional[Callable[[np.ndarray], np.ndarray]] = None
    name: str = "boundary"

    def zeta(self, s: np.ndarray) -> np.ndarray:
        return np.asarray(self.param(np.asarray(s, dtype=float)), dtype=float)

    def dzeta(self, s: np.ndarray) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        if self.velocity is not None:
            return np.asarray(self.velocity(s), dtype=float)
        h = 1e-6 * max(1.0, abs(self.t1 - self.t0))
        return (self.zeta(s + h) - self.zeta(s - h)) / (2 * h)

    @classmethod
    def segment(cls, patch: int, a: Sequence[float], b: Sequence[float], outward_sign: int = 1,
                name: str = "segment") -> "BoundaryCurve":
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        return cls(patch, lambda s: a + np.asarray(s)[..., None] * (b - a), 0.0, 1.0, outward_sign,
                   velocity=lambda s: np.broadcast_to(b - a, np.shape(s) + a.shape), name=name)

    @classmethod
    def from_ambient(cls, surface: "PatchedSurface", patch: int,
                     curve: Callable[[np.ndarray], np.ndarray], t0: float, t1: float,
                     outward_sign: int = 1, tol: float = 1e-8, samples: int = 64,
                     name: str = "boundary") -> "BoundaryCurve":
        """Wrap an ambient curve lying on a patch; raises GeometryError when it leaves the patch"""
        target = surface.patches[patch]
        s = np.linspace(t0, t1, samples)
        pts = np.asarray(curve(s), dtype=float)
        back = target.points(target.to_param(pts))
        gap = float(np.max(np.abs(back - pts)))
        if gap > tol * max(1.0, float(np.max(np.abs(pts)))):
            raise GeometryError(f"curve '{name}' is off patch '{target.name}' by {gap:.3e}")
        return cls(patch, lambda u: target.to_param(curve(u)), t0, t1, outward_sign, name=name)


@dataclass
class PatchedSurface:
    """Union of patches with disjoint interiors and explicit boundary arcs

    A surface without arcs is closed unless boundary_traced is False, which marks a boundary
    that exists but is not available as curves (parameter dimension above 2).
    """
    patches: List[SurfacePatch]
    boundary: List[BoundaryCurve] = field(default_factory=list)
    name: str = "surface"
    boundary_traced: bool = True

    def __post_init__(self):
        if self.patches:
            groups = {id(p.group.algebra) for p in self.patches}
            if len(groups) != 1:
                raise DomainError("patches of one surface must live in the same group")
        for curve in self.boundary:
            if not 0 <= curve.patch < len(self.patches):
                raise DomainError(f"boundary curve '{curve.name}' refers to missing patch {curve.patch}")

    @property
    def group(self) -> CarnotGroup:
        if not self.patches:
            raise DomainError(f"surface '{self.name}' is empty")
        return self.patches[0].group

    @property
    def closed(self) -> bool:
        return self.boundary_traced and not self.boundary

    def boundary_curves(self) -> List[BoundaryCurve]:
        if not self.boundary_traced:
            raise CapabilityError(f"the boundary of '{self.name}' is not available as curves")
        return list(self.boundary)

    @property
    def empty(self) -> bool:
        return not self.patches

    def describe(self) -> Dict[str, Any]:
        return {"name": self.name, "patches": [p.describe() for p in self.patches],
                "boundary": [c.name for c in self.boundary], "closed": self.closed}

    def mapped(self, wrap: Callable[[SurfacePatch], SurfacePatch], name: str) -> "PatchedSurface":
        return PatchedSurface([wrap(p) for p in self.patches], list(self.boundary), name,
                              self.boundary_traced)


SurfaceLike = Union[SurfacePatch, PatchedSurface]


def as_surface(surface: SurfaceLike) -> PatchedSurface:
    if isinstance(surface, PatchedSurface):
        return surface
    return PatchedSurface([surface], [], surface.name)


def dilate_surface(surface: SurfaceLike, t: float) -> PatchedSurface:
    s = as_surface(surface)
    return s.mapped(lambda p: DilatedPatch(p, t), f"dilate({t:g},{s.name})")


def left_translate_surface(surface: SurfaceLike, c: Sequence[float]) -> PatchedSurface:
    s = as_surface(surface)
    return s.mapped(lambda p: LeftTranslatedPatch(p, c), f"left({s.name})")


def right_translate_surface(surface: SurfaceLike, g: Sequence[float]) -> PatchedSurface:
    s = as_surface(surface)
    return s.mapped(lambda p: RightTranslatedPatch(p, g), f"right({s.name})")


# ---------------------------------------------------------------------------
# per-point frames
# ---------------------------------------------------------------------------

class FrameBatch:
    """Frame quantities at a batch of parameter points of one patch"""

    def __init__(self, patch: SurfacePatch, zeta: np.ndarray):
        self.patch = patch
        self.group = patch.group
        self.zeta = np.atleast_2d(np.asarray(zeta, dtype=float))
        self.points = patch.points(self.zeta)
        self.normal = patch.frame_normal(self.zeta)
        self.h1 = self.group.h1

    def __len__(self) -> int:
        return len(self.zeta)

    @cached_property
    def area(self) -> np.ndarray:
        """Riemannian density |N| per d zeta"""
        return np.linalg.norm(self.normal, axis=1)

    @cached_property
    def sigma_h(self) -> np.ndarray:
        """H-perimeter density |N_H| per d zeta"""
        return np.linalg.norm(self.normal[:, :self.h1], axis=1)

    @cached_property
    def characteristic(self) -> np.ndarray:
        return self.sigma_h ** 2 < (CHAR_EPS ** 2) * self.area ** 2

    @cached_property
    def _safe_h(self) -> np.ndarray:
        return np.where(self.characteristic, 1.0, self.sigma_h)

    @cached_property
    def nu(self) -> np.ndarray:
        return self.normal / self.area[:, None]

    @cached_property
    def nu_h(self) -> np.ndarray:
        """Unit horizontal normal; zero at characteristic points"""
        out = self.normal[:, :self.h1] / self._safe_h[:, None]
        out[self.characteristic] = 0.0
        return out

    @cached_property
    def p_h(self) -> np.ndarray:
        """|P_H nu| in [0, 1]"""
        return self.sigma_h / self.area

    @cached_property
    def varpi(self) -> np.ndarray:
        """Vertical part of nu over |P_H nu|; zero at characteristic points"""
        out = self.normal[:, self.h1:] / self._safe_h[:, None]
        out[self.characteristic] = 0.0
        return out

    def varpi_layer_norm(self, layer: int) -> np.ndarray:
        s = self.group.layer_slice(layer)
        return np.linalg.norm(self.varpi[:, s.start - self.h1:s.stop - self.h1], axis=1)

    @cached_property
    def varpi_norm(self) -> np.ndarray:
        return np.linalg.norm(self.varpi, axis=1)

    @cached_property
    def ch_nu(self) -> np.ndarray:
        """C_H nu_H = sum over second-layer alpha of varpi_alpha C^alpha_H nu_H"""
        mats = self.group.curvature_matrices()
        if not mats:
            return np.zeros((len(self), self.h1))
        stack = np.stack(mats)
        second = self.group.layer_slice(2)
        w = self.varpi[:, second.start - self.h1:second.stop - self.h1]
        return np.einsum("aij,nj,na->ni", stack, self.nu_h, w)

    @cached_property
    def euclidean_density(self) -> np.ndarray:
        """|n_e| with n_e the coordinate-space normal dual to N"""
        minv = self.group.frame_inverse(self.points)
        return np.linalg.norm(np.einsum("nji,nj->ni", minv, self.normal), axis=1)

    def density(self, measure: Measure) -> np.ndarray:
        return self.sigma_h if measure is Measure.H else self.area

    def horizontal_tangential(self, w_h: np.ndarray) -> np.ndarray:
        """P_HS of horizontal vectors w_h of shape (N, h1)"""
        return w_h - np.sum(w_h * self.nu_h, axis=1)[:, None] * self.nu_h

    def layer_projection_norms(self, w: np.ndarray) -> np.ndarray:
        """|P_{H_i S} w| for i = 1..k, shape (N, k); column 0 is |P_HS w|"""
        g = self.group
        out = np.zeros((len(self), g.k))
        previous = np.zeros(len(self))
        for i in range(1, g.k + 1):
            stop = g.layer_slice(i).stop
            pw = np.zeros_like(w)
            pw[:, :stop] = w[:, :stop]
            pn = np.zeros_like(self.nu)
            pn[:, :stop] = self.nu[:, :stop]
            size = np.linalg.norm(pn, axis=1)
            safe = np.where(size > CHAR_EPS, size, 1.0)
            u = np.where((size > CHAR_EPS)[:, None], pn / safe[:, None], 0.0)
            tangential = pw - np.sum(pw * u, axis=1)[:, None] * u
            current = np.sum(tangential ** 2, axis=1)
            out[:, i - 1] = np.sqrt(np.maximum(current - previous, 0.0))
            previous = current
        return out


@dataclass
class SurfacePointData:
    """Frame data at one surface point"""
    point: GroupPoint
    nu: np.ndarray
    nuH: Optional[np.ndarray]
    pH_nu: float
    varpi_layers: Dict[int, np.ndarray]
    sigma_density: float
    param_density: float
    characteristic: bool

    @property
    def varpi_norm(self) -> float:
        return float(np.sqrt(sum(float(np.sum(v ** 2)) for v in self.varpi_layers.values())))


def _patch_of(surface: SurfaceLike, patch: int) -> SurfacePatch:
    s = as_surface(surface)
    if not 0 <= patch < len(s.patches):
        raise DomainError(f"surface '{s.name}' has no patch {patch}")
    return s.patches[patch]


def _checked_batch(surface: SurfaceLike, zeta: Sequence[float], patch: int) -> FrameBatch:
    target = _patch_of(surface, patch)
    z = np.asarray(zeta, dtype=float).reshape(1, -1)
    if z.shape[1] != target.dim or not target.domain.contains(z)[0]:
        raise DomainError(f"parameter {np.ravel(z).tolist()} is outside the domain of '{target.name}'")
    return FrameBatch(target, z)


def locate(surface: SurfaceLike, y: Sequence[float], tol: float = 1e-9,
           interior: bool = True) -> Tuple[int, np.ndarray]:
    """Patch index and parameter of an ambient point lying on the surface

    With interior=True the point must sit strictly inside a patch domain.
    """
    s = as_surface(surface)
    y = np.asarray(y, dtype=float)
    on_edge = False
    for index, patch in enumerate(s.patches):
        zeta = patch.to_param(y[None])[0]
        if not patch.domain.contains(zeta[None], tol)[0]:
            continue
        if np.max(np.abs(patch.points(zeta[None])[0] - y)) > tol * max(1.0, float(np.max(np.abs(y)))):
            continue
        if not interior:
            return index, zeta
        inside = any(np.all(zeta > a + tol) and np.all(zeta < b - tol) for a, b in patch.domain.boxes)
        if patch.domain.clip is not None:
            inside = inside and float(patch.domain.clip(zeta[None])[0]) < -tol
        if inside:
            return index, zeta
        on_edge = True
    if on_edge:
        raise DomainError(f"point {y.tolist()} lies on a patch boundary of '{s.name}'")
    raise DomainError(f"point {y.tolist()} is not on surface '{s.name}'")


def surface_frame(surface: SurfaceLike, zeta: Sequence[float], patch: int = 0) -> SurfacePointData:
    fb = _checked_batch(surface, zeta, patch)
    g = fb.group
    layers = {i: fb.varpi[0, g.layer_slice(i).start - g.h1:g.layer_slice(i).stop - g.h1].copy()
              for i in range(2, g.k + 1)}
    char = bool(fb.characteristic[0])
    return SurfacePointData(
        point=g.point(fb.points[0]),
        nu=fb.nu[0].copy(),
        nuH=None if char else fb.nu_h[0].copy(),
        pH_nu=0.0 if char else float(fb.p_h[0]),
        varpi_layers=layers,
        sigma_density=float(fb.sigma_h[0] / fb.euclidean_density[0]),
        param_density=float(fb.sigma_h[0]),
        characteristic=char,
    )


# ---------------------------------------------------------------------------
# curvature and tangential calculus
# ---------------------------------------------------------------------------

def mean_curvature(fb: FrameBatch, step: float = CURVATURE_STEP) -> np.ndarray:
    """H = sum_i X_i(nu_H^i) with nu_H extended through the patch's to_param map"""
    patch = fb.patch
    g = fb.group
    total = np.zeros(len(fb))
    for i in range(g.h1):
        e = np.zeros(g.n)
        e[i] = step
        up = FrameBatch(patch, patch.to_param(g.mul(fb.points, e))).nu_h[:, i]
        down = FrameBatch(patch, patch.to_param(g.mul(fb.points, -e))).nu_h[:, i]
        total += (up - down) / (2 * step)
    total[fb.characteristic] = 0.0
    return total


def horizontal_mean_curvature(surface: SurfaceLike, zeta: Sequence[float], patch: int = 0) -> float:
    fb = _checked_batch(surface, zeta, patch)
    if fb.characteristic[0]:
        raise CharacteristicPointError(f"mean curvature is undefined at characteristic point "
                                       f"{fb.points[0].tolist()}")
    return float(mean_curvature(fb)[0])


def ch_nu(surface: SurfaceLike, zeta: Sequence[float], patch: int = 0) -> Tuple[np.ndarray, float]:
    """C_H nu_H in horizontal frame coordinates and its norm"""
    fb = _checked_batch(surface, zeta, patch)
    if fb.characteristic[0]:
        raise CharacteristicPointError(f"C_H nu_H is undefined at characteristic point "
                                       f"{fb.points[0].tolist()}")
    vec = fb.ch_nu[0].copy()
    return vec, float(np.linalg.norm(vec))


def div_hs(fb: FrameBatch, X: VectorField) -> np.ndarray:
    """Horizontal tangential divergence of the horizontal part of X"""
    h1 = fb.h1
    J = X.frame_jacobian(fb.points)[:, :h1, :h1]
    trace = np.einsum("nii->n", J)
    normal_part = np.einsum("ni,nij,nj->n", fb.nu_h, J, fb.nu_h)
    return trace - normal_part


def grad_hs(fb: FrameBatch, frame_gradient: np.ndarray) -> np.ndarray:
    """Horizontal tangential gradient from an ambient frame gradient"""
    return fb.horizontal_tangential(frame_gradient[:, :fb.h1])


# ---------------------------------------------------------------------------
# regions, excision and quadrature over surfaces
# ---------------------------------------------------------------------------

@dataclass
class BallRegion:
    """Open rho-ball B(center, radius)"""
    norm: HomogeneousNorm
    center: np.ndarray
    radius: float

    def __post_init__(self):
        self.center = np.asarray(self.center, dtype=float)
        if not self.radius > 0:
            raise DomainError(f"ball radius must be positive, got {self.radius}")

    def level(self, y: np.ndarray) -> np.ndarray:
        g = self.norm.group
        return self.norm(g.mul(g.inverse(self.center), y)) - self.radius

    def sphere_points(self, count: int = BALL_SAMPLES) -> np.ndarray:
        g = self.norm.group
        unit = self.norm.unit_sphere_samples(count)
        return g.mul(self.center, g.dilate(self.radius, unit))

    def param_bounds(self, patch: SurfacePatch) -> Box:
        z = patch.to_param(self.sphere_points())
        lo, hi = z.min(axis=0), z.max(axis=0)
        pad = BALL_PAD * (hi - lo) + 1e-12
        return lo - pad, hi + pad


Region = Union[None, BallRegion, Box]
LevelOnPatch = Callable[[SurfacePatch, np.ndarray], np.ndarray]


def _clip_boxes(boxes: List[Box], lo: np.ndarray, hi: np.ndarray) -> List[Box]:
    out = []
    for a, b in boxes:
        na, nb = np.maximum(a, lo), np.minimum(b, hi)
        if np.all(nb > na):
            out.append((na, nb))
    return out


def _patch_cells(patch: SurfacePatch, region: Region, restrict: Optional[List[Box]]) -> List[Box]:
    boxes = list(restrict) if restrict is not None else list(patch.domain.boxes)
    if isinstance(region, BallRegion):
        lo, hi = region.param_bounds(patch)
        cells: List[Box] = []
        for a, b in _clip_boxes(boxes, lo, hi):
            cells.extend(grid_cells(a, b, BALL_PRESPLIT) if restrict is None else [(a, b)])
        return cells
    if region is not None:
        lo, hi = (np.asarray(v, dtype=float) for v in region)
        return _clip_boxes(boxes, lo, hi)
    return boxes


def _patch_level(patch: SurfacePatch, region: Region,
                 levels: Sequence[LevelOnPatch]) -> Optional[Callable[[np.ndarray], np.ndarray]]:
    parts: List[Callable[[np.ndarray], np.ndarray]] = []
    if patch.domain.clip is not None:
        parts.append(patch.domain.clip)
    if isinstance(region, BallRegion):
        parts.append(lambda z: region.level(patch.points(z)))
    for extra in levels:
        parts.append(lambda z, extra=extra: extra(patch, z))
    if not parts:
        return None
    if len(parts) == 1:
        return parts[0]
    return lambda z: np.max(np.stack([np.asarray(f(z), dtype=float) for f in parts]), axis=0)


PointFunction = Callable[[FrameBatch], np.ndarray]


def surface_integral(surface: SurfaceLike, fn: PointFunction, spec: QuadratureSpec,
                     region: Region = None, measure: Measure = Measure.H,
                     restrict: Optional[Dict[int, List[Box]]] = None,
                     levels: Sequence[LevelOnPatch] = (), workers: Optional[int] = None) -> Estimate:
    """Integral of fn (per unit measure) over the surface, patch by patch"""
    s = as_surface(surface)
    total: Optional[Estimate] = None
    for index, patch in enumerate(s.patches):
        if restrict is not None and index not in restrict:
            continue
        cells = _patch_cells(patch, region, None if restrict is None else restrict[index])
        if not cells:
            continue
        level = _patch_level(patch, region, levels)

        def integrand(zeta: np.ndarray, patch=patch) -> np.ndarray:
            fb = FrameBatch(patch, zeta)
            vals = np.asarray(fn(fb), dtype=float)
            dens = fb.density(measure)
            return vals * (dens if vals.ndim == 1 else dens[:, None])

        part = integrate(integrand, cells, spec, level, workers)
        total = part if total is None else total + part
    return total if total is not None else zero_estimate()


def h_perimeter(surface: SurfaceLike, spec: QuadratureSpec, region: Region = None,
                restrict: Optional[Dict[int, List[Box]]] = None,
                workers: Optional[int] = None) -> Estimate:
    return surface_integral(surface, lambda fb: np.ones(len(fb)), spec, region, Measure.H,
                            restrict, workers=workers)


def riemannian_area(surface: SurfaceLike, spec: QuadratureSpec, region: Region = None,
                    workers: Optional[int] = None) -> Estimate:
    return surface_integral(surface, lambda fb: np.ones(len(fb)), spec, region, Measure.R,
                            workers=workers)


# ---------------------------------------------------------------------------
# characteristic locus
# ---------------------------------------------------------------------------

@dataclass
class PatchLocus:
    """Flagged cells of one parameter box"""
    box: Box
    shape: Tuple[int, ...]
    flagged: np.ndarray
    labels: np.ndarray
    clusters: int

    def _cell(self, index: Tuple[int, ...]) -> Box:
        a, b = self.box
        h = (b - a) / np.asarray(self.shape)
        lo = a + h * np.asarray(index)
        return lo, lo + h

    def cells(self, flagged: bool) -> List[Box]:
        return [self._cell(idx) for idx in zip(*np.nonzero(self.flagged == flagged))]

    def cluster_centers(self) -> List[np.ndarray]:
        out = []
        for label in range(1, self.clusters + 1):
            idx = np.argwhere(self.labels == label)
            centers = [0.5 * sum(self._cell(tuple(i))) for i in idx]
            out.append(np.mean(centers, axis=0))
        return out


@dataclass
class CharacteristicLocus:
    """Per-patch cell flags; a superset of the characteristic set at the grid resolution"""
    resolution: int
    patches: Dict[int, List[PatchLocus]]

    @property
    def empty(self) -> bool:
        return not any(np.any(p.flagged) for parts in self.patches.values() for p in parts)

    @property
    def cluster_count(self) -> int:
        return sum(p.clusters for parts in self.patches.values() for p in parts)

    def flagged_cells(self) -> Dict[int, List[Box]]:
        return {i: [c for p in parts for c in p.cells(True)] for i, parts in self.patches.items()}

    def kept_cells(self) -> Dict[int, List[Box]]:
        return {i: [c for p in parts for c in p.cells(False)] for i, parts in self.patches.items()}

    def flagged_count(self) -> int:
        return int(sum(np.sum(p.flagged) for parts in self.patches.values() for p in parts))

    def cluster_points(self, surface: SurfaceLike) -> List[np.ndarray]:
        s = as_surface(surface)
        out = []
        for i, parts in self.patches.items():
            for p in parts:
                for c in p.cluster_centers():
                    out.append(s.patches[i].points(c[None])[0])
        return out


def _locus_of_box(patch: SurfacePatch, box: Box, res: int) -> PatchLocus:
    a, b = box
    d = len(a)
    shape = (res,) * d
    axes = [np.linspace(a[j], b[j], 2 * res + 1) for j in range(d)]
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    fb = FrameBatch(patch, mesh.reshape(-1, d))
    p = fb.p_h.reshape(mesh.shape[:-1])
    half = (b - a) / (2 * res)

    slope = 0.0
    for j in range(d):
        diffs = np.abs(np.diff(p, axis=j)) / half[j]
        slope = max(slope, float(np.max(diffs, initial=0.0)))
    lipschitz = 2.0 * slope * np.sqrt(d)
    pad = lipschitz * float(np.linalg.norm(half)) / 2.0

    # minimum of p over the 3^d lattice points of every cell
    cell_min = p
    for j in range(d):
        lo_idx = [slice(None)] * d
        mid_idx = [slice(None)] * d
        hi_idx = [slice(None)] * d
        lo_idx[j] = slice(0, -1, 2)
        mid_idx[j] = slice(1, None, 2)
        hi_idx[j] = slice(2, None, 2)
        cell_min = np.minimum(np.minimum(cell_min[tuple(lo_idx)], cell_min[tuple(mid_idx)]),
                              cell_min[tuple(hi_idx)])
    flagged = cell_min - pad < CHAR_EPS
    labels, count = ndimage.label(flagged, structure=np.ones((3,) * d))
    return PatchLocus(box=(a, b), shape=shape, flagged=flagged, labels=labels, clusters=int(count))


def characteristic_locus(surface: SurfaceLike, resolution: int = LOCUS_RESOLUTION) -> CharacteristicLocus:
    """Grid cells where |P_H nu| may drop below the characteristic threshold"""
    s = as_surface(surface)
    out: Dict[int, List[PatchLocus]] = {}
    for index, patch in enumerate(s.patches):
        # keep the lattice size bounded in higher parameter dimensions
        res = max(4, int(round(resolution ** (2.0 / patch.dim)))) if patch.dim > 2 else resolution
        out[index] = [_locus_of_box(patch, box, res) for box in patch.domain.boxes]
    locus = CharacteristicLocus(resolution, out)
    logger.debug("Characteristic locus of %s: %d flagged cells in %d clusters",
                 s.name, locus.flagged_count(), locus.cluster_count)
    return locus


@dataclass
class ExcisionResult:
    """Integral away from the characteristic cells plus the excised H-mass"""
    estimate: Estimate
    excised_mass: float
    flagged_cells: int


def excised_integral(surface: SurfaceLike, fn: PointFunction, spec: QuadratureSpec,
                     region: Region = None, measure: Measure = Measure.H,
                     locus: Optional[CharacteristicLocus] = None,
                     levels: Sequence[LevelOnPatch] = (),
                     workers: Optional[int] = None) -> ExcisionResult:
    """surface_integral with characteristic cells removed; their mass in the same measure is returned"""
    locus = locus if locus is not None else characteristic_locus(surface)
    if locus.empty:
        est = surface_integral(surface, fn, spec, region, measure, levels=levels, workers=workers)
        return ExcisionResult(est, 0.0, 0)
    kept = surface_integral(surface, fn, spec, region, measure, restrict=locus.kept_cells(),
                            levels=levels, workers=workers)
    mass = surface_integral(surface, lambda fb: np.ones(len(fb)), spec, region, measure,
                            restrict=locus.flagged_cells(), levels=levels, workers=workers)
    return ExcisionResult(kept, float(mass.value), locus.flagged_count())


# ---------------------------------------------------------------------------
# boundary frames and boundary integrals
# ---------------------------------------------------------------------------

class BoundaryBatch:
    """Boundary frame data at points zeta(s) of a curve on one patch"""

    def __init__(self, patch: SurfacePatch, zeta: np.ndarray, dzeta: np.ndarray,
                 outward_sign: int = 1):
        if patch.dim != 2:
            raise CapabilityError("boundary frames are implemented for n = 3 only")
        self.patch = patch
        self.frame = FrameBatch(patch, zeta)
        T = patch.tangents(self.frame.zeta)
        dzeta = np.atleast_2d(np.asarray(dzeta, dtype=float))
        self.tau = np.einsum("nk,nki->ni", dzeta, T)
        outward = outward_sign * np.stack([dzeta[:, 1], -dzeta[:, 0]], axis=1)
        w = np.einsum("nk,nki->ni", outward, T)
        tau2 = np.sum(self.tau ** 2, axis=1)
        safe_tau2 = np.where(tau2 > 0, tau2, 1.0)
        eta = w - (np.sum(w * self.tau, axis=1) / safe_tau2)[:, None] * self.tau
        size = np.linalg.norm(eta, axis=1)
        self.eta = eta / np.where(size > 0, size, 1.0)[:, None]
        self.speed = np.sqrt(tau2)

    def __len__(self) -> int:
        return len(self.speed)

    @property
    def points(self) -> np.ndarray:
        return self.frame.points

    @cached_property
    def p_hs_eta(self) -> np.ndarray:
        """P_HS eta as a horizontal vector"""
        return self.frame.horizontal_tangential(self.eta[:, :self.frame.h1])

    @cached_property
    def p_hs_eta_norm(self) -> np.ndarray:
        return np.linalg.norm(self.p_hs_eta, axis=1)

    @cached_property
    def characteristic(self) -> np.ndarray:
        return (self.p_hs_eta_norm < CHAR_EPS) | self.frame.characteristic

    @cached_property
    def eta_hs(self) -> np.ndarray:
        """Unit horizontal tangential normal; zero on the characteristic part"""
        safe = np.where(self.characteristic, 1.0, self.p_hs_eta_norm)
        out = self.p_hs_eta / safe[:, None]
        out[self.characteristic] = 0.0
        return out

    @cached_property
    def sigma_h(self) -> np.ndarray:
        """sigma^{n-2}_H density per ds"""
        return self.frame.p_h * self.p_hs_eta_norm * self.speed

    def density(self, measure: Measure) -> np.ndarray:
        return self.sigma_h if measure is Measure.H else self.speed

    @cached_property
    def chi_layers(self) -> np.ndarray:
        """|chi_{H_i S}| for i = 2..k, shape (N, k-1); zero on the characteristic part"""
        norms = self.frame.layer_projection_norms(self.eta)
        safe = np.where(self.characteristic, 1.0, self.p_hs_eta_norm)
        out = norms[:, 1:] / safe[:, None]
        out[self.characteristic] = 0.0
        return out


@dataclass
class BoundaryFrameData:
    """Boundary frame at one point"""
    eta: np.ndarray
    eta_HS: Optional[np.ndarray]
    pHS_eta: float
    chi: Dict[int, float]


BoundaryFunction = Callable[[BoundaryBatch], np.ndarray]


def curve_batch(surface: SurfaceLike, curve: BoundaryCurve, s: np.ndarray) -> BoundaryBatch:
    patch = as_surface(surface).patches[curve.patch]
    return BoundaryBatch(patch, curve.zeta(s), curve.dzeta(s), curve.outward_sign)


def boundary_frame(surface: SurfaceLike, curve: BoundaryCurve, s: float) -> BoundaryFrameData:
    bb = curve_batch(surface, curve, np.array([float(s)]))
    char = bool(bb.characteristic[0])
    return BoundaryFrameData(
        eta=bb.eta[0].copy(),
        eta_HS=None if char else bb.eta_hs[0].copy(),
        pHS_eta=float(bb.p_hs_eta_norm[0]),
        chi={i + 2: float(v) for i, v in enumerate(bb.chi_layers[0])},
    )


def boundary_integral(surface: SurfaceLike, fn: BoundaryFunction, spec: QuadratureSpec,
                      curves: Optional[Sequence[BoundaryCurve]] = None,
                      measure: Measure = Measure.H,
                      level: Optional[Callable[[np.ndarray], np.ndarray]] = None,
                      workers: Optional[int] = None) -> Estimate:
    """Integral of fn against sigma^{n-2} along boundary curves, optionally clipped by an
    ambient level function (inside where negative)"""
    s = as_surface(surface)
    curves = s.boundary_curves() if curves is None else list(curves)
    total: Optional[Estimate] = None
    for curve in curves:
        if curve.t1 <= curve.t0:
            continue
        patch = s.patches[curve.patch]

        def integrand(t: np.ndarray, curve=curve, patch=patch) -> np.ndarray:
            u = t[:, 0]
            bb = BoundaryBatch(patch, curve.zeta(u), curve.dzeta(u), curve.outward_sign)
            vals = np.asarray(fn(bb), dtype=float)
            dens = bb.density(measure)
            return vals * (dens if vals.ndim == 1 else dens[:, None])

        clip = None
        if level is not None:
            clip = (lambda t, curve=curve, patch=patch:
                    level(patch.points(curve.zeta(t[:, 0]))))
        part = integrate(integrand, [(np.array([curve.t0]), np.array([curve.t1]))], spec, clip,
                         workers)
        total = part if total is None else total + part
    return total if total is not None else zero_estimate()


def boundary_measure(surface: SurfaceLike, spec: QuadratureSpec,
                     curves: Optional[Sequence[BoundaryCurve]] = None,
                     measure: Measure = Measure.H,
                     level: Optional[Callable[[np.ndarray], np.ndarray]] = None,
                     workers: Optional[int] = None) -> Estimate:
    return boundary_integral(surface, lambda bb: np.ones(len(bb)), spec, curves, measure, level,
                             workers)


def polyline_integral(patch: SurfacePatch, segments: np.ndarray, fn: BoundaryFunction,
                      measure: Measure = Measure.H, order: int = 3) -> float:
    """Gauss rule on every straight parameter segment (K, 2, d); orientation is irrelevant"""
    segments = np.asarray(segments, dtype=float)
    if len(segments) == 0:
        return 0.0
    x, w = gauss_rule(order)
    a, b = segments[:, 0], segments[:, 1]
    t = 0.5 * (x + 1.0)
    zeta = (a[:, None, :] + t[None, :, None] * (b - a)[:, None, :]).reshape(-1, a.shape[1])
    dzeta = np.repeat(b - a, len(x), axis=0)
    bb = BoundaryBatch(patch, zeta, dzeta)
    vals = np.asarray(fn(bb), dtype=float) * bb.density(measure)
    weights = np.tile(0.5 * w, len(segments))
    return math.fsum(weights * vals)
