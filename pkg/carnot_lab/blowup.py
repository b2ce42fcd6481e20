#!/usr/bin/env python3
"""
Blow-up Densities - Carnot Lab
Limit densities of the H-perimeter at surface points and empirical convergence scans.

At a non-characteristic point the blown-up surface is the vertical hyperplane orthogonal to
nu_H; at a characteristic point of a vertical graph it is the graph of the anisotropic
degree-i part of the Taylor polynomial, i the layer of the graph direction.
"""

import logging
from typing import Callable, Dict, List, Optional, Any, Sequence, Tuple
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from carnot_lab.errors import CapabilityError, DomainError
from carnot_lab.homogeneous_metrics import HomogeneousNorm, metric_factor_bounds
from carnot_lab.hypersurface import (BALL_PAD, BallRegion, FrameBatch, GraphSurface,
                                     ParameterDomain, SurfaceLike, as_surface,
                                     h_perimeter, locate)
from carnot_lab.parallel import ordered_map
from carnot_lab.polynomials import Polynomial, fit_taylor
from carnot_lab.quadrature import Estimate, QuadratureSpec
from carnot_lab.stratified_algebra import CarnotGroup

logger = logging.getLogger(__name__)

EXACT_TOL = 1e-9
FITTED_TOL = 1e-6
TAYLOR_STEP = 1e-3
REACH_SAMPLES = 513


class BlowupKind(Enum):
    CASE_A = "case-a"
    CASE_B = "case-b"
    DEGENERATE = "degenerate"


@dataclass
class TaylorData:
    """Height of x^{-1} S as a graph in direction alpha, expanded at the origin"""
    alpha: int
    order: int
    weights: List[int]
    polynomial: Polynomial
    exact: bool
    tolerance: float
    height: Callable[[np.ndarray], np.ndarray]

    @property
    def low_order(self) -> Dict[Tuple[int, ...], float]:
        """Taylor coefficients of weighted degree below the graph order"""
        degrees = self.polynomial.weighted_degrees(self.weights)
        return {k: c for k, c in self.polynomial.terms.items() if degrees[k] < self.order}

    @property
    def admissible(self) -> bool:
        return all(abs(c) <= self.tolerance for c in self.low_order.values())

    def limit_height(self) -> Polynomial:
        return self.polynomial.part(self.weights, lambda d: d == self.order)

    def rescaled(self, R: float, w: np.ndarray) -> np.ndarray:
        """psi(delta_R w) / R^i, which tends to the limit height iff the point is admissible"""
        w = np.asarray(w, dtype=float)
        scale = np.power(float(R), np.asarray(self.weights, dtype=float))
        return self.height(w * scale) / R ** self.order

    def as_dict(self) -> Dict[str, Any]:
        return {"alpha": self.alpha + 1, "order": self.order, "exact": self.exact,
                "tolerance": self.tolerance,
                "coefficients": self.polynomial.as_config(),
                "low_order": {",".join(map(str, k)): v for k, v in self.low_order.items()}}


@dataclass
class ScanPoint:
    radius: float
    perimeter: Estimate
    ratio: float
    error: float


@dataclass
class BlowupResult:
    """Blow-up density at a surface point, in coordinates centred at that point"""
    kind: BlowupKind
    kappa: Optional[float]
    limit_surface: Optional[GraphSurface]
    point: np.ndarray
    error: float = 0.0
    taylor: Optional[TaylorData] = None
    scan: List[ScanPoint] = field(default_factory=list)
    details: Dict[str, Any] = field(default_factory=dict)

    def as_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.value,
            "kappa": self.kappa,
            "error": self.error,
            "point": self.point.tolist(),
            "limit_surface": None if self.limit_surface is None else self.limit_surface.describe(),
            "taylor": None if self.taylor is None else self.taylor.as_dict(),
            "scan": [{"R": p.radius, "ratio": p.ratio, "error": p.error} for p in self.scan],
            "details": self.details,
        }


def _unit_ball_domain(norm: HomogeneousNorm, alpha: int) -> ParameterDomain:
    free = [j for j in range(norm.group.n) if j != alpha]
    z = norm.unit_sphere_samples()[:, free]
    lo, hi = z.min(axis=0), z.max(axis=0)
    pad = BALL_PAD * (hi - lo) + 1e-12
    return ParameterDomain.box(lo - pad, hi + pad, name="unit-ball-shadow")


def vertical_hyperplane(norm: HomogeneousNorm, nu_h: np.ndarray) -> GraphSurface:
    """{z : <z_H, nu_H> = 0} as a graph over the unit-ball shadow, oriented along nu_H"""
    g = norm.group
    nu_h = np.asarray(nu_h, dtype=float)
    alpha = int(np.argmax(np.abs(nu_h)))
    free = [j for j in range(g.n) if j != alpha]
    gradient = [-nu_h[j] / nu_h[alpha] if j < g.h1 else 0.0 for j in free]
    height = Polynomial.linear(gradient)
    orientation = 1 if nu_h[alpha] > 0 else -1
    return GraphSurface(g, alpha, _unit_ball_domain(norm, alpha), height, orientation,
                        "vertical-hyperplane")


# ---------------------------------------------------------------------------
# translation of a vertical graph to the origin
# ---------------------------------------------------------------------------

def _bracket(C: np.ndarray, a: Sequence[Polynomial], b: Sequence[Polynomial]) -> List[Polynomial]:
    nvars = a[0].nvars
    out = []
    for r in range(C.shape[0]):
        total = Polynomial.zero(nvars)
        for i, j in zip(*np.nonzero(C[r])):
            if a[i].terms and b[j].terms:
                total = total + (a[i] * b[j]).scaled(float(C[r, i, j]))
        out.append(total)
    return out


def _combine(*parts: Tuple[float, Sequence[Polynomial]]) -> List[Polynomial]:
    n = len(parts[0][1])
    out = []
    for r in range(n):
        total = Polynomial.zero(parts[0][1][r].nvars)
        for factor, coords in parts:
            total = total + coords[r].scaled(factor)
        out.append(total)
    return out


def polynomial_product(group: CarnotGroup, a: Sequence[Polynomial],
                       b: Sequence[Polynomial]) -> List[Polynomial]:
    """Group law on coordinates that are polynomials in a common set of variables"""
    C = group.C
    ab = _bracket(C, a, b)
    terms = [(1.0, a), (1.0, b), (0.5, ab)]
    if group.k >= 3:
        terms += [(1.0 / 12.0, _bracket(C, a, ab)), (-1.0 / 12.0, _bracket(C, b, ab))]
    if group.k >= 4:
        terms.append((-1.0 / 24.0, _bracket(C, b, _bracket(C, a, ab))))
    return _combine(*terms)


def taylor_data(patch: GraphSurface, x: np.ndarray) -> TaylorData:
    """Taylor expansion at 0 of the height of x^{-1} * patch"""
    g = patch.group
    if not isinstance(patch, GraphSurface) or not patch.is_vertical_graph:
        raise CapabilityError("Taylor data needs a graph in a vertical direction")
    alpha = patch.alpha
    order = int(g.ord[alpha])
    x = np.asarray(x, dtype=float)
    at_identity = bool(np.all(x == 0.0))
    if order != g.k and not at_identity:
        raise CapabilityError(f"Taylor data away from the identity needs the graph direction in the "
                              f"top layer; direction {alpha + 1} lies in layer {order} of {g.k}")
    d = g.n - 1
    free = patch._free
    weights = [int(g.ord[j]) for j in free]

    # y = x * z with z = (w, 0 in slot alpha); z_alpha only enters y_alpha, linearly
    zero = Polynomial.zero(d)
    xs = [Polynomial({tuple([0] * d): float(v)}, d) for v in x]
    zs: List[Polynomial] = []
    for j in range(g.n):
        if j == alpha:
            zs.append(zero)
        else:
            e = [0.0] * d
            e[free.index(j)] = 1.0
            zs.append(Polynomial.linear(e))
    y = polynomial_product(g, xs, zs)
    inner = [y[j] for j in free]
    offset = y[alpha]

    if isinstance(patch.height, Polynomial):
        psi_hat = patch.height.compose(inner) + offset.scaled(-1.0)
        return TaylorData(alpha, order, weights, psi_hat, True, EXACT_TOL, psi_hat)

    def height(w: np.ndarray) -> np.ndarray:
        w = np.atleast_2d(np.asarray(w, dtype=float))
        y_free = np.stack([q(w) for q in inner], axis=-1)
        return patch.height(y_free) - offset(w)

    poly = fit_taylor(height, d, order + 1, TAYLOR_STEP)
    return TaylorData(alpha, order, weights, poly, False, FITTED_TOL, height)


# ---------------------------------------------------------------------------
# densities and scans
# ---------------------------------------------------------------------------

def blowup_density(surface: SurfaceLike, x: Sequence[float], norm: HomogeneousNorm,
                   spec: Optional[QuadratureSpec] = None,
                   workers: Optional[int] = None) -> BlowupResult:
    """kappa = sigma_H of the blown-up surface inside the unit ball"""
    spec = spec or QuadratureSpec()
    s = as_surface(surface)
    x = np.asarray(x, dtype=float)
    index, zeta = locate(s, x)
    patch = s.patches[index]
    fb = FrameBatch(patch, zeta[None])
    unit = BallRegion(norm, np.zeros(norm.group.n), 1.0)

    if not fb.characteristic[0]:
        limit = vertical_hyperplane(norm, fb.nu_h[0])
        est = h_perimeter(limit, spec, unit, workers=workers)
        bounds = metric_factor_bounds(norm)
        logger.debug("Case a blow-up at %s: kappa=%.12g", x.tolist(), est.value)
        return BlowupResult(BlowupKind.CASE_A, float(est.value), limit, x, float(est.error),
                            details={"nu_H": fb.nu_h[0].tolist(), "k1": bounds.k1,
                                     "k2": bounds.k2, "patch": index})

    if not isinstance(patch, GraphSurface):
        raise CapabilityError(f"patch '{patch.name}' is not a graph; no Taylor data at {x.tolist()}")
    taylor = taylor_data(patch, x)
    if not taylor.admissible:
        logger.debug("Degenerate blow-up at %s: low-order terms %s", x.tolist(), taylor.low_order)
        return BlowupResult(BlowupKind.DEGENERATE, None, None, x, taylor=taylor,
                            details={"patch": index})

    limit = GraphSurface(norm.group, taylor.alpha, _unit_ball_domain(norm, taylor.alpha),
                         taylor.limit_height(), patch.orientation, "limit-graph")
    est = h_perimeter(limit, spec, unit, workers=workers)
    logger.debug("Case b blow-up at %s: kappa=%.12g", x.tolist(), est.value)
    return BlowupResult(BlowupKind.CASE_B, float(est.value), limit, x, float(est.error),
                        taylor=taylor, details={"patch": index})


def reach(surface: SurfaceLike, x: Sequence[float], norm: HomogeneousNorm) -> float:
    """rho-distance from x to the boundary of the surface (inf when closed)"""
    s = as_surface(surface)
    x = np.asarray(x, dtype=float)
    if s.closed:
        return float("inf")
    if not s.boundary_traced:
        # untraced boundaries: the patch domain faces stand in for the boundary
        best = float("inf")
        for patch in s.patches:
            for a, b in patch.domain.boxes:
                best = min(best, _face_distance(patch, a, b, x, norm))
        return best
    best = float("inf")
    u = np.linspace(0.0, 1.0, REACH_SAMPLES)
    for curve in s.boundary_curves():
        t = curve.t0 + u * (curve.t1 - curve.t0)
        pts = s.patches[curve.patch].points(curve.zeta(t))
        best = min(best, float(np.min(norm.distance(x, pts))))
    return best


def _face_distance(patch, a: np.ndarray, b: np.ndarray, x: np.ndarray,
                   norm: HomogeneousNorm, per_axis: int = 9) -> float:
    d = len(a)
    axes = [np.linspace(a[j], b[j], per_axis) for j in range(d)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
    on_face = np.any((grid == a) | (grid == b), axis=1)
    return float(np.min(norm.distance(x, patch.points(grid[on_face]))))


def blowup_scan(surface: SurfaceLike, x: Sequence[float], norm: HomogeneousNorm,
                radii: Sequence[float], spec: Optional[QuadratureSpec] = None,
                workers: Optional[int] = None) -> List[ScanPoint]:
    """sigma_H(S cap B(x, R)) / R^{Q-1} for every radius"""
    spec = spec or QuadratureSpec()
    s = as_surface(surface)
    x = np.asarray(x, dtype=float)
    radii = [float(r) for r in radii]
    if any(r <= 0 for r in radii):
        raise DomainError("scan radii must be positive")
    locate(s, x)
    limit = reach(s, x, norm)
    too_far = [r for r in radii if r >= limit]
    if too_far:
        raise DomainError(f"radii {too_far} reach the boundary of '{s.name}' "
                          f"(distance {limit:.6g})")
    Q1 = s.group.Q - 1

    def one(R: float) -> ScanPoint:
        est = h_perimeter(s, spec, BallRegion(norm, x, R))
        return ScanPoint(R, est, float(est.value) / R ** Q1, float(est.error) / R ** Q1)

    points = ordered_map(one, radii, workers)
    logger.debug("Blow-up scan at %s: %s", x.tolist(), [round(p.ratio, 9) for p in points])
    return points


def scanned_density(surface: SurfaceLike, x: Sequence[float], norm: HomogeneousNorm,
                    radii: Sequence[float], spec: Optional[QuadratureSpec] = None,
                    workers: Optional[int] = None) -> BlowupResult:
    """blowup_density with the scan attached"""
    result = blowup_density(surface, x, norm, spec, workers)
    result.scan = blowup_scan(surface, x, norm, radii, spec, workers)
    return result
