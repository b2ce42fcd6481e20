#!/usr/bin/env python3
"""
Surface Sampling - Carnot Lab
Deterministic point clouds on surfaces for suprema, diameters and radii.
"""

import logging
from typing import Callable, Dict, Optional, Sequence, Tuple
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from carnot_lab.homogeneous_metrics import HomogeneousNorm
from carnot_lab.hypersurface import (BallRegion, CharacteristicLocus, FrameBatch, LevelOnPatch,
                                     Measure, PointFunction, Region, SurfaceLike, as_surface,
                                     characteristic_locus, excised_integral, mean_curvature)
from carnot_lab.quadrature import Box, Estimate, QuadratureSpec

logger = logging.getLogger(__name__)

SAMPLE_BUDGET = 2048
DIAMETER_BUDGET = 768
RADIUS_MARGIN = 1.02
CENTER_STEP = 1e-3
BOUNDARY_SAMPLES = 513


def _grid(a: np.ndarray, b: np.ndarray, budget: int) -> np.ndarray:
    d = len(a)
    per_axis = max(3, int(round(budget ** (1.0 / d))))
    axes = [np.linspace(a[j], b[j], per_axis) for j in range(d)]
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)


def _in_cells(zeta: np.ndarray, cells: Sequence[Box]) -> np.ndarray:
    hit = np.zeros(len(zeta), dtype=bool)
    for a, b in cells:
        hit |= np.all((zeta >= a) & (zeta <= b), axis=1)
    return hit


def _patch_samples(patch, boxes: Sequence[Box], budget: int,
                    flagged: Optional[Sequence[Box]]) -> np.ndarray:
    if not boxes:
        return np.zeros((0, patch.dim))
    zeta = np.vstack([_grid(a, b, max(9, budget // len(boxes))) for a, b in boxes])
    zeta = zeta[patch.domain.contains(zeta)]
    if flagged:
        zeta = zeta[~_in_cells(zeta, flagged)]
    return zeta


def sample_surface(surface: SurfaceLike, budget: int = SAMPLE_BUDGET,
                   locus: Optional[CharacteristicLocus] = None) -> Dict[int, FrameBatch]:
    """Grid samples of every patch domain; cells flagged in locus are left out"""
    s = as_surface(surface)
    flagged = locus.flagged_cells() if locus is not None else {}
    out: Dict[int, FrameBatch] = {}
    per_patch = max(16, budget // max(1, len(s.patches)))
    for index, patch in enumerate(s.patches):
        zeta = _patch_samples(patch, patch.domain.boxes, per_patch, flagged.get(index))
        if len(zeta):
            out[index] = FrameBatch(patch, zeta)
    return out


def sample_ball(surface: SurfaceLike, ball: BallRegion, budget: int = SAMPLE_BUDGET,
                locus: Optional[CharacteristicLocus] = None) -> Dict[int, FrameBatch]:
    """Grid samples of S inside an open rho-ball, gridded over the ball's parameter box"""
    s = as_surface(surface)
    flagged = locus.flagged_cells() if locus is not None else {}
    out: Dict[int, FrameBatch] = {}
    per_patch = max(16, budget // max(1, len(s.patches)))
    for index, patch in enumerate(s.patches):
        lo, hi = ball.param_bounds(patch)
        boxes = [(np.maximum(a, lo), np.minimum(b, hi)) for a, b in patch.domain.boxes]
        boxes = [(a, b) for a, b in boxes if np.all(b > a)]
        zeta = _patch_samples(patch, boxes, per_patch, flagged.get(index))
        if len(zeta):
            zeta = zeta[ball.level(patch.points(zeta)) < 0]
        if len(zeta):
            out[index] = FrameBatch(patch, zeta)
    return out


def boundary_sup(surface: SurfaceLike, fn: Callable[[np.ndarray], np.ndarray],
                 samples: int = BOUNDARY_SAMPLES) -> float:
    """max |fn| over points of the traced boundary curves"""
    s = as_surface(surface)
    if s.closed:
        return 0.0
    best = 0.0
    u = np.linspace(0.0, 1.0, samples)
    for curve in s.boundary_curves():
        pts = s.patches[curve.patch].points(curve.zeta(curve.t0 + u * (curve.t1 - curve.t0)))
        best = max(best, float(np.max(np.abs(fn(pts)))))
    return best


def restrict_to_ball(samples: Dict[int, FrameBatch], norm: HomogeneousNorm, center: np.ndarray,
                     radius: float) -> Dict[int, FrameBatch]:
    out = {}
    for index, fb in samples.items():
        keep = norm.distance(center, fb.points) < radius
        if np.any(keep):
            out[index] = FrameBatch(fb.patch, fb.zeta[keep])
    return out


def sup_abs_curvature(samples: Dict[int, FrameBatch]) -> float:
    """max |H| over non-characteristic samples"""
    best = 0.0
    for fb in samples.values():
        values = np.abs(mean_curvature(fb))[~fb.characteristic]
        if len(values):
            best = max(best, float(np.max(values)))
    return best


def sup_varpi(samples: Dict[int, FrameBatch], layer: Optional[int] = None) -> float:
    best = 0.0
    for fb in samples.values():
        values = fb.varpi_norm if layer is None else fb.varpi_layer_norm(layer)
        values = values[~fb.characteristic]
        if len(values):
            best = max(best, float(np.max(values)))
    return best


def has_characteristic(samples: Dict[int, FrameBatch]) -> bool:
    return any(bool(np.any(fb.characteristic)) for fb in samples.values())


def surface_points(surface: SurfaceLike, budget: int = DIAMETER_BUDGET) -> np.ndarray:
    batches = sample_surface(surface, budget)
    if not batches:
        return np.zeros((0, as_surface(surface).group.n))
    return np.vstack([fb.points for fb in batches.values()])


def rho_diameter(points: np.ndarray, norm: HomogeneousNorm) -> float:
    """max rho(y^{-1} z) over pairs of points"""
    if len(points) < 2:
        return 0.0
    best = 0.0
    for start in range(0, len(points), 128):
        block = points[start:start + 128]
        d = norm.distance(block[:, None, :], points[None, :, :])
        best = max(best, float(np.max(d)))
    return best


def circumradius(surface: SurfaceLike, norm: HomogeneousNorm,
                 center: Optional[Sequence[float]] = None) -> Dict[str, object]:
    """Radius of a rho-ball around center containing the sampled surface, with a safety margin

    Without a center, the least eccentric of a subsample of the points and the centre of
    their coordinate bounding box seeds a Nelder-Mead search over the whole group; the
    centre need not lie on the surface.
    """
    pts = surface_points(surface)
    if center is None:
        candidates = np.vstack([pts[:: max(1, len(pts) // 64)],
                                0.5 * (pts.min(axis=0) + pts.max(axis=0))])

        def eccentricity(c: np.ndarray) -> float:
            return float(np.max(norm.distance(c, pts)))

        ecc = [eccentricity(c) for c in candidates]
        start = candidates[int(np.argmin(ecc))]
        spread = 0.25 * (pts.max(axis=0) - pts.min(axis=0)) + CENTER_STEP
        simplex = np.vstack([start, start + np.diag(spread)])
        found = optimize.minimize(eccentricity, start, method="Nelder-Mead",
                                  options={"initial_simplex": simplex, "xatol": 1e-7,
                                           "fatol": 1e-10, "maxiter": 4000})
        c = found.x if found.fun < min(ecc) else start
    else:
        c = np.asarray(center, dtype=float)
    radius = RADIUS_MARGIN * float(np.max(norm.distance(c, pts)))
    return {"center": c, "radius": radius}


@dataclass
class Excision:
    """Characteristic cells removed from an integral and the error bar they add"""
    cells: int
    mass: float
    bound: float

    @property
    def error(self) -> float:
        return self.mass * self.bound

    def note(self, what: str) -> str:
        return (f"{what}: excised {self.cells} characteristic cells of mass {self.mass:.3e} "
                f"(integrand bound {self.bound:.3e})")


def excised_estimate(surface: SurfaceLike, fn: PointFunction, spec: QuadratureSpec,
                     region: Region = None, measure: Measure = Measure.H,
                     levels: Sequence[LevelOnPatch] = (), locus: Optional[CharacteristicLocus] = None,
                     workers: Optional[int] = None) -> Tuple[Estimate, Optional[Excision]]:
    """Integral away from the characteristic locus; the excised mass times the largest sampled
    |fn| on the kept part is added to the error bar"""
    locus = locus if locus is not None else characteristic_locus(surface)
    result = excised_integral(surface, fn, spec, region, measure, locus, levels, workers)
    if result.flagged_cells == 0:
        return result.estimate, None
    bound = 0.0
    for fb in sample_surface(surface, locus=locus).values():
        values = np.abs(np.asarray(fn(fb), dtype=float))
        if values.size:
            bound = max(bound, float(np.max(values)))
    excision = Excision(result.flagged_cells, result.excised_mass, bound)
    est = result.estimate
    widened = Estimate(est.value, est.error + excision.error, est.converged, est.cells,
                       est.warnings + [excision.note("integral")])
    logger.info("Excised %d characteristic cells (mass %.3e)", excision.cells, excision.mass)
    return widened, excision
