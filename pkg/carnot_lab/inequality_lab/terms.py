#!/usr/bin/env python3
"""
Curvature and Boundary Terms - Carnot Lab
The integrals shared by the linear, monotonicity, isoperimetric and Sobolev checks.

    A_inf = int |H| (1 + sum_{i>=2} i c_i r^{i-1} |varpi_i|) sigma_H
    B_inf = int_{dS} (1 + sum_{i>=2} i c_i r^{i-1} |chi_i|) sigma^{n-2}_H
    B_Z   = int_{dS} rho_x^{-1} |<Z_x, eta / |P_HS eta|>| sigma^{n-2}_H

r is either rho_x(y) (distance to a center) or a fixed radius such as diam(S) / 2.
"""

import logging
from typing import Callable, Optional, Sequence

import numpy as np

from carnot_lab.homogeneous_metrics import HomogeneousNorm, LayerConstants, layer_constants
from carnot_lab.hypersurface import (BoundaryBatch, FrameBatch, Measure, Region, SurfaceLike,
                                     as_surface, boundary_integral, mean_curvature)
from carnot_lab.quadrature import Estimate, QuadratureSpec, zero_estimate
from carnot_lab.inequality_lab.dilation import DilationGenerator
from carnot_lab.inequality_lab.sampling import excised_estimate

logger = logging.getLogger(__name__)

AmbientLevel = Optional[Callable[[np.ndarray], np.ndarray]]


class LayerWeight:
    """1 + sum_{i>=2} i c_i r^{i-1} q_i for per-layer quantities q_i"""

    def __init__(self, norm: HomogeneousNorm, center: Optional[Sequence[float]] = None,
                 radius: Optional[float] = None, constants: Optional[LayerConstants] = None):
        if center is None and radius is None:
            raise ValueError("a layer weight needs a center or a fixed radius")
        self.norm = norm
        self.group = norm.group
        self.center = None if center is None else np.asarray(center, dtype=float)
        self.radius = radius
        self.constants = constants if constants is not None else layer_constants(norm)

    def distances(self, points: np.ndarray) -> np.ndarray:
        if self.radius is not None:
            return np.full(len(points), float(self.radius))
        return self.norm.distance(self.center, points)

    def sum_terms(self, points: np.ndarray, per_layer: Callable[[int], np.ndarray]) -> np.ndarray:
        r = self.distances(points)
        total = np.zeros(len(points))
        for i in range(2, self.group.k + 1):
            total += i * self.constants.of(i) * r ** (i - 1) * per_layer(i)
        return total

    def interior(self, fb: FrameBatch) -> np.ndarray:
        return 1.0 + self.sum_terms(fb.points, fb.varpi_layer_norm)

    def boundary_density(self, bb: BoundaryBatch) -> np.ndarray:
        """(1 + sum i c_i r^{i-1} |chi_i|) |P_HS eta| |P_H nu|, finite on the characteristic part"""
        norms = bb.frame.layer_projection_norms(bb.eta)
        extra = self.sum_terms(bb.points, lambda i: norms[:, i - 1])
        return bb.frame.p_h * (norms[:, 0] + extra)


def a_infinity(surface: SurfaceLike, weight: LayerWeight, spec: QuadratureSpec,
               region: Region = None, workers: Optional[int] = None) -> Estimate:
    est, _ = excised_estimate(surface, lambda fb: np.abs(mean_curvature(fb)) * weight.interior(fb),
                              spec, region, workers=workers)
    return est


def b_infinity(surface: SurfaceLike, weight: LayerWeight, spec: QuadratureSpec,
               level: AmbientLevel = None, workers: Optional[int] = None) -> Estimate:
    s = as_surface(surface)
    if s.closed:
        return zero_estimate()
    return boundary_integral(s, weight.boundary_density, spec, measure=Measure.R, level=level,
                             workers=workers)


def b_dilation(surface: SurfaceLike, norm: HomogeneousNorm, center: Sequence[float],
               spec: QuadratureSpec, level: AmbientLevel = None,
               workers: Optional[int] = None) -> Estimate:
    s = as_surface(surface)
    if s.closed:
        return zero_estimate()
    Z = DilationGenerator(s.group, center)

    def density(bb: BoundaryBatch) -> np.ndarray:
        r = norm.distance(Z.center, bb.points)
        safe = np.where(r > 0, r, 1.0)
        out = np.abs(np.sum(Z(bb.points) * bb.eta, axis=1)) * bb.frame.p_h / safe
        return np.where(r > 0, out, 0.0)

    return boundary_integral(s, density, spec, measure=Measure.R, level=level, workers=workers)


def curvature_terms(surface: SurfaceLike, spec: QuadratureSpec, region: Region = None,
                    workers: Optional[int] = None) -> dict:
    """int |H| sigma_H and int |C_H nu_H| sigma_H"""
    abs_h, _ = excised_estimate(surface, lambda fb: np.abs(mean_curvature(fb)), spec, region,
                                workers=workers)
    skew, _ = excised_estimate(surface, lambda fb: np.linalg.norm(fb.ch_nu, axis=1), spec, region,
                               workers=workers)
    return {"abs_curvature": abs_h, "skew": skew}
