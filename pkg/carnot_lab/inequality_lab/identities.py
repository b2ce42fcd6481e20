#!/usr/bin/env python3
"""
Integral Identities - Carnot Lab
Coarea formula, horizontal divergence theorem, Minkowski formula and first variation of
the H-perimeter, each checked by quadrature of both sides.

Divergence theorem, in the sign convention of horizontal_mean_curvature:

    int_U {div_HS X + <C_H nu_H, X>} sigma_H - int_U H <X, nu_H> sigma_H
        = int_{dU} <X, eta_HS> sigma^{n-2}_H
"""

import math
import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from carnot_lab.errors import CapabilityError, DomainError
from carnot_lab.fields import LeftInvariantField, PositionField, TestFunction, VectorField
from carnot_lab.contours import grid_axes, level_segments, sample_grid
from carnot_lab.hypersurface import (BoundaryBatch, FrameBatch, Measure, SurfaceLike, as_surface,
                                     boundary_integral, div_hs, grad_hs, h_perimeter,
                                     mean_curvature, polyline_integral, right_translate_surface,
                                     SurfacePatch, surface_integral)
from carnot_lab.parallel import ordered_map
from carnot_lab.quadrature import Estimate, QuadratureSpec, composite_gauss, zero_estimate
from carnot_lab.inequality_lab.reports import CheckResult, InequalityReport, Table, identity
from carnot_lab.inequality_lab.sampling import excised_estimate

logger = logging.getLogger(__name__)

LEVEL_PANELS = 48
VARIATION_STEP = 1e-3


# ---------------------------------------------------------------------------
# coarea
# ---------------------------------------------------------------------------

class LevelSetMeasure:
    """s -> sigma^{n-2}_H(phi^{-1}(s)) by marching squares on every patch"""

    def __init__(self, surface: SurfaceLike, phi: TestFunction, grid: Optional[int] = None):
        self.surface = as_surface(surface)
        self.phi = phi
        self._grids = []
        for patch in self.surface.patches:
            if patch.dim != 2:
                raise CapabilityError("level-set extraction needs two parameter dimensions (n = 3)")
            lo, hi = patch.domain.bounds()
            xs, ys = grid_axes(lo, hi) if grid is None else grid_axes(lo, hi, grid)
            values = sample_grid(lambda z, patch=patch: phi(patch.points(z)), xs, ys)
            gx, gy = np.meshgrid(xs, ys, indexing="ij")
            inside = patch.domain.contains(np.stack([gx.ravel(), gy.ravel()], axis=1))
            self._grids.append((patch, xs, ys, values, inside.reshape(values.shape)))

    def value_range(self) -> Tuple[float, float]:
        lo, hi = np.inf, -np.inf
        for _, _, _, values, inside in self._grids:
            if np.any(inside):
                lo = min(lo, float(np.min(values[inside])))
                hi = max(hi, float(np.max(values[inside])))
        return lo, hi

    def segments(self, s: float) -> List[Tuple[SurfacePatch, np.ndarray]]:
        """Parameter segments of phi^{-1}(s) inside every patch domain"""
        out = []
        for patch, xs, ys, values, _ in self._grids:
            segs = level_segments(values, xs, ys, s,
                                  value=lambda z, patch=patch: self.phi(patch.points(z)))
            if len(segs) == 0:
                continue
            mid = 0.5 * (segs[:, 0] + segs[:, 1])
            segs = segs[patch.domain.contains(mid)]
            if len(segs):
                out.append((patch, segs))
        return out

    def __call__(self, s: float) -> float:
        total = [polyline_integral(patch, segs, lambda bb: np.ones(len(bb)), Measure.H)
                 for patch, segs in self.segments(s)]
        return math.fsum(total)


def coarea_check(surface: SurfaceLike, phi: TestFunction, spec: QuadratureSpec,
                 panels: int = LEVEL_PANELS, rel_tol: float = 1e-3,
                 workers: Optional[int] = None) -> CheckResult:
    """int_S |grad_HS phi| sigma_H against int sigma^{n-2}_H(phi^{-1}(s)) ds"""
    s = as_surface(surface)
    lhs = surface_integral(
        s, lambda fb: np.linalg.norm(grad_hs(fb, phi.frame_gradient(fb.points)), axis=1),
        spec, workers=workers)

    levels = LevelSetMeasure(s, phi)
    a, b = levels.value_range()
    table = Table(["s", "level_measure"])
    if not b > a:
        rhs = Estimate(0.0, 0.0)
    else:
        def slice_measure(values: np.ndarray) -> np.ndarray:
            return np.array(ordered_map(levels, [float(v) for v in values], workers))

        fine = float(composite_gauss(slice_measure, a, b, panels)[0])
        coarse = float(composite_gauss(slice_measure, a, b, max(1, panels // 2))[0])
        rhs = Estimate(fine, abs(fine - coarse))
        for value in np.linspace(a, b, 33):
            table.add(s=float(value), level_measure=levels(float(value)))

    report = identity("coarea", "coarea-formula", lhs, rhs, rel_tol=rel_tol,
                      terms={"s_min": a if b > a else 0.0, "s_max": b if b > a else 0.0},
                      provenance={"surface": s.name, "phi": phi.name, "panels": panels})
    return CheckResult("coarea", [report], {"levels": table})


# ---------------------------------------------------------------------------
# divergence theorem and Minkowski formula
# ---------------------------------------------------------------------------

def _horizontal(X: VectorField, fb_points: np.ndarray, h1: int) -> np.ndarray:
    return X(fb_points)[:, :h1]


def divergence_terms(surface: SurfaceLike, X: VectorField, spec: QuadratureSpec,
                     workers: Optional[int] = None) -> Dict[str, Estimate]:
    """Interior and boundary sides of the divergence theorem for the horizontal part of X"""
    s = as_surface(surface)
    h1 = s.group.h1

    def divergence(fb: FrameBatch) -> np.ndarray:
        return div_hs(fb, X)

    def skew(fb: FrameBatch) -> np.ndarray:
        return np.sum(fb.ch_nu * _horizontal(X, fb.points, h1), axis=1)

    def curvature(fb: FrameBatch) -> np.ndarray:
        return mean_curvature(fb) * np.sum(_horizontal(X, fb.points, h1) * fb.nu_h, axis=1)

    out: Dict[str, Estimate] = {}
    for name, fn in (("divergence", divergence), ("skew", skew), ("curvature", curvature)):
        out[name], _ = excised_estimate(s, fn, spec, workers=workers)
    if s.closed:
        out["boundary"] = zero_estimate()
    else:
        out["boundary"] = boundary_integral(
            s, lambda bb: np.sum(_horizontal(X, bb.points, h1) * bb.eta_hs, axis=1), spec,
            workers=workers)
    return out


def _divergence_report(check: str, tag: str, terms: Dict[str, Estimate], surface: str,
                       field_name: str, rel_tol: float) -> InequalityReport:
    lhs = terms["divergence"] + terms["skew"] + terms["curvature"].scaled(-1.0)
    return identity(check, tag, lhs, terms["boundary"], rel_tol=rel_tol,
                    terms={k: float(v.value) for k, v in terms.items()},
                    provenance={"surface": surface, "field": field_name,
                                "curvature_sign": "cylinder-positive, outward nu_H"})


def divergence_check(surface: SurfaceLike, X: VectorField, spec: QuadratureSpec,
                     refine: bool = True, rel_tol: float = 1e-3,
                     workers: Optional[int] = None) -> CheckResult:
    """Residual of the horizontal divergence theorem, optionally at a refined quadrature too"""
    s = as_surface(surface)
    terms = divergence_terms(s, X, spec, workers)
    report = _divergence_report("divergence", "horizontal-divergence", terms, s.name, X.name,
                                rel_tol)
    result = CheckResult("divergence", [report])
    result.data["residual"] = report.lhs - report.rhs
    if refine:
        fine_terms = divergence_terms(s, X, spec.refined(), workers)
        fine = _divergence_report("divergence", "horizontal-divergence-refined", fine_terms,
                                  s.name, X.name, rel_tol)
        result.reports.append(fine)
        result.data["residual_refined"] = fine.lhs - fine.rhs
    if not X.horizontal:
        result.warnings.append(f"field '{X.name}' has a vertical part; only X_H enters")
    return result


def minkowski_check(surface: SurfaceLike, spec: QuadratureSpec,
                    center: Optional[Sequence[float]] = None, rel_tol: float = 1e-3,
                    workers: Optional[int] = None) -> CheckResult:
    """Divergence theorem for the horizontal position field x_H"""
    s = as_surface(surface)
    X = PositionField(s.group, center)
    terms = divergence_terms(s, X, spec, workers)
    report = _divergence_report("minkowski", "minkowski-formula", terms, s.name, X.name, rel_tol)
    # the divergence term is (h - 1) sigma_H(U); the curvature term holds the support function
    report.terms["h_minus_one"] = float(s.group.h1 - 1)
    report.terms["support_function_term"] = float(terms["curvature"].value)
    return CheckResult("minkowski", [report], data={"residual": report.lhs - report.rhs})


# ---------------------------------------------------------------------------
# first variation
# ---------------------------------------------------------------------------

def first_variation_terms(surface: SurfaceLike, w: Sequence[float], spec: QuadratureSpec,
                          workers: Optional[int] = None) -> Dict[str, Estimate]:
    """Right-hand sides of the first variation of sigma_H along y -> y exp(eps W)

    general: int H <W, nu> sigma_R + int_{dU} <W, |P_H nu| eta - <nu_H, eta> nu> sigma^{n-2}_R
    horizontal (W horizontal): int H <W, nu_H> sigma_H + int_{dU} <W, eta_HS> sigma^{n-2}_H
    """
    s = as_surface(surface)
    g = s.group
    w = np.asarray(w, dtype=float)
    h1 = g.h1

    def interior(fb: FrameBatch) -> np.ndarray:
        return mean_curvature(fb) * (fb.nu @ w)

    def edge(bb: BoundaryBatch) -> np.ndarray:
        fr = bb.frame
        nu_h_eta = np.sum(fr.nu_h * bb.eta[:, :h1], axis=1)
        vec = fr.p_h[:, None] * bb.eta - nu_h_eta[:, None] * fr.nu
        return vec @ w

    out: Dict[str, Estimate] = {}
    out["interior"], _ = excised_estimate(s, interior, spec, measure=Measure.R, workers=workers)
    out["boundary"] = (zero_estimate() if s.closed else
                       boundary_integral(s, edge, spec, measure=Measure.R, workers=workers))
    if np.all(w[h1:] == 0.0):
        out["interior_horizontal"], _ = excised_estimate(
            s, lambda fb: mean_curvature(fb) * (fb.nu_h @ w[:h1]), spec, workers=workers)
        out["boundary_horizontal"] = (zero_estimate() if s.closed else boundary_integral(
            s, lambda bb: bb.eta_hs @ w[:h1], spec, workers=workers))
    return out


def first_variation_check(surface: SurfaceLike, w: Sequence[float], spec: QuadratureSpec,
                          step: float = VARIATION_STEP, rel_tol: float = 1e-3,
                          workers: Optional[int] = None) -> CheckResult:
    """Central difference of sigma_H under the right-translation flow against its formula"""
    s = as_surface(surface)
    w = np.asarray(w, dtype=float)
    if w.shape != (s.group.n,):
        raise DomainError(f"variation direction needs {s.group.n} frame components")
    field_name = LeftInvariantField(s.group, w).name
    plus = h_perimeter(right_translate_surface(s, step * w), spec, workers=workers)
    minus = h_perimeter(right_translate_surface(s, -step * w), spec, workers=workers)
    numeric = (plus + minus.scaled(-1.0)).scaled(1.0 / (2.0 * step))
    terms = first_variation_terms(s, w, spec, workers)
    general = terms["interior"] + terms["boundary"]
    reports: List[InequalityReport] = [identity(
        "first_variation", "first-variation", numeric, general, rel_tol=rel_tol,
        terms={k: float(v.value) for k, v in terms.items()},
        provenance={"surface": s.name, "field": field_name, "W": w.tolist(), "step": step})]
    if "interior_horizontal" in terms:
        horizontal = terms["interior_horizontal"] + terms["boundary_horizontal"]
        reports.append(identity(
            "first_variation", "first-variation-horizontal", numeric, horizontal, rel_tol=rel_tol,
            provenance={"surface": s.name, "field": field_name, "W": w.tolist(), "step": step}))
    return CheckResult("first_variation", reports, data={"derivative": float(numeric.value)})
