#!/usr/bin/env python3
"""
Linear Isoperimetric Inequalities - Carnot Lab
Bounds on sigma_H(S) by the radius R of a circumscribed rho-ball times curvature and boundary
integrals, in the (h - 1) form and in the stronger (Q - 1) form.
"""

import logging
from typing import Any, Dict, Optional, Sequence

import numpy as np

from carnot_lab.homogeneous_metrics import HomogeneousNorm, layer_constants
from carnot_lab.hypersurface import SurfaceLike, as_surface, boundary_measure, h_perimeter
from carnot_lab.quadrature import Estimate, QuadratureSpec, zero_estimate
from carnot_lab.inequality_lab.reports import CheckResult, inequality
from carnot_lab.inequality_lab.sampling import circumradius, sample_surface, sup_abs_curvature
from carnot_lab.inequality_lab.terms import (LayerWeight, a_infinity, b_dilation, b_infinity,
                                             curvature_terms)

logger = logging.getLogger(__name__)

MINIMAL_TOL = 1e-6


def _ingredients(surface: SurfaceLike, norm: HomogeneousNorm, spec: QuadratureSpec,
                 center: Optional[Sequence[float]], workers: Optional[int]) -> Dict[str, Any]:
    s = as_surface(surface)
    ball = circumradius(s, norm, center)
    terms = curvature_terms(s, spec, workers=workers)
    boundary = zero_estimate() if s.closed else boundary_measure(s, spec, workers=workers)
    return {
        "surface": s,
        "center": ball["center"],
        "R": float(ball["radius"]),
        "sigma": h_perimeter(s, spec, workers=workers),
        "abs_curvature": terms["abs_curvature"],
        "skew": terms["skew"],
        "boundary": boundary,
    }


def _provenance(parts: Dict[str, Any], norm: HomogeneousNorm) -> Dict[str, Any]:
    return {"surface": parts["surface"].name, "norm": norm.describe(),
            "center": np.asarray(parts["center"]).tolist(), "radius_source": "sampled circumradius"}


def _term_values(parts: Dict[str, Any]) -> Dict[str, float]:
    return {name: float(parts[name].value) for name in ("sigma", "abs_curvature", "skew", "boundary")}


def linear_isoperimetric_check(surface: SurfaceLike, norm: HomogeneousNorm, spec: QuadratureSpec,
                               center: Optional[Sequence[float]] = None,
                               workers: Optional[int] = None) -> CheckResult:
    """(h - 1) sigma_H(S) <= R {int (|H| + |C_H nu_H|) sigma_H + sigma^{n-2}_H(dS)}"""
    parts = _ingredients(surface, norm, spec, center, workers)
    s = parts["surface"]
    h1 = s.group.h1
    R = parts["R"]
    lhs = parts["sigma"].scaled(h1 - 1.0)
    rhs = (parts["abs_curvature"] + parts["skew"] + parts["boundary"]).scaled(R)
    tag = "linear-isoperimetric-closed" if s.closed else "linear-isoperimetric"
    report = inequality("linear_isoperimetric", tag, lhs, rhs, terms=_term_values(parts),
                        constants={"R": R, "h": h1}, provenance=_provenance(parts, norm))
    return CheckResult("linear_isoperimetric", [report], data={"R": R})


def linear_isoperimetric_variants(surface: SurfaceLike, norm: HomogeneousNorm,
                                  spec: QuadratureSpec, center: Optional[Sequence[float]] = None,
                                  workers: Optional[int] = None) -> CheckResult:
    """Minimal-surface form, sup |H| form, radius lower bound and sigma upper bound"""
    parts = _ingredients(surface, norm, spec, center, workers)
    s = parts["surface"]
    h1 = s.group.h1
    R = parts["R"]
    sigma: Estimate = parts["sigma"]
    rest = parts["skew"] + parts["boundary"]
    H0 = sup_abs_curvature(sample_surface(s))
    constants = {"R": R, "h": h1, "H0": H0}
    common = {"terms": _term_values(parts), "provenance": _provenance(parts, norm)}
    result = CheckResult("linear_isoperimetric_variants", data={"R": R, "H0": H0})

    if H0 <= MINIMAL_TOL:
        result.reports.append(inequality(
            "linear_isoperimetric_variants", "linear-isoperimetric-minimal",
            sigma.scaled(h1 - 1.0), rest.scaled(R), constants=dict(constants), **common))
    else:
        result.warnings.append(f"sup |H| = {H0:.3e}; minimal-surface form skipped")

    result.reports.append(inequality(
        "linear_isoperimetric_variants", "linear-isoperimetric-sup-curvature",
        sigma.scaled(h1 - 1.0), (sigma.scaled(H0) + rest).scaled(R), constants=dict(constants),
        **common))

    denominator = sigma.scaled(H0) + rest
    if denominator.value > 0:
        bound = sigma.scaled((h1 - 1.0) / float(denominator.value))
        # first-order error of the quotient
        bound.error = float(bound.value) * (float(sigma.error) / max(float(sigma.value), 1e-300)
                                            + float(denominator.error) / float(denominator.value))
        result.reports.append(inequality(
            "linear_isoperimetric_variants", "circumradius-lower-bound", bound, R,
            constants=dict(constants), **common))

    gap = (h1 - 1.0) - R * H0
    if gap > 0:
        result.reports.append(inequality(
            "linear_isoperimetric_variants", "perimeter-upper-bound", sigma, rest.scaled(R / gap),
            constants=dict(constants, gap=gap), **common))
    else:
        result.warnings.append(f"R sup|H| = {R * H0:.3e} >= h - 1; perimeter upper bound skipped")
    return result


def strong_linear_check(surface: SurfaceLike, norm: HomogeneousNorm, spec: QuadratureSpec,
                        center: Optional[Sequence[float]] = None,
                        workers: Optional[int] = None) -> CheckResult:
    """sigma_H(S) <= R/(Q-1) {A_inf + B_Z} and the same with B_inf in place of B_Z"""
    s = as_surface(surface)
    ball = circumradius(s, norm, center)
    x, R = np.asarray(ball["center"]), float(ball["radius"])
    Q = s.group.Q
    consts = layer_constants(norm)
    weight = LayerWeight(norm, center=x, constants=consts)
    sigma = h_perimeter(s, spec, workers=workers)
    a_inf = a_infinity(s, weight, spec, workers=workers)
    b_z = b_dilation(s, norm, x, spec, workers=workers)
    b_inf = b_infinity(s, weight, spec, workers=workers)
    factor = R / (Q - 1.0)
    constants = {"R": R, "Q": Q, "c": consts.as_dict()["c"]}
    terms = {"sigma": float(sigma.value), "A_inf": float(a_inf.value), "B_Z": float(b_z.value),
             "B_inf": float(b_inf.value)}
    provenance = {"surface": s.name, "norm": norm.describe(), "center": x.tolist()}
    reports = [
        inequality("strong_linear", "strong-linear-dilation", sigma, (a_inf + b_z).scaled(factor),
                   constants=dict(constants), terms=dict(terms), provenance=dict(provenance)),
        inequality("strong_linear", "strong-linear-layers", sigma, (a_inf + b_inf).scaled(factor),
                   constants=dict(constants), terms=dict(terms), provenance=dict(provenance)),
    ]
    ordered = bool(b_z.value <= b_inf.value + b_inf.error + b_z.error)
    return CheckResult("strong_linear", reports, data={"R": R, "dilation_term_below_layer_term": ordered})
