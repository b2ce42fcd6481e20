#!/usr/bin/env python3
"""
Isoperimetric and Sobolev Inequalities - Carnot Lab
sigma_H(S)^{(Q-2)/(Q-1)} <= C_S (A_inf(S) + B_inf(S)) with C_S = 2^Q k1^{-1/(Q-1)}, the
equivalent constant C_I = C_S^{(Q-1)/(Q-2)} for sigma_H(S) <= C_I (A_inf + B_inf)^{(Q-1)/(Q-2)},
and the Sobolev inequalities on closed surfaces with the same constant.
"""

import math
import logging
from typing import Any, Dict, Optional

import numpy as np

from carnot_lab.errors import CapabilityError, PreconditionError
from carnot_lab.fields import TestFunction
from carnot_lab.homogeneous_metrics import HomogeneousNorm, layer_constants, metric_factor_bounds
from carnot_lab.hypersurface import (FrameBatch, SurfaceLike, as_surface, boundary_measure,
                                     curve_batch, grad_hs, h_perimeter, mean_curvature,
                                     surface_integral)
from carnot_lab.quadrature import Estimate, QuadratureSpec, zero_estimate
from carnot_lab.inequality_lab.reports import CheckResult, inequality
from carnot_lab.inequality_lab.sampling import (boundary_sup, excised_estimate, rho_diameter,
                                                sample_surface, surface_points)
from carnot_lab.inequality_lab.terms import LayerWeight, a_infinity, b_infinity

logger = logging.getLogger(__name__)

CHARACTERISTIC_BOUNDARY_FRACTION = 1e-6
BOUNDARY_SAMPLES = 513
GRADIENT_FLOOR = 1e-3
VANISHING_TOL = 1e-9


def isoperimetric_constants(norm: HomogeneousNorm) -> Dict[str, float]:
    """C_S and C_I from the lower metric-factor bound k1"""
    Q = norm.group.Q
    k1 = metric_factor_bounds(norm).k1
    c_s = 2.0 ** Q * k1 ** (-1.0 / (Q - 1))
    c_i = 2.0 ** (Q * (Q - 1) / (Q - 2)) * k1 ** (1.0 / (2 - Q))
    return {"C_S": c_s, "C_I": c_i, "k1": k1, "Q": Q}


def power_estimate(est: Estimate, exponent: float) -> Estimate:
    v = max(float(est.value), 0.0)
    if v == 0.0:
        return Estimate(0.0, float(est.error) ** exponent)
    return Estimate(v ** exponent, exponent * v ** (exponent - 1.0) * float(est.error),
                    est.converged, est.cells, list(est.warnings))


def surface_radius(surface: SurfaceLike, norm: HomogeneousNorm) -> float:
    """rho_S = diam_rho(S) / 2 over sampled points"""
    return 0.5 * rho_diameter(surface_points(surface), norm)


def characteristic_boundary_fraction(surface: SurfaceLike) -> float:
    """Share of the Riemannian boundary length where P_HS eta vanishes"""
    s = as_surface(surface)
    if s.closed:
        return 0.0
    total, flagged = 0.0, 0.0
    u = np.linspace(0.0, 1.0, BOUNDARY_SAMPLES)
    for curve in s.boundary_curves():
        bb = curve_batch(s, curve, curve.t0 + u * (curve.t1 - curve.t0))
        total += math.fsum(bb.speed)
        flagged += math.fsum(bb.speed[bb.characteristic])
    return flagged / total if total > 0 else 0.0


def isoperimetric_report(surface: SurfaceLike, norm: HomogeneousNorm, spec: QuadratureSpec,
                         workers: Optional[int] = None) -> CheckResult:
    s = as_surface(surface)
    if s.empty:
        report = inequality("isoperimetric", "isoperimetric", 0.0, 0.0,
                            provenance={"surface": s.name, "empty": True})
        return CheckResult("isoperimetric", [report])
    Q = s.group.Q
    if Q < 3:
        raise CapabilityError(f"isoperimetric exponent needs Q >= 3, got Q = {Q}")
    consts = isoperimetric_constants(norm)
    layers = layer_constants(norm)
    rho_s = surface_radius(s, norm)
    weight = LayerWeight(norm, radius=rho_s, constants=layers)

    sigma = h_perimeter(s, spec, workers=workers)
    lhs = power_estimate(sigma, (Q - 2.0) / (Q - 1.0))
    a_inf = a_infinity(s, weight, spec, workers=workers)
    b_inf = b_infinity(s, weight, spec, workers=workers)
    constants: Dict[str, Any] = dict(consts, rho_S=rho_s, c=layers.as_dict()["c"])
    terms = {"sigma": float(sigma.value), "A_inf": float(a_inf.value), "B_inf": float(b_inf.value)}
    provenance = {"surface": s.name, "norm": norm.describe(), "closed": s.closed}

    tag = "isoperimetric-closed" if s.closed else "isoperimetric"
    result = CheckResult("isoperimetric", [inequality(
        "isoperimetric", tag, lhs, (a_inf + b_inf).scaled(consts["C_S"]),
        terms=dict(terms), constants=dict(constants), provenance=dict(provenance))])

    fraction = characteristic_boundary_fraction(s)
    result.data.update({"C_I": consts["C_I"], "C_S": consts["C_S"],
                        "characteristic_boundary_fraction": fraction})
    if fraction > CHARACTERISTIC_BOUNDARY_FRACTION:
        boundary = boundary_measure(s, spec, workers=workers)
        result.reports.append(inequality(
            "isoperimetric", "isoperimetric-boundary-measure", lhs,
            (a_inf + boundary).scaled(consts["C_S"]),
            terms=dict(terms, boundary_measure=float(boundary.value)),
            constants=dict(constants), provenance=dict(provenance)))
        msg = (f"characteristic boundary fraction {fraction:.3e}; boundary-measure form "
               f"reported alongside")
        logger.info(msg)
        result.warnings.append(msg)
    return result


# ---------------------------------------------------------------------------
# Sobolev
# ---------------------------------------------------------------------------

def vanishes_on_boundary(surface: SurfaceLike, psi: TestFunction) -> bool:
    s = as_surface(surface)
    if s.closed:
        return True
    inner = [np.abs(psi(fb.points)) for fb in sample_surface(s).values()]
    scale = max((float(np.max(v)) for v in inner if len(v)), default=0.0)
    return boundary_sup(s, psi) <= VANISHING_TOL * max(scale, 1.0)


def _require_admissible(surface, psi: TestFunction) -> None:
    s = as_surface(surface)
    if not vanishes_on_boundary(s, psi):
        raise PreconditionError(f"test function '{psi.name}' does not vanish on the boundary "
                                f"of '{s.name}'")


def _layer_gradients(fb: FrameBatch, psi: TestFunction) -> np.ndarray:
    """|P_{H_i S} grad psi| for i = 1..k; column 0 equals |grad_HS psi|"""
    return fb.layer_projection_norms(psi.frame_gradient(fb.points))


def sobolev_check(surface: SurfaceLike, psi: TestFunction, norm: HomogeneousNorm,
                  spec: QuadratureSpec, workers: Optional[int] = None) -> CheckResult:
    """Full inequality with higher-layer gradients and the simplified form with C'_1"""
    s = as_surface(surface)
    _require_admissible(s, psi)
    Q = s.group.Q
    consts = isoperimetric_constants(norm)
    layers = layer_constants(norm)
    rho_s = surface_radius(s, norm)
    weight = LayerWeight(norm, radius=rho_s, constants=layers)
    c_s = consts["C_S"]
    exponent = (Q - 1.0) / (Q - 2.0)

    power = surface_integral(s, lambda fb: np.abs(psi(fb.points)) ** exponent, spec,
                             workers=workers)
    lhs = power_estimate(power, 1.0 / exponent)
    curvature, _ = excised_estimate(
        s, lambda fb: np.abs(psi(fb.points)) * np.abs(mean_curvature(fb)) * weight.interior(fb),
        spec, workers=workers)
    gradient = surface_integral(
        s, lambda fb: np.linalg.norm(grad_hs(fb, psi.frame_gradient(fb.points)), axis=1), spec,
        workers=workers)
    higher = surface_integral(
        s, lambda fb: weight.sum_terms(fb.points, lambda i: _layer_gradients(fb, psi)[:, i - 1]),
        spec, workers=workers) if s.group.k > 1 else zero_estimate()
    mass = surface_integral(s, lambda fb: np.abs(psi(fb.points)), spec, workers=workers)

    terms = {"lhs_integral": float(power.value), "curvature": float(curvature.value),
             "gradient": float(gradient.value), "higher_layers": float(higher.value),
             "mass": float(mass.value)}
    provenance = {"surface": s.name, "norm": norm.describe(), "psi": psi.name}
    full = inequality("sobolev", "sobolev-full", lhs, (curvature + gradient + higher).scaled(c_s),
                      terms=dict(terms), constants=dict(consts, rho_S=rho_s),
                      provenance=dict(provenance))

    c0, c0_prime = _sobolev_sup_constants(s, psi, weight)
    c1 = c_s * max(c0, c0_prime)
    simple = inequality("sobolev", "sobolev", lhs, (mass + gradient).scaled(c1),
                        terms=dict(terms), constants=dict(consts, C0=c0, C0_prime=c0_prime,
                                                          C1_prime=c1, rho_S=rho_s),
                        provenance=dict(provenance))
    result = CheckResult("sobolev", [full, simple], data={"C1_prime": c1})
    if not s.closed:
        result.warnings.append(f"'{s.name}' has a boundary; test function vanishes on it")
    return result


def _sobolev_sup_constants(surface, psi: TestFunction, weight: LayerWeight):
    """C_0 = sup |H| w over supp psi and C'_0 = 1 + sum i c_i rho_S^{i-1} sup ratio of layer
    gradients to |grad_HS psi| where the latter is not small"""
    c0 = 0.0
    ratios: Dict[int, float] = {}
    batches = list(sample_surface(surface).values())
    grad_max = 0.0
    cached = []
    for fb in batches:
        g = _layer_gradients(fb, psi)
        cached.append(g)
        grad_max = max(grad_max, float(np.max(g[:, 0], initial=0.0)))
    for fb, g in zip(batches, cached):
        support = (np.abs(psi(fb.points)) > 0) & ~fb.characteristic
        if np.any(support):
            values = np.abs(mean_curvature(fb)) * weight.interior(fb)
            c0 = max(c0, float(np.max(values[support])))
        strong = g[:, 0] > GRADIENT_FLOOR * grad_max
        for i in range(2, fb.group.k + 1):
            if np.any(strong):
                ratios[i] = max(ratios.get(i, 0.0), float(np.max(g[strong, i - 1] / g[strong, 0])))
    c0_prime = 1.0 + math.fsum(i * weight.constants.of(i) * weight.radius ** (i - 1) * r
                               for i, r in ratios.items())
    return c0, c0_prime
