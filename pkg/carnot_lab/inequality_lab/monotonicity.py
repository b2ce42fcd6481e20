#!/usr/bin/env python3
"""
Monotonicity Scans - Carnot Lab
Discrete checks of the differential inequality satisfied by m(t) = sigma_H(S_t) / t^{Q-1},
S_t = S cap B(x, t), its weak (h - 1) form, an integrated form per grid interval and the
lower bounds on sigma_H(S_t) it implies through the blow-up density.
"""

import math
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np

from carnot_lab.blowup import BlowupKind, blowup_density, reach
from carnot_lab.errors import CapabilityError, DomainError
from carnot_lab.homogeneous_metrics import HomogeneousNorm, NormKind, layer_constants
from carnot_lab.hypersurface import (BallRegion, FrameBatch, Measure, SurfaceLike, as_surface,
                                     boundary_measure, h_perimeter, locate, surface_integral)
from carnot_lab.parallel import ordered_map
from carnot_lab.quadrature import Estimate, QuadratureSpec, zero_estimate
from carnot_lab.inequality_lab.reports import (CheckResult, Form, InequalityReport, Table,
                                               Verdict, inequality, judge)
from carnot_lab.inequality_lab.sampling import (restrict_to_ball, sample_surface,
                                                sup_abs_curvature, sup_varpi)
from carnot_lab.inequality_lab.terms import LayerWeight, a_infinity, b_infinity, curvature_terms

logger = logging.getLogger(__name__)

STENCIL_RATIO = 1.05
SCAN_COLUMNS = ["t", "m", "minus_dm", "rhs", "verdict"]


@dataclass
class RadiusData:
    """Everything measured on S_t for one radius"""
    t: float
    a_inf: Estimate
    b_inf: Estimate
    a_weak: Estimate
    b_weak: Estimate


def is_heisenberg_korany(norm: HomogeneousNorm) -> bool:
    g = norm.group
    return g.k == 2 and g.n - g.h1 == 1 and norm.kind is NormKind.KORANY


def _check_point(surface, x: np.ndarray, norm: HomogeneousNorm) -> bool:
    """True when x is characteristic; raises when the characteristic case is out of scope"""
    index, zeta = locate(surface, x)
    fb = FrameBatch(surface.patches[index], zeta[None])
    characteristic = bool(fb.characteristic[0])
    if characteristic and not is_heisenberg_korany(norm):
        raise CapabilityError("monotonicity at a characteristic point is available on "
                              "Heisenberg groups with the Koranyi norm only")
    return characteristic


def _usable_radii(surface, x: np.ndarray, norm: HomogeneousNorm, t_grid: Sequence[float],
                  warnings: List[str]) -> List[float]:
    ts = sorted(float(t) for t in t_grid)
    if not ts or ts[0] <= 0:
        raise DomainError("scan radii must be positive")
    if surface.boundary_traced:
        return ts
    limit = reach(surface, x, norm)
    kept = [t for t in ts if t * STENCIL_RATIO < limit]
    if len(kept) < len(ts):
        dropped = [t for t in ts if t not in kept]
        msg = f"radii {dropped} reach the untraced boundary (distance {limit:.6g}); trimmed"
        logger.warning(msg)
        warnings.append(msg)
    return kept


def _measure(surface, norm: HomogeneousNorm, x: np.ndarray, t: float, weight: LayerWeight,
             spec: QuadratureSpec, workers: Optional[int]) -> RadiusData:
    ball = BallRegion(norm, x, t)
    weak = curvature_terms(surface, spec, ball, workers)
    if surface.closed or not surface.boundary_traced:
        # untraced boundaries sit outside every usable radius
        b_inf = b_weak = zero_estimate()
    else:
        b_inf = b_infinity(surface, weight, spec, level=ball.level, workers=workers)
        b_weak = boundary_measure(surface, spec, level=ball.level, workers=workers)
    return RadiusData(
        t=t,
        a_inf=a_infinity(surface, weight, spec, ball, workers),
        b_inf=b_inf,
        a_weak=weak["abs_curvature"] + weak["skew"],
        b_weak=b_weak,
    )


def _derivative(values: Dict[float, Estimate], t: float, exponent: float):
    """-d/dt (sigma / t^exponent) by a central difference on t/q, t, tq with its error bar"""
    q = STENCIL_RATIO
    lo, mid, hi = t / q, t, t * q
    f = {r: float(values[r].value) / r ** exponent for r in (lo, mid, hi)}
    e = {r: float(values[r].error) / r ** exponent for r in (lo, mid, hi)}
    width = hi - lo
    minus_dm = -(f[hi] - f[lo]) / width
    second = abs(f[hi] - 2.0 * f[mid] + f[lo]) / width
    return f[mid], minus_dm, (e[hi] + e[lo]) / width + second


def _scan_table(rows: List[Dict]) -> Table:
    table = Table(list(SCAN_COLUMNS))
    for row in rows:
        table.add(**{c: row[c] for c in SCAN_COLUMNS})
    return table


def monotonicity_scan(surface: SurfaceLike, x: Sequence[float], norm: HomogeneousNorm,
                      t_grid: Sequence[float], spec: QuadratureSpec,
                      workers: Optional[int] = None) -> CheckResult:
    """-m'(t) <= (A_inf(t) + B_inf(t)) / t^{Q-1} on every grid radius, plus the weak form"""
    s = as_surface(surface)
    x = np.asarray(x, dtype=float)
    result = CheckResult("monotonicity")
    characteristic = _check_point(s, x, norm)
    ts = _usable_radii(s, x, norm, t_grid, result.warnings)
    g = s.group
    Q, h1 = g.Q, g.h1
    weight = LayerWeight(norm, center=x, constants=layer_constants(norm))
    q = STENCIL_RATIO

    stencil = sorted({r for t in ts for r in (t / q, t, t * q)})
    sigmas = dict(zip(stencil, ordered_map(
        lambda r: h_perimeter(s, spec, BallRegion(norm, x, r)), stencil, workers)))
    data = [_measure(s, norm, x, t, weight, spec, workers) for t in ts]

    rows, weak_rows = [], []
    strong_rhs, m_values = [], []
    for d in data:
        m, minus_dm, err = _derivative(sigmas, d.t, Q - 1.0)
        rhs = (d.a_inf + d.b_inf).scaled(1.0 / d.t ** (Q - 1))
        report = inequality("monotonicity", "monotonicity", Estimate(minus_dm, err), rhs,
                            terms={"t": d.t, "m": m, "A_inf": float(d.a_inf.value),
                                   "B_inf": float(d.b_inf.value)},
                            constants={"Q": Q, "stencil_ratio": q},
                            provenance={"surface": s.name, "point": x.tolist(),
                                        "characteristic_point": characteristic})
        result.reports.append(report)
        rows.append({"t": d.t, "m": m, "minus_dm": minus_dm, "rhs": float(rhs.value),
                     "verdict": report.verdict.value})
        strong_rhs.append(float(rhs.value))
        m_values.append(m)

        mw, minus_dmw, errw = _derivative(sigmas, d.t, h1 - 1.0)
        rhs_w = (d.a_weak + d.b_weak).scaled(1.0 / d.t ** (h1 - 1))
        weak = inequality("monotonicity", "monotonicity-weak", Estimate(minus_dmw, errw), rhs_w,
                          terms={"t": d.t, "m": mw}, constants={"h": h1},
                          provenance={"surface": s.name, "point": x.tolist()})
        result.reports.append(weak)
        weak_rows.append({"t": d.t, "m": mw, "minus_dm": minus_dmw, "rhs": float(rhs_w.value),
                          "verdict": weak.verdict.value})

    result.reports.extend(_integrated(ts, m_values, strong_rhs, sigmas, Q, s.name))
    result.tables["monotonicity"] = _scan_table(rows)
    result.tables["monotonicity_weak"] = _scan_table(weak_rows)
    result.data["characteristic_point"] = characteristic
    return result


def _integrated(ts: List[float], m_values: List[float], rhs: List[float],
                sigmas: Dict[float, Estimate], Q: int, name: str) -> List[InequalityReport]:
    """m(t_j) - m(t_{j+1}) <= int_{t_j}^{t_{j+1}} rhs dt by the trapezoid rule"""
    out = []
    for j in range(len(ts) - 1):
        a, b = ts[j], ts[j + 1]
        drop = m_values[j] - m_values[j + 1]
        err = (float(sigmas[a].error) / a ** (Q - 1) + float(sigmas[b].error) / b ** (Q - 1)
               + 0.5 * (b - a) * abs(rhs[j + 1] - rhs[j]))
        integral = 0.5 * (b - a) * (rhs[j] + rhs[j + 1])
        slack = integral - drop
        out.append(InequalityReport("monotonicity", "monotonicity-integrated",
                                    form=Form.INEQUALITY, lhs=drop,
                                    rhs=integral, lhs_error=err, rhs_error=0.0, slack=slack,
                                    verdict=judge(slack, err),
                                    terms={"t0": a, "t1": b},
                                    provenance={"surface": name}))
    return out


def flux_constants(surface: SurfaceLike, x: Sequence[float], norm: HomogeneousNorm,
                   t_grid: Sequence[float], spec: QuadratureSpec,
                   workers: Optional[int] = None) -> Dict[int, float]:
    """epsilon_i = i c_i max_t t^{i-1} int_{S_t} |varpi_i| sigma_H / sigma_H(S_t)"""
    s = as_surface(surface)
    x = np.asarray(x, dtype=float)
    g = s.group
    consts = layer_constants(norm)
    out = {i: 0.0 for i in range(2, g.k + 1)}
    for t in t_grid:
        ball = BallRegion(norm, x, float(t))
        sigma = float(h_perimeter(s, spec, ball, workers=workers).value)
        if sigma <= 0:
            continue
        for i in out:
            flux = surface_integral(s, lambda fb, i=i: fb.varpi_layer_norm(i), spec, ball,
                                    Measure.H, workers=workers)
            ratio = float(flux.value) / sigma * float(t) ** (i - 1)
            out[i] = max(out[i], i * consts.of(i) * ratio)
    return out


def asymptotic_check(surface: SurfaceLike, x: Sequence[float], norm: HomogeneousNorm,
                     t_grid: Sequence[float], spec: QuadratureSpec,
                     workers: Optional[int] = None) -> CheckResult:
    """sigma_H(S_t) >= kappa t^{Q-1} exp(-t H0 (1 + sum eps_i t^{i-1})), or exp(-t H0 eps_0)
    at a characteristic point of a Heisenberg group"""
    s = as_surface(surface)
    x = np.asarray(x, dtype=float)
    result = CheckResult("asymptotic")
    characteristic = _check_point(s, x, norm)
    ts = sorted(float(t) for t in t_grid)
    if not ts or ts[0] <= 0:
        raise DomainError("scan radii must be positive")
    limit = reach(s, x, norm)
    if ts[-1] >= limit:
        raise DomainError(f"radius {ts[-1]} meets the boundary of '{s.name}' "
                          f"(distance {limit:.6g})")

    blow = blowup_density(s, x, norm, spec, workers)
    if blow.kind is BlowupKind.DEGENERATE or blow.kappa is None:
        raise CapabilityError(f"blow-up at {x.tolist()} is degenerate; no asymptotic bound")
    kappa = blow.kappa
    Q = s.group.Q

    samples = restrict_to_ball(sample_surface(s), norm, x, ts[-1])
    H0 = sup_abs_curvature(samples)
    if characteristic:
        eps = flux_constants(s, x, norm, ts, spec, workers)
        eps0 = 1.0 + math.fsum(eps.values())
        exponent = {t: -t * H0 * eps0 for t in ts}
        constants = {"kappa": kappa, "H0": H0, "eps0": eps0}
        tag = "asymptotic-characteristic"
    else:
        consts = layer_constants(norm)
        eps = {i: i * consts.of(i) * sup_varpi(samples, i) for i in range(2, s.group.k + 1)}
        exponent = {t: -t * H0 * (1.0 + math.fsum(e * t ** (i - 1) for i, e in eps.items()))
                    for t in ts}
        constants = {"kappa": kappa, "H0": H0}
        tag = "asymptotic"
    constants["eps"] = {str(i): e for i, e in sorted(eps.items())}

    sigmas = ordered_map(lambda t: h_perimeter(s, spec, BallRegion(norm, x, t)), ts, workers)
    table = Table(["t", "sigma", "bound", "verdict"])
    for t, sigma in zip(ts, sigmas):
        bound = kappa * t ** (Q - 1) * math.exp(exponent[t])
        bound_est = Estimate(bound, blow.error * t ** (Q - 1) * math.exp(exponent[t]))
        report = inequality("asymptotic", tag, bound_est, sigma, terms={"t": t},
                            constants=dict(constants),
                            provenance={"surface": s.name, "point": x.tolist(),
                                        "blowup": blow.kind.value})
        result.reports.append(report)
        table.add(t=t, sigma=float(sigma.value), bound=bound, verdict=report.verdict.value)
    result.tables["asymptotic"] = table
    result.data.update({"kappa": kappa, "characteristic_point": characteristic})
    if result.verdict is Verdict.VIOLATED:
        logger.warning("Asymptotic bound violated on %s at %s", s.name, x.tolist())
    return result
