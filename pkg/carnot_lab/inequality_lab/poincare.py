#!/usr/bin/env python3
"""
Poincare Inequality and Isoperimetric Constants - Carnot Lab
Local Poincare inequality on rho-balls of admissible radius, and upper estimates of the
isoperimetric constants Isop(S), Isop_0(S) from coordinate splits, cutoff families and
Rayleigh quotients of test functions.
"""

import math
import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from carnot_lab.blowup import reach
from carnot_lab.errors import AdmissibilityError, DomainError, PreconditionError
from carnot_lab.fields import CoordinateFunction, TestFunction
from carnot_lab.homogeneous_metrics import HomogeneousNorm
from carnot_lab.hypersurface import (BallRegion, FrameBatch, SurfaceLike, SurfacePatch, as_surface,
                                     characteristic_locus, grad_hs, locate, surface_integral)
from carnot_lab.quadrature import Estimate, QuadratureSpec
from carnot_lab.inequality_lab.identities import LevelSetMeasure
from carnot_lab.inequality_lab.isoperimetric import power_estimate, vanishes_on_boundary
from carnot_lab.inequality_lab.reports import CheckResult, Table, inequality
from carnot_lab.inequality_lab.sampling import (RADIUS_MARGIN, has_characteristic, rho_diameter,
                                                sample_ball, sup_abs_curvature, sup_varpi)

logger = logging.getLogger(__name__)

SUPPORT_SHELL = 0.98
SUPPORT_TOL = 1e-9
CUTOFF_EPSILONS = (0.2, 0.1, 0.05)
BETA_SAMPLES = 41
MEAN_ZERO_TOL = 1e-6
NEAREST_SAMPLES = 160
GOLDEN_STEPS = 48
DISTANCE_CHUNK = 1024
CUTOFF_COLUMNS = ["split", "family", "eps", "alpha", "numerator", "denominator", "quotient"]


def poincare_constant(p: float, h: int) -> float:
    """C_p = 2p / (2h - 3)"""
    return 2.0 * p / (2.0 * h - 3.0)


# ---------------------------------------------------------------------------
# admissible radius
# ---------------------------------------------------------------------------

@dataclass
class AdmissibleRadius:
    """Largest radius for which the local Poincare inequality is asserted at x"""
    reach: float
    curvature_radius: float
    sup_curvature: float
    sup_varpi: float
    characteristic: bool

    @property
    def bound(self) -> float:
        return min(self.reach, self.curvature_radius)

    def as_dict(self) -> Dict[str, Any]:
        return {"reach": self.reach, "R_U": self.curvature_radius, "H0": self.sup_curvature,
                "varpi0": self.sup_varpi, "characteristic": self.characteristic,
                "bound": self.bound}


def admissible_radius(surface: SurfaceLike, x: Sequence[float], R: float,
                      norm: HomogeneousNorm) -> AdmissibleRadius:
    """R_U = 1 / (2 (sup|H| + C sup|varpi|)) on S_R, or its characteristic form
    R_0 = 1 / (2 (C (1 + sup|varpi|) + sup|H|)) with sup|varpi| taken off the flagged cells"""
    s = as_surface(surface)
    ball = BallRegion(norm, x, R)
    samples = sample_ball(s, ball)
    C = s.group.curvature_constant()
    H0 = sup_abs_curvature(samples)
    characteristic = has_characteristic(samples)
    if characteristic:
        kept = sample_ball(s, ball, locus=characteristic_locus(s))
        varpi0 = sup_varpi(kept)
        denominator = 2.0 * (C * (1.0 + varpi0) + H0)
    else:
        varpi0 = sup_varpi(samples)
        denominator = 2.0 * (H0 + C * varpi0)
    r_u = 1.0 / denominator if denominator > 0 else math.inf
    return AdmissibleRadius(reach(s, x, norm), r_u, H0, varpi0, characteristic)


def _support_check(surface, psi: TestFunction, ball: BallRegion) -> Dict[int, FrameBatch]:
    samples = sample_ball(surface, ball)
    values = [np.abs(psi(fb.points)) for fb in samples.values()]
    scale = max((float(np.max(v)) for v in values if len(v)), default=0.0)
    for fb, v in zip(samples.values(), values):
        shell = ball.norm.distance(ball.center, fb.points) >= SUPPORT_SHELL * ball.radius
        if np.any(shell) and float(np.max(v[shell])) > SUPPORT_TOL * max(scale, 1.0):
            raise AdmissibilityError(f"test function '{psi.name}' is not supported inside "
                                     f"B(x, {ball.radius:g})")
    return samples


def poincare_check(surface: SurfaceLike, x: Sequence[float], R: float, p: float,
                   psi: TestFunction, norm: HomogeneousNorm, spec: QuadratureSpec,
                   workers: Optional[int] = None) -> CheckResult:
    """(int_{S_R} |psi|^p)^{1/p} <= C_p R (int_{S_R} |grad_HS psi|^p)^{1/p} and the form with
    the diameter of the support in place of R"""
    s = as_surface(surface)
    if p < 1:
        raise DomainError(f"Poincare exponent must be >= 1, got {p}")
    x = np.asarray(x, dtype=float)
    locate(s, x)
    radius = admissible_radius(s, x, R, norm)
    if R > radius.bound:
        raise PreconditionError(f"radius {R:g} exceeds the admissible radius {radius.bound:.6g} "
                                f"(reach {radius.reach:.6g}, R_U {radius.curvature_radius:.6g})",
                                bound=radius.bound)
    ball = BallRegion(norm, x, R)
    samples = _support_check(s, psi, ball)

    c_p = poincare_constant(p, s.group.h1)
    mass = surface_integral(s, lambda fb: np.abs(psi(fb.points)) ** p, spec, region=ball,
                            workers=workers)
    energy = surface_integral(
        s, lambda fb: np.linalg.norm(grad_hs(fb, psi.frame_gradient(fb.points)), axis=1) ** p,
        spec, region=ball, workers=workers)
    lhs = power_estimate(mass, 1.0 / p)
    gradient = power_estimate(energy, 1.0 / p)

    support = [fb.points[np.abs(psi(fb.points)) > 0] for fb in samples.values()]
    support_points = np.vstack(support) if support else np.zeros((0, s.group.n))
    diameter = RADIUS_MARGIN * rho_diameter(support_points, norm)

    constants = dict(radius.as_dict(), C_p=c_p, p=p, R=R, diameter=diameter)
    terms = {"psi_p": float(mass.value), "grad_p": float(energy.value)}
    provenance = {"surface": s.name, "norm": norm.describe(), "center": x.tolist(),
                  "psi": psi.describe()}
    tag = "poincare-characteristic" if radius.characteristic else "poincare"
    reports = [
        inequality("poincare", tag, lhs, gradient.scaled(c_p * R), terms=dict(terms),
                   constants=dict(constants), provenance=dict(provenance)),
        inequality("poincare", "poincare-diameter", lhs, gradient.scaled(c_p * diameter),
                   terms=dict(terms), constants=dict(constants), provenance=dict(provenance)),
    ]
    result = CheckResult("poincare", reports, data=dict(radius.as_dict(), C_p=c_p))
    if diameter > 2.0 * radius.bound:
        result.warnings.append(f"support diameter {diameter:.4g} exceeds twice the admissible "
                               f"radius {radius.bound:.4g}")
    return result


# ---------------------------------------------------------------------------
# distance to a cut locus
# ---------------------------------------------------------------------------

class SetDistance(TestFunction):
    """rho(N^{-1} y) = min over n in N of rho(n^{-1} y) for a cut locus N given as parameter
    segments on surface patches; nearest samples are refined by golden-section search"""

    def __init__(self, norm: HomogeneousNorm, pieces: Sequence[Tuple[SurfacePatch, np.ndarray]],
                 name: str = "distance"):
        super().__init__(norm.group, name)
        self.norm = norm
        self.pieces = []
        for patch, segments in pieces:
            segments = np.asarray(segments, dtype=float)
            stride = max(1, int(math.ceil(len(segments) / NEAREST_SAMPLES)))
            u = np.arange(0.0, len(segments) + 1e-9, float(stride))
            if u[-1] < len(segments):
                u = np.append(u, float(len(segments)))
            self.pieces.append((patch, segments, u, self._along(patch, segments, u), stride))
        if not self.pieces:
            raise DomainError("cut locus is empty")

    @staticmethod
    def _along(patch: SurfacePatch, segments: np.ndarray, u: np.ndarray) -> np.ndarray:
        k = np.clip(np.floor(u).astype(int), 0, len(segments) - 1)
        f = (u - k)[:, None]
        return patch.points(segments[k, 0] + f * (segments[k, 1] - segments[k, 0]))

    def _piece_nearest(self, piece, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        patch, segments, u, points, stride = piece
        d = self.norm.distance(points[None, :, :], y[:, None, :])
        j = np.argmin(d, axis=1)
        best_d, best_u = d[np.arange(len(y)), j], u[j]
        lo = np.maximum(best_u - stride, 0.0)
        hi = np.minimum(best_u + stride, float(len(segments)))
        golden = 0.5 * (math.sqrt(5.0) - 1.0)

        def at(v):
            return self.norm.distance(self._along(patch, segments, v), y)

        a, b = lo + (1 - golden) * (hi - lo), lo + golden * (hi - lo)
        fa, fb = at(a), at(b)
        for _ in range(GOLDEN_STEPS):
            left = fa < fb
            hi = np.where(left, b, hi)
            lo = np.where(left, lo, a)
            a_new = lo + (1 - golden) * (hi - lo)
            b_new = lo + golden * (hi - lo)
            a, b = np.where(left, a_new, b), np.where(left, a, b_new)
            fa, fb = np.where(left, at(a_new), fb), np.where(left, fa, at(b_new))
        found = np.where(fa < fb, a, b)
        found_d = np.minimum(fa, fb)
        better = found_d < best_d
        best_u = np.where(better, found, best_u)
        best_d = np.where(better, found_d, best_d)
        return best_d, self._along(patch, segments, best_u)

    def nearest(self, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Distance to N and the nearest point of N for each row of y"""
        y = np.asarray(y, dtype=float).reshape(-1, self.group.n)
        dist = np.full(len(y), np.inf)
        where = np.zeros_like(y)
        for start in range(0, len(y), DISTANCE_CHUNK):
            block = slice(start, start + DISTANCE_CHUNK)
            for piece in self.pieces:
                d, n = self._piece_nearest(piece, y[block])
                closer = d < dist[block]
                dist[block] = np.where(closer, d, dist[block])
                where[block] = np.where(closer[:, None], n, where[block])
        return dist, where

    def __call__(self, y):
        shape = np.shape(y)[:-1]
        return self.nearest(y)[0].reshape(shape)

    def frame_gradient(self, y):
        """Gradient of rho(n*^{-1} y) at the nearest point n*"""
        y = np.asarray(y, dtype=float)
        flat = y.reshape(-1, self.group.n)
        dist, where = self.nearest(flat)
        out = np.zeros(flat.shape)
        positive = dist > 0
        if np.any(positive):
            g = self.group
            out[positive] = self.norm.gradient(g.mul(g.inverse(where[positive]), flat[positive]))
        return out.reshape(y.shape)


# ---------------------------------------------------------------------------
# isoperimetric constants
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CoordinateSplit:
    """S_1 = S & {y_index < value}, S_2 = S & {y_index > value}, N = S & {y_index = value}"""
    index: int
    value: float = 0.0

    @property
    def name(self) -> str:
        return f"x{self.index + 1}={self.value:g}"

    def side(self, sign: float):
        return lambda patch, z: sign * (patch.points(z)[..., self.index] - self.value)


def _quotient(numerator: Estimate, denominator: Estimate) -> Estimate:
    num, den = float(numerator.value), float(denominator.value)
    if den <= 0:
        raise AdmissibilityError("Rayleigh quotient has a vanishing denominator")
    q = num / den
    error = abs(q) * (float(numerator.error) / max(abs(num), 1e-300) + float(denominator.error) / den)
    return Estimate(q, error, numerator.converged and denominator.converged)


def _side_integrals(s, distance: SetDistance, side, eps: float, spec: QuadratureSpec,
                    betas: Optional[np.ndarray], workers: Optional[int]) -> Dict[str, Estimate]:
    """Integrals over one side split into the eps-neighbourhood of N and the rest"""

    def near_level(patch, z):
        return distance(patch.points(z)) - eps

    def far_level(patch, z):
        return eps - distance(patch.points(z))

    m = 2 if betas is None else 2 + len(betas)

    def near(fb: FrameBatch) -> np.ndarray:
        d = distance(fb.points)
        grad = np.linalg.norm(grad_hs(fb, distance.frame_gradient(fb.points)), axis=1)
        cols = [np.minimum(d / eps, 1.0), grad / eps]
        if betas is not None:
            psi = np.maximum(1.0 - d / eps, 0.0)
            cols.extend(np.abs(psi - beta) for beta in betas)
        return np.stack(cols, axis=1)

    def far(fb: FrameBatch) -> np.ndarray:
        cols = [np.ones(len(fb)), np.zeros(len(fb))]
        if betas is not None:
            cols.extend(np.full(len(fb), beta) for beta in betas)
        return np.stack(cols, axis=1)

    inner = surface_integral(s, near, spec, levels=[side, near_level], workers=workers)
    outer = surface_integral(s, far, spec, levels=[side, far_level], workers=workers)
    total = inner + outer
    out = {"mass": total.component(0), "gradient": total.component(1)}
    if betas is not None:
        out["deviation"] = Estimate(np.asarray(total.value)[2:m], np.asarray(total.error)[2:m],
                                    total.converged)
    return out


def _split_estimates(s, norm: HomogeneousNorm, split: CoordinateSplit,
                     epsilons: Sequence[float], spec: QuadratureSpec, workers: Optional[int],
                     result: CheckResult, cutoff: Table) -> Optional[Dict[str, Any]]:
    if not 0 <= split.index < s.group.n:
        raise DomainError(f"split coordinate {split.index} out of range for n = {s.group.n}")
    level_measure = LevelSetMeasure(s, CoordinateFunction(s.group, split.index))
    pieces = level_measure.segments(split.value)
    if not pieces:
        result.warnings.append(f"split {split.name} does not meet '{s.name}'")
        return None
    sigma_n = level_measure(split.value)
    sides = [split.side(1.0), split.side(-1.0)]
    masses = [surface_integral(s, lambda fb: np.ones(len(fb)), spec, levels=[side],
                               workers=workers) for side in sides]
    if masses[1].value < masses[0].value:
        sides.reverse()
        masses.reverse()
    sigma1, sigma2 = masses
    if float(sigma1.value) <= 0:
        result.warnings.append(f"split {split.name} leaves an empty side")
        return None

    geometric = _quotient(Estimate(sigma_n, 0.0), sigma1)
    ratio = float(sigma1.value) / float(sigma2.value)
    limit = _quotient(Estimate((1.0 + ratio) * sigma_n, 0.0), sigma1 + sigma2.scaled(ratio))

    distance = SetDistance(norm, pieces, name=f"rho(., N[{split.name}])")
    betas = np.linspace(0.0, 1.0, BETA_SAMPLES)
    first: List[Estimate] = []
    second: List[Estimate] = []
    for eps in epsilons:
        one = _side_integrals(s, distance, sides[0], eps, spec, None, workers)
        two = _side_integrals(s, distance, sides[1], eps, spec, betas, workers)
        alpha = float(one["mass"].value) / float(two["mass"].value)
        numerator = one["gradient"] + two["gradient"].scaled(alpha)
        denominator = one["mass"] + two["mass"].scaled(alpha)
        q1 = _quotient(numerator, denominator)
        first.append(q1)
        cutoff.add(split=split.name, family="first", eps=eps, alpha=alpha,
                   numerator=float(numerator.value), denominator=float(denominator.value),
                   quotient=float(q1.value))

        deviation = two["deviation"]
        spread = float(sigma1.value) * (1.0 - betas) + np.asarray(deviation.value)
        j = int(np.argmin(spread))
        best = Estimate(float(spread[j]),
                        float(sigma1.error) * (1.0 - betas[j]) + float(np.asarray(deviation.error)[j]),
                        deviation.converged)
        q2 = _quotient(two["gradient"], best)
        second.append(q2)
        cutoff.add(split=split.name, family="second", eps=eps, alpha=float(betas[j]),
                   numerator=float(two["gradient"].value), denominator=float(best.value),
                   quotient=float(q2.value))

    provenance = {"surface": s.name, "norm": norm.describe(), "split": split.name}
    constants = {"sigma_N": sigma_n, "sigma_1": float(sigma1.value),
                 "sigma_2": float(sigma2.value), "epsilons": list(epsilons)}
    for j in range(1, len(first)):
        result.reports.append(inequality(
            "rayleigh", "cutoff-trend", first[j], first[j - 1],
            constants=dict(constants, eps=epsilons[j], previous_eps=epsilons[j - 1]),
            provenance=dict(provenance)))
    if first:
        result.reports.append(inequality(
            "rayleigh", "cutoff-limit", limit, first[-1],
            constants=dict(constants, eps=epsilons[-1]), provenance=dict(provenance)))
    return {"geometric": geometric, "limit": limit, "first": first, "second": second}


def rayleigh_quotient(surface: SurfaceLike, psi: TestFunction, spec: QuadratureSpec,
                      workers: Optional[int] = None) -> Estimate:
    """int |grad_HS psi| sigma_H / int |psi| sigma_H for an admissible psi"""
    s = as_surface(surface)
    if s.closed:
        mean = surface_integral(s, lambda fb: psi(fb.points), spec, workers=workers)
    elif not vanishes_on_boundary(s, psi):
        raise AdmissibilityError(f"test function '{psi.name}' does not vanish on the boundary "
                                 f"of '{s.name}'")
    gradient = surface_integral(
        s, lambda fb: np.linalg.norm(grad_hs(fb, psi.frame_gradient(fb.points)), axis=1), spec,
        workers=workers)
    mass = surface_integral(s, lambda fb: np.abs(psi(fb.points)), spec, workers=workers)
    if s.closed and abs(float(mean.value)) > MEAN_ZERO_TOL * max(float(mass.value), 1.0):
        raise AdmissibilityError(f"test function '{psi.name}' does not have mean zero on "
                                 f"'{s.name}'")
    if float(mass.value) <= 0:
        raise AdmissibilityError(f"test function '{psi.name}' vanishes on '{s.name}'")
    return _quotient(gradient, mass)


def rayleigh_isop_estimate(surface: SurfaceLike, norm: HomogeneousNorm, spec: QuadratureSpec,
                           splits: Sequence[CoordinateSplit] = (),
                           test_functions: Sequence[TestFunction] = (),
                           epsilons: Sequence[float] = CUTOFF_EPSILONS,
                           workers: Optional[int] = None) -> CheckResult:
    """Upper estimates of Isop and Isop_0, the cutoff quotient sequences and lambda_1 >= Isop^2/4

    The geometric and analytic estimates both approach the infimum from above; their gap is
    reported, not asserted.
    """
    s = as_surface(surface)
    if not splits and not test_functions:
        raise DomainError("rayleigh estimate needs at least one split or test function")
    if sorted(epsilons, reverse=True) != list(epsilons) or min(epsilons, default=1.0) <= 0:
        raise DomainError(f"cutoff widths must be positive and decreasing, got {list(epsilons)}")
    result = CheckResult("rayleigh")
    cutoff = Table(CUTOFF_COLUMNS)
    quotients = Table(["test_function", "quotient", "error"])

    geometric, limits = [], []
    for split in splits:
        found = _split_estimates(s, norm, split, epsilons, spec, workers, result, cutoff)
        if found is not None:
            geometric.append(float(found["geometric"].value))
            limits.append(float(found["limit"].value))

    analytic = []
    for psi in test_functions:
        q = rayleigh_quotient(s, psi, spec, workers)
        analytic.append(float(q.value))
        quotients.add(test_function=psi.name, quotient=float(q.value), error=float(q.error))

    data: Dict[str, Any] = {"closed": s.closed}
    if geometric:
        data["isop0_geometric"] = min(geometric)
        data["isop_limit"] = min(limits)
    if analytic:
        data["isop_analytic"] = min(analytic)
    if geometric and analytic:
        data["consistency_gap"] = min(analytic) - min(geometric)
    candidates = geometric + limits + analytic
    if candidates:
        isop = min(candidates)
        data["isop_estimate"] = isop
        data["lambda1_lower"] = isop * isop / 4.0
        logger.info("Isop estimate %.6g on '%s'; lambda_1 >= %.6g", isop, s.name, isop * isop / 4)
    result.data.update(data)
    result.tables.update({"cutoff": cutoff, "rayleigh": quotients})
    return result
