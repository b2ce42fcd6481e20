#!/usr/bin/env python3
"""
Homogeneous Metrics - Carnot Lab
Smooth homogeneous norms, their frame gradients, layer-comparison constants and
metric-factor bounds.
"""

import logging
from typing import Dict, List, Optional, Any
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import optimize
from scipy.stats import qmc

from carnot_lab.errors import ConfigError, SingularityError
from carnot_lab.stratified_algebra import CarnotGroup, GroupPoint, TangentVector

logger = logging.getLogger(__name__)

DEFAULT_SPHERE_SAMPLES = 2 ** 14
LAYER_MARGIN = 1.05
FD_STEP = 1e-6


class NormKind(Enum):
    KORANY = "korany"
    POWER_LAMBDA = "power-lambda"


@dataclass
class LayerConstants:
    """c_i with |x_{H_i}| <= c_i rho(x)^i for i = 2..k"""
    c: Dict[int, float]
    samples: int
    margin: float = LAYER_MARGIN

    def of(self, layer: int) -> float:
        return self.c.get(layer, 0.0)

    def as_dict(self) -> Dict[str, Any]:
        return {"c": {str(i): v for i, v in sorted(self.c.items())},
                "samples": self.samples, "margin": self.margin}


@dataclass
class MetricFactorBounds:
    """k1 <= kappa(nu_H) <= k2 from the ball-box comparison"""
    k1: float
    k2: float
    R1: float
    R2: float
    details: Dict[str, Any] = field(default_factory=dict)

    def __iter__(self):
        return iter((self.k1, self.k2))


def _is_h_type(group: CarnotGroup, tol: float = 1e-12) -> bool:
    mats = group.curvature_matrices()
    eye = np.eye(group.h1)
    for a, A in enumerate(mats):
        for b, B in enumerate(mats):
            target = -2.0 * eye if a == b else np.zeros_like(eye)
            if np.max(np.abs(A @ B + B @ A - target)) > tol:
                return False
    return bool(mats)


class HomogeneousNorm:
    """Smooth gauge rho with rho(dilate(t, x)) = t rho(x)"""

    def __init__(self, group: CarnotGroup, kind: NormKind = NormKind.KORANY,
                 lam: Optional[int] = None):
        self.group = group
        self.kind = NormKind(kind)
        self.lam = lam
        if self.kind is NormKind.KORANY:
            if group.k != 2 or not _is_h_type(group):
                raise ConfigError(f"Korany norm needs a 2-step group with "
                                  f"C^a C^b + C^b C^a = -2 delta_ab; '{group.name}' is not one",
                                  key="norm.kind")
        else:
            if lam is None or int(lam) != lam or lam <= 0:
                raise ConfigError(f"lambda must be a positive integer, got {lam}", key="norm.lambda")
            self.lam = int(lam)
            bad = [i for i in range(1, group.k + 1) if self.lam % i]
            if bad:
                raise ConfigError(f"lambda={self.lam} is not divisible by layer orders {bad}",
                                  key="norm.lambda")
        self._layer_cache: Dict[int, LayerConstants] = {}
        self._bounds_cache: Dict[int, MetricFactorBounds] = {}

    def __repr__(self) -> str:
        if self.kind is NormKind.KORANY:
            return f"HomogeneousNorm(korany, {self.group.name})"
        return f"HomogeneousNorm(power-lambda={self.lam}, {self.group.name})"

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind.value, "lambda": self.lam, "group": self.group.name}

    def __call__(self, x: np.ndarray) -> np.ndarray:
        """rho at coordinates x of shape (..., n)"""
        x = np.asarray(x, dtype=float)
        g = self.group
        if self.kind is NormKind.KORANY:
            r2 = np.sum(x[..., g.layer_slice(1)] ** 2, axis=-1)
            v2 = np.sum(x[..., g.layer_slice(2)] ** 2, axis=-1)
            return (r2 * r2 + 16.0 * v2) ** 0.25
        total = np.zeros(x.shape[:-1])
        for i in range(1, g.k + 1):
            layer = np.sqrt(np.sum(x[..., g.layer_slice(i)] ** 2, axis=-1))
            total = total + layer ** (self.lam // i)
        return total ** (1.0 / self.lam)

    def distance(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """rho(x^{-1} y)"""
        return self(self.group.mul(self.group.inverse(x), y))

    def gradient(self, x: np.ndarray) -> np.ndarray:
        """Riemannian gradient in frame coordinates, shape (..., n)"""
        x = np.asarray(x, dtype=float)
        rho = self(x)
        if np.any(rho == 0.0):
            raise SingularityError("norm gradient is undefined at the identity")
        g = self.group
        if self.kind is NormKind.KORANY:
            euclid = np.zeros_like(x)
            r2 = np.sum(x[..., g.layer_slice(1)] ** 2, axis=-1)
            rho3 = rho ** 3
            euclid[..., g.layer_slice(1)] = (r2 / rho3)[..., None] * x[..., g.layer_slice(1)]
            euclid[..., g.layer_slice(2)] = (8.0 / rho3)[..., None] * x[..., g.layer_slice(2)]
            return np.einsum("...ij,...i->...j", g.frame(x), euclid)
        h = FD_STEP * np.maximum(1.0, rho)
        out = np.empty_like(x)
        for I in range(g.n):
            step = np.zeros_like(x)
            step[..., I] = h
            out[..., I] = (self(g.mul(x, step)) - self(g.mul(x, -step))) / (2.0 * h)
        return out

    def unit_sphere_samples(self, count: int = DEFAULT_SPHERE_SAMPLES) -> np.ndarray:
        """Deterministic points on {rho = 1}: Halton cloud plus axis points, dilation-normalized"""
        g = self.group
        cloud = qmc.Halton(d=g.n, scramble=False).random(count) * 2.0 - 1.0
        axes = np.vstack([np.eye(g.n), -np.eye(g.n)])
        pts = np.vstack([axes, cloud])
        rho = self(pts)
        pts = pts[rho > 1e-12]
        rho = rho[rho > 1e-12]
        return pts * np.power(1.0 / rho[:, None], g.ord[None, :])


def norm_eval(rho: HomogeneousNorm, x: GroupPoint) -> float:
    return float(rho(x.coords))


def norm_gradient(rho: HomogeneousNorm, x: GroupPoint) -> TangentVector:
    return TangentVector(rho.gradient(x.coords), x)


def layer_constants(rho: HomogeneousNorm, samples: int = DEFAULT_SPHERE_SAMPLES) -> LayerConstants:
    """c_i = margin * max |x_{H_i}| over sampled points of the unit sphere"""
    if samples in rho._layer_cache:
        return rho._layer_cache[samples]
    g = rho.group
    pts = rho.unit_sphere_samples(samples)
    c = {}
    for i in range(2, g.k + 1):
        c[i] = LAYER_MARGIN * float(np.max(np.linalg.norm(pts[:, g.layer_slice(i)], axis=1)))
    result = LayerConstants(c=c, samples=samples)
    rho._layer_cache[samples] = result
    logger.debug("Layer constants for %r: %s", rho, c)
    return result


def _box_face_samples(group: CarnotGroup, count: int) -> np.ndarray:
    """Points on the boundary of Box(0,1): faces and corners of [-1,1]^n"""
    n = group.n
    per_face = max(1, count // (2 * n))
    cloud = qmc.Halton(d=n, scramble=False).random(per_face) * 2.0 - 1.0
    faces: List[np.ndarray] = []
    for I in range(n):
        for sign in (-1.0, 1.0):
            face = cloud.copy()
            face[:, I] = sign
            faces.append(face)
    if n <= 12:
        corners = np.array(np.meshgrid(*[[-1.0, 1.0]] * n, indexing="ij")).reshape(n, -1).T
        faces.append(corners)
    return np.vstack(faces)


def _box_scale(group: CarnotGroup, r: float) -> np.ndarray:
    return np.power(r, group.ord.astype(float))


def metric_factor_bounds(rho: HomogeneousNorm,
                         samples: int = DEFAULT_SPHERE_SAMPLES) -> MetricFactorBounds:
    """Box(0,R1) in B(0,1) in Box(0,R2), turned into k1 <= kappa <= k2.

    k1 is (2 R1)^(Q-1) times the measure of the smallest vertical section of
    Box(0,1/2), a product of 2^((1-i) h_i) over the layers. It reduces to the bare
    (2 R1)^(Q-1) only when every such section has unit measure, which no group of
    step two or more satisfies; the smaller constant is the one the inclusion proves.
    """
    if samples in rho._bounds_cache:
        return rho._bounds_cache[samples]
    g = rho.group
    faces = _box_face_samples(g, samples)
    sphere = rho.unit_sphere_samples(samples)

    def box_excess(r: float) -> float:
        return float(np.max(rho(faces * _box_scale(g, r)))) - 1.0

    def box_deficit(r: float) -> float:
        worst = -np.inf
        for i in range(1, g.k + 1):
            sup = float(np.max(np.abs(sphere[:, g.layer_slice(i)])))
            worst = max(worst, sup - r ** i)
        return worst

    upper = 1.0
    while box_excess(upper) < 0.0:
        upper *= 2.0
    R1 = optimize.bisect(box_excess, 1e-6, upper, xtol=1e-13)
    # stay on the inside of the ball
    R1 *= 1.0 - 1e-9

    upper = 1.0
    while box_deficit(upper) > 0.0:
        upper *= 2.0
    R2 = optimize.bisect(box_deficit, 1e-6, upper, xtol=1e-13) * (1.0 + 1e-9)

    # sections of Box(0,1/2) by vertical hyperplanes: >= 1 horizontally, 2^{1-i} per layer-i side
    vertical_section = float(np.prod([2.0 ** ((1 - i) * h)
                                      for i, h in enumerate(g.algebra.growth, start=1)]))
    k1 = (2.0 * R1) ** (g.Q - 1) * vertical_section
    k2 = np.sqrt(g.n - 1.0) * (2.0 * R2) ** (g.Q - 1)
    result = MetricFactorBounds(k1=float(k1), k2=float(k2), R1=float(R1), R2=float(R2),
                                details={"samples": samples, "vertical_section": vertical_section})
    rho._bounds_cache[samples] = result
    return result


def make_norm(group: CarnotGroup, kind: str, lam: Optional[int] = None) -> HomogeneousNorm:
    try:
        norm_kind = NormKind(kind)
    except ValueError:
        raise ConfigError(f"unknown norm kind '{kind}'; known: {[k.value for k in NormKind]}",
                          key="norm.kind") from None
    return HomogeneousNorm(group, norm_kind, lam)

