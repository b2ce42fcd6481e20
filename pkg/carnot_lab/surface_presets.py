#!/usr/bin/env python3
"""
Surface Presets - Carnot Lab
Named test surfaces and the graph-surface config builder.
"""

import logging
from typing import Callable, Dict, List, Any, Mapping, Optional, Sequence

import numpy as np

from carnot_lab.errors import ConfigError
from carnot_lab.hypersurface import (BoundaryCurve, CallableHeight, GraphSurface,
                                     ParameterDomain, PatchedSurface)
from carnot_lab.polynomials import Polynomial
from carnot_lab.stratified_algebra import CarnotGroup

logger = logging.getLogger(__name__)


def box_edges(patch: int, lo: Sequence[float], hi: Sequence[float],
              sides: Sequence[str] = ("bottom", "right", "top", "left")) -> List[BoundaryCurve]:
    """Counter-clockwise edges of a 2D parameter box"""
    (a0, a1), (b0, b1) = lo, hi
    corners = {"bottom": ((a0, a1), (b0, a1)), "right": ((b0, a1), (b0, b1)),
               "top": ((b0, b1), (a0, b1)), "left": ((a0, b1), (a0, a1))}
    return [BoundaryCurve.segment(patch, *corners[side], name=f"{side}[{patch}]") for side in sides]


def unit_circle(patch: int, radius: float = 1.0) -> BoundaryCurve:
    return BoundaryCurve(
        patch,
        lambda s: radius * np.stack([np.cos(s), np.sin(s)], axis=-1),
        0.0, 2.0 * np.pi, 1,
        velocity=lambda s: radius * np.stack([-np.sin(s), np.cos(s)], axis=-1),
        name=f"circle(r={radius:g})",
    )


def _require(group: CarnotGroup, names: Sequence[str], preset: str) -> None:
    if group.name not in names:
        raise ConfigError(f"surface preset '{preset}' needs group {list(names)}, got '{group.name}'",
                          key="surface")


def _flat(nvars: int) -> Polynomial:
    return Polynomial.zero(nvars)


def vertical_plane(group: CarnotGroup, half: float = 2.0, name: str = "vertical-plane") -> PatchedSurface:
    """{x1 = 0} over a cube of half-width `half`; edges registered when n = 3"""
    d = group.n - 1
    lo, hi = [-half] * d, [half] * d
    patch = GraphSurface(group, 0, ParameterDomain.box(lo, hi), _flat(d), 1, name)
    if d == 2:
        return PatchedSurface([patch], box_edges(0, lo, hi), name)
    return PatchedSurface([patch], [], name, boundary_traced=False)


def h1_vertical_plane(group: CarnotGroup, params: Mapping[str, Any]) -> PatchedSurface:
    _require(group, ["h1"], "h1-vertical-plane")
    return vertical_plane(group, float(params.get("half_width", 2.0)), "h1-vertical-plane")


def h1_square(group: CarnotGroup, params: Mapping[str, Any]) -> PatchedSurface:
    _require(group, ["h1"], "h1-square")
    return vertical_plane(group, float(params.get("half_width", 1.0)), "h1-square")


def engel_vertical_plane(group: CarnotGroup, params: Mapping[str, Any]) -> PatchedSurface:
    _require(group, ["engel"], "engel-vertical-plane")
    return vertical_plane(group, float(params.get("half_width", 2.0)), "engel-vertical-plane")


def h1_t0_plane(group: CarnotGroup, params: Mapping[str, Any]) -> PatchedSurface:
    _require(group, ["h1"], "h1-t0-plane")
    half = float(params.get("half_width", 2.0))
    lo, hi = [-half, -half], [half, half]
    patch = GraphSurface(group, 2, ParameterDomain.box(lo, hi), _flat(2), 1, "h1-t0-plane")
    return PatchedSurface([patch], box_edges(0, lo, hi), "h1-t0-plane")


def h1_disk(group: CarnotGroup, params: Mapping[str, Any]) -> PatchedSurface:
    _require(group, ["h1"], "h1-disk")
    r = float(params.get("radius", 1.0))
    domain = ParameterDomain.box([-r, -r], [r, r], clip=lambda z: np.sum(z ** 2, axis=-1) - r * r,
                                 name=f"disk(r={r:g})")
    patch = GraphSurface(group, 2, domain, _flat(2), 1, "h1-disk")
    return PatchedSurface([patch], [unit_circle(0, r)], "h1-disk")


def h1_paraboloid(group: CarnotGroup, params: Mapping[str, Any]) -> PatchedSurface:
    _require(group, ["h1"], "h1-paraboloid")
    half = float(params.get("half_width", 1.0))
    a = float(params.get("coefficient", 1.0))
    lo, hi = [-half, -half], [half, half]
    height = Polynomial({(2, 0): a, (0, 2): a}, 2)
    patch = GraphSurface(group, 2, ParameterDomain.box(lo, hi), height, 1, "h1-paraboloid")
    return PatchedSurface([patch], box_edges(0, lo, hi), "h1-paraboloid")


def _arc_height(radius: float, sign: float) -> CallableHeight:
    """sign * sqrt(R^2 - z_1^2), independent of z_2"""

    def value(z):
        return sign * np.sqrt(np.maximum(radius * radius - z[..., 0] ** 2, 0.0))

    def gradient(z):
        root = np.sqrt(np.maximum(radius * radius - z[..., 0] ** 2, 1e-300))
        return np.stack([-sign * z[..., 0] / root, np.zeros_like(root)], axis=-1)

    return CallableHeight(value, 2, gradient, name=f"arc(R={radius:g},{'+' if sign > 0 else '-'})")


def cylinder_patches(group: CarnotGroup, radius: float, t_lo: float, t_hi: float) -> List[GraphSurface]:
    """{|x_H| = R} as four graphs with outward orientation, seams on the diagonals"""
    w = radius / np.sqrt(2.0)
    domain = ParameterDomain.box([-w, t_lo], [w, t_hi])
    patches = []
    for alpha in (0, 1):
        for sign in (1.0, -1.0):
            label = f"cyl[{'x' if alpha == 0 else 'y'}{'+' if sign > 0 else '-'}]"
            patches.append(GraphSurface(group, alpha, domain, _arc_height(radius, sign),
                                        int(sign), label))
    return patches


def h1_cylinder(group: CarnotGroup, params: Mapping[str, Any]) -> PatchedSurface:
    _require(group, ["h1"], "h1-cylinder")
    r = float(params.get("radius", 1.0))
    h = float(params.get("half_height", 1.0))
    if r <= 0 or h <= 0:
        raise ConfigError("cylinder radius and half_height must be positive", key="surface.params")
    patches = cylinder_patches(group, r, -h, h)
    w = r / np.sqrt(2.0)
    curves: List[BoundaryCurve] = []
    for index in range(len(patches)):
        curves.extend(box_edges(index, [-w, -h], [w, h], sides=("bottom", "top")))
    return PatchedSurface(patches, curves, f"h1-cylinder(R={r:g})")


def _cap_height(rho4: float, sign: float) -> CallableHeight:
    """sign * sqrt(rho0^4 - |z|^4) / 4: a piece of the Korany sphere of radius rho0"""

    def value(z):
        r4 = np.sum(z ** 2, axis=-1) ** 2
        return sign * np.sqrt(np.maximum(rho4 - r4, 0.0)) / 4.0

    def gradient(z):
        r2 = np.sum(z ** 2, axis=-1)
        root = np.sqrt(np.maximum(rho4 - r2 * r2, 1e-300))
        return -sign * (r2 / (2.0 * root))[..., None] * z

    return CallableHeight(value, 2, gradient, name=f"korany-cap({'+' if sign > 0 else '-'})")


def h1_capped_cylinder(group: CarnotGroup, params: Mapping[str, Any]) -> PatchedSurface:
    """Closed surface: unit cylinder |t| <= a closed by two Korany-sphere caps"""
    _require(group, ["h1"], "h1-capped-cylinder")
    a = float(params.get("half_height", 0.5))
    if a <= 0:
        raise ConfigError("half_height must be positive", key="surface.params")
    rho4 = 1.0 + 16.0 * a * a
    patches: List[GraphSurface] = cylinder_patches(group, 1.0, -a, a)
    disk = ParameterDomain.box([-1.0, -1.0], [1.0, 1.0],
                               clip=lambda z: np.sum(z ** 2, axis=-1) - 1.0, name="disk")
    patches.append(GraphSurface(group, 2, disk, _cap_height(rho4, 1.0), 1, "cap[+]"))
    patches.append(GraphSurface(group, 2, disk, _cap_height(rho4, -1.0), -1, "cap[-]"))
    return PatchedSurface(patches, [], "h1-capped-cylinder")


SURFACE_PRESETS: Dict[str, Callable[[CarnotGroup, Mapping[str, Any]], PatchedSurface]] = {
    "h1-vertical-plane": h1_vertical_plane,
    "h1-square": h1_square,
    "h1-t0-plane": h1_t0_plane,
    "h1-disk": h1_disk,
    "h1-paraboloid": h1_paraboloid,
    "h1-cylinder": h1_cylinder,
    "h1-capped-cylinder": h1_capped_cylinder,
    "engel-vertical-plane": engel_vertical_plane,
}


def build_surface(name: str, group: CarnotGroup,
                  params: Optional[Mapping[str, Any]] = None) -> PatchedSurface:
    if name not in SURFACE_PRESETS:
        raise ConfigError(f"unknown surface preset '{name}'; known: {sorted(SURFACE_PRESETS)}",
                          key="surface")
    return SURFACE_PRESETS[name](group, params or {})


def surface_from_config(group: CarnotGroup, data: Mapping[str, Any]) -> PatchedSurface:
    """Graph surface from a config mapping

    Keys: alpha (1-based), boxes ([[lo...], [hi...]] pairs), height (exponent -> value),
    orientation, clip_radius (optional Euclidean disk clip), edges (register box edges).
    """
    try:
        alpha = int(data["alpha"]) - 1
        boxes = [(np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)) for lo, hi in data["boxes"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"graph surface needs 'alpha' and 'boxes' ({exc})", key="surface.graph") from None
    d = group.n - 1
    height = Polynomial.from_config(data.get("height", {}), d)
    clip = None
    if "clip_radius" in data:
        r = float(data["clip_radius"])
        clip = lambda z: np.sum(z ** 2, axis=-1) - r * r  # noqa: E731
    name = str(data.get("name", "graph"))
    try:
        patch = GraphSurface(group, alpha, ParameterDomain(boxes, clip), height,
                             int(data.get("orientation", 1)), name)
    except ValueError as exc:
        raise ConfigError(str(exc), key="surface.graph") from None
    curves: List[BoundaryCurve] = []
    traced = True
    if data.get("edges", True):
        if d == 2 and len(boxes) == 1 and clip is None:
            curves = box_edges(0, boxes[0][0], boxes[0][1])
        else:
            traced = False
    return PatchedSurface([patch], curves, name, boundary_traced=traced)
