#!/usr/bin/env python3
"""
Characteristic Locus Demo - Chapter 3
Where the horizontal normal vanishes, and how integrals are taken around it.
"""

import math
import os
import sys

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "..", ".."))

from carnot_lab.errors import CharacteristicPointError
from carnot_lab.hypersurface import (characteristic_locus, excised_integral,
                                     horizontal_mean_curvature)
from carnot_lab.quadrature import QuadratureSpec
from carnot_lab.stratified_algebra import resolve_group
from carnot_lab.surface_presets import build_surface


def demo_locus():
    h1 = resolve_group("h1")
    print("\n🎯 Characteristic clusters")
    for name in ("h1-square", "h1-disk", "h1-paraboloid", "h1-capped-cylinder"):
        surface = build_surface(name, h1)
        locus = characteristic_locus(surface)
        points = [np.round(p, 3).tolist() for p in locus.cluster_points(surface)]
        print(f"   {name:20s} clusters={locus.cluster_count}  at {points}")


def demo_curvature_at_locus():
    h1 = resolve_group("h1")
    disk = build_surface("h1-disk", h1)
    print("\n⚠️  Curvature at the characteristic point of the disk")
    try:
        horizontal_mean_curvature(disk, [0.0, 0.0])
    except CharacteristicPointError as exc:
        print(f"   refused: {exc}")


def demo_excision():
    h1 = resolve_group("h1")
    disk = build_surface("h1-disk", h1)
    spec = QuadratureSpec(rel_tol=1e-6, abs_tol=1e-10)
    result = excised_integral(disk, lambda fb: np.ones(len(fb)), spec)
    print("\n✂️  Excised integral of 1 over the disk")
    print(f"   kept={result.estimate.value:.6f}  excised mass={result.excised_mass:.2e}  "
          f"flagged cells={result.flagged_cells}")
    print(f"   kept + excised = {result.estimate.value + result.excised_mass:.6f}  "
          f"(pi/3 = {math.pi / 3.0:.6f})")


if __name__ == "__main__":
    print("=" * 60)
    print("THE CHARACTERISTIC LOCUS")
    print("=" * 60)
    demo_locus()
    demo_curvature_at_locus()
    demo_excision()
