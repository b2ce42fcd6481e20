#!/usr/bin/env python3
"""
H-Perimeter Demo - Chapter 3
Surface presets, horizontal frames, mean curvature and sigma_H against the Riemannian area.
"""

import math
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "..", ".."))

from carnot_lab.hypersurface import (dilate_surface, h_perimeter, horizontal_mean_curvature,
                                     riemannian_area, surface_frame)
from carnot_lab.quadrature import QuadratureSpec
from carnot_lab.stratified_algebra import resolve_group
from carnot_lab.surface_presets import build_surface


class PerimeterDemo:
    """Measure a few Heisenberg surfaces"""

    def __init__(self):
        self.h1 = resolve_group("h1")
        self.spec = QuadratureSpec(rel_tol=1e-6, abs_tol=1e-10)

    def demo_measures(self):
        print("\n📐 sigma_H and Riemannian area")
        expected = {"h1-square": 4.0, "h1-disk": math.pi / 3.0}
        for name in ("h1-square", "h1-disk", "h1-paraboloid"):
            surface = build_surface(name, self.h1)
            sigma = h_perimeter(surface, self.spec)
            area = riemannian_area(surface, self.spec)
            note = f"  (exact {expected[name]:.6f})" if name in expected else ""
            print(f"   {name:14s} sigma_H={sigma.value:.6f} +- {sigma.error:.1e}  "
                  f"area={area.value:.6f}{note}")

    def demo_frame(self):
        print("\n🧭 Horizontal frame on the t = 0 plane at (1, 0, 0)")
        data = surface_frame(build_surface("h1-t0-plane", self.h1), [1.0, 0.0])
        print(f"   nu_H = {data.nuH}, |P_H nu| = {data.pH_nu:.6f}")
        print(f"   varpi on the second layer = {data.varpi_layers[2]}")

    def demo_curvature(self):
        print("\n🌀 Horizontal mean curvature of |x_H| = R")
        for radius in (1.0, 2.0, 4.0):
            cylinder = build_surface("h1-cylinder", self.h1, {"radius": radius})
            H = horizontal_mean_curvature(cylinder, [0.0, 0.0], patch=0)
            print(f"   R={radius:3.1f}  H={H:.6f}  1/R={1.0 / radius:.6f}")

    def demo_scaling(self):
        print("\n🔍 sigma_H scales with t^(Q-1) = t^3 under dilations")
        square = build_surface("h1-square", self.h1)
        for t in (0.5, 2.0):
            sigma = h_perimeter(dilate_surface(square, t), self.spec)
            print(f"   t={t:3.1f}  sigma_H={sigma.value:.6f}  4 t^3={4.0 * t ** 3:.6f}")

    def run_demo(self):
        print("=" * 60)
        print("HYPERSURFACES AND H-PERIMETER")
        print("=" * 60)
        self.demo_measures()
        self.demo_frame()
        self.demo_curvature()
        self.demo_scaling()


if __name__ == "__main__":
    PerimeterDemo().run_demo()
