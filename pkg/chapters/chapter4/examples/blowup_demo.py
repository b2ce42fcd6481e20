#!/usr/bin/env python3
"""
Blow-up Demo - Chapter 4
Density of sigma_H in small balls: vertical planes, characteristic points and degenerate cases.
"""

import os
import sys

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "..", ".."))

from carnot_lab.blowup import BlowupKind, blowup_density, scanned_density
from carnot_lab.homogeneous_metrics import make_norm, metric_factor_bounds
from carnot_lab.quadrature import QuadratureSpec
from carnot_lab.stratified_algebra import resolve_group
from carnot_lab.surface_presets import build_surface, surface_from_config


class BlowupDemo:
    """Compute kappa at a handful of points"""

    def __init__(self):
        self.h1 = resolve_group("h1")
        self.korany = make_norm(self.h1, "korany")
        self.spec = QuadratureSpec(rel_tol=1e-6, abs_tol=1e-10)

    def demo_cases(self):
        print("\n🔬 Density at the identity")
        bounds = metric_factor_bounds(self.korany)
        for name in ("h1-vertical-plane", "h1-t0-plane", "h1-paraboloid"):
            result = blowup_density(build_surface(name, self.h1), [0.0, 0.0, 0.0],
                                    self.korany, self.spec)
            print(f"   {name:18s} {result.kind.value:10s} kappa={result.kappa:.6f}")
            if result.kind is BlowupKind.CASE_A:
                print(f"   {'':18s} k1={bounds.k1:.4f} <= kappa <= k2={bounds.k2:.4f}")

    def demo_scan(self):
        print("\n📉 sigma_H(S cap B(x, R)) / R^3 approaches kappa")
        result = scanned_density(build_surface("h1-paraboloid", self.h1), [0.0, 0.0, 0.0],
                                 self.korany, [1.0, 0.5, 0.25, 0.125], self.spec)
        for point in result.scan:
            print(f"   R={point.radius:5.3f}  ratio={point.ratio:.6f}")
        print(f"   limit kappa={result.kappa:.6f}")

    def demo_degenerate(self):
        print("\n🕳️  A low-order vertical term on Engel")
        engel = resolve_group("engel")
        surface = surface_from_config(engel, {"alpha": 4, "boxes": [[[-1, -1, -1], [1, 1, 1]]],
                                              "height": {"0,0,1": 1.0}})
        result = blowup_density(surface, np.zeros(4), make_norm(engel, "power-lambda", 6),
                                self.spec)
        print(f"   kind={result.kind.value}  low-order terms={result.taylor.low_order}")

    def run_demo(self):
        print("=" * 60)
        print("BLOW-UP DENSITIES")
        print("=" * 60)
        self.demo_cases()
        self.demo_scan()
        self.demo_degenerate()


if __name__ == "__main__":
    BlowupDemo().run_demo()
