#!/usr/bin/env python3
"""
Integral Identities Demo - Chapter 5
Coarea, horizontal divergence, Minkowski and first variation, each checked by quadrature.
"""

import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "..", ".."))

from carnot_lab.fields import BumpField, BumpFunction, CoordinateFunction, LeftInvariantField
from carnot_lab.homogeneous_metrics import make_norm
from carnot_lab.inequality_lab import (coarea_check, divergence_check, first_variation_check,
                                       minkowski_check)
from carnot_lab.quadrature import QuadratureSpec
from carnot_lab.stratified_algebra import resolve_group
from carnot_lab.surface_presets import build_surface


def show(result):
    for report in result.reports:
        print(f"   {report.tag:28s} lhs={report.lhs: .6f}  rhs={report.rhs: .6f}  "
              f"{report.verdict.value}")
    for warning in result.warnings:
        print(f"   note: {warning}")


class IdentitiesDemo:
    """Run every identity on the square and the cylinder"""

    def __init__(self):
        self.h1 = resolve_group("h1")
        self.korany = make_norm(self.h1, "korany")
        self.spec = QuadratureSpec(rel_tol=1e-6, abs_tol=1e-10)
        self.square = build_surface("h1-square", self.h1)
        self.cylinder = build_surface("h1-cylinder", self.h1,
                                      {"radius": 2.0, "half_height": 1.0})

    def demo_coarea(self):
        print("\n🗺️  Coarea with phi = x2 on the square")
        show(coarea_check(self.square, CoordinateFunction(self.h1, 1), self.spec))

    def demo_divergence(self):
        print("\n➗ Divergence theorem")
        show(divergence_check(self.square, LeftInvariantField(self.h1, [0.0, 1.0, 0.0]),
                              self.spec))
        bump = BumpFunction(self.korany, [2.0, 0.0, 0.0], 0.7)
        print("   compactly supported field on the cylinder:")
        show(divergence_check(self.cylinder, BumpField(bump, 0), self.spec, refine=False))

    def demo_minkowski(self):
        print("\n📏 Minkowski formula")
        show(minkowski_check(self.square, self.spec))

    def demo_first_variation(self):
        print("\n🌊 First variation of sigma_H under right translation")
        show(first_variation_check(self.cylinder, [1.0, 0.0, 0.0], self.spec))

    def run_demo(self):
        print("=" * 60)
        print("INTEGRAL IDENTITIES")
        print("=" * 60)
        self.demo_coarea()
        self.demo_divergence()
        self.demo_minkowski()
        self.demo_first_variation()


if __name__ == "__main__":
    IdentitiesDemo().run_demo()
