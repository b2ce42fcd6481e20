#!/usr/bin/env python3
"""
Homogeneous Norms Demo - Chapter 2
Koranyi and power-lambda gauges, layer constants and the metric-factor sandwich.
"""

import os
import sys

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "..", ".."))

from carnot_lab.errors import ConfigError
from carnot_lab.homogeneous_metrics import layer_constants, make_norm, metric_factor_bounds
from carnot_lab.stratified_algebra import resolve_group


class NormsDemo:
    """Compare the two gauge families on H^1 and Engel"""

    def __init__(self):
        self.h1 = resolve_group("h1")
        self.engel = resolve_group("engel")

    def demo_homogeneity(self):
        print("\n📏 rho(delta_t x) = t rho(x)")
        korany = make_norm(self.h1, "korany")
        x = np.array([0.3, -0.4, 0.2])
        for t in (0.5, 1.0, 2.0):
            print(f"   t={t:3.1f}  rho(delta_t x)={float(korany(self.h1.dilate(t, x))):.6f}  "
                  f"t rho(x)={t * float(korany(x)):.6f}")

    def demo_rejected_norms(self):
        print("\n🚫 Norm constraints")
        attempts = [("korany", None, self.engel), ("power-lambda", 4, self.engel),
                    ("power-lambda", 6, self.engel)]
        for kind, lam, group in attempts:
            try:
                norm = make_norm(group, kind, lam)
                print(f"   {kind:12s} lambda={lam}: accepted ({norm!r})")
            except ConfigError as exc:
                print(f"   {kind:12s} lambda={lam}: rejected at '{exc.key}'")

    def demo_layer_constants(self):
        print("\n🧮 Layer constants |x_{H_i}| <= c_i rho(x)^i")
        for group, kind, lam in ((self.h1, "korany", None), (self.engel, "power-lambda", 6)):
            consts = layer_constants(make_norm(group, kind, lam))
            listed = ", ".join(f"c_{i}={c:.4f}" for i, c in sorted(consts.c.items()))
            print(f"   {group.name:6s} {kind:12s} {listed}")

    def demo_metric_factor(self):
        print("\n🥪 Metric-factor bounds k1 <= kappa <= k2")
        bounds = metric_factor_bounds(make_norm(self.h1, "korany"))
        print(f"   R1={bounds.R1:.4f}  R2={bounds.R2:.4f}")
        print(f"   k1={bounds.k1:.4f}  k2={bounds.k2:.4f}")

    def run_demo(self):
        print("=" * 60)
        print("HOMOGENEOUS NORMS")
        print("=" * 60)
        self.demo_homogeneity()
        self.demo_rejected_norms()
        self.demo_layer_constants()
        self.demo_metric_factor()


if __name__ == "__main__":
    NormsDemo().run_demo()
