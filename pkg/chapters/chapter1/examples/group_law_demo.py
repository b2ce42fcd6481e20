#!/usr/bin/env python3
"""
Group Law Demo - Chapter 1
Heisenberg and Engel groups: products, inverses, dilations and the left-invariant frame.
"""

import os
import sys

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "..", ".."))

from carnot_lab.stratified_algebra import (ALGEBRA_PRESETS, heisenberg_algebra, resolve_group,
                                           verify_structure)


class GroupLawDemo:
    """Walk through the group operations of the presets"""

    def __init__(self, seed: int = 7):
        self.rng = np.random.default_rng(seed)

    def demo_presets(self):
        print("\n📐 Algebra presets")
        for name in sorted(ALGEBRA_PRESETS):
            group = resolve_group(name)
            print(f"   {name:8s} n={group.n}  step k={group.k}  Q={group.Q}  "
                  f"layers={list(group.algebra.growth)}")

    def demo_heisenberg_product(self):
        print("\n✖️  Heisenberg product x * y = (x + y, t + s + (x1 y2 - x2 y1) / 2)")
        h1 = resolve_group("h1")
        x = np.array([1.0, 0.0, 0.5])
        y = np.array([0.0, 2.0, -0.25])
        print(f"   x = {x}, y = {y}")
        print(f"   x * y = {h1.mul(x, y)}")
        print(f"   y * x = {h1.mul(y, x)}  (the group is not commutative)")
        print(f"   x^-1 * x = {h1.mul(h1.inverse(x), x)}")

    def demo_dilations(self):
        print("\n🔍 Dilations are automorphisms")
        engel = resolve_group("engel")
        x, y = self.rng.uniform(-1, 1, size=(2, engel.n))
        lam = 1.7
        left = engel.dilate(lam, engel.mul(x, y))
        right = engel.mul(engel.dilate(lam, x), engel.dilate(lam, y))
        print(f"   |delta(x*y) - delta(x)*delta(y)| = {np.max(np.abs(left - right)):.2e}")

    def demo_frame(self):
        print("\n🧭 Left-invariant frame at x = (1, 2, 0)")
        h1 = resolve_group("h1")
        frame = h1.frame(np.array([1.0, 2.0, 0.0]))
        for j, row in enumerate(frame, start=1):
            print(f"   X{j} = {np.round(row, 6)}")
        print(f"   curvature constant C = {h1.curvature_constant():.6g}")

    def demo_structure_check(self):
        print("\n✅ Structure checks on H^2")
        report = verify_structure(heisenberg_algebra(2))
        for name, passed in report.checks.items():
            print(f"   {name:10s} {'passed' if passed else 'FAILED'}")
        print(f"   homogeneous dimension Q = {report.Q}")

    def run_demo(self):
        print("=" * 60)
        print("CARNOT GROUPS: THE GROUP LAW")
        print("=" * 60)
        self.demo_presets()
        self.demo_heisenberg_product()
        self.demo_dilations()
        self.demo_frame()
        self.demo_structure_check()


if __name__ == "__main__":
    GroupLawDemo().run_demo()
