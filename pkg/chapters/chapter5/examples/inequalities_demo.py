#!/usr/bin/env python3
"""
Inequalities Demo - Chapter 5
Linear isoperimetric, isoperimetric, Sobolev, monotonicity and Poincare checks on simple surfaces.
"""

import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "..", ".."))

from carnot_lab.errors import PreconditionError
from carnot_lab.fields import BumpFunction
from carnot_lab.homogeneous_metrics import make_norm
from carnot_lab.inequality_lab import (admissible_radius, isoperimetric_constants,
                                       isoperimetric_report, linear_isoperimetric_check,
                                       monotonicity_scan, poincare_check, sobolev_check)
from carnot_lab.quadrature import QuadratureSpec
from carnot_lab.stratified_algebra import resolve_group
from carnot_lab.surface_presets import build_surface

ORIGIN = [0.0, 0.0, 0.0]


def show(result):
    for report in result.reports:
        ratio = report.slack_ratio
        ratio_text = "n/a" if ratio is None else f"{ratio:.3f}"
        print(f"   {report.tag:32s} lhs={report.lhs:.5f}  rhs={report.rhs:.5f}  "
              f"rhs/lhs={ratio_text}  {report.verdict.value}")


def demo_linear(square, korany, spec):
    print("\n📐 Linear isoperimetric inequality")
    result = linear_isoperimetric_check(square, korany, spec)
    print(f"   circumradius R = {result.data['R']:.5f}")
    show(result)


def demo_isoperimetric(square, korany, spec):
    print("\n⭕ Isoperimetric and Sobolev inequalities")
    consts = isoperimetric_constants(korany)
    print(f"   C_S = {consts['C_S']:.4f}, C_I = {consts['C_I']:.4f}")
    show(isoperimetric_report(square, korany, spec))
    show(sobolev_check(square, BumpFunction(korany, ORIGIN, 0.7), korany, spec))


def demo_monotonicity(plane, korany, spec):
    print("\n📈 Monotonicity of sigma_H(S_t) / t^3")
    result = monotonicity_scan(plane, ORIGIN, korany, [0.25, 0.5, 1.0], spec)
    for row in result.tables["monotonicity"].rows:
        print(f"   t={row['t']:.3f}  m={row['m']:.6f}  -m'={row['minus_dm']: .2e}  "
              f"{row['verdict']}")


def demo_poincare(square, korany, spec):
    print("\n🎯 Local Poincare inequality")
    radius = admissible_radius(square, ORIGIN, 0.8, korany)
    print(f"   admissible radius at the identity: {radius.bound:.4f}")
    bump = BumpFunction(korany, ORIGIN, 0.7)
    show(poincare_check(square, ORIGIN, 0.8, 1.0, bump, korany, spec))
    try:
        poincare_check(square, ORIGIN, 1.2, 1.0, bump, korany, spec)
    except PreconditionError as exc:
        print(f"   radius 1.2 refused: {exc}")


if __name__ == "__main__":
    print("=" * 60)
    print("INEQUALITIES")
    print("=" * 60)
    h1 = resolve_group("h1")
    korany = make_norm(h1, "korany")
    spec = QuadratureSpec(rel_tol=1e-6, abs_tol=1e-10)
    square = build_surface("h1-square", h1)
    demo_linear(square, korany, spec)
    demo_isoperimetric(square, korany, spec)
    demo_monotonicity(build_surface("h1-vertical-plane", h1), korany, spec)
    demo_poincare(square, korany, spec)
