"""
Inequality Lab - Carnot Lab
Quadrature checks of the integral identities and inequalities for hypersurfaces of Carnot groups.
"""

from carnot_lab.inequality_lab.dilation import DilationGenerator
from carnot_lab.inequality_lab.identities import (LevelSetMeasure, coarea_check, divergence_check,
                                                  first_variation_check, minkowski_check)
from carnot_lab.inequality_lab.isoperimetric import (isoperimetric_constants,
                                                     isoperimetric_report, sobolev_check)
from carnot_lab.inequality_lab.linear import (linear_isoperimetric_check,
                                              linear_isoperimetric_variants, strong_linear_check)
from carnot_lab.inequality_lab.monotonicity import asymptotic_check, monotonicity_scan
from carnot_lab.inequality_lab.poincare import (CoordinateSplit, SetDistance, admissible_radius,
                                                poincare_check, poincare_constant,
                                                rayleigh_isop_estimate, rayleigh_quotient)
from carnot_lab.inequality_lab.reports import (CheckResult, Form, InequalityReport, Table, Verdict,
                                               identity, inequality, judge, worst)

__all__ = [
    "CheckResult", "CoordinateSplit", "DilationGenerator", "Form", "InequalityReport",
    "LevelSetMeasure", "SetDistance", "Table", "Verdict", "admissible_radius",
    "asymptotic_check", "coarea_check", "divergence_check", "first_variation_check", "identity",
    "inequality", "isoperimetric_constants", "isoperimetric_report", "judge",
    "linear_isoperimetric_check", "linear_isoperimetric_variants", "minkowski_check",
    "monotonicity_scan", "poincare_check", "poincare_constant", "rayleigh_isop_estimate",
    "rayleigh_quotient", "sobolev_check", "strong_linear_check", "worst",
]
