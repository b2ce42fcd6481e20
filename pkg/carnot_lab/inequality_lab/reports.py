#!/usr/bin/env python3
"""
Inequality Reports - Carnot Lab
Verdicts with error-bar accounting for numerically checked inequalities and identities.
"""

from typing import Dict, List, Optional, Any, Sequence, Union
from dataclasses import dataclass, field
from enum import Enum

from carnot_lab.quadrature import Estimate

Number = Union[float, Estimate]


class Verdict(Enum):
    HOLDS = "holds"
    VIOLATED_WITHIN_ERROR = "violated-within-error"
    VIOLATED = "violated"


class Form(Enum):
    INEQUALITY = "inequality"
    IDENTITY = "identity"


_SEVERITY = {Verdict.HOLDS: 0, Verdict.VIOLATED_WITHIN_ERROR: 1, Verdict.VIOLATED: 2}


def _split(x: Number):
    if isinstance(x, Estimate):
        return float(x.value), float(x.error), list(x.warnings)
    return float(x), 0.0, []


def judge(slack: float, error: float) -> Verdict:
    if slack >= 0.0:
        return Verdict.HOLDS
    if slack >= -error:
        return Verdict.VIOLATED_WITHIN_ERROR
    return Verdict.VIOLATED


@dataclass
class InequalityReport:
    """lhs <= rhs (or lhs = rhs within tolerance) with its error bars and provenance

    For identities the slack is tolerance - |lhs - rhs|.
    """
    check: str
    tag: str
    form: Form
    lhs: float
    rhs: float
    lhs_error: float
    rhs_error: float
    slack: float
    verdict: Verdict
    tolerance: float = 0.0
    terms: Dict[str, float] = field(default_factory=dict)
    constants: Dict[str, Any] = field(default_factory=dict)
    provenance: Dict[str, Any] = field(default_factory=dict)
    warnings: List[str] = field(default_factory=list)

    @property
    def error(self) -> float:
        return self.lhs_error + self.rhs_error

    @property
    def holds(self) -> bool:
        return self.verdict is Verdict.HOLDS

    @property
    def slack_ratio(self) -> Optional[float]:
        """rhs / lhs; None when lhs vanishes"""
        return None if self.lhs == 0.0 else self.rhs / self.lhs

    def as_dict(self) -> Dict[str, Any]:
        return {
            "check": self.check,
            "tag": self.tag,
            "form": self.form.value,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "lhs_error": self.lhs_error,
            "rhs_error": self.rhs_error,
            "tolerance": self.tolerance,
            "slack": self.slack,
            "verdict": self.verdict.value,
            "terms": dict(sorted(self.terms.items())),
            "constants": self.constants,
            "provenance": self.provenance,
            "warnings": list(self.warnings),
        }


def inequality(check: str, tag: str, lhs: Number, rhs: Number, **extra) -> InequalityReport:
    lv, le, lw = _split(lhs)
    rv, re, rw = _split(rhs)
    slack = rv - lv
    extra.setdefault("warnings", [])
    extra["warnings"] = lw + rw + list(extra["warnings"])
    return InequalityReport(check, tag, Form.INEQUALITY, lv, rv, le, re, slack,
                            judge(slack, le + re), **extra)


def identity(check: str, tag: str, lhs: Number, rhs: Number, rel_tol: float = 1e-3,
             abs_tol: float = 1e-6, **extra) -> InequalityReport:
    lv, le, lw = _split(lhs)
    rv, re, rw = _split(rhs)
    tolerance = max(abs_tol, rel_tol * max(abs(lv), abs(rv)))
    slack = tolerance - abs(lv - rv)
    extra.setdefault("warnings", [])
    extra["warnings"] = lw + rw + list(extra["warnings"])
    return InequalityReport(check, tag, Form.IDENTITY, lv, rv, le, re, slack,
                            judge(slack, le + re), tolerance=tolerance, **extra)


def worst(verdicts: Sequence[Verdict]) -> Verdict:
    if not verdicts:
        return Verdict.HOLDS
    return max(verdicts, key=lambda v: _SEVERITY[v])


@dataclass
class Table:
    """Scan curve written as CSV"""
    columns: List[str]
    rows: List[Dict[str, Any]] = field(default_factory=list)

    def add(self, **row) -> None:
        missing = [c for c in self.columns if c not in row]
        if missing:
            raise KeyError(f"row is missing columns {missing}")
        self.rows.append({c: row[c] for c in self.columns})


@dataclass
class CheckResult:
    """Everything one named check produced"""
    check: str
    reports: List[InequalityReport] = field(default_factory=list)
    tables: Dict[str, Table] = field(default_factory=dict)
    data: Dict[str, Any] = field(default_factory=dict)
    warnings: List[str] = field(default_factory=list)

    @property
    def verdict(self) -> Verdict:
        return worst([r.verdict for r in self.reports])

    def as_dict(self) -> Dict[str, Any]:
        return {
            "check": self.check,
            "verdict": self.verdict.value,
            "reports": [r.as_dict() for r in self.reports],
            "tables": sorted(self.tables),
            "data": self.data,
            "warnings": list(self.warnings),
        }
