#!/usr/bin/env python3
"""
Check Registry - Carnot Lab
Named checks with their parameter parsers. Parsing happens before anything runs, so a bad
parameter fails the whole config with the offending key.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Mapping, Optional, Set, Tuple

import numpy as np

from carnot_lab.blowup import BlowupKind, BlowupResult, blowup_density, scanned_density
from carnot_lab.errors import ConfigError
from carnot_lab.fields import (BumpField, BumpFunction, ConstantFunction, CoordinateFunction,
                               LeftInvariantField, PolynomialFunction, PositionField, RadialField,
                               TestFunction, VectorField, ZeroField)
from carnot_lab.homogeneous_metrics import HomogeneousNorm, metric_factor_bounds
from carnot_lab.hypersurface import PatchedSurface
from carnot_lab.polynomials import Polynomial
from carnot_lab.quadrature import QuadratureSpec
from carnot_lab.stratified_algebra import CarnotGroup
from carnot_lab.inequality_lab import (CheckResult, CoordinateSplit, Table, asymptotic_check,
                                       coarea_check, divergence_check, first_variation_check,
                                       inequality, isoperimetric_report,
                                       linear_isoperimetric_check, linear_isoperimetric_variants,
                                       minkowski_check, monotonicity_scan, poincare_check,
                                       rayleigh_isop_estimate, sobolev_check, strong_linear_check)

logger = logging.getLogger(__name__)

Runner = Callable[[Optional[int]], CheckResult]


@dataclass
class CheckContext:
    """Objects shared by every check of one run"""
    group: CarnotGroup
    norm: HomogeneousNorm
    surface: PatchedSurface
    spec: QuadratureSpec


@dataclass
class CheckPlan:
    """A validated check, ready to run with a worker count"""
    name: str
    label: str
    params: Dict[str, Any]
    run: Runner = field(repr=False)


# ---------------------------------------------------------------------------
# parameter parsing
# ---------------------------------------------------------------------------

def _vector(value: Any, length: int, key: str) -> np.ndarray:
    try:
        out = np.asarray(value, dtype=float)
    except (TypeError, ValueError):
        raise ConfigError(f"expected a list of {length} numbers, got {value!r}", key=key) from None
    if out.shape != (length,) or not np.all(np.isfinite(out)):
        raise ConfigError(f"expected a list of {length} finite numbers, got {value!r}", key=key)
    return out


def _number(params: Mapping[str, Any], name: str, key: str, default: Any = None,
            positive: bool = False) -> float:
    if name not in params:
        if default is None:
            raise ConfigError(f"missing parameter '{name}'", key=f"{key}.{name}")
        return float(default)
    try:
        value = float(params[name])
    except (TypeError, ValueError):
        raise ConfigError(f"'{name}' must be a number", key=f"{key}.{name}") from None
    if not np.isfinite(value) or (positive and value <= 0):
        raise ConfigError(f"'{name}' must be {'positive' if positive else 'finite'}",
                          key=f"{key}.{name}")
    return value


def _radii(params: Mapping[str, Any], name: str, key: str, required: bool = True) -> List[float]:
    if name not in params:
        if required:
            raise ConfigError(f"missing parameter '{name}'", key=f"{key}.{name}")
        return []
    values = params[name]
    if not isinstance(values, list) or not values:
        raise ConfigError(f"'{name}' must be a non-empty list", key=f"{key}.{name}")
    out = [_number({name: v}, name, key, positive=True) for v in values]
    if sorted(out) != out or len(set(out)) != len(out):
        raise ConfigError(f"'{name}' must be strictly increasing", key=f"{key}.{name}")
    return out


def _point(ctx: CheckContext, params: Mapping[str, Any], key: str, name: str = "point",
           required: bool = True) -> Optional[np.ndarray]:
    if name not in params:
        if required:
            raise ConfigError(f"missing parameter '{name}'", key=f"{key}.{name}")
        return None
    return _vector(params[name], ctx.group.n, f"{key}.{name}")


def parse_function(ctx: CheckContext, spec: Any, key: str) -> TestFunction:
    """Test function from {kind: bump | coordinate | constant | polynomial, ...}"""
    if not isinstance(spec, Mapping) or "kind" not in spec:
        raise ConfigError("test function needs a 'kind'", key=key)
    kind = spec["kind"]
    g = ctx.group
    if kind == "bump":
        center = _vector(spec.get("center", [0.0] * g.n), g.n, f"{key}.center")
        return BumpFunction(ctx.norm, center, _number(spec, "radius", key, positive=True),
                            _number(spec, "amplitude", key, default=1.0))
    if kind == "coordinate":
        index = int(_number(spec, "index", key)) - 1
        if not 0 <= index < g.n:
            raise ConfigError(f"coordinate index must lie in 1..{g.n}", key=f"{key}.index")
        return CoordinateFunction(g, index, _number(spec, "scale", key, default=1.0))
    if kind == "constant":
        return ConstantFunction(g, _number(spec, "value", key, default=1.0))
    if kind == "polynomial":
        terms = spec.get("terms")
        if not isinstance(terms, Mapping) or not terms:
            raise ConfigError("polynomial needs a 'terms' mapping", key=f"{key}.terms")
        try:
            poly = Polynomial.from_config(terms, g.n)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad polynomial terms: {exc}", key=f"{key}.terms") from None
        return PolynomialFunction(g, poly, str(spec.get("name", "polynomial")))
    raise ConfigError(f"unknown test function kind '{kind}'", key=f"{key}.kind")


def parse_field(ctx: CheckContext, spec: Any, key: str) -> VectorField:
    """Vector field from {kind: zero | position | radial | left-invariant | bump, ...}"""
    if not isinstance(spec, Mapping) or "kind" not in spec:
        raise ConfigError("vector field needs a 'kind'", key=key)
    kind = spec["kind"]
    g = ctx.group
    if kind == "zero":
        return ZeroField(g)
    if kind == "position":
        return PositionField(g, _point(ctx, spec, key, "center", required=False))
    if kind == "radial":
        return RadialField(g)
    if kind == "left-invariant":
        return LeftInvariantField(g, _vector(spec.get("w"), g.n, f"{key}.w"))
    if kind == "bump":
        bump = parse_function(ctx, dict(spec.get("bump", {}), kind="bump"), f"{key}.bump")
        component = int(_number(spec, "component", key)) - 1
        if not 0 <= component < g.n:
            raise ConfigError(f"component must lie in 1..{g.n}", key=f"{key}.component")
        return BumpField(bump, component)
    raise ConfigError(f"unknown vector field kind '{kind}'", key=f"{key}.kind")


# ---------------------------------------------------------------------------
# blow-up as a check
# ---------------------------------------------------------------------------

def blowup_check(result: BlowupResult, norm: HomogeneousNorm) -> CheckResult:
    """Density with its scan; in the non-characteristic case kappa lies in [k1, k2]"""
    out = CheckResult("blowup", data=result.as_dict())
    if result.scan:
        table = Table(["R", "ratio", "error"])
        for point in result.scan:
            table.add(R=point.radius, ratio=point.ratio, error=point.error)
        out.tables["blowup_scan"] = table
    if result.kind is BlowupKind.CASE_A and result.kappa is not None:
        bounds = metric_factor_bounds(norm)
        provenance = {"norm": norm.describe(), "point": result.point.tolist()}
        out.reports.append(inequality("blowup", "blowup-lower-bound", bounds.k1, result.kappa,
                                      constants={"k1": bounds.k1}, provenance=dict(provenance)))
        out.reports.append(inequality("blowup", "blowup-upper-bound", result.kappa, bounds.k2,
                                      constants={"k2": bounds.k2}, provenance=dict(provenance)))
    elif result.kind is BlowupKind.DEGENERATE:
        out.warnings.append("blow-up is degenerate at this point")
    return out


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------

def _blowup(ctx: CheckContext, params: Mapping[str, Any], key: str) -> Runner:
    x = _point(ctx, params, key)
    radii = _radii(params, "radii", key, required=False)

    def run(workers):
        if radii:
            result = scanned_density(ctx.surface, x, ctx.norm, radii, ctx.spec, workers)
        else:
            result = blowup_density(ctx.surface, x, ctx.norm, ctx.spec, workers)
        return blowup_check(result, ctx.norm)
    return run


def _coarea(ctx, params, key):
    phi = parse_function(ctx, params.get("phi"), f"{key}.phi")
    panels = int(_number(params, "panels", key, default=48, positive=True))
    return lambda workers: coarea_check(ctx.surface, phi, ctx.spec, panels, workers=workers)


def _divergence(ctx, params, key):
    X = parse_field(ctx, params.get("field"), f"{key}.field")
    refine = bool(params.get("refine", True))
    return lambda workers: divergence_check(ctx.surface, X, ctx.spec, refine, workers=workers)


def _minkowski(ctx, params, key):
    center = _point(ctx, params, key, "center", required=False)
    return lambda workers: minkowski_check(ctx.surface, ctx.spec, center, workers=workers)


def _first_variation(ctx, params, key):
    w = _vector(params.get("w"), ctx.group.n, f"{key}.w")
    step = _number(params, "step", key, default=1e-3, positive=True)
    return lambda workers: first_variation_check(ctx.surface, w, ctx.spec, step, workers=workers)


def _centered(check: Callable[..., CheckResult]):
    def build(ctx, params, key):
        center = _point(ctx, params, key, "center", required=False)
        return lambda workers: check(ctx.surface, ctx.norm, ctx.spec, center, workers)
    return build


def _scan(check: Callable[..., CheckResult]):
    def build(ctx, params, key):
        x = _point(ctx, params, key)
        radii = _radii(params, "radii", key)
        return lambda workers: check(ctx.surface, x, ctx.norm, radii, ctx.spec, workers)
    return build


def _isoperimetric(ctx, params, key):
    return lambda workers: isoperimetric_report(ctx.surface, ctx.norm, ctx.spec, workers)


def _sobolev(ctx, params, key):
    psi = parse_function(ctx, params.get("psi"), f"{key}.psi")
    return lambda workers: sobolev_check(ctx.surface, psi, ctx.norm, ctx.spec, workers)


def _poincare(ctx, params, key):
    x = _point(ctx, params, key)
    R = _number(params, "radius", key, positive=True)
    p = _number(params, "p", key, default=1.0)
    if p < 1:
        raise ConfigError("'p' must be at least 1", key=f"{key}.p")
    psi = parse_function(ctx, params.get("psi"), f"{key}.psi")
    return lambda workers: poincare_check(ctx.surface, x, R, p, psi, ctx.norm, ctx.spec, workers)


def _rayleigh(ctx, params, key):
    splits = []
    for j, item in enumerate(params.get("splits", [])):
        where = f"{key}.splits[{j}]"
        if not isinstance(item, Mapping):
            raise ConfigError("split must be a mapping", key=where)
        index = int(_number(item, "coordinate", where)) - 1
        if not 0 <= index < ctx.group.n:
            raise ConfigError(f"coordinate must lie in 1..{ctx.group.n}", key=f"{where}.coordinate")
        splits.append(CoordinateSplit(index, _number(item, "value", where, default=0.0)))
    functions = [parse_function(ctx, spec, f"{key}.test_functions[{j}]")
                 for j, spec in enumerate(params.get("test_functions", []))]
    if not splits and not functions:
        raise ConfigError("rayleigh needs 'splits' or 'test_functions'", key=key)
    epsilons = params.get("epsilons", [0.2, 0.1, 0.05])
    eps = [_number({"eps": e}, "eps", f"{key}.epsilons", positive=True) for e in epsilons]
    if sorted(eps, reverse=True) != eps:
        raise ConfigError("'epsilons' must be decreasing", key=f"{key}.epsilons")
    return lambda workers: rayleigh_isop_estimate(ctx.surface, ctx.norm, ctx.spec, splits,
                                                  functions, eps, workers)


CheckBuilder = Callable[[CheckContext, Mapping[str, Any], str], Runner]

# name: (builder, allowed parameters)
CHECKS: Dict[str, Tuple[CheckBuilder, Set[str]]] = {
    "blowup": (_blowup, {"point", "radii"}),
    "coarea": (_coarea, {"phi", "panels"}),
    "divergence": (_divergence, {"field", "refine"}),
    "minkowski": (_minkowski, {"center"}),
    "first_variation": (_first_variation, {"w", "step"}),
    "linear_isoperimetric": (_centered(linear_isoperimetric_check), {"center"}),
    "linear_isoperimetric_variants": (_centered(linear_isoperimetric_variants), {"center"}),
    "strong_linear": (_centered(strong_linear_check), {"center"}),
    "monotonicity": (_scan(monotonicity_scan), {"point", "radii"}),
    "asymptotic": (_scan(asymptotic_check), {"point", "radii"}),
    "isoperimetric": (_isoperimetric, set()),
    "sobolev": (_sobolev, {"psi"}),
    "poincare": (_poincare, {"point", "radius", "p", "psi"}),
    "rayleigh": (_rayleigh, {"splits", "test_functions", "epsilons"}),
}


def plan_check(ctx: CheckContext, entry: Any, position: int, labels: Dict[str, int]) -> CheckPlan:
    key = f"checks[{position}]"
    if not isinstance(entry, Mapping) or "name" not in entry:
        raise ConfigError("check entry needs a 'name'", key=key)
    name = str(entry["name"])
    if name not in CHECKS:
        raise ConfigError(f"unknown check '{name}'; known: {sorted(CHECKS)}", key=f"{key}.name")
    builder, allowed = CHECKS[name]
    params = {k: v for k, v in entry.items() if k not in ("name", "label")}
    unknown = sorted(set(params) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown parameters {unknown} for check '{name}'",
                          key=f"{key}.{unknown[0]}")
    label = str(entry.get("label", name))
    labels[label] = labels.get(label, 0) + 1
    if labels[label] > 1:
        label = f"{label}-{labels[label]}"
    return CheckPlan(name, label, params, builder(ctx, params, key))
