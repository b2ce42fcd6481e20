#!/usr/bin/env python3
"""
Run Configuration - Carnot Lab
YAML run configs, validated in full before any check runs.

    group: h1                       # preset name, or {algebra: path/to/algebra.yaml}
    norm: {kind: korany}            # or {kind: power-lambda, lambda: 4}
    surface: {preset: h1-disk, params: {radius: 1.0}}   # or {graph: {...}}
    quadrature: {rel_tol: 1.0e-8}
    output: {formats: [json, csv]}
    checks:
      - {name: blowup, point: [0, 0, 0], radii: [0.25, 0.5, 1.0]}
"""

import os
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional

import yaml

from carnot_lab.checks import CheckContext, CheckPlan, plan_check
from carnot_lab.errors import CarnotLabError, ConfigError
from carnot_lab.homogeneous_metrics import make_norm
from carnot_lab.hypersurface import PatchedSurface
from carnot_lab.quadrature import QuadratureSpec
from carnot_lab.stratified_algebra import (ALGEBRA_PRESETS, CarnotGroup, load_algebra,
                                           resolve_group)
from carnot_lab.surface_presets import build_surface, surface_from_config

logger = logging.getLogger(__name__)

TOP_LEVEL_KEYS = ("group", "norm", "surface", "quadrature", "output", "checks")
QUADRATURE_KEYS = ("base_order", "max_depth", "rel_tol", "abs_tol", "max_cells",
                   "crossing_samples", "clip_rule")
OUTPUT_FORMATS = ("json", "csv")
MAX_REL_TOL = 0.1
WORKERS_ENV = "CARNOT_LAB_WORKERS"


@dataclass
class RunConfig:
    """A fully resolved run: group, norm, surface, quadrature and planned checks"""
    path: str
    group: CarnotGroup
    context: CheckContext
    checks: List[CheckPlan] = field(default_factory=list)
    formats: List[str] = field(default_factory=lambda: list(OUTPUT_FORMATS))

    @property
    def surface(self) -> PatchedSurface:
        return self.context.surface

    def describe(self) -> Dict[str, Any]:
        return {
            "config": os.path.basename(self.path),
            "group": self.group.name,
            "norm": self.context.norm.describe(),
            "surface": self.surface.name,
            "quadrature": self.context.spec.as_dict(),
            "checks": [plan.label for plan in self.checks],
        }


def read_yaml(path: str) -> Dict[str, Any]:
    try:
        with open(path, encoding="utf-8") as handle:
            data = yaml.safe_load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config '{path}': {exc}", key="config") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"config '{path}' is not valid YAML: {exc}", key="config") from None
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping", key="config")
    return data


def parse_group(value: Any, base_dir: str) -> CarnotGroup:
    if isinstance(value, str):
        if value not in ALGEBRA_PRESETS:
            raise ConfigError(f"unknown group preset '{value}'; known: {sorted(ALGEBRA_PRESETS)}",
                              key="group")
        return resolve_group(value)
    if isinstance(value, Mapping) and "algebra" in value:
        path = os.path.join(base_dir, str(value["algebra"]))
        try:
            return CarnotGroup(load_algebra(path))
        except ConfigError:
            raise
        except CarnotLabError as exc:
            raise ConfigError(str(exc), key="group.algebra") from None
    raise ConfigError("group must be a preset name or {algebra: path}", key="group")


def parse_norm(group: CarnotGroup, value: Any):
    value = value if value is not None else {"kind": "korany"}
    if not isinstance(value, Mapping) or "kind" not in value:
        raise ConfigError("norm needs a 'kind'", key="norm")
    lam = value.get("lambda")
    if lam is not None:
        try:
            lam = int(lam)
        except (TypeError, ValueError):
            raise ConfigError(f"lambda must be an integer, got {lam!r}", key="norm.lambda") from None
    try:
        return make_norm(group, str(value["kind"]), lam)
    except ConfigError:
        raise
    except CarnotLabError as exc:
        raise ConfigError(str(exc), key="norm") from None


def parse_surface(group: CarnotGroup, value: Any) -> PatchedSurface:
    if not isinstance(value, Mapping):
        raise ConfigError("surface must be {preset: name} or {graph: {...}}", key="surface")
    try:
        if "preset" in value:
            params = value.get("params", {}) or {}
            if not isinstance(params, Mapping):
                raise ConfigError("surface params must be a mapping", key="surface.params")
            return build_surface(str(value["preset"]), group, params)
        if "graph" in value:
            return surface_from_config(group, value["graph"])
    except ConfigError:
        raise
    except CarnotLabError as exc:
        raise ConfigError(str(exc), key="surface") from None
    raise ConfigError("surface needs 'preset' or 'graph'", key="surface")


def parse_quadrature(value: Any) -> QuadratureSpec:
    value = value or {}
    if not isinstance(value, Mapping):
        raise ConfigError("quadrature must be a mapping", key="quadrature")
    unknown = sorted(set(value) - set(QUADRATURE_KEYS))
    if unknown:
        raise ConfigError(f"unknown quadrature keys {unknown}", key=f"quadrature.{unknown[0]}")
    kwargs: Dict[str, Any] = {}
    for key in QUADRATURE_KEYS:
        if key not in value:
            continue
        try:
            kwargs[key] = str(value[key]) if key == "clip_rule" else (
                float(value[key]) if key in ("rel_tol", "abs_tol") else int(value[key]))
        except (TypeError, ValueError):
            raise ConfigError(f"bad value {value[key]!r}", key=f"quadrature.{key}") from None
    rel_tol = kwargs.get("rel_tol", QuadratureSpec.rel_tol)
    if not 0 < rel_tol <= MAX_REL_TOL:
        raise ConfigError(f"rel_tol must lie in (0, {MAX_REL_TOL}], got {rel_tol}",
                          key="quadrature.rel_tol")
    try:
        return QuadratureSpec(**kwargs)
    except CarnotLabError as exc:
        raise ConfigError(str(exc), key="quadrature") from None


def parse_formats(value: Any) -> List[str]:
    value = value or {}
    if not isinstance(value, Mapping):
        raise ConfigError("output must be a mapping", key="output")
    formats = value.get("formats", list(OUTPUT_FORMATS))
    if not isinstance(formats, list) or any(f not in OUTPUT_FORMATS for f in formats):
        raise ConfigError(f"output formats must be drawn from {list(OUTPUT_FORMATS)}",
                          key="output.formats")
    return [f for f in OUTPUT_FORMATS if f in formats]


def load_config(path: str) -> RunConfig:
    """Read and validate a run config; raises ConfigError naming the offending key"""
    data = read_yaml(path)
    unknown = sorted(set(data) - set(TOP_LEVEL_KEYS))
    if unknown:
        raise ConfigError(f"unknown top-level keys {unknown}", key=unknown[0])
    for key in ("group", "surface"):
        if key not in data:
            raise ConfigError(f"missing '{key}'", key=key)

    base_dir = os.path.dirname(os.path.abspath(path))
    group = parse_group(data["group"], base_dir)
    surface = parse_surface(group, data["surface"])
    norm = parse_norm(group, data.get("norm"))
    spec = parse_quadrature(data.get("quadrature"))
    formats = parse_formats(data.get("output"))
    context = CheckContext(group, norm, surface, spec)

    entries = data.get("checks") or []
    if not isinstance(entries, list):
        raise ConfigError("checks must be a list", key="checks")
    labels: Dict[str, int] = {}
    plans = [plan_check(context, entry, j, labels) for j, entry in enumerate(entries)]
    logger.debug("Loaded config %s with %d checks", path, len(plans))
    return RunConfig(path, group, context, plans, formats)


def workers_from_env(flag: Optional[int]) -> Optional[int]:
    """--workers wins; otherwise CARNOT_LAB_WORKERS; otherwise None (all cores)"""
    if flag is not None:
        return flag
    raw = os.environ.get(WORKERS_ENV)
    if raw is None or raw == "":
        return None
    try:
        workers = int(raw)
    except ValueError:
        raise ConfigError(f"{WORKERS_ENV} must be an integer, got '{raw}'", key=WORKERS_ENV) from None
    if workers < 1:
        raise ConfigError(f"{WORKERS_ENV} must be positive", key=WORKERS_ENV)
    return workers
