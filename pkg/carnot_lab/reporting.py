#!/usr/bin/env python3
"""
Report Writer - Carnot Lab
JSON reports, CSV scan tables and the run manifest. Output bytes depend only on the results:
keys are sorted, floats carry 12 significant digits and nothing time- or run-dependent is
written.
"""

import os
import json
import math
import logging
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from carnot_lab.inequality_lab import CheckResult, Table

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "1.0"
SIGNIFICANT_DIGITS = 12
MANIFEST_NAME = "manifest.json"


def _round(value: Any) -> Any:
    """JSON-ready copy with floats rounded to 12 significant digits"""
    if isinstance(value, dict):
        return {str(k): _round(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_round(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_round(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if not math.isfinite(v):
            return "nan" if math.isnan(v) else ("inf" if v > 0 else "-inf")
        return float(f"{v:.{SIGNIFICANT_DIGITS}g}")
    if hasattr(value, "value") and not callable(value.value):
        return _round(value.value)
    return value


def dumps(payload: Dict[str, Any]) -> str:
    return json.dumps(_round(payload), sort_keys=True, indent=2) + "\n"


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(text)


def write_table(table: Table, path: str) -> None:
    frame = pd.DataFrame(table.rows, columns=table.columns)
    frame.to_csv(path, index=False, float_format=f"%.{SIGNIFICANT_DIGITS}g", lineterminator="\n")


def write_check(result: CheckResult, label: str, out_dir: str,
                formats: Sequence[str] = ("json", "csv"),
                context: Optional[Dict[str, Any]] = None) -> List[Dict[str, Any]]:
    """Write one check's artifacts and return their manifest entries"""
    artifacts: List[Dict[str, Any]] = []
    if "json" in formats:
        name = f"{label}.json"
        payload = dict(result.as_dict(), label=label, schema_version=SCHEMA_VERSION,
                       run=context or {})
        _write(os.path.join(out_dir, name), dumps(payload))
        artifacts.append({"path": name, "kind": "report", "check": result.check,
                          "schema_version": SCHEMA_VERSION})
    if "csv" in formats:
        for table_name in sorted(result.tables):
            table = result.tables[table_name]
            name = f"{label}_{table_name}.csv"
            write_table(table, os.path.join(out_dir, name))
            artifacts.append({"path": name, "kind": "table", "check": result.check,
                              "columns": list(table.columns), "schema_version": SCHEMA_VERSION})
    return artifacts


def write_manifest(out_dir: str, artifacts: Sequence[Dict[str, Any]],
                   context: Optional[Dict[str, Any]] = None) -> str:
    path = os.path.join(out_dir, MANIFEST_NAME)
    payload = {"schema_version": SCHEMA_VERSION, "run": context or {},
               "artifacts": sorted(artifacts, key=lambda a: a["path"])}
    _write(path, dumps(payload))
    return path


def emit_report(results: Sequence[Any], out_dir: str, formats: Sequence[str] = ("json", "csv"),
                context: Optional[Dict[str, Any]] = None) -> str:
    """Write (label, CheckResult) pairs and the manifest; returns the manifest path"""
    os.makedirs(out_dir, exist_ok=True)
    artifacts: List[Dict[str, Any]] = []
    for label, result in results:
        artifacts.extend(write_check(result, label, out_dir, formats, context))
    path = write_manifest(out_dir, artifacts, context)
    logger.debug("Wrote %d artifacts to %s", len(artifacts), out_dir)
    return path
