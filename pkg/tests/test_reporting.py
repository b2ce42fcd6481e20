"""
Report, verdict and artifact writer tests
"""

import json
import os

import pandas as pd
import pytest

from carnot_lab.inequality_lab import (CheckResult, Form, Table, Verdict, identity, inequality,
                                       judge, worst)
from carnot_lab.quadrature import Estimate
from carnot_lab.reporting import MANIFEST_NAME, SCHEMA_VERSION, dumps, emit_report


def sample_result() -> CheckResult:
    table = Table(["t", "m"])
    table.add(t=0.5, m=1.0 / 3.0)
    table.add(t=1.0, m=float("inf"))
    report = inequality("demo", "demo-bound", Estimate(1.0, 1e-9), 2.0,
                        terms={"b": 1.0, "a": 2.0}, constants={"k": 0.1234567890123456})
    return CheckResult("demo", [report], tables={"scan": table}, data={"R": 2.0})


# ---------------------------------------------------------------------------
# verdicts
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("slack, error, verdict", [
    (0.5, 0.0, Verdict.HOLDS),
    (0.0, 0.0, Verdict.HOLDS),
    (-1e-4, 1e-3, Verdict.VIOLATED_WITHIN_ERROR),
    (-1e-2, 1e-3, Verdict.VIOLATED),
])
def test_judge(slack, error, verdict):
    assert judge(slack, error) is verdict


def test_inequality_carries_errors_and_warnings():
    lhs = Estimate(3.0, 0.01, True, 4, ["lhs note"])
    report = inequality("c", "t", lhs, Estimate(2.995, 0.0, True, 4, ["rhs note"]))
    assert report.form is Form.INEQUALITY
    assert report.slack == pytest.approx(-0.005)
    assert report.verdict is Verdict.VIOLATED_WITHIN_ERROR
    assert report.warnings == ["lhs note", "rhs note"]
    assert report.slack_ratio == pytest.approx(2.995 / 3.0)
    assert not report.holds


def test_identity_tolerance():
    close = identity("c", "t", 1.0, 1.0005)
    assert close.form is Form.IDENTITY
    assert close.tolerance == pytest.approx(1.0005e-3)
    assert close.verdict is Verdict.HOLDS
    far = identity("c", "t", 1.0, 1.1)
    assert far.verdict is Verdict.VIOLATED
    tiny = identity("c", "t", 0.0, 5e-7)
    assert tiny.tolerance == pytest.approx(1e-6)
    assert tiny.holds


def test_slack_ratio_without_lhs():
    assert inequality("c", "t", 0.0, 1.0).slack_ratio is None


def test_worst():
    assert worst([]) is Verdict.HOLDS
    assert worst([Verdict.HOLDS, Verdict.VIOLATED_WITHIN_ERROR]) is Verdict.VIOLATED_WITHIN_ERROR
    assert worst([Verdict.VIOLATED, Verdict.HOLDS]) is Verdict.VIOLATED


def test_table_rejects_missing_columns():
    table = Table(["t", "m"])
    with pytest.raises(KeyError):
        table.add(t=1.0)
    table.add(m=2.0, t=1.0, extra=3.0)
    assert table.rows == [{"t": 1.0, "m": 2.0}]


def test_check_result_as_dict():
    payload = CheckResult("demo", tables={"b": Table(["x"]), "a": Table(["y"])},
                          warnings=["w"]).as_dict()
    assert payload["check"] == "demo"
    assert payload["verdict"] == "holds"
    assert payload["tables"] == ["a", "b"]
    assert payload["warnings"] == ["w"]
    assert payload["reports"] == [] and payload["data"] == {}


# ---------------------------------------------------------------------------
# artifacts
# ---------------------------------------------------------------------------

def test_dumps_rounds_and_names_non_finite():
    text = dumps({"x": 0.1234567890123456, "y": float("nan"), "z": [float("-inf")]})
    payload = json.loads(text)
    assert payload["x"] == 0.123456789012
    assert payload["y"] == "nan"
    assert payload["z"] == ["-inf"]
    assert text.endswith("\n")


def test_emit_report_writes_artifacts(tmp_path):
    out = tmp_path / "out"
    manifest_path = emit_report([("demo", sample_result())], str(out), context={"config": "x"})
    assert os.path.basename(manifest_path) == MANIFEST_NAME
    assert sorted(os.listdir(out)) == ["demo.json", "demo_scan.csv", MANIFEST_NAME]

    manifest = json.loads((out / MANIFEST_NAME).read_text())
    assert manifest["schema_version"] == SCHEMA_VERSION
    assert [a["path"] for a in manifest["artifacts"]] == ["demo.json", "demo_scan.csv"]
    assert manifest["artifacts"][1]["columns"] == ["t", "m"]

    report = json.loads((out / "demo.json").read_text())
    assert report["label"] == "demo"
    assert report["run"] == {"config": "x"}
    assert report["reports"][0]["constants"]["k"] == 0.123456789012
    assert list(report["reports"][0]["terms"]) == ["a", "b"]

    frame = pd.read_csv(out / "demo_scan.csv")
    assert list(frame.columns) == ["t", "m"]
    assert frame["m"][0] == pytest.approx(1.0 / 3.0, rel=1e-11)


def test_emit_report_is_deterministic(tmp_path):
    first, second = tmp_path / "a", tmp_path / "b"
    emit_report([("demo", sample_result())], str(first))
    emit_report([("demo", sample_result())], str(second))
    for name in os.listdir(first):
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_emit_report_json_only(tmp_path):
    emit_report([("demo", sample_result())], str(tmp_path), formats=["json"])
    assert sorted(os.listdir(tmp_path)) == ["demo.json", MANIFEST_NAME]
