"""
Command line tests
"""

import io
import json
import logging
import textwrap

import pytest
from click.testing import CliRunner
from rich.console import Console

from carnot_lab.cli import EXIT_ERROR, EXIT_OK, EXIT_VIOLATED, main, run_config
from carnot_lab.inequality_lab import CheckResult, Verdict, inequality
from carnot_lab.run_logger import RunLogger

CONFIG = """
group: h1
norm: {kind: korany}
surface: {preset: h1-vertical-plane}
quadrature: {rel_tol: 1.0e-6, abs_tol: 1.0e-10}
checks:
"""


@pytest.fixture(autouse=True)
def restore_logging():
    root = logging.getLogger()
    handlers, level = list(root.handlers), root.level
    yield
    root.handlers = handlers
    root.setLevel(level)


def write_config(tmp_path, checks="", head=CONFIG):
    path = tmp_path / "run.yaml"
    path.write_text(textwrap.dedent(head) + textwrap.dedent(checks), encoding="utf-8")
    return str(path)


def run(config_path, out_dir, **kwargs):
    return run_config(config_path, str(out_dir), workers=1,
                      console=Console(file=io.StringIO()), **kwargs)


# ---------------------------------------------------------------------------
# run
# ---------------------------------------------------------------------------

def test_blowup_run_writes_reports(tmp_path):
    path = write_config(tmp_path, "  - name: blowup\n    point: [0, 0, 0]\n")
    out = tmp_path / "out"
    assert run(path, out) == EXIT_OK
    assert sorted(p.name for p in out.iterdir()) == ["blowup.json", "manifest.json"]
    report = json.loads((out / "blowup.json").read_text())
    assert report["verdict"] == "holds"
    assert report["data"]["kind"] == "case-a"
    assert [r["tag"] for r in report["reports"]] == ["blowup-lower-bound", "blowup-upper-bound"]


def test_blowup_scan_writes_table(tmp_path):
    path = write_config(tmp_path, "  - name: blowup\n    point: [0, 0, 0]\n"
                                  "    radii: [0.5, 1.0]\n")
    out = tmp_path / "out"
    assert run(path, out) == EXIT_OK
    assert (out / "blowup_blowup_scan.csv").exists()
    manifest = json.loads((out / "manifest.json").read_text())
    assert [a["path"] for a in manifest["artifacts"]] == ["blowup.json", "blowup_blowup_scan.csv"]


def test_runs_are_byte_identical(tmp_path):
    path = write_config(tmp_path, "  - name: blowup\n    point: [0, 0, 0]\n"
                                  "    radii: [0.5]\n  - name: minkowski\n")
    first, second = tmp_path / "a", tmp_path / "b"
    assert run(path, first) == EXIT_OK
    assert run(path, second) == EXIT_OK
    names = sorted(p.name for p in first.iterdir())
    assert names == sorted(p.name for p in second.iterdir())
    for name in names:
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_empty_check_list(tmp_path):
    out = tmp_path / "out"
    assert run(write_config(tmp_path), out) == EXIT_OK
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["artifacts"] == []
    assert manifest["run"]["surface"] == "h1-vertical-plane"


def test_config_error_writes_nothing(tmp_path):
    head = CONFIG.replace("h1-vertical-plane", "h1-vertical-plain")
    out = tmp_path / "out"
    assert run(write_config(tmp_path, head=head), out) == EXIT_ERROR
    assert not out.exists()


def test_failing_check_writes_nothing(tmp_path):
    path = write_config(tmp_path, "  - name: minkowski\n  - name: blowup\n    point: [5, 0, 0]\n")
    out = tmp_path / "out"
    assert run(path, out) == EXIT_ERROR
    assert not out.exists()


def test_violation_sets_exit_code(tmp_path, mocker):
    def build(ctx, params, key):
        return lambda workers: CheckResult("fake", [inequality("fake", "fake", 2.0, 1.0)])

    mocker.patch.dict("carnot_lab.checks.CHECKS", {"fake": (build, set())})
    out = tmp_path / "out"
    assert run(write_config(tmp_path, "  - name: fake\n"), out) == EXIT_VIOLATED
    report = json.loads((out / "fake.json").read_text())
    assert report["verdict"] == Verdict.VIOLATED.value


def test_write_failure(tmp_path, mocker):
    mocker.patch("carnot_lab.cli.emit_report", side_effect=OSError("disk full"))
    assert run(write_config(tmp_path), tmp_path / "out") == EXIT_ERROR


def test_workers_env_is_validated(tmp_path, monkeypatch):
    monkeypatch.setenv("CARNOT_LAB_WORKERS", "none")
    out = tmp_path / "out"
    assert run_config(write_config(tmp_path), str(out),
                      console=Console(file=io.StringIO())) == EXIT_ERROR
    assert not out.exists()


# ---------------------------------------------------------------------------
# click commands
# ---------------------------------------------------------------------------

def test_run_command(tmp_path):
    out = tmp_path / "out"
    result = CliRunner().invoke(main, ["run", "--config", write_config(tmp_path),
                                       "--out", str(out), "--workers", "1"])
    assert result.exit_code == EXIT_OK
    assert (out / "manifest.json").exists()


def test_presets_command():
    result = CliRunner().invoke(main, ["presets"])
    assert result.exit_code == 0
    assert "h1-square" in result.output
    assert "korany" in result.output


def test_constants_command():
    result = CliRunner().invoke(main, ["constants", "--group", "h1"])
    assert result.exit_code == 0
    assert "c_2" in result.output and "k1" in result.output
    bad = CliRunner().invoke(main, ["constants", "--group", "h9"])
    assert bad.exit_code == EXIT_ERROR


# ---------------------------------------------------------------------------
# run logger
# ---------------------------------------------------------------------------

def test_run_statistics():
    run_logger = RunLogger(run_id="fixed")
    run_logger.log_check_start("a", {})
    run_logger.log_check_end("a", "holds", 0.5)
    run_logger.log_check_end("b", "violated", 0.25)
    run_logger.log_convergence_warning("b", "not converged")
    stats = run_logger.get_run_statistics()
    assert stats["checks"] == 2
    assert stats["verdicts"] == {"holds": 1, "violated": 1}
    assert stats["warnings"] == 1
    assert stats["total_seconds"] == pytest.approx(0.75)
    assert all(entry.run_id == "fixed" for entry in run_logger.entries)
