#!/usr/bin/env python3
"""
Command Line - Carnot Lab
Run named checks from a YAML config and write JSON/CSV reports.

Exit codes: 0 when no check reports "violated", 2 when one does, 1 on configuration,
capability or output errors (nothing is written in that case).
"""

import sys
import time
import logging
from typing import List, Optional, Tuple

import click
from dotenv import load_dotenv
from rich.console import Console
from rich.table import Table as RichTable

from carnot_lab.checks import CHECKS
from carnot_lab.config import load_config, workers_from_env
from carnot_lab.errors import CarnotLabError, ConfigError
from carnot_lab.homogeneous_metrics import layer_constants, make_norm, metric_factor_bounds
from carnot_lab.inequality_lab import CheckResult, Verdict, worst
from carnot_lab.parallel import set_default_workers
from carnot_lab.reporting import emit_report
from carnot_lab.run_logger import RunLogger, configure_logging
from carnot_lab.stratified_algebra import ALGEBRA_PRESETS, resolve_group
from carnot_lab.surface_presets import SURFACE_PRESETS

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VIOLATED = 2


def _summary(results: List[Tuple[str, CheckResult]]) -> RichTable:
    table = RichTable(title="Carnot Lab checks")
    for column in ("check", "verdict", "reports", "warnings"):
        table.add_column(column)
    for label, result in results:
        style = {"holds": "green", "violated": "red"}.get(result.verdict.value, "yellow")
        warnings = len(result.warnings) + sum(len(r.warnings) for r in result.reports)
        table.add_row(label, f"[{style}]{result.verdict.value}[/{style}]",
                      str(len(result.reports)), str(warnings))
    return table


def run_config(config_path: str, out_dir: str, workers: Optional[int] = None,
               verbose: bool = False, console: Optional[Console] = None) -> int:
    """Validate, run every check in order, then write artifacts; returns the exit code"""
    console = console or Console(stderr=True)
    configure_logging(verbose)
    run_logger = RunLogger()
    started = time.perf_counter()

    def finish(code: int) -> int:
        run_logger.log_run_end(code, time.perf_counter() - started)
        return code

    try:
        workers = workers_from_env(workers)
        config = load_config(config_path)
    except ConfigError as exc:
        run_logger.log_config_error(exc.key, str(exc))
        console.print(f"[red]config error[/red] at '{exc.key}': {exc}")
        return finish(EXIT_ERROR)
    except CarnotLabError as exc:
        run_logger.log_config_error(None, str(exc))
        console.print(f"[red]config error[/red]: {exc}")
        return finish(EXIT_ERROR)

    set_default_workers(workers)
    run_logger.log_run_start(config_path, workers or 0)
    results: List[Tuple[str, CheckResult]] = []
    for plan in config.checks:
        run_logger.log_check_start(plan.label, {k: str(v) for k, v in sorted(plan.params.items())})
        check_started = time.perf_counter()
        try:
            result = plan.run(workers)
        except CarnotLabError as exc:
            run_logger.log_capability_error(plan.label, str(exc))
            console.print(f"[red]{plan.label} failed[/red]: {exc}")
            return finish(EXIT_ERROR)
        for report in result.reports:
            for warning in report.warnings:
                if warning.startswith("not converged"):
                    run_logger.log_convergence_warning(plan.label, warning)
        run_logger.log_check_end(plan.label, result.verdict.value,
                                 time.perf_counter() - check_started)
        results.append((plan.label, result))

    try:
        manifest = emit_report(results, out_dir, config.formats, config.describe())
    except OSError as exc:
        console.print(f"[red]cannot write reports[/red] to '{out_dir}': {exc}")
        return finish(EXIT_ERROR)
    run_logger.log_report_written(manifest)

    console.print(_summary(results))
    verdict = worst([result.verdict for _, result in results])
    return finish(EXIT_VIOLATED if verdict is Verdict.VIOLATED else EXIT_OK)


@click.group()
def main() -> None:
    """Carnot-group geometry and H-perimeter inequality checks"""
    load_dotenv()


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(dir_okay=False),
              help="YAML run config")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False),
              help="Directory for reports")
@click.option("--workers", type=click.IntRange(min=1), default=None,
              help="Worker threads (default: CARNOT_LAB_WORKERS or all cores)")
@click.option("--verbose", is_flag=True, help="Debug logging")
def run(config_path: str, out_dir: str, workers: Optional[int], verbose: bool) -> None:
    """Run the checks listed in a config"""
    sys.exit(run_config(config_path, out_dir, workers, verbose))


@main.command()
def presets() -> None:
    """List groups, norms, surfaces and checks"""
    console = Console()
    table = RichTable(title="Presets")
    table.add_column("kind")
    table.add_column("names")
    table.add_row("group", ", ".join(sorted(ALGEBRA_PRESETS)))
    table.add_row("norm", "korany, power-lambda")
    table.add_row("surface", ", ".join(sorted(SURFACE_PRESETS)))
    table.add_row("check", ", ".join(sorted(CHECKS)))
    console.print(table)


@main.command()
@click.option("--group", "group_name", default="h1", show_default=True)
@click.option("--norm", "norm_kind", default="korany", show_default=True)
@click.option("--lambda", "lam", type=int, default=None)
def constants(group_name: str, norm_kind: str, lam: Optional[int]) -> None:
    """Print layer constants c_i and metric-factor bounds for a group and norm"""
    console = Console()
    try:
        group = resolve_group(group_name)
        norm = make_norm(group, norm_kind, lam)
        layers = layer_constants(norm)
        bounds = metric_factor_bounds(norm)
    except CarnotLabError as exc:
        console.print(f"[red]error[/red]: {exc}")
        sys.exit(EXIT_ERROR)
    table = RichTable(title=f"{group.name} / {norm_kind}")
    table.add_column("constant")
    table.add_column("value", justify="right")
    table.add_row("Q", str(group.Q))
    for i, c in sorted(layers.c.items()):
        table.add_row(f"c_{i}", f"{c:.12g}")
    for name in ("k1", "k2", "R1", "R2"):
        table.add_row(name, f"{getattr(bounds, name):.12g}")
    console.print(table)


if __name__ == "__main__":
    main()
