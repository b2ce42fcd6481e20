#!/usr/bin/env python3
"""
Run All Demos - Carnot Lab

Runs every chapter's run_demos.py in its own process and tabulates the outcome.

Usage:
    python run_all_demos.py [--timeout SECONDS] [--chapter N ...]
"""

import subprocess
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional

import click
from rich.console import Console
from rich.table import Table

CHAPTERS_DIR = Path(__file__).parent / "chapters"

CHAPTERS = [
    ("chapter1", "Carnot Groups"),
    ("chapter2", "Homogeneous Norms"),
    ("chapter3", "Hypersurfaces and H-Perimeter"),
    ("chapter4", "Blow-up Densities"),
    ("chapter5", "Identities and Inequalities"),
    ("chapter6", "Config-Driven Runs"),
]


@dataclass
class ChapterRun:
    chapter: str
    title: str
    status: str
    seconds: float
    stderr: str = ""

    @property
    def passed(self) -> bool:
        return self.status == "PASS"


def run_chapter(chapter: str, title: str, timeout: int, console: Console) -> ChapterRun:
    runner = CHAPTERS_DIR / chapter / "run_demos.py"
    if not runner.is_file():
        return ChapterRun(chapter, title, "MISSING", 0.0)

    console.rule(f"[bold]{chapter}: {title}")
    started = time.perf_counter()
    try:
        proc = subprocess.run([sys.executable, runner.name], cwd=runner.parent,
                              capture_output=True, text=True, timeout=timeout)
    except subprocess.TimeoutExpired:
        return ChapterRun(chapter, title, "TIMEOUT", time.perf_counter() - started)
    elapsed = time.perf_counter() - started

    # chapter output goes through untouched; rich markup would eat the brackets
    print(proc.stdout, end="")
    status = "PASS" if proc.returncode == 0 else "FAIL"
    return ChapterRun(chapter, title, status, elapsed, proc.stderr if status == "FAIL" else "")


def summary_table(runs: List[ChapterRun]) -> Table:
    table = Table(title="Demo Suite Summary")
    table.add_column("Chapter")
    table.add_column("Title")
    table.add_column("Status")
    table.add_column("Seconds", justify="right")
    colours = {"PASS": "green", "FAIL": "red"}
    for run in runs:
        colour = colours.get(run.status, "yellow")
        table.add_row(run.chapter, run.title, f"[{colour}]{run.status}[/{colour}]", f"{run.seconds:.1f}")
    return table


@click.command()
@click.option("--timeout", default=3600, show_default=True, help="Seconds allowed per chapter")
@click.option("--chapter", "only", multiple=True, type=click.IntRange(1, len(CHAPTERS)),
              help="Run only these chapter numbers (repeatable)")
def main(timeout: int, only: Optional[List[int]]):
    """Run the chapter demos and exit non-zero if any chapter fails."""
    console = Console()
    console.print("[bold]Carnot Lab - Complete Demo Suite[/bold]")
    if not CHAPTERS_DIR.is_dir():
        console.print(f"[red]chapters directory not found: {CHAPTERS_DIR}[/red]")
        sys.exit(1)

    selected = [CHAPTERS[i - 1] for i in sorted(set(only))] if only else CHAPTERS
    runs = [run_chapter(chapter, title, timeout, console) for chapter, title in selected]

    for run in runs:
        if run.stderr:
            console.rule(f"[red]{run.chapter} stderr")
            print(run.stderr, end="")

    console.print(summary_table(runs))
    failed = [run for run in runs if not run.passed]
    if failed:
        console.print(f"⚠️  {len(failed)} of {len(runs)} chapter(s) did not pass")
        sys.exit(1)
    console.print(f"🎉 All {len(runs)} chapters passed")


if __name__ == "__main__":
    main()
