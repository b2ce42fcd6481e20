#!/usr/bin/env python3
"""
Config Runs Demo - Chapter 6
Drive the checks from YAML configs and inspect the JSON/CSV artifacts they leave behind.
"""

import io
import json
import os
import sys
import tempfile

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "..", ".."))

from rich.console import Console

from carnot_lab.cli import EXIT_OK, run_config

CONFIG_DIR = os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "..", "..", "configs"))
CONFIGS = ["h1_blowup.yaml", "engel_plane.yaml", "custom_algebra.yaml"]


class ConfigRunsDemo:
    """Run the bundled configs into a scratch directory"""

    def __init__(self, workers: int = 2):
        self.workers = workers

    def run_one(self, name: str, out_dir: str) -> int:
        console = Console(file=io.StringIO(), width=100)
        code = run_config(os.path.join(CONFIG_DIR, name), out_dir, self.workers, console=console)
        print(f"\n📄 {name}: exit code {code}")
        print(console.file.getvalue().rstrip())
        return code

    def show_manifest(self, out_dir: str):
        with open(os.path.join(out_dir, "manifest.json"), encoding="utf-8") as handle:
            manifest = json.load(handle)
        for artifact in manifest["artifacts"]:
            print(f"   {artifact['kind']:6s} {artifact['path']}")

    def demo_bad_config(self, scratch: str):
        print("\n🚫 A misspelled check name fails before anything runs")
        path = os.path.join(scratch, "bad.yaml")
        with open(path, "w", encoding="utf-8") as handle:
            handle.write("group: h1\nsurface: {preset: h1-square}\nchecks:\n  - name: isoperimetri\n")
        out_dir = os.path.join(scratch, "bad-out")
        code = run_config(path, out_dir, self.workers, console=Console(file=io.StringIO()))
        print(f"   exit code {code}; output written: {os.path.exists(out_dir)}")

    def run_demo(self):
        print("=" * 60)
        print("CONFIG-DRIVEN RUNS")
        print("=" * 60)
        failures = 0
        with tempfile.TemporaryDirectory() as scratch:
            for name in CONFIGS:
                out_dir = os.path.join(scratch, os.path.splitext(name)[0])
                if self.run_one(name, out_dir) == EXIT_OK:
                    self.show_manifest(out_dir)
                else:
                    failures += 1
            self.demo_bad_config(scratch)
        if failures:
            raise RuntimeError(f"{failures} config(s) did not finish cleanly")


if __name__ == "__main__":
    ConfigRunsDemo().run_demo()
