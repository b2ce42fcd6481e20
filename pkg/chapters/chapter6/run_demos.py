#!/usr/bin/env python3
"""
Chapter 6 Demo Runner
Runs all Chapter 6 demonstrations in sequence.
"""

import os
import sys
import time

# Add the examples directory to the path
sys.path.append(os.path.join(os.path.dirname(__file__), "examples"))


def run_config_runs_demo():
    """Run the config-driven runs demo"""
    print("\n" + "=" * 60)
    print("📄 RUNNING: Config-Driven Runs")
    print("=" * 60)

    try:
        from config_runs_demo import ConfigRunsDemo
        ConfigRunsDemo().run_demo()
        return True
    except Exception as e:
        print(f"❌ Error running config demo: {e}")
        return False


def print_chapter_summary():
    """Print a summary of Chapter 6 concepts"""
    print("\n" + "=" * 80)
    print("📚 CHAPTER 6 SUMMARY: Config-Driven Runs")
    print("=" * 80)

    summary_points = [
        "✅ YAML run configs validated before any check runs",
        "✅ Named checks with per-check parameters and labels",
        "✅ Deterministic JSON reports, CSV tables and a manifest",
        "✅ Exit codes: 0 holds, 2 violated, 1 errors",
    ]
    for point in summary_points:
        print(f"   {point}")
    print("=" * 80)


def main():
    """Run all Chapter 6 demonstrations"""
    print("📄 Chapter 6: Config-Driven Runs")
    print("=" * 50)

    start_time = time.time()
    results = [("Config-Driven Runs", run_config_runs_demo())]

    print("\n" + "=" * 60)
    print("📋 DEMO RESULTS SUMMARY")
    print("=" * 60)
    for demo_name, success in results:
        print(f"   {demo_name}: {'✅ PASSED' if success else '❌ FAILED'}")
    passed = sum(1 for _, success in results if success)
    print(f"\n📊 Results: {passed}/{len(results)} demos completed successfully")
    print(f"⏱️  Total time: {time.time() - start_time:.1f} seconds")

    print_chapter_summary()
    return 0 if passed == len(results) else 1


if __name__ == "__main__":
    sys.exit(main())
