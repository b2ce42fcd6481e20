#!/usr/bin/env python3
"""
Chapter 5 Demo Runner
Runs all Chapter 5 demonstrations in sequence.
"""

import os
import subprocess
import sys
import time

# Add the examples directory to the path
EXAMPLES = os.path.join(os.path.dirname(__file__), "examples")
sys.path.append(EXAMPLES)


def run_identities_demo():
    """Run the integral identities demo"""
    print("\n" + "=" * 60)
    print("➗ RUNNING: Integral Identities")
    print("=" * 60)

    try:
        from identities_demo import IdentitiesDemo
        IdentitiesDemo().run_demo()
        return True
    except Exception as e:
        print(f"❌ Error running identities demo: {e}")
        return False


def run_inequalities_demo():
    """Run the inequalities demo as a script"""
    print("\n" + "=" * 60)
    print("📐 RUNNING: Inequalities")
    print("=" * 60)

    result = subprocess.run([sys.executable, os.path.join(EXAMPLES, "inequalities_demo.py")],
                            capture_output=True, text=True, timeout=1800)
    print(result.stdout)
    if result.returncode != 0:
        print(f"❌ Error running inequalities demo: {result.stderr}")
    return result.returncode == 0


def print_chapter_summary():
    """Print a summary of Chapter 5 concepts"""
    print("\n" + "=" * 80)
    print("📚 CHAPTER 5 SUMMARY: Identities and Inequalities")
    print("=" * 80)

    summary_points = [
        "✅ Coarea, divergence, Minkowski and first variation as checked identities",
        "✅ Linear isoperimetric inequality and its variants",
        "✅ Isoperimetric and Sobolev inequalities with explicit constants",
        "✅ Monotonicity of sigma_H(S_t) / t^(Q-1)",
        "✅ Local Poincare inequality below the admissible radius",
        "✅ Verdicts with error-bar accounting",
    ]
    for point in summary_points:
        print(f"   {point}")

    print("\n📖 Next: Chapter 6 - Config-Driven Runs")
    print("=" * 80)


def main():
    """Run all Chapter 5 demonstrations"""
    print("➗ Chapter 5: Identities and Inequalities")
    print("=" * 50)

    start_time = time.time()
    results = [
        ("Integral Identities", run_identities_demo()),
        ("Inequalities", run_inequalities_demo()),
    ]

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
