#!/usr/bin/env python3
"""
Chapter 3 Demo Runner
Runs all Chapter 3 demonstrations in sequence.
"""

import os
import subprocess
import sys
import time

# Add the examples directory to the path
EXAMPLES = os.path.join(os.path.dirname(__file__), "examples")
sys.path.append(EXAMPLES)


def run_perimeter_demo():
    """Run the H-perimeter demo"""
    print("\n" + "=" * 60)
    print("📐 RUNNING: H-Perimeter")
    print("=" * 60)

    try:
        from perimeter_demo import PerimeterDemo
        PerimeterDemo().run_demo()
        return True
    except Exception as e:
        print(f"❌ Error running perimeter demo: {e}")
        return False


def run_characteristic_locus_demo():
    """Run the characteristic locus demo as a script"""
    print("\n" + "=" * 60)
    print("🎯 RUNNING: Characteristic Locus")
    print("=" * 60)

    result = subprocess.run([sys.executable, os.path.join(EXAMPLES, "characteristic_locus_demo.py")],
                            capture_output=True, text=True, timeout=600)
    print(result.stdout)
    if result.returncode != 0:
        print(f"❌ Error running characteristic locus demo: {result.stderr}")
    return result.returncode == 0


def print_chapter_summary():
    """Print a summary of Chapter 3 concepts"""
    print("\n" + "=" * 80)
    print("📚 CHAPTER 3 SUMMARY: Hypersurfaces and H-Perimeter")
    print("=" * 80)

    summary_points = [
        "✅ Graph patches, boundary curves and surface presets",
        "✅ Horizontal normal, |P_H nu|, varpi and C_H nu_H",
        "✅ Horizontal mean curvature",
        "✅ Adaptive quadrature for sigma_H and sigma_R",
        "✅ Characteristic clusters and excised integrals",
    ]
    for point in summary_points:
        print(f"   {point}")

    print("\n📖 Next: Chapter 4 - Blow-up Densities")
    print("=" * 80)


def main():
    """Run all Chapter 3 demonstrations"""
    print("📐 Chapter 3: Hypersurfaces and H-Perimeter")
    print("=" * 50)

    start_time = time.time()
    results = [
        ("H-Perimeter", run_perimeter_demo()),
        ("Characteristic Locus", run_characteristic_locus_demo()),
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
