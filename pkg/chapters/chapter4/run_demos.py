#!/usr/bin/env python3
"""
Chapter 4 Demo Runner
Runs all Chapter 4 demonstrations in sequence.
"""

import os
import sys
import time

# Add the examples directory to the path
sys.path.append(os.path.join(os.path.dirname(__file__), "examples"))


def run_blowup_demo():
    """Run the blow-up demo"""
    print("\n" + "=" * 60)
    print("🔬 RUNNING: Blow-up Densities")
    print("=" * 60)

    try:
        from blowup_demo import BlowupDemo
        BlowupDemo().run_demo()
        return True
    except Exception as e:
        print(f"❌ Error running blow-up demo: {e}")
        return False


def print_chapter_summary():
    """Print a summary of Chapter 4 concepts"""
    print("\n" + "=" * 80)
    print("📚 CHAPTER 4 SUMMARY: Blow-up Densities")
    print("=" * 80)

    summary_points = [
        "✅ Non-characteristic points: the vertical hyperplane limit",
        "✅ Characteristic points: Taylor data and the limit graph",
        "✅ Degenerate points with low-order vertical terms",
        "✅ Scans of sigma_H(S cap B(x, R)) / R^(Q-1)",
    ]
    for point in summary_points:
        print(f"   {point}")

    print("\n📖 Next: Chapter 5 - Identities and Inequalities")
    print("=" * 80)


def main():
    """Run all Chapter 4 demonstrations"""
    print("🔬 Chapter 4: Blow-up Densities")
    print("=" * 50)

    start_time = time.time()
    results = [("Blow-up Densities", run_blowup_demo())]

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
