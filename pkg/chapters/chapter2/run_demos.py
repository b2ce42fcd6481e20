#!/usr/bin/env python3
"""
Chapter 2 Demo Runner
Runs all Chapter 2 demonstrations in sequence.
"""

import os
import sys
import time

# Add the examples directory to the path
sys.path.append(os.path.join(os.path.dirname(__file__), "examples"))


def run_norms_demo():
    """Run the homogeneous norms demo"""
    print("\n" + "=" * 60)
    print("📏 RUNNING: Homogeneous Norms")
    print("=" * 60)

    try:
        from norms_demo import NormsDemo
        NormsDemo().run_demo()
        return True
    except Exception as e:
        print(f"❌ Error running norms demo: {e}")
        return False


def print_chapter_summary():
    """Print a summary of Chapter 2 concepts"""
    print("\n" + "=" * 80)
    print("📚 CHAPTER 2 SUMMARY: Homogeneous Norms")
    print("=" * 80)

    summary_points = [
        "✅ Koranyi gauge on H-type groups, power-lambda gauge everywhere",
        "✅ Divisibility of lambda by every layer order",
        "✅ Layer constants c_i from unit-sphere sampling",
        "✅ Ball-box radii R1, R2 and the bounds k1, k2",
    ]
    for point in summary_points:
        print(f"   {point}")

    print("\n📖 Next: Chapter 3 - Hypersurfaces and H-Perimeter")
    print("=" * 80)


def main():
    """Run all Chapter 2 demonstrations"""
    print("📏 Chapter 2: Homogeneous Norms")
    print("=" * 50)

    start_time = time.time()
    results = [("Homogeneous Norms", run_norms_demo())]

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
