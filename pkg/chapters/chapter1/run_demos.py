#!/usr/bin/env python3
"""
Chapter 1 Demo Runner
Runs all Chapter 1 demonstrations in sequence.
"""

import os
import sys
import time

# Add the examples directory to the path
sys.path.append(os.path.join(os.path.dirname(__file__), "examples"))


def run_group_law_demo():
    """Run the group law demo"""
    print("\n" + "=" * 60)
    print("📐 RUNNING: Group Law")
    print("=" * 60)

    try:
        from group_law_demo import GroupLawDemo
        GroupLawDemo().run_demo()
        return True
    except Exception as e:
        print(f"❌ Error running group law demo: {e}")
        return False


def print_chapter_summary():
    """Print a summary of Chapter 1 concepts"""
    print("\n" + "=" * 80)
    print("📚 CHAPTER 1 SUMMARY: Carnot Groups")
    print("=" * 80)

    summary_points = [
        "✅ Stratified algebras: layers, structure constants, grading",
        "✅ Group law in exponential coordinates (BCH up to step 4)",
        "✅ Dilations as automorphisms",
        "✅ Left-invariant frame and the curvature constant C",
    ]
    for point in summary_points:
        print(f"   {point}")

    print("\n📖 Next: Chapter 2 - Homogeneous Norms")
    print("=" * 80)


def main():
    """Run all Chapter 1 demonstrations"""
    print("📐 Chapter 1: Carnot Groups")
    print("=" * 50)

    start_time = time.time()
    results = [("Group Law", run_group_law_demo())]

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
