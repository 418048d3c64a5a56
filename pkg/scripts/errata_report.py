"""Print every detected misprint with its computed evidence.

usage: python scripts/errata_report.py [--limit 1000000]
"""
import argparse

from abundancy.errata import collect


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--limit", type=int, default=10**6)
    args = ap.parse_args()
    for e in collect(args.limit):
        print(f"[{'confirmed' if e.confirmed else 'NOT confirmed'}] {e.name}")
        print(f"    printed:   {e.printed}")
        print(f"    corrected: {e.corrected}")
        print(f"    evidence:  {e.evidence}")


if __name__ == "__main__":
    main()
