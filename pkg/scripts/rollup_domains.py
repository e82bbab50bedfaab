#!/usr/bin/env python3
"""
Domain-level rollup of per-benchmark JSON reports (mean ± std of S and B).
Usage: python scripts/rollup_domains.py results/*.json --domains domains.json --csv rollup.csv
"""
import argparse
import os
import sys

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.core.bench.harness import load_bench_report, rollup_domains
from src.utils.io import read_json, write_csv_rows


def main():
    parser = argparse.ArgumentParser(description="Roll benchmark reports up into domains")
    parser.add_argument("reports", nargs="+", help="BenchReport JSON files")
    parser.add_argument("--domains", help="JSON object mapping benchmark name to domain")
    parser.add_argument("--csv", help="Write the rollup as CSV")
    args = parser.parse_args()

    try:
        domain_map = read_json(args.domains) if args.domains else {}
        rows = rollup_domains([load_bench_report(p) for p in args.reports], domain_map)
    except (OSError, ValueError) as e:
        print(f"\n❌ ERROR: {e}")
        sys.exit(3)

    if not rows:
        print("\n❌ No reports to roll up")
        sys.exit(1)

    for row in rows:
        print(f"{row.domain:<16} {row.method:<12} S={row.s_mean:6.2f} ± {row.s_std:5.2f} "
              f"B={row.b_mean:6.2f} ± {row.b_std:5.2f}  ({len(row.benchmarks)} benchmarks)")
    if args.csv:
        header = ("domain", "method", "benchmarks", "s_mean", "s_std", "b_mean", "b_std")
        write_csv_rows([header] + [(r.domain, r.method, ";".join(r.benchmarks), r.s_mean, r.s_std,
                                    r.b_mean, r.b_std) for r in rows], args.csv)


if __name__ == "__main__":
    main()
