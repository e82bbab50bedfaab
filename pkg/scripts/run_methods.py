#!/usr/bin/env python3
"""
Run several methods over several benchmark directories, one JSON report per pair.
Usage: python scripts/run_methods.py ./data/uf20-91 ./data/flat30-60 --methods gt-uniform,gt-logistic,godel --out-dir results/
"""
import argparse
import os
import sys

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.apps.cli.main import common_arguments, config_from_args
from src.core.bench.harness import run_methods
from src.core.errors import GodelTrickError
from src.utils.logging import setup_logger

# method name -> (semantics, noise)
METHODS = {
    "gt-uniform": ("gt", "uniform"),
    "gt-logistic": ("gt", "logistic"),
    "godel": ("godel", "none"),
    "product": ("product", "none"),
    "lukasiewicz": ("lukasiewicz", "none"),
}


def main():
    parser = argparse.ArgumentParser(description="Run methods over benchmark directories",
                                     parents=[common_arguments()])
    parser.add_argument("directories", nargs="+", help="Benchmark directories of DIMACS files")
    parser.add_argument("--methods", default=",".join(METHODS))
    parser.add_argument("--out-dir", default="results")
    parser.add_argument("--limit", type=int, default=None)
    parser.add_argument("--pattern", default="*.cnf")
    args = parser.parse_args()
    setup_logger("src", args.log_level, stream=sys.stderr)

    try:
        configs = {}
        for name in args.methods.split(","):
            if name not in METHODS:
                raise ValueError(f"unknown method '{name}', expected one of {', '.join(METHODS)}")
            args.semantics, args.noise = METHODS[name]
            configs[name] = config_from_args(args)
        reports = run_methods(args.directories, configs, args.out_dir, args.pattern, args.limit)
    except (GodelTrickError, ValueError) as e:
        print(f"\n❌ ERROR: {e}")
        sys.exit(2)

    print(f"\n✅ {len(reports)} reports written to {args.out_dir}")
    for (benchmark, method), report in sorted(reports.items()):
        print(f"  {benchmark:<20} {method:<12} S={report.s_percent:6.2f} B={report.b_percent:6.2f}")


if __name__ == "__main__":
    main()
