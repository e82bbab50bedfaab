#!/usr/bin/env python3
"""
Learning-rate / noise-width grid search on one benchmark directory.
Usage: python scripts/grid_search.py ./data/uf20-91 --semantics gt --noise uniform --limit 20 --epochs 5000
"""
import argparse
import json
import os
import sys

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.apps.cli.main import common_arguments, config_from_args
from src.core.bench.harness import grid_search
from src.core.errors import GodelTrickError
from src.utils.io import write_text_file
from src.utils.logging import setup_logger


def main():
    parser = argparse.ArgumentParser(description="Grid search learning rate and uniform noise width",
                                     parents=[common_arguments()])
    parser.add_argument("directory", help="Benchmark directory of DIMACS files")
    parser.add_argument("--limit", type=int, default=None)
    parser.add_argument("--pattern", default="*.cnf")
    parser.add_argument("--lrs", default="0.01,0.03,0.1,0.3,1.0")
    parser.add_argument("--widths", default="0.5,1,2", help="b values for Uniform(-b, b)")
    args = parser.parse_args()
    setup_logger("src", args.log_level, stream=sys.stderr)

    try:
        base = config_from_args(args)
        lrs = [float(v) for v in args.lrs.split(",")]
        widths = [float(v) for v in args.widths.split(",")]
        points = grid_search(args.directory, base, lrs, widths, args.pattern, args.limit)
    except (GodelTrickError, ValueError) as e:
        print(f"\n❌ ERROR: {e}")
        sys.exit(2)

    print(f"\n✅ {len(points)} settings evaluated on {args.directory} ({base.label})")
    for p in points:
        width = "-" if p.noise_b is None else f"{p.noise_b:g}"
        print(f"  lr={p.learning_rate:<6g} b={width:<5} S={p.s_percent:6.2f} B={p.b_percent:6.2f}")
    if args.out:
        write_text_file(json.dumps([p.model_dump() for p in points], indent=2), args.out)


if __name__ == "__main__":
    main()
