"""Command line interface.

Subcommands:
  solve <file>    run the solver on one DIMACS instance
  bench <dir>     run it on every instance of a benchmark directory
  verify          run the randomised property suites
  prob <file>     compare Monte-Carlo and exact truth probabilities

Exit codes: 0 success, 1 budget exhausted or check failed, 2 usage or
configuration error, 3 input error.
"""
import argparse
import json
import logging
import os
import sys
from typing import List, Optional

import numpy as np
from dotenv import load_dotenv

from src.core.bench.harness import export_curve, run_benchmark
from src.core.bench.validator import ReportValidator
from src.core.errors import ConfigError, FormulaError, GodelTrickError, NoiseError
from src.core.logic.dimacs import parse_dimacs
from src.core.logic.formula import parse_formula
from src.core.logic.noise import NOISE_NAMES, parse_noise
from src.core.oracle.brute_force import mc_implicit_prob, prob_logic_exact
from src.core.solver.config import Semantics, SolveConfig
from src.core.solver.loop import solve
from src.core.verify.suites import run_all
from src.utils.io import read_bytes, write_csv_rows, write_text_file
from src.utils.logging import setup_logger

logger = logging.getLogger("src.apps.cli")

EXIT_OK, EXIT_UNSOLVED, EXIT_USAGE, EXIT_INPUT = 0, 1, 2, 3


def _env(name: str, default: Optional[str] = None) -> Optional[str]:
    value = os.getenv(name)
    return value if value not in (None, "") else default


def common_arguments() -> argparse.ArgumentParser:
    """Solver flags shared by every subcommand; defaults come from GT_* environment variables."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--semantics", choices=[s.value for s in Semantics], default=_env("GT_SEMANTICS", "gt"))
    common.add_argument("--noise", choices=NOISE_NAMES, default=_env("GT_NOISE"),
                        help="defaults to uniform for gt and none otherwise")
    common.add_argument("--noise-a", type=float, default=_env("GT_NOISE_A"))
    common.add_argument("--noise-b", type=float, default=_env("GT_NOISE_B"))
    common.add_argument("--noise-scale", type=float, default=_env("GT_NOISE_SCALE"))
    common.add_argument("--samples", type=int, default=_env("GT_SAMPLES", "100"))
    common.add_argument("--epochs", type=int, default=_env("GT_EPOCHS", "50000"))
    common.add_argument("--lr", type=float, default=_env("GT_LR", "0.1"))
    common.add_argument("--init-range", type=float, default=_env("GT_INIT_RANGE", "1.0"))
    common.add_argument("--seed", type=int, default=_env("GT_SEED", "0"))
    common.add_argument("--granularity", type=int, default=_env("GT_GRANULARITY", "100"))
    common.add_argument("--threads", type=int, default=_env("GT_THREADS", "1"))
    common.add_argument("--out", help="write the JSON report here instead of stdout")
    common.add_argument("--curve", help="write the progress curve as CSV")
    common.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"], default=None)
    return common


def build_parser() -> argparse.ArgumentParser:
    common = common_arguments()
    parser = argparse.ArgumentParser(prog="godel-trick", description="Gödel Trick SAT solver")
    sub = parser.add_subparsers(dest="command", required=True)

    solve_cmd = sub.add_parser("solve", parents=[common], help="solve one DIMACS instance")
    solve_cmd.add_argument("file")

    bench_cmd = sub.add_parser("bench", parents=[common], help="run a benchmark directory")
    bench_cmd.add_argument("directory")
    bench_cmd.add_argument("--limit", type=int, default=None)
    bench_cmd.add_argument("--pattern", default="*.cnf")

    verify_cmd = sub.add_parser("verify", parents=[common], help="run the property suites")
    verify_cmd.add_argument("--quick", action="store_true", help="reduced trial counts")

    prob_cmd = sub.add_parser("prob", parents=[common], help="exact vs Monte-Carlo truth probability")
    prob_cmd.add_argument("file", help="s-expression or DIMACS formula")
    prob_cmd.add_argument("--probs", default="0.5", help="comma-separated probabilities, or one for all")
    prob_cmd.add_argument("--draws", type=int, default=100_000)
    return parser


def config_from_args(args: argparse.Namespace) -> SolveConfig:
    semantics = Semantics(args.semantics)
    noise_name = args.noise or ("uniform" if semantics is Semantics.GT else "none")
    noise = parse_noise(noise_name, args.noise_a, args.noise_b, args.noise_scale)
    return SolveConfig.create(semantics=semantics, noise=noise, samples=args.samples,
                              max_epochs=args.epochs, learning_rate=args.lr, init_range=args.init_range,
                              master_seed=args.seed, progress_granularity=args.granularity,
                              workers=args.threads)


def _emit(report, schema: str, args: argparse.Namespace) -> None:
    document = report.model_dump(mode="json")
    problems = ReportValidator(schema).errors(document)
    for problem in problems:
        logger.error(f"Report does not match {schema} schema: {problem}")
    text = json.dumps(document, indent=2)
    if args.out:
        write_text_file(text, args.out)
        logger.info(f"Report written to {args.out}")
    else:
        print(text)
    if args.curve:
        write_csv_rows(export_curve(report), args.curve)
        logger.info(f"Curve written to {args.curve}")


def cmd_solve(args: argparse.Namespace) -> int:
    config = config_from_args(args)
    cnf = parse_dimacs(read_bytes(args.file))
    report = solve(cnf, config, instance=os.path.basename(args.file))
    _emit(report, "solve_report", args)
    return EXIT_OK if report.solved else EXIT_UNSOLVED


def cmd_bench(args: argparse.Namespace) -> int:
    config = config_from_args(args)
    if not os.path.isdir(args.directory):
        logger.error(f"Benchmark directory not found: {args.directory}")
        return EXIT_INPUT
    report = run_benchmark(args.directory, config, pattern=args.pattern, limit=args.limit)
    _emit(report, "bench_report", args)
    if not report.readable:
        logger.error(f"No readable instances in {args.directory}")
        return EXIT_INPUT
    return EXIT_OK if report.b_percent == 100.0 else EXIT_UNSOLVED


def cmd_verify(args: argparse.Namespace) -> int:
    results = run_all(seed=args.seed, quick=args.quick)
    summary = {r.name: {"passed": r.passed, "total": r.total, "threshold": r.threshold,
                        "checks": r.checks, "ok": r.ok} for r in results}
    text = json.dumps(summary, indent=2)
    if args.out:
        write_text_file(text, args.out)
    else:
        print(text)
    return EXIT_OK if all(r.ok for r in results) else EXIT_UNSOLVED


def load_formula(path: str):
    """A formula from an s-expression file or, when it has a 'p cnf' line, a DIMACS file."""
    text = read_bytes(path).decode("utf-8")
    if any(line.strip().startswith("p cnf") for line in text.splitlines()):
        return parse_dimacs(text).formula
    formula, _ = parse_formula(text)
    return formula


def parse_probs(raw: str, num_vars: int) -> np.ndarray:
    try:
        values = [float(v) for v in raw.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"--probs must be comma-separated numbers, got '{raw}'")
    if len(values) == 1:
        values = values * num_vars
    if len(values) != num_vars:
        raise ConfigError(f"--probs has {len(values)} values, formula has {num_vars} variables")
    return np.array(values)


def cmd_prob(args: argparse.Namespace) -> int:
    formula = load_formula(args.file)
    probs = parse_probs(args.probs, formula.num_vars)
    noise = parse_noise(args.noise or "logistic", args.noise_a, args.noise_b, args.noise_scale)
    if noise.kind == "none":
        raise ConfigError("prob needs a noise model")
    exact = prob_logic_exact(formula, probs)
    estimate = mc_implicit_prob(formula, noise.theta_inv(probs), noise, args.draws,
                                np.random.default_rng(args.seed))
    within = estimate.within(exact.probability, 4.0)
    summary = {"exact": exact.probability, "satisfying_count": exact.satisfying_count,
               "estimate": estimate.estimate, "sigma": estimate.sigma, "draws": estimate.draws,
               "noise": noise.model_dump(), "within_4_sigma": within}
    text = json.dumps(summary, indent=2)
    if args.out:
        write_text_file(text, args.out)
    else:
        print(text)
    return EXIT_OK if within else EXIT_UNSOLVED


COMMANDS = {"solve": cmd_solve, "bench": cmd_bench, "verify": cmd_verify, "prob": cmd_prob}


def cli_main(argv: Optional[List[str]] = None) -> int:
    load_dotenv()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE

    setup_logger("src", args.log_level, stream=sys.stderr)
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, NoiseError) as e:
        logger.error(str(e))
        return EXIT_USAGE
    except (FormulaError, OSError, UnicodeError) as e:
        logger.error(f"Input error: {e}")
        return EXIT_INPUT
    except GodelTrickError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(cli_main())
