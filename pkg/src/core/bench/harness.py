"""Benchmark harness: run a solver configuration over a directory of DIMACS files.

S is the mean over instances of the percentage of samples that solved the
instance; B is the percentage of instances solved by at least one sample.
Instances that cannot be read or whose run fails are kept in the report
with their error and left out of both aggregates.
"""
import glob
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel

from src.core.errors import DimacsError, SolverError
from src.core.logic.dimacs import parse_dimacs_file
from src.core.solver.config import Semantics, SolveConfig
from src.core.solver.loop import solve
from src.core.solver.report import SCHEMA_VERSION, CurvePoint, Timing, snapshot_epochs
from src.utils.io import read_text_file, write_text_file

logger = logging.getLogger(__name__)

CURVE_HEADER = ("epoch", "solved_ratio")


class InstanceResult(BaseModel):
    path: str
    num_vars: Optional[int] = None
    num_clauses: Optional[int] = None
    solved_at: List[Optional[int]] = []
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None

    @property
    def solved_fraction(self) -> float:
        if not self.solved_at:
            return 0.0
        return sum(1 for t in self.solved_at if t is not None) / len(self.solved_at)


class BenchReport(BaseModel):
    schema_version: str = SCHEMA_VERSION
    benchmark: str
    config: SolveConfig
    instances: List[InstanceResult]
    s_percent: float
    b_percent: float
    curve: List[CurvePoint]
    total_steps: int = 0
    timing: Optional[Timing] = None

    @property
    def readable(self) -> List[InstanceResult]:
        return [r for r in self.instances if r.ok]

    @property
    def failed(self) -> List[InstanceResult]:
        return [r for r in self.instances if not r.ok]


def aggregate_metrics(solved: Sequence[Sequence[bool]]) -> Tuple[float, float]:
    """(S, B) in percent from a per-instance list of per-sample solved flags."""
    if not solved:
        return 0.0, 0.0
    fractions = [np.mean(row) if len(row) else 0.0 for row in solved]
    s = float(np.mean(fractions) * 100.0)
    b = float(np.mean([any(row) for row in solved]) * 100.0)
    return s, b


def _bench_curve(results: List[InstanceResult], config: SolveConfig) -> List[CurvePoint]:
    if not results:
        return []
    points = []
    for epoch in snapshot_epochs(config.max_epochs, config.progress_granularity):
        ratios = [np.mean([t is not None and t <= epoch for t in r.solved_at]) for r in results]
        points.append(CurvePoint(epoch=epoch, solved_ratio=float(np.mean(ratios))))
    return points


def find_instances(instance_dir: str, pattern: str = "*.cnf", limit: Optional[int] = None) -> List[str]:
    """Sorted instance paths matching ``pattern``; the first ``limit`` when given."""
    paths = sorted(p for p in glob.glob(os.path.join(instance_dir, pattern)) if os.path.isfile(p))
    return paths[:limit] if limit is not None else paths


def _solve_instance(path: str, config: SolveConfig) -> Tuple[InstanceResult, int]:
    """One instance, with unreadable files and solver failures recorded as errors."""
    name = os.path.basename(path)
    try:
        cnf = parse_dimacs_file(path)
    except (DimacsError, OSError, UnicodeError) as e:
        logger.warning(f"Skipping {name}: {e}")
        return InstanceResult(path=path, error=str(e)), 0
    try:
        report = solve(cnf, config, instance=name)
    except SolverError as e:
        logger.warning(f"Solver failed on {name}: {e}")
        return InstanceResult(path=path, num_vars=cnf.num_vars, num_clauses=cnf.num_clauses,
                              error=f"solver error: {e}"), 0
    return InstanceResult(path=path, num_vars=cnf.num_vars, num_clauses=cnf.num_clauses,
                          solved_at=report.solved_at), report.total_steps


def run_benchmark(instance_dir: str, config: SolveConfig, pattern: str = "*.cnf",
                  limit: Optional[int] = None) -> BenchReport:
    """Solve every matching instance and aggregate S, B and the progress curve.

    With ``config.workers > 1`` and several instances, whole instances are
    spread over the worker processes and each one runs its samples serially.
    """
    started = time.perf_counter()
    paths = find_instances(instance_dir, pattern, limit)
    logger.info(f"Running {config.label} on {len(paths)} instance(s) from {instance_dir}")

    workers = min(config.workers, len(paths))
    if workers > 1:
        inner = config.replace(workers=1)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_solve_instance, paths, [inner] * len(paths)))
    else:
        outcomes = [_solve_instance(path, config) for path in paths]
    results = [result for result, _ in outcomes]
    total_steps = sum(steps for _, steps in outcomes)

    readable = [r for r in results if r.ok]
    s, b = aggregate_metrics([[t is not None for t in r.solved_at] for r in readable])
    elapsed = time.perf_counter() - started
    logger.info(f"{os.path.basename(os.path.normpath(instance_dir))} [{config.label}]: "
                f"S={s:.1f} B={b:.1f} over {len(readable)} instance(s), {len(results) - len(readable)} error(s)")
    return BenchReport(
        benchmark=os.path.basename(os.path.normpath(instance_dir)),
        config=config,
        instances=results,
        s_percent=s,
        b_percent=b,
        curve=_bench_curve(readable, config),
        total_steps=total_steps,
        timing=Timing(wall_clock_s=elapsed, steps_per_second=total_steps / elapsed if elapsed > 0 else 0.0),
    )


def export_curve(report) -> List[Tuple]:
    """Header plus one (epoch, solved_ratio) row per snapshot of a solve or bench report."""
    return [CURVE_HEADER] + [(p.epoch, p.solved_ratio) for p in report.curve]


def load_bench_report(path: str) -> BenchReport:
    return BenchReport.model_validate_json(read_text_file(path))


# --- experiment tooling ---

class GridPoint(BaseModel):
    learning_rate: float
    noise_b: Optional[float] = None
    s_percent: float
    b_percent: float


def grid_search(instance_dir: str, base_config: SolveConfig, lrs: Iterable[float],
                noise_bs: Iterable[Optional[float]] = (None,), pattern: str = "*.cnf",
                limit: Optional[int] = None) -> List[GridPoint]:
    """Try every (learning rate, uniform half-width) pair; best S first, then best B.

    ``noise_bs`` only applies to uniform Gödel Trick noise, as Uniform(-b, b).
    """
    uses_b = base_config.semantics is Semantics.GT and base_config.noise.kind == "uniform"
    widths = [b for b in noise_bs if b is not None] if uses_b else [None]
    points = []
    for lr in lrs:
        for b in widths or [None]:
            changes = {"learning_rate": lr}
            if b is not None:
                changes["noise"] = {"kind": "uniform", "a": -b, "b": b}
            report = run_benchmark(instance_dir, base_config.replace(**changes), pattern, limit)
            points.append(GridPoint(learning_rate=lr, noise_b=b, s_percent=report.s_percent,
                                    b_percent=report.b_percent))
    return sorted(points, key=lambda p: (-p.s_percent, -p.b_percent))


def report_filename(benchmark: str, method: str) -> str:
    return f"{benchmark}__{method}.json"


def run_methods(instance_dirs: Sequence[str], configs: Dict[str, SolveConfig], out_dir: str,
                pattern: str = "*.cnf", limit: Optional[int] = None) -> Dict[Tuple[str, str], BenchReport]:
    """Run every method on every benchmark directory, one JSON report per pair."""
    reports = {}
    for instance_dir in instance_dirs:
        for method, config in configs.items():
            report = run_benchmark(instance_dir, config, pattern, limit)
            write_text_file(report.model_dump_json(indent=2),
                            os.path.join(out_dir, report_filename(report.benchmark, method)))
            reports[(report.benchmark, method)] = report
    return reports


class DomainRow(BaseModel):
    domain: str
    method: str
    benchmarks: List[str]
    s_mean: float
    s_std: float
    b_mean: float
    b_std: float


def rollup_domains(reports: Iterable[BenchReport], domain_map: Dict[str, str]) -> List[DomainRow]:
    """Mean and standard deviation of S and B across the benchmarks of each domain.

    Benchmarks missing from ``domain_map`` form a domain of their own.
    """
    groups: Dict[Tuple[str, str], List[BenchReport]] = {}
    for report in reports:
        domain = domain_map.get(report.benchmark, report.benchmark)
        groups.setdefault((domain, report.config.label), []).append(report)
    rows = []
    for (domain, method), members in sorted(groups.items()):
        s = np.array([r.s_percent for r in members])
        b = np.array([r.b_percent for r in members])
        rows.append(DomainRow(domain=domain, method=method, benchmarks=[r.benchmark for r in members],
                              s_mean=float(s.mean()), s_std=float(s.std()),
                              b_mean=float(b.mean()), b_std=float(b.std())))
    return rows

