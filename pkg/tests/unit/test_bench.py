"""Unit tests for the benchmark harness and report validation."""

import json
from unittest.mock import patch

import pytest
from src.core.bench.harness import (BenchReport, InstanceResult, aggregate_metrics, export_curve, find_instances,
                                    grid_search, load_bench_report, report_filename, rollup_domains,
                                    run_benchmark, run_methods)
from src.core.bench.validator import ReportValidator
from src.core.errors import ConfigError, SolverError
from src.core.logic.formula import CnfFormula
from src.core.solver.config import SolveConfig
from src.core.solver.loop import solve
from src.core.solver.report import CurvePoint
from src.utils.io import read_text_file


@pytest.fixture
def bench_dir(tmp_path):
    """Two satisfiable instances, one malformed file and a non-matching file."""
    (tmp_path / "a.cnf").write_text("c easy\np cnf 3 2\n1 2 0\n-3 0\n")
    (tmp_path / "b.cnf").write_text("p cnf 4 4\n1 2 0\n-1 3 0\n-3 4 0\n-2 -4 1 0\n")
    (tmp_path / "broken.cnf").write_text("p cnf 2 1\n1 x 0\n")
    (tmp_path / "notes.txt").write_text("not an instance")
    return tmp_path


@pytest.fixture
def quick_config():
    return SolveConfig.create(samples=4, max_epochs=400, progress_granularity=100)


class TestAggregates:
    """Test cases for S and B."""

    def test_definition(self):
        """S counts solved samples and B counts instances with any solve."""
        s, b = aggregate_metrics([[True, False], [False, False]])
        assert (s, b) == (25.0, 50.0)

    def test_all_solved(self):
        """Every sample solved gives 100 on both metrics."""
        assert aggregate_metrics([[True, True], [True]]) == (100.0, 100.0)

    def test_empty(self):
        """No instances gives zero on both metrics."""
        assert aggregate_metrics([]) == (0.0, 0.0)


class TestRunBenchmark:
    """Test cases for run_benchmark."""

    def test_errors_recorded_and_excluded(self, bench_dir, quick_config):
        """Unreadable instances stay in the report but not in the metrics."""
        report = run_benchmark(str(bench_dir), quick_config)
        assert [r.path.rsplit("/", 1)[-1] for r in report.instances] == ["a.cnf", "b.cnf", "broken.cnf"]
        assert len(report.readable) == 2
        assert "invalid literal" in report.failed[0].error
        assert 0.0 <= report.s_percent <= report.b_percent <= 100.0
        assert report.benchmark == bench_dir.name

    def test_solver_error_recorded(self, bench_dir, quick_config):
        """A failing run is reported against its instance and the rest still complete."""
        def flaky(cnf, config, instance=None):
            if instance == "b.cnf":
                raise SolverError("non-finite logit after update; learning rate 1e+300 is too large")
            return solve(cnf, config, instance=instance)

        with patch("src.core.bench.harness.solve", side_effect=flaky):
            report = run_benchmark(str(bench_dir), quick_config)
        errors = {r.path.rsplit("/", 1)[-1]: r.error for r in report.failed}
        assert errors["b.cnf"].startswith("solver error: non-finite logit")
        assert errors["broken.cnf"] is not None
        assert [r.path.rsplit("/", 1)[-1] for r in report.readable] == ["a.cnf"]
        assert report.failed[0].num_vars == 4

    def test_instance_workers_match_serial(self, bench_dir, quick_config):
        """Spreading instances over processes leaves every per-sample result unchanged."""
        serial = run_benchmark(str(bench_dir), quick_config)
        parallel = run_benchmark(str(bench_dir), quick_config.replace(workers=3))
        assert [r.solved_at for r in parallel.instances] == [r.solved_at for r in serial.instances]
        assert [r.error for r in parallel.instances] == [r.error for r in serial.instances]
        assert (parallel.s_percent, parallel.b_percent) == (serial.s_percent, serial.b_percent)
        assert parallel.config.workers == 3

    def test_curve_nondecreasing(self, bench_dir, quick_config):
        """The aggregate solved ratio never drops between snapshots."""
        ratios = [p.solved_ratio for p in run_benchmark(str(bench_dir), quick_config).curve]
        assert ratios == sorted(ratios)

    def test_limit_and_pattern(self, bench_dir, quick_config):
        """limit caps the instance list and pattern filters file names."""
        assert len(find_instances(str(bench_dir), limit=1)) == 1
        report = run_benchmark(str(bench_dir), quick_config, pattern="b.*", limit=5)
        assert len(report.instances) == 1

    def test_report_round_trip(self, bench_dir, quick_config, tmp_path):
        """A written report loads back with the same metrics."""
        report = run_benchmark(str(bench_dir), quick_config)
        path = tmp_path / "out" / "report.json"
        path.parent.mkdir()
        path.write_text(report.model_dump_json())
        loaded = load_bench_report(str(path))
        assert (loaded.s_percent, loaded.b_percent) == (report.s_percent, report.b_percent)
        assert loaded.config == quick_config


class TestExportCurve:
    """Test cases for export_curve."""

    def test_step_function(self):
        """One sample solved at epoch 250 with snapshots every 100 epochs."""
        cnf = CnfFormula.from_dimacs_lists(1, [[1]])
        config = SolveConfig.create(semantics="godel", samples=1, max_epochs=400, learning_rate=0.01)
        report = solve(cnf, config, initial_logits=[-2.495])
        assert report.solved_at == [250]
        assert export_curve(report) == [("epoch", "solved_ratio"), (100, 0.0), (200, 0.0), (300, 1.0), (400, 1.0)]

    def test_empty_run(self):
        """A report without instances exports only the header row."""
        report = BenchReport(benchmark="empty", config=SolveConfig.create(), instances=[], s_percent=0.0,
                             b_percent=0.0, curve=[])
        assert export_curve(report) == [("epoch", "solved_ratio")]


class TestReportValidator:
    """Test cases for ReportValidator."""

    def test_solve_report_valid(self):
        """A solve report passes its JSON schema."""
        cnf = CnfFormula.from_dimacs_lists(2, [[1, 2]])
        report = solve(cnf, SolveConfig.create(samples=2, max_epochs=50))
        assert ReportValidator("solve_report").errors(report.model_dump(mode="json")) == []

    def test_bench_report_valid(self, bench_dir, quick_config):
        """A benchmark report passes its JSON schema."""
        report = run_benchmark(str(bench_dir), quick_config)
        result = ReportValidator("bench_report").process(report.model_dump_json())
        assert result["valid"], result["errors"]

    def test_invalid_document(self):
        """A document missing required fields is reported invalid."""
        result = ReportValidator("solve_report").process(json.dumps({"schema_version": "0.1"}))
        assert result["valid"] is False
        assert result["errors"]

    def test_bad_json(self):
        """Undecodable input is reported as a JSON decode error."""
        result = ReportValidator("bench_report").process("{not json")
        assert result["errors"][0].startswith("JSON decode error")

    def test_missing_schema(self):
        """An unknown schema name raises ConfigError."""
        with pytest.raises(ConfigError):
            ReportValidator("no_such_report")


class TestExperimentTooling:
    """Test cases for grid search, method runs and domain rollups."""

    def test_grid_search_sorted(self, bench_dir, quick_config):
        """Grid points come back best first by S then B."""
        points = grid_search(str(bench_dir), quick_config, lrs=[0.05, 0.2], noise_bs=[1.0, 2.0])
        assert len(points) == 4
        keys = [(-p.s_percent, -p.b_percent) for p in points]
        assert keys == sorted(keys)

    def test_grid_search_ignores_width_for_baselines(self, bench_dir):
        """Noiseless semantics are searched over learning rate only."""
        config = SolveConfig.create(semantics="product", samples=2, max_epochs=50)
        points = grid_search(str(bench_dir), config, lrs=[0.1], noise_bs=[1.0, 2.0])
        assert [p.noise_b for p in points] == [None]

    def test_run_methods_writes_reports(self, bench_dir, tmp_path):
        """Each benchmark and method pair gets a report file."""
        configs = {"gt-uniform": SolveConfig.create(samples=2, max_epochs=50),
                   "godel": SolveConfig.create(semantics="godel", samples=2, max_epochs=50)}
        out_dir = tmp_path / "results"
        reports = run_methods([str(bench_dir)], configs, str(out_dir))
        assert set(reports) == {(bench_dir.name, "gt-uniform"), (bench_dir.name, "godel")}
        written = out_dir / report_filename(bench_dir.name, "godel")
        assert json.loads(read_text_file(str(written)))["config"]["semantics"] == "godel"

    def test_rollup_domains(self):
        """Benchmarks are averaged per domain."""
        config = SolveConfig.create()

        def bench(name, s, b):
            return BenchReport(benchmark=name, config=config, instances=[InstanceResult(path=name)],
                               s_percent=s, b_percent=b, curve=[CurvePoint(epoch=100, solved_ratio=s / 100)])

        rows = rollup_domains([bench("uf20", 90.0, 100.0), bench("uf50", 70.0, 100.0), bench("flat30", 40.0, 80.0)],
                              {"uf20": "random", "uf50": "random"})
        by_domain = {r.domain: r for r in rows}
        assert by_domain["random"].s_mean == pytest.approx(80.0)
        assert by_domain["random"].s_std == pytest.approx(10.0)
        assert by_domain["flat30"].benchmarks == ["flat30"]
        assert all(r.method == "gt-uniform" for r in rows)
