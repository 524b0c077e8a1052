"""
Tests for the command registry and run driver.
"""

import json

import pytest

from perisobolev import __version__
from perisobolev.config import RunConfig, parse_text
from perisobolev.grids.csv_io import read_grid_function
from perisobolev.performance import PerformanceMonitor
from perisobolev.runner import (
    EXIT_CHECK_FAILED,
    EXIT_CONFIG,
    EXIT_NUMERICAL,
    EXIT_OK,
    CommandOutcome,
    CommandRegistry,
    dump_json,
    register_command,
    run,
)
from perisobolev.validation import CheckReport

NORMS = """
[run]
command = norms

[grid]
lo = -2
hi = 2
cells = 40

[function]
kind = gaussian

[exponent]
kind = separable_sum
base = 2
amplitude = 0.3

[norms]
kind = lebesgue_weighted
"""

SOLVE = """
[run]
command = solve

[grid]
lo = 0
hi = 1
cells = 16

[domain]
lo = 0
hi = 1

[source]
value = 1

[params]
s = 0.5
p = 2
delta = 0
"""

EIGEN = """
[run]
command = eigen

[grid]
lo = 0
hi = 1
cells = 16

[domain]
lo = 0
hi = 1

[exponent]
kind = constant
base = 2

[eigen]
s = 0.3
"""


def configured(text: str, out) -> RunConfig:
    config = parse_text(text)
    config.out = str(out)
    return config


class TestRegistry:
    """Tests for CommandRegistry."""

    def test_every_command_registered(self):
        """Test the seven commands."""
        assert set(CommandRegistry.list_commands()) >= {
            "norms", "seminorm", "bbm", "gamma", "solve", "eigen", "check"}

    def test_duplicate_registration(self):
        """Test that a name cannot be registered twice."""
        with pytest.raises(ValueError):
            register_command("norms")(lambda config: CommandOutcome(summary={}))

    def test_exit_codes(self):
        """Test the outcome to exit-code mapping."""
        assert CommandOutcome(summary={}).exit_code == EXIT_OK
        assert CommandOutcome(summary={}, passed=False).exit_code == EXIT_CHECK_FAILED
        assert CommandOutcome(summary={}, passed=False, converged=False).exit_code == EXIT_NUMERICAL


class TestRun:
    """Tests for run()."""

    def test_norms_writes_json(self, tmp_path):
        """Test a successful norms run and its summary file."""
        config = configured(NORMS, tmp_path)

        assert run(config) == EXIT_OK
        data = json.loads((tmp_path / "norms.json").read_text())
        assert data['digest'] == config.digest
        assert data['version'] == __version__
        assert data['exit_code'] == 0
        assert data['config']['norms']['kind'] == "lebesgue_weighted"
        assert data['result']['luxemburg']['norm'] > 0

    def test_solve_writes_tables(self, tmp_path):
        """Test the solve outputs: summary, history and solution."""
        config = configured(SOLVE, tmp_path)
        monitor = PerformanceMonitor()

        assert run(config, monitor) == EXIT_OK
        assert monitor.get_metrics("solve").end_time is not None
        assert monitor.get_metrics("solve").iterations > 0
        history = (tmp_path / "solve_history.csv").read_text().splitlines()
        assert history[0] == f"# digest={config.digest}"
        assert history[2] == "# command=solve"
        u = read_grid_function(tmp_path / "solve_solution.csv")
        assert u.values.max() > 0

    def test_iteration_cap_is_numerical_failure(self, tmp_path):
        """Test exit code 3 when the solver stops at max_iter."""
        config = configured(SOLVE + "\n[solver]\nmax_iter = 1\n", tmp_path)

        assert run(config) == EXIT_NUMERICAL
        data = json.loads((tmp_path / "solve.json").read_text())
        assert data['converged'] is False
        assert "stopped:max_iter" in data['result']['result']['flags']

    def test_rejected_input(self, tmp_path):
        """Test exit code 2 when Ω holds no grid node."""
        config = configured(SOLVE.replace("[domain]\nlo = 0\nhi = 1",
                                          "[domain]\nlo = 2\nhi = 3"), tmp_path)

        assert run(config) == EXIT_CONFIG
        assert not (tmp_path / "solve.json").exists()

    def test_outputs_are_reproducible(self, tmp_path):
        """Test that two runs write identical files."""
        first, second = tmp_path / "a", tmp_path / "b"
        run(configured(SOLVE, first))
        run(configured(SOLVE, second))

        for name in ("solve.json", "solve_history.csv", "solve_solution.csv"):
            assert (first / name).read_bytes() == (second / name).read_bytes()

    def test_thread_count_does_not_change_outputs(self, tmp_path):
        """Test that threads=1 and threads=8 write identical files."""
        text = SOLVE.replace("command = solve", "command = solve\nthreads = {}")
        text += "\n[solver]\nstudy_deltas = 0.25 0.125\n"
        first, second = tmp_path / "one", tmp_path / "eight"
        single, pooled = configured(text.format(1), first), configured(text.format(8), second)

        assert pooled.threads == 8
        assert run(single) == run(pooled)
        for name in ("solve.json", "solve_history.csv", "solve_solution.csv"):
            assert (first / name).read_bytes() == (second / name).read_bytes()


class TestDumpJson:
    """Tests for dump_json."""

    def test_numpy_values(self):
        """Test that numpy scalars and arrays serialize."""
        import numpy as np

        text = dump_json({'b': np.float64(1.5), 'a': np.arange(2), 'c': (1, 2)})

        assert json.loads(text) == {'a': [0, 1], 'b': 1.5, 'c': [1, 2]}
        assert text.endswith("\n")
        assert text.index('"a"') < text.index('"b"')


class TestEigenCommand:
    """Tests for the eigen command outcome."""

    def test_eigenpair_passes(self, tmp_path):
        """Test a converged eigenpair with passing checks."""
        assert run(configured(EIGEN, tmp_path)) == EXIT_OK
        data = json.loads((tmp_path / "eigen.json").read_text())
        assert data['result']['residual_check']['passed'] is True

    def test_failed_residual_fails_run(self, tmp_path, monkeypatch):
        """Test that a failing weak-form residual is reported as a failed check."""
        def failing_residual(u, lambda1, prob):
            report = CheckReport(name="residual")
            report.add_check("residual", False, value=1.0, bound=1e-6)
            return report

        monkeypatch.setattr("perisobolev.runner.residual_check", failing_residual)

        assert run(configured(EIGEN, tmp_path)) == EXIT_CHECK_FAILED
