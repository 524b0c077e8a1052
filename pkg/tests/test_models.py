"""
Tests for result models and check reports.
"""

import math

import pytest

from perisobolev.models import EigenResult, EnergyReport, LuxemburgResult, SolveResult, SweepResult
from perisobolev.validation import CheckReport


class TestEnergyReport:
    """Tests for EnergyReport."""

    def test_validation_success(self):
        """Test a finite nonnegative report."""
        report = EnergyReport(value=2.0, error_estimate=1e-4, convention="gagliardo")

        valid, errors = report.validate()
        assert valid
        assert errors == []
        assert not report.flagged

    def test_validation_errors(self):
        """Test negative values, NaN estimates and a missing convention."""
        report = EnergyReport(value=-1.0, error_estimate=math.nan, convention="")

        valid, errors = report.validate()
        assert not valid
        assert len(errors) == 3


class TestLuxemburgResult:
    """Tests for LuxemburgResult."""

    def test_modular_at_norm_must_be_one(self):
        """Test that a norm whose modular is not 1 is invalid."""
        result = LuxemburgResult(norm=2.0, modular_at_norm=0.9, bisection_iterations=10,
                                 bracket=(1.0, 4.0))

        valid, errors = result.validate()
        assert not valid
        assert "expected 1" in errors[0]

    def test_zero_norm(self):
        """Test that the zero norm skips the modular check."""
        result = LuxemburgResult(norm=0.0, modular_at_norm=0.0, bisection_iterations=0,
                                 bracket=(0.0, 0.0))

        assert result.validate()[0]


class TestSweepResult:
    """Tests for SweepResult."""

    def test_rows_include_extras(self):
        """Test that extra columns appear in every row."""
        sweep = SweepResult(parameter="delta", values=[0.2, 0.1], ratios=[1.9, 1.95], target=2.0,
                            extrapolated=2.0, relative_error=0.0, extras={'density_gap': [0.1, 0.05]})
        rows = sweep.rows()

        assert rows[1]['density_gap'] == 0.05
        assert rows[0]['abs_err'] == pytest.approx(0.1)
        assert sweep.validate()[0]

    def test_relative_error_mismatch(self):
        """Test that an inconsistent relative error is reported."""
        sweep = SweepResult(parameter="s", values=[0.9, 0.99], ratios=[1.0, 1.1], target=2.0,
                            extrapolated=1.5, relative_error=0.1)

        valid, errors = sweep.validate()
        assert not valid
        assert "relative_error" in errors[0]


class TestSolveResult:
    """Tests for SolveResult."""

    def test_increasing_energy_is_invalid(self):
        """Test that an energy increase is an invariant violation."""
        result = SolveResult(u=None, energy_history=[0.0, -1.0, -0.5], grad_norm_history=[1, 1, 1],
                             grad_norm_final=1.0, iterations=2, converged=False,
                             stop_reason="max_iter", direction_constants=[1.0], mu=0.0)

        assert not result.validate()[0]


class TestEigenResult:
    """Tests for EigenResult."""

    def test_to_dict_omits_function(self):
        """Test the serialized fields."""
        result = EigenResult(lambda1=3.0, u=object(), residual=1e-7, S_of_u=1.0, k_of_u=1.0,
                             history=[4.0, 3.0], step_sizes=[0.5], iterations=1, converged=True)
        data = result.to_dict()

        assert 'u' not in data
        assert data['index'] == 1
        assert result.validate(tol=1e-6)[0]

    def test_unnormalized_is_invalid(self):
        """Test that k(u) must be 1."""
        result = EigenResult(lambda1=3.0, u=None, residual=1e-7, S_of_u=1.0, k_of_u=1.1,
                             history=[3.0], step_sizes=[], iterations=0, converged=True)

        valid, errors = result.validate()
        assert not valid
        assert "normalized" in errors[0]


class TestCheckReport:
    """Tests for CheckReport."""

    def test_passed_and_failed(self):
        """Test aggregation of named checks."""
        report = CheckReport(name="demo")
        report.add_check("a", True, value=1.0, bound=2.0)
        report.add_check("b", False, value=3.0, bound=2.0)

        assert not report.passed
        assert report.failed_checks == ["b"]
        assert report.to_dict()['failed'] == ["b"]

    def test_merge_prefixes_names(self):
        """Test that merged checks carry the source prefix."""
        outer = CheckReport(name="outer")
        inner = CheckReport(name="inner")
        inner.add_check("x", True)
        outer.merge(inner)
        outer.merge(inner, prefix="again")

        assert [c['name'] for c in outer.checks] == ["inner.x", "again.x"]
        assert outer.passed

    def test_empty_report_passes(self):
        """Test that no checks means passed."""
        assert CheckReport(name="empty").passed
