"""
Tests for the δ → 0 and s → 1 limit sweeps and the recovery-sequence check.
"""

import math

import pytest

from perisobolev.bbm import (
    bbm_delta_sweep,
    bbm_s_sweep_varexp,
    bbm_sequence_liminf_check,
    gamma_energy_convergence,
    richardson,
)
from perisobolev.energies.quadrature import SingularQuadSpec
from perisobolev.errors import RejectionError
from perisobolev.exponents import AnisotropyParams, ExponentField
from perisobolev.grids.functions import TestFunction
from perisobolev.grids.lattice import Box, UniformGrid
from perisobolev.grids.operations import sample

GRID = UniformGrid(Box((-6.0,), (6.0,)), (600,))
GAUSS = sample(TestFunction("gaussian"), GRID)
DELTAS = [0.2, 0.1, 0.05, 0.025]


class TestRichardson:
    """Tests for the linear extrapolation."""

    def test_line_through_two_points(self):
        """Test the value at zero of a line."""
        assert richardson(2.0, 5.0, 1.0, 3.0) == pytest.approx(1.0)


class TestDeltaSweep:
    """Tests for the horizon sweep."""

    def test_gaussian_converges_to_local_energy(self):
        """Test the p = 2 sweep of exp(-x²) against 2√(π/2)."""
        result = bbm_delta_sweep(GAUSS, 0, 0.5, 2.0, DELTAS)

        assert result.target == pytest.approx(2.0 * math.sqrt(math.pi / 2.0), rel=1e-8)
        assert result.passed
        assert result.relative_error < 1e-2
        assert result.flags == []
        assert result.extras['lemma_bound_ok'] == [1.0] * 4
        valid, errors = result.validate()
        assert valid, errors

    def test_ratios_approach_from_below(self):
        """Test that every ratio stays below the local value for p = 3."""
        result = bbm_delta_sweep(GAUSS, 0, 0.25, 3.0, DELTAS)

        assert all(r <= result.target * (1 + 1e-6) for r in result.ratios)
        assert result.passed

    def test_rows_align_with_values(self):
        """Test one output row per horizon."""
        result = bbm_delta_sweep(GAUSS, 0, 0.5, 2.0, DELTAS)
        rows = result.rows()

        assert [r['param'] for r in rows] == DELTAS
        assert set(rows[0]) >= {'ratio', 'target', 'abs_err', 'rel_err', 'density_gap'}

    def test_threads_do_not_change_results(self):
        """Test that the sweep is bit-identical across thread counts."""
        one = bbm_delta_sweep(GAUSS, 0, 0.5, 2.0, DELTAS, threads=1)
        four = bbm_delta_sweep(GAUSS, 0, 0.5, 2.0, DELTAS, threads=4)

        assert one.ratios == four.ratios

    def test_rejects_bad_horizons(self):
        """Test that horizon lists must be long enough and decreasing."""
        with pytest.raises(RejectionError):
            bbm_delta_sweep(GAUSS, 0, 0.5, 2.0, [0.2, 0.1])
        with pytest.raises(RejectionError):
            bbm_delta_sweep(GAUSS, 0, 0.5, 2.0, [0.1, 0.2, 0.05])

    def test_rejects_rough_function(self):
        """Test that an indicator cannot be swept."""
        u = sample(TestFunction("indicator", lo=(-1.0,), hi=(1.0,)), GRID)
        with pytest.raises(RejectionError, match="C2"):
            bbm_delta_sweep(u, 0, 0.5, 2.0, DELTAS)


class TestLiminf:
    """Tests for the liminf inequality along a sequence."""

    def test_constant_sequence(self):
        """Test the liminf inequality for u_k = u."""
        report = bbm_sequence_liminf_check([GAUSS] * 4, DELTAS, 0, 0.5, 2.0, GAUSS)

        assert report.passed, report.failed_checks
        assert report.data['liminf'] <= report.data['target'] * (1 + 1e-6)

    def test_misaligned_inputs(self):
        """Test that functions and horizons must align."""
        with pytest.raises(RejectionError):
            bbm_sequence_liminf_check([GAUSS], DELTAS, 0, 0.5, 2.0, GAUSS)


class TestSSweep:
    """Tests for the s → 1 sweep with a variable exponent."""

    @pytest.mark.slow
    def test_bump_converges(self):
        """Test (1-s)J_{s,p(·,·)}(u) against ∫(2/p̄)|u'|^{p̄} for p in [1.8, 2.2]."""
        grid = UniformGrid(Box((-1.5,), (1.5,)), (300,))
        u = sample(TestFunction("bump"), grid)
        field = ExponentField("separable_sum", base=2.0, amplitude=0.2)
        result = bbm_s_sweep_varexp(u, field, [0.9, 0.95, 0.99], quad=SingularQuadSpec(levels=40))

        assert result.parameter == "s"
        assert result.relative_error < 0.05
        assert len(result.extras['density_gap']) == 3

    def test_rejects_orders_not_increasing(self):
        """Test that orders must increase toward 1."""
        with pytest.raises(RejectionError):
            bbm_s_sweep_varexp(GAUSS, ExponentField.constant(2.0), [0.95, 0.9])
        with pytest.raises(RejectionError):
            bbm_s_sweep_varexp(GAUSS, ExponentField.constant(2.0), [0.9, 1.0])


class TestGamma:
    """Tests for the recovery-sequence energy check."""

    @pytest.mark.slow
    def test_vanishing_direction_approaches_local(self):
        """Test J_δ(u) → J(u) along x1 with x2 fixed at δ = 0.4."""
        grid = UniformGrid(Box((-1.5, -1.5), (1.5, 1.5)), (96, 96))
        u = sample(TestFunction("bump", center=(0.0, 0.0)), grid)
        params = AnisotropyParams((0.5, 0.6), (2.0, 2.5), (0.0, 0.4))
        report = gamma_energy_convergence(u, params, [0.4, 0.2, 0.1, 0.05])

        assert report.passed, report.failed_checks
        assert len(report.data['totals']) == 4
        assert report.data['totals'][-1] == pytest.approx(report.data['limit_total'], rel=0.05)

    def test_dimension_mismatch(self):
        """Test that parameters must match the grid dimension."""
        params = AnisotropyParams((0.5, 0.6), (2.0, 2.5), (0.0, 0.4))
        with pytest.raises(RejectionError):
            gamma_energy_convergence(GAUSS, params, [0.2, 0.1])
