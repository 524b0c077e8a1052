"""
Tests for the Dirichlet problem of the anisotropic peridynamic p-Laplacian.
"""

import numpy as np
import pytest

from perisobolev.dirichlet import (
    DirichletProblem,
    delta_convergence_study,
    energy,
    gradient,
    gradient_check,
    solve,
    uniqueness_probe,
    weak_residual,
)
from perisobolev.errors import NonConvergenceError, RejectionError
from perisobolev.exponents import AnisotropyParams
from perisobolev.grids.functions import GridFunction
from perisobolev.grids.lattice import Box, UniformGrid

UNIT = Box((0.0,), (1.0,))
GRID = UniformGrid(UNIT, (32,))
ONES = GridFunction(GRID, np.ones(GRID.shape))


def local_p2_solution(grid: UniformGrid, s: float, f: np.ndarray) -> np.ndarray:
    """(1/(1-s))·tridiag(-1, 2, -1)/Δ² u = f with zero ghost nodes."""
    n = grid.cells[0]
    h = grid.spacing[0]
    T = 2.0 * np.eye(n) - np.eye(n, k=1) - np.eye(n, k=-1)
    return np.linalg.solve(T / (h * h * (1.0 - s)), f)


def problem(delta: float = 0.0, p: float = 2.0, s: float = 0.5, **kw) -> DirichletProblem:
    return DirichletProblem(GRID, UNIT, ONES, AnisotropyParams((s,), (p,), (delta,)), **kw)


class TestLocalOracle:
    """Tests against the tridiagonal system of the local p = 2 problem."""

    def test_local_solution(self):
        """Test δ = 0 against the direct solve."""
        result = solve(problem(0.0), stagnation_rtol=0.0)
        expected = local_p2_solution(GRID, 0.5, np.ones(32))

        assert result.converged
        assert result.stop_reason == "gradient"
        np.testing.assert_allclose(result.u.values, expected, atol=1e-7)

    def test_horizon_below_spacing_matches_local(self):
        """Test that linear interpolation with δ < Δ gives the local solution."""
        result = solve(problem(0.5 / 32, interpolation="linear"), stagnation_rtol=0.0)
        expected = local_p2_solution(GRID, 0.5, np.ones(32))

        np.testing.assert_allclose(result.u.values, expected, atol=1e-7)

    def test_energy_at_minimizer(self):
        """Test I(u) = -½∫fu for a quadratic energy."""
        prob = problem(0.0, s=0.3)
        u = solve(prob, stagnation_rtol=0.0).u

        assert energy(u, prob) == pytest.approx(-0.5 * GRID.cell_volume * float(np.sum(u.values)),
                                                rel=1e-6)


class TestEnergy:
    """Tests for the energy functional."""

    @pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
    def test_midpoint_convexity(self, p):
        """Test I((v+w)/2) ≤ (I(v)+I(w))/2 on random pairs."""
        prob = problem(0.2, p=p, s=0.4)
        rng = np.random.default_rng(11)
        for _ in range(20):
            v = GridFunction(GRID, rng.standard_normal(GRID.shape))
            w = GridFunction(GRID, rng.standard_normal(GRID.shape))
            middle = energy((v + w) * 0.5, prob)
            chord = 0.5 * (energy(v, prob) + energy(w, prob))

            assert middle <= chord + 1e-10 * max(abs(chord), 1.0)

    def test_nonnegative_without_source(self):
        """Test I(v) ≥ 0 for f = 0, with equality at v = 0."""
        prob = DirichletProblem(GRID, UNIT, GridFunction.zeros(GRID),
                                AnisotropyParams((0.4,), (2.5,), (0.2,)))
        v = GridFunction(GRID, np.random.default_rng(3).standard_normal(GRID.shape))

        assert energy(v, prob) > 0.0
        assert energy(GridFunction.zeros(GRID), prob) == 0.0


class TestSolver:
    """Tests for the descent iteration."""

    def test_energy_history_nonincreasing(self):
        """Test monotone energies and the result invariants for p = 3."""
        prob = problem(0.2, p=3.0, s=0.4)
        result = solve(prob)

        assert result.converged
        assert all(b <= a for a, b in zip(result.energy_history, result.energy_history[1:]))
        assert result.direction_constants == pytest.approx([1.0])
        assert "gradient_check" not in result.flags
        valid, errors = result.validate()
        assert valid, errors

    def test_weak_residual_at_solution(self):
        """Test that the weak residual at the solution is below tolerance."""
        prob = problem(0.25)
        result = solve(prob, stagnation_rtol=0.0)

        assert weak_residual(result.u, prob) <= 1e-9
        assert result.grad_norm_final <= 1e-9

    def test_iteration_cap_is_flagged(self):
        """Test that hitting max_iter is reported."""
        result = solve(problem(0.25), max_iter=1)

        assert not result.converged
        assert result.stop_reason == "max_iter"
        assert "stopped:max_iter" in result.flags

    def test_iteration_cap_raises_on_request(self):
        """Test raise_on_failure."""
        with pytest.raises(NonConvergenceError):
            solve(problem(0.25), max_iter=1, raise_on_failure=True)

    def test_unit_composition(self):
        """Test that unit constants double the p = 2 energy and halve the solution."""
        half = solve(problem(0.0), stagnation_rtol=0.0).u
        unit = solve(problem(0.0, composition="unit"), stagnation_rtol=0.0).u

        np.testing.assert_allclose(unit.values, 0.5 * half.values, atol=1e-7)


class TestGradient:
    """Tests for the discrete gradient."""

    @pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
    def test_matches_central_difference(self, p):
        """Test ⟨∇I(v), w⟩ against a central difference of I."""
        prob = problem(0.2, p=p, s=0.4)
        v = prob.lift(np.random.default_rng(3).standard_normal(prob.free.size))
        report = gradient_check(v, prob, seed=4)

        assert report.passed, report.data

    def test_two_dimensional_mixed_directions(self):
        """Test a 2-D problem with one local and one nonlocal direction."""
        grid = UniformGrid(Box((-0.25, -0.25), (1.25, 1.25)), (24, 24))
        omega = Box((0.0, 0.0), (1.0, 1.0))
        f = GridFunction(grid, np.ones(grid.shape))
        prob = DirichletProblem(grid, omega, f, AnisotropyParams((0.4, 0.6), (3.0, 1.5), (0.2, 0.0)))
        v = prob.lift(np.random.default_rng(5).standard_normal(prob.free.size))

        assert prob.free.size == 16 * 16
        assert prob.smoothing > 0.0
        assert gradient_check(v, prob).passed

    def test_vanishes_outside_omega(self):
        """Test that gradient entries outside Ω are zero."""
        grid = UniformGrid(Box((-0.25,), (1.25,)), (24,))
        f = GridFunction(grid, np.ones(grid.shape))
        prob = DirichletProblem(grid, UNIT, f, AnisotropyParams((0.5,), (2.0,), (0.2,)))
        g = gradient(prob.lift(np.ones(prob.free.size)), prob)

        assert np.all(g.values[~prob.mask] == 0.0)


class TestRejections:
    """Tests for invalid problems."""

    def test_unknown_composition(self):
        """Test that only inverse_p and unit exist."""
        with pytest.raises(RejectionError, match="composition"):
            problem(composition="half")

    def test_source_on_other_grid(self):
        """Test that f must live on the problem grid."""
        other = UniformGrid(UNIT, (16,))
        with pytest.raises(RejectionError):
            DirichletProblem(GRID, UNIT, GridFunction(other, np.ones(16)),
                             AnisotropyParams((0.5,), (2.0,), (0.0,)))

    def test_empty_omega(self):
        """Test that Ω must contain a node."""
        with pytest.raises(RejectionError, match="Omega"):
            DirichletProblem(GRID, Box((0.0,), (0.01,)), ONES,
                             AnisotropyParams((0.5,), (2.0,), (0.0,)))

    def test_dimension_mismatch(self):
        """Test that parameters must match the grid."""
        with pytest.raises(RejectionError):
            DirichletProblem(GRID, UNIT, ONES, AnisotropyParams((0.5, 0.5), (2.0, 2.0), (0.0, 0.0)))

    def test_negative_smoothing(self):
        """Test that mu must be nonnegative."""
        with pytest.raises(RejectionError):
            problem(p=1.5, mu=-1.0)

    def test_energy_of_function_outside_omega(self):
        """Test that trial functions must vanish outside Ω."""
        grid = UniformGrid(Box((-0.25,), (1.25,)), (24,))
        f = GridFunction(grid, np.ones(grid.shape))
        prob = DirichletProblem(grid, UNIT, f, AnisotropyParams((0.5,), (2.0,), (0.2,)))
        with pytest.raises(RejectionError):
            energy(f, prob)


class TestStudies:
    """Tests for uniqueness and horizon studies."""

    def test_random_starts_agree(self):
        """Test that two random starts reach the same solution."""
        report = uniqueness_probe(problem(0.2, s=0.4), stagnation_rtol=0.0)

        assert report.passed, report.checks

    def test_delta_study_reaches_local_solution(self):
        """Test that horizons shrinking below the spacing recover u_0."""
        prob = problem(0.0)
        report = delta_convergence_study(prob, [0], [0.25, 0.125, 0.0625, 0.5 / 32],
                                         stagnation_rtol=0.0)

        assert report.data['distances'][-1] <= 1e-6
        assert report.data['distances'][-1] < report.data['distances'][0]
        assert "final_distance" not in report.failed_checks

    def test_delta_study_rejects_bad_direction(self):
        """Test that vanishing directions must exist."""
        with pytest.raises(RejectionError):
            delta_convergence_study(problem(0.0), [1], [0.1, 0.05])
