"""
Tests for directional peridynamic and variable-exponent energies.
"""

import math

import numpy as np
import pytest
from scipy.integrate import quad as integrate

from perisobolev.energies.directional import (
    anisotropic_peridynamic_norm,
    directional_modular_varexp,
    lemma_bound,
    local_energy,
    local_modular,
    peridynamic_energy,
    peridynamic_modular,
    peridynamic_seminorm,
)
from perisobolev.energies.quadrature import SingularQuadSpec, sphere_rule
from perisobolev.errors import RejectionError
from perisobolev.exponents import AnisotropyParams, ExponentField
from perisobolev.grids.functions import TestFunction
from perisobolev.grids.lattice import Box, UniformGrid
from perisobolev.grids.operations import sample

GAUSS_GRID = UniformGrid(Box((-6.0,), (6.0,)), (600,))
GAUSS = sample(TestFunction("gaussian"), GAUSS_GRID)


def gaussian_seminorm(delta: float) -> float:
    """[e^{-x²}]_{1/2,2,δ} from ∫|u(x+h) - u(x)|²dx = 2√(π/2)(1 - e^{-h²/2})."""
    c = 2.0 * math.sqrt(math.pi / 2.0)
    inner, _ = integrate(lambda h: c * -math.expm1(-h * h / 2.0) / (h * h), 0.0, delta)
    return 2.0 * inner


class TestPeridynamicSeminorm:
    """Tests for the constant-exponent seminorm and energy."""

    def test_gaussian_oracle(self):
        """Test the p = 2 seminorm of a Gaussian against its closed form."""
        report = peridynamic_seminorm(GAUSS, 0, 0.5, 2.0, 0.2)

        assert report.convention == "peridynamic_const"
        assert report.params['interpolation'] == "cubic"
        assert report.value == pytest.approx(gaussian_seminorm(0.2), rel=1e-3)
        assert report.error_estimate < 1e-2 * report.value

    def test_below_lemma_bound(self):
        """Test [u] ≤ 2δ^{p(1-s)}/(p(1-s))·‖∂u‖_p^p."""
        for p in (2.0, 3.0):
            value = peridynamic_seminorm(GAUSS, 0, 0.4, p, 0.5).value
            assert value <= lemma_bound(GAUSS, 0, 0.4, p, 0.5)

    def test_energy_scales_seminorm(self):
        """Test J_δ = δ^{-p(1-s)}[u]."""
        semi = peridynamic_seminorm(GAUSS, 0, 0.5, 2.0, 0.1).value

        assert peridynamic_energy(GAUSS, 0, 0.5, 2.0, 0.1) == pytest.approx(semi / 0.1)

    def test_zero_horizon_is_local(self):
        """Test that δ = 0 selects the local functional."""
        assert peridynamic_energy(GAUSS, 0, 0.5, 2.0, 0.0) == local_energy(GAUSS, 0, 0.5, 2.0)

    def test_local_energy_of_gaussian(self):
        """Test (2/(p(1-s)))‖u'‖² = 2√(π/2) for s = 1/2, p = 2."""
        assert local_energy(GAUSS, 0, 0.5, 2.0) == pytest.approx(2.0 * math.sqrt(math.pi / 2.0),
                                                                 rel=1e-8)

    @pytest.mark.parametrize("s,p", [(0.5, 2.0), (0.3, 3.0), (0.7, 1.5)])
    def test_linear_interpolation_below_spacing_is_local(self, s, p):
        """Test that δ below the spacing reproduces the forward-difference local energy."""
        grid = UniformGrid(Box((0.0,), (1.0,)), (16,))
        u = sample(TestFunction("polynomial_bump", center=(0.45,), width=0.4), grid)
        delta = 0.5 / 16
        nonlocal_value = peridynamic_energy(u, 0, s, p, delta, interpolation="linear")
        local_value = local_modular(grid, 0, s, p).value(u.values)

        assert nonlocal_value == pytest.approx(local_value, rel=1e-8)

    def test_rejects_bad_parameters(self):
        """Test rejection of s, p and δ outside their ranges."""
        with pytest.raises(RejectionError):
            peridynamic_seminorm(GAUSS, 0, 1.0, 2.0, 0.1)
        with pytest.raises(RejectionError):
            peridynamic_seminorm(GAUSS, 0, 0.5, 1.0, 0.1)
        with pytest.raises(RejectionError):
            peridynamic_modular(GAUSS_GRID, 0, 0.5, 2.0, -0.1)
        with pytest.raises(RejectionError):
            peridynamic_modular(GAUSS_GRID, 1, 0.5, 2.0, 0.1)

    def test_rejects_unknown_interpolation(self):
        """Test that only cubic and linear interpolation exist."""
        with pytest.raises(RejectionError):
            peridynamic_seminorm(GAUSS, 0, 0.5, 2.0, 0.1, interpolation="spline")

    def test_density_integrates_to_value(self):
        """Test that the node density sums to the seminorm."""
        m = peridynamic_modular(GAUSS_GRID, 0, 0.5, 2.0, 0.1)
        density = m.node_density(GAUSS.values)

        assert np.sum(density) * GAUSS_GRID.cell_volume == pytest.approx(m.value(GAUSS.values))


class TestDirectionalVarexp:
    """Tests for J_{s,p(·,·)} with h over all of R."""

    def test_gaussian_oracle(self):
        """Test J_{1/2,2}(e^{-x²}) = 2π."""
        report = directional_modular_varexp(GAUSS, 0, 0.5, 2.0)

        assert report.convention == "directional_varexp"
        assert report.value == pytest.approx(2.0 * math.pi, rel=5e-3)

    def test_variable_exponent_is_finite(self):
        """Test that a field in [1.8, 2.2] gives a finite positive energy."""
        grid = UniformGrid(Box((-1.5,), (1.5,)), (150,))
        u = sample(TestFunction("bump", amplitude=0.2), grid)
        field = ExponentField("separable_sum", base=2.0, amplitude=0.2)
        value = directional_modular_varexp(u, 0, 0.5, field).value

        assert np.isfinite(value)
        assert value > 0.0


class TestAnisotropic:
    """Tests for the anisotropic norm and the sphere rule."""

    def test_anisotropic_norm_sums_directions(self):
        """Test the two-direction norm on a separable 2-D bump."""
        grid = UniformGrid(Box((-1.5, -1.5), (1.5, 1.5)), (30, 30))
        u = sample(TestFunction("bump", center=(0.0, 0.0)), grid)
        params = AnisotropyParams((0.5, 0.5), (2.0, 2.0), (0.3, 0.3))
        norm = anisotropic_peridynamic_norm(u, params)

        assert norm > 0.0
        with pytest.raises(RejectionError):
            anisotropic_peridynamic_norm(u, params.with_deltas((0.3, 0.0)))

    def test_sphere_rule_one_dimension(self):
        """Test that the 1-D sphere is the two directions ±1."""
        dirs, weights = sphere_rule(1, 32)

        assert sorted(dirs.ravel().tolist()) == [-1.0, 1.0]
        assert np.allclose(weights, 1.0)

    def test_quad_spec_validation(self):
        """Test that shallow grading is rejected."""
        with pytest.raises(RejectionError):
            SingularQuadSpec(levels=2)
