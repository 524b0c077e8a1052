"""
Tests for modulars and Luxemburg norms.
"""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from perisobolev.errors import RejectionError
from perisobolev.exponents import ScalarExponentField
from perisobolev.grids.functions import GridFunction, TestFunction
from perisobolev.grids.lattice import Box, UniformGrid
from perisobolev.grids.norms import lp_norm
from perisobolev.grids.operations import sample
from perisobolev.luxemburg import (
    bisect,
    convergence_equivalence,
    luxemburg_norm,
    modular,
    norm_modular_relations,
)
from perisobolev.modular import ModularKind

GRID = UniformGrid(Box((-2.0,), (2.0,)), (40,))
U = sample(TestFunction("gaussian", center=(0.2,), width=0.7), GRID)
V = sample(TestFunction("polynomial_bump", center=(-0.5,), width=1.0), GRID)
VARIABLE = ScalarExponentField.independent(2.0, amplitude=0.5, slope=0.8)


class TestBisection:
    """Tests for the bisection routine."""

    def test_constant_exponent_is_closed_form(self):
        """Test that a constant exponent needs no bisection."""
        result = bisect(lambda lam: (2.0 / lam) ** 2, 2.0, 2.0)

        assert result.norm == pytest.approx(2.0)
        assert result.bisection_iterations == 0

    def test_variable_profile(self):
        """Test a profile with two exponents."""
        profile = lambda lam: 0.5 * (3.0 / lam) ** 2 + 0.5 * (3.0 / lam) ** 4
        result = bisect(profile, 2.0, 4.0, rtol=1e-12)

        assert result.norm == pytest.approx(3.0, rel=1e-10)
        assert result.modular_at_norm == pytest.approx(1.0, abs=1e-9)
        valid, errors = result.validate()
        assert valid, errors

    def test_zero_function(self):
        """Test that a vanishing modular gives norm 0."""
        zero = GridFunction.zeros(GRID)
        result = luxemburg_norm(zero, ModularKind.LEBESGUE_PLAIN, 2.0)

        assert result.norm == 0.0
        assert result.bisection_iterations == 0


class TestLuxemburgNorm:
    """Tests for Lebesgue Luxemburg norms."""

    def test_constant_exponent_matches_lp(self):
        """Test ‖u‖ = ‖u‖_p for the plain convention."""
        result = luxemburg_norm(U, ModularKind.LEBESGUE_PLAIN, 3.0)

        assert result.norm == pytest.approx(lp_norm(U, 3.0), rel=1e-10)

    def test_weighted_constant_exponent(self):
        """Test ‖u‖ = (‖u‖_p^p/p)^{1/p} for the weighted convention."""
        result = luxemburg_norm(U, ModularKind.LEBESGUE_WEIGHTED, 3.0)

        assert result.norm == pytest.approx((lp_norm(U, 3.0) ** 3 / 3.0) ** (1.0 / 3.0), rel=1e-10)

    def test_modular_report_names_convention(self):
        """Test that modular() returns an EnergyReport naming its kind."""
        report = modular(U, "lebesgue_weighted", VARIABLE)

        assert report.convention == "lebesgue_weighted"
        assert report.value > 0
        valid, errors = report.validate()
        assert valid, errors

    def test_nonlocal_kind_needs_order(self):
        """Test that nonlocal kinds without s are rejected."""
        with pytest.raises(RejectionError):
            modular(U, ModularKind.DIRECTIONAL_VAREXP, 2.0)

    @settings(max_examples=25, deadline=None)
    @given(st.floats(min_value=-5.0, max_value=5.0), st.floats(min_value=-5.0, max_value=5.0))
    def test_triangle_inequality(self, a, b):
        """Test ‖au + bv‖ ≤ ‖au‖ + ‖bv‖ with a variable exponent."""
        kind = ModularKind.LEBESGUE_PLAIN
        left = luxemburg_norm(U * a + V * b, kind, VARIABLE).norm
        right = (luxemburg_norm(U * a, kind, VARIABLE).norm
                 + luxemburg_norm(V * b, kind, VARIABLE).norm)

        assert left <= right * (1.0 + 1e-9) + 1e-12


SMALL = UniformGrid(Box((-1.0,), (1.0,)), (20,))


@st.composite
def random_cases(draw):
    """A rough grid function, a variable exponent field and a Lebesgue convention."""
    values = draw(st.lists(st.floats(min_value=-3.0, max_value=3.0),
                           min_size=SMALL.size, max_size=SMALL.size)
                  .filter(lambda v: max(abs(x) for x in v) > 0.1))
    base = draw(st.floats(min_value=1.3, max_value=4.0))
    fraction = draw(st.floats(min_value=0.0, max_value=0.9))
    slope = draw(st.floats(min_value=0.2, max_value=3.0))
    field = ScalarExponentField.independent(base, amplitude=fraction * (base - 1.0), slope=slope)
    kind = draw(st.sampled_from([ModularKind.LEBESGUE_PLAIN, ModularKind.LEBESGUE_WEIGHTED]))
    return GridFunction(SMALL, values), field, kind


class TestRandomizedLuxemburg:
    """Norm-modular identities over random functions and exponent fields."""

    @settings(max_examples=200, deadline=None)
    @given(random_cases())
    def test_unit_modular_at_norm(self, case):
        """Test modular(u/‖u‖) = 1."""
        u, field, kind = case
        norm = luxemburg_norm(u, kind, field).norm

        assert modular(u / norm, kind, field).value == pytest.approx(1.0, abs=1e-8)

    @settings(max_examples=200, deadline=None)
    @given(random_cases(), st.floats(min_value=0.01, max_value=100.0), st.booleans())
    def test_homogeneity(self, case, c, negate):
        """Test ‖cu‖ = |c|‖u‖."""
        u, field, kind = case
        c = -c if negate else c
        base = luxemburg_norm(u, kind, field).norm
        scaled = luxemburg_norm(u * c, kind, field).norm

        assert scaled == pytest.approx(abs(c) * base, rel=1e-9)

    @settings(max_examples=200, deadline=None)
    @given(random_cases(), st.floats(min_value=0.01, max_value=100.0))
    def test_norm_modular_relations(self, case, c):
        """Test the power bounds between norm and modular at every scale."""
        u, field, kind = case
        report = norm_modular_relations(u * c, kind, field)

        assert report.passed, report.failed_checks


class TestNormModularRelations:
    """Tests for the norm-modular relations."""

    @pytest.mark.parametrize("scale", [0.05, 0.5, 1.0, 4.0, 50.0])
    def test_relations_hold(self, scale):
        """Test the relations for functions with norm below and above 1."""
        report = norm_modular_relations(U * scale, ModularKind.LEBESGUE_WEIGHTED, VARIABLE)

        assert report.passed, report.failed_checks
        assert report.data['pminus'] == pytest.approx(1.5)
        assert report.data['pplus'] == pytest.approx(2.5)

    def test_zero_function(self):
        """Test the zero-norm branch."""
        report = norm_modular_relations(GridFunction.zeros(GRID), ModularKind.LEBESGUE_PLAIN,
                                        VARIABLE)

        assert report.passed
        assert [c['name'] for c in report.checks] == ["zero"]

    def test_convergence_equivalence(self):
        """Test that norm and modular of v/n vanish together."""
        report = convergence_equivalence(U, V, ModularKind.LEBESGUE_PLAIN, VARIABLE)

        assert report.passed, report.failed_checks
