"""
Tests for the sparse modular representation.
"""

import numpy as np
import pytest
import scipy.sparse as sp

from perisobolev.modular import DiscreteModular, ModularKind, identity_rows, stack_modulars


def forward_differences(n: int) -> sp.csr_matrix:
    return sp.diags([-1.0, 1.0], [0, 1], shape=(n - 1, n), format='csr')


def make_modular(p: float = 3.0, weighted: bool = False) -> DiscreteModular:
    op = forward_differences(5)
    return DiscreteModular(
        kind=ModularKind.LEBESGUE_WEIGHTED if weighted else ModularKind.LEBESGUE_PLAIN,
        operator=op,
        weights=np.array([1.0, 2.0, 0.5, 1.5]),
        exponents=np.full(4, p),
        weighted=weighted,
    )


V = np.array([0.0, 1.0, -0.5, 2.0, 0.25])


class TestDiscreteModular:
    """Tests for DiscreteModular."""

    def test_value(self):
        """Test M(v) = Σ w|Dv|^p."""
        m = make_modular()
        t = np.diff(V)
        expected = np.sum(np.array([1.0, 2.0, 0.5, 1.5]) * np.abs(t) ** 3)

        assert m.value(V) == pytest.approx(expected)
        assert m.value_unweighted(V) == pytest.approx(expected)

    def test_weighted_divides_by_exponent(self):
        """Test the 1/p convention."""
        plain = make_modular()
        weighted = make_modular(weighted=True)

        assert weighted.value(V) == pytest.approx(plain.value(V) / 3.0)
        assert weighted.value_unweighted(V) == pytest.approx(plain.value(V))

    def test_gradient_matches_central_differences(self):
        """Test the analytic gradient against central differences."""
        m = make_modular(p=2.5)
        grad = m.gradient(V)
        eps = 1e-6
        for j in range(V.size):
            e = np.zeros(V.size)
            e[j] = eps
            fd = (m.value(V + e) - m.value(V - e)) / (2 * eps)
            assert grad[j] == pytest.approx(fd, rel=1e-6, abs=1e-8)

    def test_increment_matches_difference_of_values(self):
        """Test the cancellation-free increment."""
        m = make_modular(p=2.5)
        dv = np.array([0.1, -0.2, 0.0, 0.3, -0.05])

        assert m.increment(V, dv) == pytest.approx(m.value(V + dv) - m.value(V), rel=1e-10)

    def test_increment_resolves_tiny_steps(self):
        """Test that a tiny step gives the first-order change, not zero."""
        m = make_modular(p=2.0)
        dv = 1e-12 * np.ones(V.size)
        dv[0] = 0.0
        expected = float(m.gradient(V) @ dv)

        assert m.increment(V, dv) == pytest.approx(expected, rel=1e-3)

    def test_smoothing_vanishes_at_zero(self):
        """Test the regularized power is zero at zero and close to |t|^p."""
        m = make_modular(p=1.5).with_smoothing(1e-8)

        assert abs(m.value(np.zeros(5))) < 1e-20
        assert m.value(V) == pytest.approx(make_modular(p=1.5).value(V), rel=1e-6)

    def test_profile_is_scaled_value(self):
        """Test λ ↦ M(v/λ)."""
        m = make_modular(weighted=True)
        profile = m.profile(V)

        assert profile(2.0) == pytest.approx(m.value(V / 2.0))
        assert profile(1.0) == pytest.approx(m.value(V))

    def test_scaled_weights(self):
        """Test that scaling multiplies the value."""
        m = make_modular()

        assert m.scaled(3.0).value(V) == pytest.approx(3.0 * m.value(V))

    def test_empty_modular(self):
        """Test that a modular without rows is identically zero."""
        m = DiscreteModular(kind=ModularKind.LEBESGUE_PLAIN,
                            operator=sp.csr_matrix((0, 3)),
                            weights=np.zeros(0), exponents=np.zeros(0))

        assert m.value(np.ones(3)) == 0.0
        assert np.all(m.gradient(np.ones(3)) == 0.0)


class TestStacking:
    """Tests for stacking modulars."""

    def test_stack_adds_values(self):
        """Test that the stacked modular is the sum of its parts."""
        a = make_modular(p=2.0)
        b = DiscreteModular(kind=ModularKind.LEBESGUE_PLAIN, operator=identity_rows(5, [0, 3]),
                            weights=np.array([1.0, 1.0]), exponents=np.array([2.0, 2.0]))
        stacked = stack_modulars([a, b], ModularKind.LEBESGUE_PLAIN)

        assert stacked.rows == a.rows + b.rows
        assert stacked.value(V) == pytest.approx(a.value(V) + b.value(V))

    def test_stack_rejects_mixed_conventions(self):
        """Test that weighted and unweighted parts cannot be mixed."""
        with pytest.raises(ValueError):
            stack_modulars([make_modular(), make_modular(weighted=True)],
                           ModularKind.LEBESGUE_PLAIN)

    def test_identity_rows(self):
        """Test that identity rows pick single node values."""
        rows = identity_rows(4, [2, 0])

        assert np.allclose(rows @ np.array([5.0, 6.0, 7.0, 8.0]), [7.0, 5.0])
