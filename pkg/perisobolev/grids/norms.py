"""
Single-integral norms on grids: variable-exponent Lebesgue modulars and the
mixed norm with one exponent per axis.
"""

from numbers import Real
from typing import Sequence, Union, Any
import logging

import numpy as np

from ..errors import RejectionError
from ..models import EnergyReport
from .functions import GridFunction
from .lattice import UniformGrid

logger = logging.getLogger(__name__)


def exponent_values(p: Union[float, Any], grid: UniformGrid) -> np.ndarray:
    """
    Exponent at every node: a constant, or a scalar field exposing on_grid().
    """
    if isinstance(p, Real):
        values = np.full(grid.shape, float(p))
    elif hasattr(p, 'on_grid'):
        values = np.asarray(p.on_grid(grid), dtype=float)
    else:
        values = np.asarray(p, dtype=float)
        if values.shape != grid.shape:
            raise RejectionError(f"Exponent array shape {values.shape} != grid shape {grid.shape}")
    if np.any(values < 1.0):
        raise RejectionError(f"Lebesgue exponent must be >= 1, got min {values.min()}")
    return values


def midpoint_error(integrand: np.ndarray, grid: UniformGrid) -> float:
    """Composite-midpoint error model Σ_i h_i²/24 ∫|∂²_i F|."""
    total = 0.0
    for axis in range(grid.dim):
        if grid.cells[axis] < 3:
            continue
        h = grid.spacing[axis]
        second = np.diff(np.pad(integrand, [(1, 1) if i == axis else (0, 0)
                                            for i in range(grid.dim)]), n=2, axis=axis) / h ** 2
        total += h ** 2 / 24.0 * float(np.sum(np.abs(second))) * grid.cell_volume
    return total


def lp_norm_pow(u: GridFunction, p, weighted: bool = False) -> EnergyReport:
    """
    ∫|u(x)|^{p(x)} dx by the composite midpoint rule.

    Args:
        u: Grid function (zero outside its box)
        p: Constant exponent or scalar exponent field
        weighted: Divide the integrand by p(x) (Luxemburg convention)

    Returns:
        EnergyReport with convention lebesgue_plain or lebesgue_weighted
    """
    pv = exponent_values(p, u.grid)
    integrand = np.abs(u.values) ** pv
    if weighted:
        integrand = integrand / pv
    value = float(np.sum(integrand) * u.grid.cell_volume)
    return EnergyReport(
        value=value,
        error_estimate=midpoint_error(integrand, u.grid),
        convention="lebesgue_weighted" if weighted else "lebesgue_plain",
        params={'p': float(p) if isinstance(p, Real) else 'field'},
    )


def lp_norm(u: GridFunction, p: float) -> float:
    """Constant-exponent L^p norm."""
    return lp_norm_pow(u, p).value ** (1.0 / p)


def mixed_norm(u: GridFunction, pvec: Sequence[float]) -> float:
    """
    Iterated norm: L^{p₁} in x₁ first, then L^{p₂} in x₂, and so on.

    Args:
        u: Grid function
        pvec: One finite exponent >= 1 per axis
    """
    pvec = [float(p) for p in pvec]
    if len(pvec) != u.grid.dim:
        raise RejectionError(f"Need {u.grid.dim} exponents, got {len(pvec)}")
    if any(not np.isfinite(p) or p < 1 for p in pvec):
        raise RejectionError(f"Mixed-norm exponents must be finite and >= 1, got {pvec}")
    a = np.abs(u.values)
    for axis, p in enumerate(pvec):
        h = u.grid.spacing[axis]
        a = (np.sum(a ** p, axis=0) * h) ** (1.0 / p)
    return float(a)
