"""
Operations producing grid functions: sampling, derivatives, mollification
and smooth truncation.
"""

from typing import Tuple
import logging
import math

import numpy as np
from scipy.signal import convolve

from ..errors import RejectionError
from ..settings import MOLLIFIER_MIN_CELLS
from .functions import GridFunction, TestFunction, C1, C2
from .lattice import UniformGrid

logger = logging.getLogger(__name__)


def sample(f: TestFunction, grid: UniformGrid) -> GridFunction:
    """
    Sample a test function at the nodes of a grid.

    Args:
        f: Analytic test function
        grid: Target grid

    Returns:
        GridFunction carrying f as its analytic source

    Raises:
        RejectionError: If f is not finite at some node
    """
    points = grid.nodes()
    values = np.asarray(f(points), dtype=float)
    bad = ~np.isfinite(values)
    if bad.any():
        raise RejectionError(f"Test function is not finite at node {points[np.argmax(bad)].tolist()}")
    return GridFunction(
        grid,
        values.reshape(grid.shape),
        source=f,
        smoothness=f.smoothness,
        provenance=f"sampled:{f.kind}",
    )


def partial_derivative(u: GridFunction, axis: int) -> GridFunction:
    """
    Partial derivative along one axis.

    Uses the analytic derivative of the source when available (provenance
    'analytic'); otherwise second-order central differences in the interior
    and second-order one-sided differences at the ends (provenance
    'finite_difference').
    """
    grid = u.grid
    if not 0 <= axis < grid.dim:
        raise RejectionError(f"Axis {axis} out of range for a {grid.dim}-D grid")
    smoothness = max(u.smoothness - 1, 0)
    if u.source is not None and u.source.has_analytic_partial:
        values = u.source.partial(grid.nodes(), axis).reshape(grid.shape)
        return GridFunction(grid, values, smoothness=smoothness, provenance="analytic")
    if grid.cells[axis] < 3:
        raise RejectionError(f"Need at least 3 nodes along axis {axis}, got {grid.cells[axis]}")
    values = np.gradient(u.values, grid.spacing[axis], axis=axis, edge_order=2)
    return GridFunction(grid, values, smoothness=smoothness, provenance="finite_difference")


def mollifier_kernel(grid: UniformGrid, eps: float) -> Tuple[np.ndarray, Tuple[int, ...]]:
    """
    Discrete standard mollifier exp(-1/(1-|x/eps|²)) with unit discrete mass.

    Returns:
        (kernel array, half-widths in cells per axis)
    """
    h = grid.spacing
    half = tuple(int(math.ceil(eps / h[i])) for i in range(grid.dim))
    offsets = np.meshgrid(
        *[np.arange(-m, m + 1) * h[i] / eps for i, m in enumerate(half)], indexing='ij'
    )
    r2 = sum(o * o for o in offsets)
    kernel = np.zeros(r2.shape)
    inside = r2 < 1.0
    kernel[inside] = np.exp(-1.0 / (1.0 - r2[inside]))
    kernel /= kernel.sum()
    return kernel, half


def mollify(u: GridFunction, eps: float) -> GridFunction:
    """
    Discrete convolution with the standard mollifier of radius eps.

    The result lives on the grid padded by ceil(eps/spacing) cells per side,
    so the support growth is representable. It is flagged C2 whatever
    the smoothness of u.

    Raises:
        RejectionError: If eps does not resolve the kernel (eps < 2·max spacing)
    """
    if not eps > 0:
        raise RejectionError(f"Mollifier radius must be positive, got {eps}")
    hmax = float(np.max(u.grid.spacing))
    if eps < MOLLIFIER_MIN_CELLS * hmax:
        raise RejectionError(
            f"Mollifier radius {eps} under-resolved: need eps >= {MOLLIFIER_MIN_CELLS} x {hmax}"
        )
    kernel, half = mollifier_kernel(u.grid, eps)
    values = convolve(u.values, kernel, mode='full', method='direct')
    grid = u.grid.padded(half)
    logger.debug(f"Mollified with eps={eps}, kernel shape {kernel.shape}")
    return GridFunction(grid, values, smoothness=C2, provenance=f"mollified({eps:g})")


def _ramp(t: np.ndarray) -> np.ndarray:
    t = np.clip(t, 0.0, 1.0)
    return 1.0 - (3.0 * t ** 2 - 2.0 * t ** 3)


def _ramp_slope(t: np.ndarray) -> np.ndarray:
    inside = (t > 0) & (t < 1)
    return np.where(inside, -(6.0 * t - 6.0 * t ** 2), 0.0)


def cutoff(grid: UniformGrid, k: int) -> GridFunction:
    """
    C¹ cutoff η_k(x) = η(|x|/k): 1 on B_k, 0 outside B_2k, smoothstep between.
    """
    if k < 1:
        raise RejectionError(f"Truncation radius must be >= 1, got {k}")
    r = np.sqrt(np.sum(grid.nodes() ** 2, axis=-1))
    values = _ramp(r / k - 1.0).reshape(grid.shape)
    return GridFunction(grid, values, smoothness=C1, provenance=f"cutoff({k})")


def cutoff_gradient_sup(grid: UniformGrid, k: int) -> float:
    """Sampled sup of |∇η_k| over the grid nodes (analytic formula)."""
    r = np.sqrt(np.sum(grid.nodes() ** 2, axis=-1))
    return float(np.max(np.abs(_ramp_slope(r / k - 1.0)) / k))


def truncate(u: GridFunction, k: int) -> GridFunction:
    """
    Multiply by the cutoff η_k; equals u on B_k and vanishes outside B_2k.
    """
    eta = cutoff(u.grid, k)
    return GridFunction(
        u.grid,
        u.values * eta.values,
        smoothness=min(u.smoothness, C1),
        provenance=f"truncated({k})",
    )
