"""
Full Gagliardo double integral for functions vanishing outside a box Ω.

    ρ(u) = ∬_{R^N×R^N} |u(x) - u(y)|^{p(x,y)} / |x - y|^{N+sp(x,y)} dxdy   [/p(x,y)]

splits into the Ω×Ω part (node pairs, diagonal excluded) and twice the
interaction of each node with Ω^c, integrated along rays leaving Ω.
"""

from typing import Optional, Tuple
import logging

import numpy as np
import scipy.sparse as sp

from ..errors import RejectionError, QuadratureError
from ..exponents import ExponentField
from ..grids.functions import GridFunction
from ..grids.lattice import Box, UniformGrid
from ..models import EnergyReport
from ..modular import DiscreteModular, ModularKind, identity_rows, stack_modulars
from ..settings import QUAD_FLAG_RTOL
from .quadrature import SingularQuadSpec, geometric_levels, sphere_rule

logger = logging.getLogger(__name__)

SPHERE_AREA = {1: 2.0, 2: 2.0 * np.pi, 3: 4.0 * np.pi}


def omega_mask(grid: UniformGrid, omega: Box) -> np.ndarray:
    """Boolean mask (grid shape) of nodes inside Ω."""
    if omega.dim != grid.dim:
        raise RejectionError(f"Omega is {omega.dim}-D, grid is {grid.dim}-D")
    return omega.contains(grid.nodes()).reshape(grid.shape)


def check_vanishes_outside(u: GridFunction, mask: np.ndarray):
    """Raise unless u is zero on every node outside Ω."""
    outside = np.abs(u.values[~mask])
    if outside.size and outside.max() > 0:
        raise RejectionError("Function does not vanish outside Omega")


def _pair_rows(grid: UniformGrid, idx: np.ndarray, s: float, field: ExponentField):
    nodes = grid.nodes()[idx]
    k, l = np.triu_indices(idx.size, 1)
    n_pairs = k.size
    rows = np.arange(n_pairs)
    data = np.concatenate([np.ones(n_pairs), -np.ones(n_pairs)])
    operator = sp.csr_matrix(
        (data, (np.concatenate([rows, rows]), np.concatenate([idx[k], idx[l]]))),
        shape=(n_pairs, grid.size),
    )
    x, y = nodes[k], nodes[l]
    dist = np.sqrt(np.sum((x - y) ** 2, axis=-1))
    P = np.full(n_pairs, field.base) if field.is_constant else field(x, y)
    V = grid.cell_volume
    weights = 2.0 * V * V / dist ** (grid.dim + s * P)
    return operator, weights, P


def _far_rows_constant(grid, omega, idx, s, p, quad):
    nodes = grid.nodes()[idx]
    V = grid.cell_volume

    def node_weights(angles):
        dirs, wdir = sphere_rule(grid.dim, angles)
        r0 = omega.distance_to_boundary(nodes, dirs)
        if np.any(r0 <= 0):
            raise RejectionError("A node lies on the boundary of Omega")
        return 2.0 * V * np.sum(wdir[None, :] * r0 ** (-s * p), axis=1) / (s * p)

    fine = node_weights(quad.angles)
    coarse = fine if grid.dim == 1 else node_weights(max(quad.angles // 2, 2))
    return identity_rows(grid.size, idx), fine, coarse, np.full(idx.size, float(p))


def _far_rows_variable(grid, omega, idx, s, field, quad):
    nodes = grid.nodes()[idx]
    V = grid.cell_volume
    dirs, wdir = sphere_rule(grid.dim, quad.angles)
    r0 = omega.distance_to_boundary(nodes, dirs)
    if np.any(r0 <= 0):
        raise RejectionError("A node lies on the boundary of Omega")
    rho, wrho = geometric_levels(1.0, 2.0 ** quad.far_levels, quad.points_per_level)
    # rows ordered (node, direction, radial point)
    r = r0[:, :, None] * rho[None, None, :]
    y = nodes[:, None, None, :] + r[..., None] * dirs[None, :, None, :]
    x = np.broadcast_to(nodes[:, None, None, :], y.shape)
    P = field(x, y)
    w = 2.0 * V * wdir[None, :, None] * r0[:, :, None] * wrho[None, None, :] / r ** (1.0 + s * P)
    node_ids = np.broadcast_to(idx[:, None, None], P.shape).ravel()

    r_T = r0 * 2.0 ** quad.far_levels
    p_lo, p_hi = field.pminus, field.pplus
    tail = np.where(
        r_T >= 1.0,
        r_T ** (-s * p_lo) / (s * p_lo),
        (r_T ** (-s * p_hi) - 1.0) / (s * p_hi) + 1.0 / (s * p_lo),
    )
    aux_weights = 2.0 * V * np.sum(wdir[None, :] * tail, axis=1)
    return identity_rows(grid.size, node_ids), w.ravel(), P.ravel(), aux_weights


def _diagonal_bound(grid: UniformGrid, idx: np.ndarray, s: float, p_lo: float, weighted: bool):
    """
    Rows and weights bounding the excluded same-cell interaction by
    |∂_i u|^p ∫_{|h|<Δ/2} |h|^{p-N-sp} dh along each axis.
    """
    mask = np.zeros(grid.size, bool)
    mask[idx] = True
    blocks = []
    for axis in range(grid.dim):
        h = grid.spacing[axis]
        diff = sp.diags([-1.0 / h, 1.0 / h], [0, 1], shape=(grid.cells[axis], grid.cells[axis]))
        before = int(np.prod(grid.cells[:axis]))
        after = int(np.prod(grid.cells[axis + 1:]))
        op = sp.kron(sp.identity(before), sp.kron(diff, sp.identity(after)), format='csr')
        blocks.append(op[idx])
    operator = sp.vstack(blocks).tocsr()
    radius = 0.5 * float(np.max(grid.spacing))
    weight = grid.cell_volume * SPHERE_AREA[grid.dim] * radius ** (p_lo * (1.0 - s)) / (p_lo * (1.0 - s))
    if weighted:
        weight /= p_lo
    return operator, np.full(operator.shape[0], weight)


def gagliardo_operator(
    grid: UniformGrid,
    omega: Box,
    s: float,
    field: ExponentField,
    weighted: bool = True,
    quad: Optional[SingularQuadSpec] = None,
) -> Tuple[DiscreteModular, np.ndarray]:
    """
    Assemble the Gagliardo modular on a grid.

    Returns:
        (modular, Ω node mask)
    """
    if not 0.0 < s < 1.0:
        raise RejectionError(f"s = {s} outside (0, 1)")
    quad = quad or SingularQuadSpec()
    mask = omega_mask(grid, omega)
    idx = np.flatnonzero(mask.ravel())
    if idx.size == 0:
        raise RejectionError("No grid node lies inside Omega")
    kind = ModularKind.GAGLIARDO

    pair_op, pair_w, pair_P = _pair_rows(grid, idx, s, field)
    diag_op, diag_w = _diagonal_bound(grid, idx, s, field.pminus, weighted)
    pairs = DiscreteModular(kind=kind, operator=pair_op, weights=pair_w, exponents=pair_P,
                            weighted=weighted, aux_operator=diag_op, aux_weights=diag_w,
                            aux_exponents=(field.pminus, field.pplus),
                            cell_volume=grid.cell_volume)
    if field.is_constant:
        op, fine, coarse, P = _far_rows_constant(grid, omega, idx, s, field.base, quad)
        far = DiscreteModular(kind=kind, operator=op, weights=fine, exponents=P,
                              weighted=weighted, coarse_weights=coarse,
                              cell_volume=grid.cell_volume)
    else:
        op, w, P, tail = _far_rows_variable(grid, omega, idx, s, field, quad)
        tail_op = identity_rows(grid.size, idx)
        far = DiscreteModular(kind=kind, operator=op, weights=w, exponents=P,
                              weighted=weighted, aux_operator=tail_op,
                              aux_weights=tail / field.pminus if weighted else tail,
                              aux_exponents=(field.pminus, field.pplus),
                              cell_volume=grid.cell_volume)
    modular = stack_modulars([pairs, far], kind)
    logger.debug(f"Gagliardo modular: {modular.rows} rows over {idx.size} nodes")
    return modular, mask


def gagliardo_modular(
    u: GridFunction,
    omega: Box,
    s: float,
    field: ExponentField,
    weighted: bool = True,
    quad: Optional[SingularQuadSpec] = None,
) -> EnergyReport:
    """
    ρ_{p(·,·)}(u) for u vanishing outside Ω.

    Args:
        u: Grid function, zero at nodes outside Ω
        omega: The box Ω
        s: Order in (0, 1)
        field: Two-point exponent
        weighted: Include the 1/p(x,y) factor (space-X convention)
        quad: Angular and radial resolution of the Ω^c interaction

    Returns:
        EnergyReport; the convention is 'gagliardo' or 'gagliardo_unweighted'
    """
    modular, mask = gagliardo_operator(u.grid, omega, s, field, weighted, quad)
    check_vanishes_outside(u, mask)
    value = modular.value(u.values)
    if not np.isfinite(value):
        raise QuadratureError("Gagliardo modular is not finite")
    error = modular.error_estimate(u.values)
    flags = ["quadrature_disagreement"] if value > 0 and error > QUAD_FLAG_RTOL * value else []
    return EnergyReport(
        value=value,
        error_estimate=error,
        convention="gagliardo" if weighted else "gagliardo_unweighted",
        params={'s': s, 'field': field.to_dict(), 'omega': omega.to_dict()},
        flags=flags,
    )
