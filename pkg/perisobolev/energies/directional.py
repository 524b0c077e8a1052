"""
Directional (one-axis) nonlocal energies.

The peridynamic seminorm

    [u]^i_{s,p,δ} = ∫∫_{|h|≤δ} |u(x + h e_i) - u(x)|^p / |h|^{1+sp} dh dx

and the variable-exponent modular J_{s_i,p_i} (h over all of R) are both
assembled as DiscreteModular objects. Rows are pairs (quadrature step h,
node x of the grid padded along axis i); u(x + h e_i) is interpolated along
the axis from the zero-extended node values.
"""

from dataclasses import dataclass
from numbers import Real
from typing import Optional, Sequence, Tuple, Union
import logging
import math

import numpy as np
import scipy.sparse as sp

from ..errors import RejectionError, QuadratureError
from ..exponents import ExponentField
from ..grids.functions import GridFunction, C2
from ..grids.lattice import UniformGrid
from ..grids.norms import lp_norm_pow
from ..grids.operations import partial_derivative
from ..models import EnergyReport
from ..modular import DiscreteModular, ModularKind, identity_rows, stack_modulars
from ..settings import QUAD_FLAG_RTOL, TAIL_FLAG_RTOL
from .quadrature import SingularQuadSpec, graded_levels, geometric_levels

logger = logging.getLogger(__name__)

INTERPOLATIONS = ("cubic", "linear")
STENCIL_MARGIN = 3


def stencil(frac: float, cubic: bool) -> Tuple[Tuple[int, ...], Tuple[float, ...]]:
    """Offsets and Lagrange weights interpolating at base + frac, 0 ≤ frac < 1."""
    f = frac
    if not cubic:
        return (0, 1), (1.0 - f, f)
    return (-1, 0, 1, 2), (
        -f * (f - 1.0) * (f - 2.0) / 6.0,
        (f + 1.0) * (f - 1.0) * (f - 2.0) / 2.0,
        -(f + 1.0) * f * (f - 2.0) / 2.0,
        (f + 1.0) * f * (f - 1.0) / 6.0,
    )


def axis_difference_operator(n: int, pad: int, shifts: np.ndarray, cubic: bool) -> sp.csr_matrix:
    """
    1-D operator: row (k, j) gives u(x_j + shifts[k]·Δ) - u(x_j).

    j runs over the padded positions -pad .. n+pad-1; columns outside
    0 .. n-1 are dropped, which is the zero extension.
    """
    m = n + 2 * pad
    j = np.arange(-pad, n + pad)
    inside = (j >= 0) & (j < n)
    rows, cols, vals = [], [], []
    for k, t in enumerate(shifts):
        base = math.floor(t)
        offsets, weights = stencil(t - base, cubic)
        row_ids = k * m + np.arange(m)
        for o, w in zip(offsets, weights):
            if w == 0.0:
                continue
            c = j + base + o
            keep = (c >= 0) & (c < n)
            rows.append(row_ids[keep])
            cols.append(c[keep])
            vals.append(np.full(int(keep.sum()), w))
        rows.append(row_ids[inside])
        cols.append(j[inside])
        vals.append(-np.ones(int(inside.sum())))
    op = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(len(shifts) * m, n),
    ).tocsr()
    op.eliminate_zeros()
    return op


@dataclass(frozen=True)
class _AxisLayout:
    """Index bookkeeping for rows (before, step, padded node, after)."""
    grid: UniformGrid
    axis: int
    pad: int

    @property
    def before(self) -> int:
        return int(np.prod(self.grid.cells[:self.axis]))

    @property
    def after(self) -> int:
        return int(np.prod(self.grid.cells[self.axis + 1:]))

    @property
    def m(self) -> int:
        return self.grid.cells[self.axis] + 2 * self.pad

    @property
    def padded_shape(self) -> Tuple[int, ...]:
        cells = list(self.grid.cells)
        cells[self.axis] = self.m
        return tuple(cells)

    def lift(self, op1d: sp.csr_matrix) -> sp.csr_matrix:
        op = op1d
        if self.after > 1:
            op = sp.kron(op, sp.identity(self.after, format='csr'), format='csr')
        if self.before > 1:
            op = sp.kron(sp.identity(self.before, format='csr'), op, format='csr')
        return op.tocsr()

    def _other_coords(self, axes: Sequence[int]) -> np.ndarray:
        if not axes:
            return np.zeros((1, 0))
        mesh = np.meshgrid(*[self.grid.axis_nodes(i) for i in axes], indexing='ij')
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def row_points(self, steps: np.ndarray) -> np.ndarray:
        """Coordinates x of every row, shape (rows, N), in row order."""
        g = self.grid
        n_steps = len(steps)
        before = self._other_coords(list(range(self.axis)))
        after = self._other_coords(list(range(self.axis + 1, g.dim)))
        h = g.spacing[self.axis]
        xa = g.box.lo[self.axis] + (np.arange(self.m) - self.pad + 0.5) * h
        pts = np.empty((before.shape[0], n_steps, self.m, after.shape[0], g.dim))
        pts[..., :self.axis] = before[:, None, None, None, :]
        pts[..., self.axis] = xa[None, None, :, None]
        pts[..., self.axis + 1:] = after[None, None, None, :, :]
        return pts.reshape(-1, g.dim)

    def broadcast_steps(self, per_step: np.ndarray) -> np.ndarray:
        """Repeat a per-step array over (before, padded node, after) in row order."""
        shape = (self.before, len(per_step), self.m, self.after)
        return np.broadcast_to(np.asarray(per_step)[None, :, None, None], shape).ravel()

    def row_nodes(self, n_steps: int) -> np.ndarray:
        b = np.arange(self.before)[:, None, None, None]
        j = np.arange(self.m)[None, None, :, None]
        a = np.arange(self.after)[None, None, None, :]
        idx = (b * self.m + j) * self.after + a
        return np.broadcast_to(idx, (self.before, n_steps, self.m, self.after)).ravel()

    def grid_node_to_padded(self) -> np.ndarray:
        """Padded index of every original node, in C order."""
        idx = np.indices(self.grid.cells)
        idx[self.axis] = idx[self.axis] + self.pad
        return np.ravel_multi_index(tuple(idx), self.padded_shape).ravel()


def _use_cubic(interpolation: str) -> bool:
    if interpolation not in INTERPOLATIONS:
        raise RejectionError(f"Unknown interpolation '{interpolation}'; choose from {INTERPOLATIONS}")
    return interpolation == "cubic"


def interpolation_for(u: GridFunction, interpolation: Optional[str] = None) -> str:
    """Cubic for C²-flagged inputs, linear otherwise, unless overridden."""
    if interpolation is not None:
        return interpolation
    return "cubic" if u.smoothness >= C2 else "linear"


def _step_table(top: float, quad: SingularQuadSpec, extra_top: float = 0.0):
    """
    Positive steps with fine and coarse weights.

    Graded Gauss levels on (0, top], the Taylor closure steps for the fine
    and coarse depths, and optional doubling levels on (top, extra_top].

    Returns:
        (h, fine_w, coarse_w, is_taylor)
    """
    h, w, level = graded_levels(top, quad.levels, quad.points_per_level)
    coarse = np.where(level < quad.coarse_levels, w, 0.0)
    taylor_fine = top * 2.0 ** (-quad.levels)
    taylor_coarse = top * 2.0 ** (-quad.coarse_levels)
    hx, wx = geometric_levels(top, extra_top, quad.points_per_level)
    steps = np.concatenate([h, hx, [taylor_fine, taylor_coarse]])
    fine_w = np.concatenate([w, wx, [1.0, 0.0]])
    coarse_w = np.concatenate([coarse, wx, [0.0, 1.0]])
    is_taylor = np.concatenate([np.zeros(h.size + hx.size, bool), [True, True]])
    return steps, fine_w, coarse_w, is_taylor


def _difference_modular(
    grid: UniformGrid,
    axis: int,
    s: float,
    field: ExponentField,
    top: float,
    extra_top: float,
    quad: SingularQuadSpec,
    cubic: bool,
    kind: ModularKind,
) -> Tuple[DiscreteModular, _AxisLayout]:
    h_axis = grid.spacing[axis]
    reach = max(top, extra_top, quad.outer_margin)
    pad = int(math.ceil(reach / h_axis)) + STENCIL_MARGIN
    layout = _AxisLayout(grid, axis, pad)

    pos, fine_w, coarse_w, is_taylor = _step_table(top, quad, extra_top)
    steps = np.concatenate([pos, -pos])
    fine_w = np.concatenate([fine_w, fine_w])
    coarse_w = np.concatenate([coarse_w, coarse_w])
    is_taylor = np.concatenate([is_taylor, is_taylor])

    op1d = axis_difference_operator(grid.cells[axis], pad, steps / h_axis, cubic)
    operator = layout.lift(op1d)

    V = grid.cell_volume
    habs = layout.broadcast_steps(np.abs(steps))
    fw = layout.broadcast_steps(fine_w)
    cw = layout.broadcast_steps(coarse_w)
    taylor = layout.broadcast_steps(is_taylor)

    if field.is_constant:
        P = np.full(operator.shape[0], field.base)
    else:
        x = layout.row_points(steps)
        y = x.copy()
        y[:, axis] += layout.broadcast_steps(steps)
        P = np.where(taylor, field.diagonal(x), field(x, y))

    quad_factor = V / habs ** (1.0 + s * P)
    taylor_factor = V * habs ** (P * (1.0 - s)) / (P * (1.0 - s)) / habs ** P
    factor = np.where(taylor, taylor_factor, quad_factor)

    modular = DiscreteModular(
        kind=kind,
        operator=operator,
        weights=fw * factor,
        exponents=P,
        coarse_weights=cw * factor,
        row_nodes=layout.row_nodes(len(steps)),
        density_shape=layout.padded_shape,
        cell_volume=V,
    )
    return modular, layout


def peridynamic_modular(
    grid: UniformGrid,
    axis: int,
    s: float,
    p: float,
    delta: float,
    quad: Optional[SingularQuadSpec] = None,
    interpolation: str = "cubic",
) -> DiscreteModular:
    """
    Discrete [·]^i_{s,p,δ}: constant exponent, |h| ≤ δ.
    """
    _check_sp(s, p)
    if not delta > 0:
        raise RejectionError(f"Horizon must be positive, got {delta}")
    if not 0 <= axis < grid.dim:
        raise RejectionError(f"Axis {axis} out of range for a {grid.dim}-D grid")
    quad = quad or SingularQuadSpec()
    modular, _ = _difference_modular(
        grid, axis, s, ExponentField.constant(p), delta, 0.0, quad,
        _use_cubic(interpolation), ModularKind.PERIDYNAMIC_CONST,
    )
    return modular


def directional_varexp_modular(
    grid: UniformGrid,
    axis: int,
    s: float,
    field: ExponentField,
    reach: float,
    quad: Optional[SingularQuadSpec] = None,
    interpolation: str = "cubic",
) -> DiscreteModular:
    """
    Discrete J_{s,p(·,·)} along one axis, h over all of R.

    |h| ≤ 1 is graded toward 0; 1 < |h| ≤ R is covered by doubling levels,
    with R = max(reach + 3 cells, 1) beyond the support extent `reach`.
    For |h| > R the two points never both meet the support, so the
    integrand reduces to 2|u(x)|^{p(x,x+h)}/|h|^{1+sp(x,x+h)}; it is
    integrated on `far_levels` doubling levels and the remaining tail is
    bounded in the error estimate.
    """
    if not 0.0 < s < 1.0:
        raise RejectionError(f"s = {s} outside (0, 1)")
    if not 0 <= axis < grid.dim:
        raise RejectionError(f"Axis {axis} out of range for a {grid.dim}-D grid")
    quad = quad or SingularQuadSpec()
    h_axis = grid.spacing[axis]
    R = max(reach + STENCIL_MARGIN * h_axis, 1.0)
    near, layout = _difference_modular(
        grid, axis, s, field, 1.0, R, quad, _use_cubic(interpolation),
        ModularKind.DIRECTIONAL_VAREXP,
    )

    # far field: identity rows on the grid nodes
    V = grid.cell_volume
    hf, wf = geometric_levels(R, R * 2.0 ** quad.far_levels, quad.points_per_level)
    steps = np.concatenate([hf, -hf])
    weights = np.concatenate([wf, wf])
    nodes = grid.nodes()
    n_nodes = grid.size
    node_ids = np.tile(np.arange(n_nodes), steps.size)
    x = np.tile(nodes, (steps.size, 1))
    y = x.copy()
    y[:, axis] += np.repeat(steps, n_nodes)
    if field.is_constant:
        P = np.full(node_ids.size, field.base)
    else:
        P = field(x, y)
    w_rows = 2.0 * V * np.repeat(weights, n_nodes) / np.repeat(np.abs(steps), n_nodes) ** (1.0 + s * P)
    R_T = R * 2.0 ** quad.far_levels
    p_lo = field.pminus
    tail = 2.0 * V * 2.0 * R_T ** (-s * p_lo) / (s * p_lo)
    far = DiscreteModular(
        kind=ModularKind.DIRECTIONAL_VAREXP,
        operator=identity_rows(n_nodes, node_ids),
        weights=w_rows,
        exponents=P,
        aux_operator=sp.identity(n_nodes, format='csr'),
        aux_weights=np.full(n_nodes, tail),
        aux_exponents=(field.pminus, field.pplus),
        cell_volume=V,
    )
    combined = stack_modulars([near, far], ModularKind.DIRECTIONAL_VAREXP)
    padded_ids = layout.grid_node_to_padded()[node_ids]
    row_nodes = np.concatenate([near.row_nodes, padded_ids])
    return DiscreteModular(
        kind=combined.kind,
        operator=combined.operator,
        weights=combined.weights,
        exponents=combined.exponents,
        coarse_weights=combined.coarse_weights,
        aux_operator=combined.aux_operator,
        aux_weights=combined.aux_weights,
        aux_exponents=combined.aux_exponents,
        row_nodes=row_nodes,
        density_shape=layout.padded_shape,
        cell_volume=V,
    )


def local_modular(grid: UniformGrid, axis: int, s: float, p: float) -> DiscreteModular:
    """
    Local limit functional (2/(p(1-s)))∫|∂_i u|^p by forward differences.

    Differences run over every cell face along the axis, including the two
    faces against the zero ghost layer.
    """
    _check_sp(s, p)
    n = grid.cells[axis]
    h = grid.spacing[axis]
    j = np.arange(-1, n)
    rows, cols, vals = [], [], []
    for offset, sign in ((1, 1.0), (0, -1.0)):
        c = j + offset
        keep = (c >= 0) & (c < n)
        rows.append(np.nonzero(keep)[0])
        cols.append(c[keep])
        vals.append(np.full(int(keep.sum()), sign / h))
    op1d = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n + 1, n)
    ).tocsr()
    layout = _AxisLayout(grid, axis, 0)
    operator = layout.lift(op1d)
    weight = grid.cell_volume * 2.0 / (p * (1.0 - s))
    return DiscreteModular(
        kind=ModularKind.PERIDYNAMIC_CONST,
        operator=operator,
        weights=np.full(operator.shape[0], weight),
        exponents=np.full(operator.shape[0], float(p)),
        cell_volume=grid.cell_volume,
    )


def _check_sp(s: float, p: float):
    if not 0.0 < s < 1.0:
        raise RejectionError(f"s = {s} outside (0, 1)")
    if not 1.0 < p < np.inf:
        raise RejectionError(f"p = {p} outside (1, inf)")


def _report(modular: DiscreteModular, u: GridFunction, convention: str, params: dict) -> EnergyReport:
    value = modular.value(u.values)
    if not math.isfinite(value):
        raise QuadratureError(f"{convention}: non-finite value for params {params}")
    error = modular.error_estimate(u.values)
    flags = []
    if value > 0 and error > QUAD_FLAG_RTOL * value:
        flags.append("quadrature_disagreement")
        logger.warning(f"{convention}: error estimate {error:.3e} vs value {value:.3e}")
    tail = modular.aux_bound(u.values)
    if value > 0 and tail > TAIL_FLAG_RTOL * value:
        flags.append("tail_bound")
    return EnergyReport(value=value, error_estimate=error, convention=convention,
                        params=params, flags=flags)


def peridynamic_seminorm(
    u: GridFunction,
    axis: int,
    s: float,
    p: float,
    delta: float,
    quad: Optional[SingularQuadSpec] = None,
    interpolation: Optional[str] = None,
) -> EnergyReport:
    """
    [u]^i_{s,p,δ} = ∫∫_{|h|≤δ} |u(x+he_i) - u(x)|^p/|h|^{1+sp} dh dx.

    Args:
        u: Bounded grid function, zero outside its box
        axis: Direction i (0-based)
        s: Order in (0, 1)
        p: Exponent in (1, inf)
        delta: Horizon > 0
        quad: Grading parameters
        interpolation: 'cubic' or 'linear'; default from u's smoothness flag

    Returns:
        EnergyReport with convention peridynamic_const
    """
    quad = quad or SingularQuadSpec()
    interp = interpolation_for(u, interpolation)
    modular = peridynamic_modular(u.grid, axis, s, p, delta, quad, interp)
    params = {'axis': axis, 's': s, 'p': p, 'delta': delta,
              'interpolation': interp, **quad.to_dict()}
    report = _report(modular, u, ModularKind.PERIDYNAMIC_CONST.value, params)
    logger.debug(f"[u]^{axis}_(s={s},p={p},delta={delta}) = {report.value:.12g}")
    return report


def peridynamic_energy(u: GridFunction, axis: int, s: float, p: float, delta: float,
                       quad: Optional[SingularQuadSpec] = None,
                       interpolation: Optional[str] = None) -> float:
    """J^i_δ(u) = δ^{-p(1-s)}[u]^i_{s,p,δ}; δ = 0 gives the local functional."""
    if delta == 0:
        return local_energy(u, axis, s, p)
    report = peridynamic_seminorm(u, axis, s, p, delta, quad, interpolation)
    return delta ** (-p * (1.0 - s)) * report.value


def directional_modular_varexp(
    u: GridFunction,
    axis: int,
    s: float,
    field: Union[ExponentField, float],
    quad: Optional[SingularQuadSpec] = None,
    interpolation: Optional[str] = None,
) -> EnergyReport:
    """
    J_{s,p}(u) = ∫∫_R |u(x+he_i) - u(x)|^{p(x,x+he_i)}/|h|^{1+sp(x,x+he_i)} dh dx.
    """
    field = ExponentField.constant(field) if isinstance(field, Real) else field
    quad = quad or SingularQuadSpec()
    interp = interpolation_for(u, interpolation)
    modular = directional_varexp_modular(
        u.grid, axis, s, field, u.support_extent(axis), quad, interp
    )
    params = {'axis': axis, 's': s, 'field': field.to_dict(), 'interpolation': interp,
              **quad.to_dict()}
    return _report(modular, u, ModularKind.DIRECTIONAL_VAREXP.value, params)


def directional_seminorm_varexp(
    u: GridFunction,
    axis: int,
    s: float,
    field: Union[ExponentField, float],
    quad: Optional[SingularQuadSpec] = None,
) -> float:
    """[u]_{s,p} = inf{λ > 0 : J_{s,p}(u/λ) ≤ 1}."""
    from ..luxemburg import bisect_norm

    field = ExponentField.constant(field) if isinstance(field, Real) else field
    modular = directional_varexp_modular(
        u.grid, axis, s, field, u.support_extent(axis), quad, interpolation_for(u)
    )
    return bisect_norm(modular, u.values).norm


def local_energy(u: GridFunction, axis: int, s: float, p: float) -> float:
    """(2/(p(1-s)))‖∂_i u‖_p^p with the analytic derivative when available."""
    _check_sp(s, p)
    du = partial_derivative(u, axis)
    return 2.0 / (p * (1.0 - s)) * lp_norm_pow(du, p).value


def lemma_bound(u: GridFunction, axis: int, s: float, p: float, delta: float) -> float:
    """A-priori bound 2δ^{p(1-s)}/(p(1-s))·‖∂_i u‖_p^p on [u]^i_{s,p,δ}."""
    return delta ** (p * (1.0 - s)) * local_energy(u, axis, s, p)


def peridynamic_norm(u: GridFunction, axis: int, s: float, p: float, delta: float,
                     quad: Optional[SingularQuadSpec] = None) -> float:
    """[u]^{1/p} + ‖u‖_p."""
    semi = peridynamic_seminorm(u, axis, s, p, delta, quad).value
    return semi ** (1.0 / p) + lp_norm_pow(u, p).value ** (1.0 / p)


def anisotropic_peridynamic_norm(u: GridFunction, params, quad: Optional[SingularQuadSpec] = None) -> float:
    """Σ_i ([u]^i_{s_i,p_i,δ_i})^{1/p_i} + ‖u‖_{p_i}."""
    total = 0.0
    for i, (s, p, d) in enumerate(zip(params.svec, params.pvec, params.dvec)):
        if d == 0:
            raise RejectionError(f"Direction {i} has a zero horizon; the norm needs delta > 0")
        total += peridynamic_norm(u, i, s, p, d, quad)
    return total
