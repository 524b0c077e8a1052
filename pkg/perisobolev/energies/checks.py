"""
Inequality checks on the directional energies: regularization by
mollification and truncation, and finiteness of the variable-exponent
modular for C¹ functions.
"""

from typing import Optional, Sequence
import logging

import numpy as np

from ..exponents import ExponentField, ScalarExponentField
from ..grids.functions import GridFunction, C1
from ..grids.norms import lp_norm_pow
from ..grids.operations import mollify, truncate, cutoff_gradient_sup, partial_derivative
from ..settings import MONOTONICITY_RTOL
from ..validation import CheckReport
from .directional import directional_modular_varexp, directional_seminorm_varexp, \
    interpolation_for, peridynamic_seminorm
from .quadrature import SingularQuadSpec

logger = logging.getLogger(__name__)

MOLLIFIER_EPS = (0.05, 0.1, 0.2)
TRUNCATION_RADII = (1, 2, 4)


def mollify_monotonicity_check(
    u: GridFunction,
    axis: int,
    s: float,
    p: float,
    delta: float,
    eps_list: Sequence[float] = MOLLIFIER_EPS,
    quad: Optional[SingularQuadSpec] = None,
    rtol: float = MONOTONICITY_RTOL,
) -> CheckReport:
    """
    [u_ε]^i_{s,p,δ} ≤ [u]^i_{s,p,δ}·(1 + rtol) for every ε.

    The mollified function lives on a padded grid with the same spacing and
    is evaluated with the interpolation order chosen for u.
    """
    interp = interpolation_for(u)
    base = peridynamic_seminorm(u, axis, s, p, delta, quad, interp).value
    report = CheckReport(name="mollify_monotonicity")
    values = []
    for eps in eps_list:
        smoothed = peridynamic_seminorm(mollify(u, eps), axis, s, p, delta, quad, interp).value
        values.append(smoothed)
        report.add_check(f"eps={eps:g}", smoothed <= base * (1.0 + rtol) + 1e-300,
                         value=smoothed, bound=base)
    report.data.update(seminorm=base, eps=list(eps_list), mollified=values,
                       axis=axis, s=s, p=p, delta=delta)
    return report


def truncation_bound(base: float, lp_pow: float, s: float, p: float, delta: float, k: int) -> float:
    """2^{p-1}[u] + 2^{2p}δ^{p(1-s)}/(k^p·p(1-s))·‖u‖_p^p."""
    return 2.0 ** (p - 1.0) * base + 2.0 ** (2.0 * p) * delta ** (p * (1.0 - s)) / (
        k ** p * p * (1.0 - s)
    ) * lp_pow


def truncation_check(
    u: GridFunction,
    axis: int,
    s: float,
    p: float,
    delta: float,
    ks: Sequence[int] = TRUNCATION_RADII,
    quad: Optional[SingularQuadSpec] = None,
    rtol: float = MONOTONICITY_RTOL,
) -> CheckReport:
    """
    Seminorm of η_k·u against the truncation bound, and ‖∇η_k‖∞ ≤ 2/k.
    """
    interp = interpolation_for(u)
    base = peridynamic_seminorm(u, axis, s, p, delta, quad, interp).value
    lp_pow = lp_norm_pow(u, p).value
    report = CheckReport(name="truncation")
    for k in ks:
        truncated = peridynamic_seminorm(truncate(u, k), axis, s, p, delta, quad, interp).value
        bound = truncation_bound(base, lp_pow, s, p, delta, k)
        report.add_check(f"k={k}", truncated <= bound * (1.0 + rtol), value=truncated, bound=bound)
        slope = cutoff_gradient_sup(u.grid, k)
        report.add_check(f"cutoff_slope_k={k}", slope <= 2.0 / k, value=slope, bound=2.0 / k)
    report.data.update(seminorm=base, lp_pow=lp_pow, ks=list(ks))
    return report


def inclusion_check(
    u: GridFunction,
    axis: int,
    s: float,
    field: ExponentField,
    quad: Optional[SingularQuadSpec] = None,
) -> CheckReport:
    """
    J_{s,p}(u) is finite for C¹ u and below the mean-value bound.

    With L = sup|∂_i u| and M = sup|u|:
        |h| ≤ 1:  L^P|h|^{P(1-s)-1} ≤ max(L^{p⁻}, L^{p⁺})|h|^{p⁻(1-s)-1}
        |h| > 1:  2^{p⁺}max(M^{p⁻}, M^{p⁺})|h|^{-1-sp⁻}, counted on the support
    """
    report = CheckReport(name="inclusion")
    report.add_check("c1_flag", u.smoothness >= C1, value=float(u.smoothness), bound=float(C1))
    energy = directional_modular_varexp(u, axis, s, field, quad)
    report.add_check("finite", bool(np.isfinite(energy.value)), value=energy.value)

    grid = u.grid
    p_lo, p_hi = field.pminus, field.pplus
    L = float(np.max(np.abs(partial_derivative(u, axis).values)))
    M = float(np.max(np.abs(u.values)))
    cross_section = grid.cell_volume / grid.spacing[axis] * float(
        np.count_nonzero(np.any(u.values != 0, axis=axis))
    )
    # interpolation spreads the support by up to two cells on each side
    support = float(np.count_nonzero(u.values)) * grid.cell_volume + 4.0 * grid.spacing[axis] * cross_section
    near = max(L ** p_lo, L ** p_hi) * 2.0 / (p_lo * (1.0 - s)) * 2.0 * support
    far = 2.0 ** p_hi * max(M ** p_lo, M ** p_hi) * 2.0 / (s * p_lo) * support
    bound = near + far
    # discrete differences may exceed L slightly through interpolation
    report.add_check("mean_value_bound", energy.value <= bound * (1.0 + 1e-3),
                     value=energy.value, bound=bound)
    report.data.update(energy=energy.to_dict(), sup_derivative=L, sup_value=M)
    return report


def varexp_anisotropic_norm(
    u: GridFunction,
    svec: Sequence[float],
    fields: Sequence[ExponentField],
    p0: ScalarExponentField,
    quad: Optional[SingularQuadSpec] = None,
) -> float:
    """‖u‖_{p₀} + Σ_i [u]_{s_i,p_i}."""
    from ..luxemburg import luxemburg_norm
    from ..modular import ModularKind

    if not (len(svec) == len(fields) == u.grid.dim):
        raise ValueError(f"Need {u.grid.dim} orders and fields, got {len(svec)} and {len(fields)}")
    total = luxemburg_norm(u, ModularKind.LEBESGUE_WEIGHTED, p0).norm
    for i, (s, field) in enumerate(zip(svec, fields)):
        total += directional_seminorm_varexp(u, i, s, field, quad)
    return total
