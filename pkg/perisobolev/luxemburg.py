"""
Modulars and Luxemburg norms.

    ‖u‖ = inf{λ > 0 : ρ(u/λ) ≤ 1}

Every modular kind is assembled as a DiscreteModular, so one bisection
routine serves Lebesgue, directional and Gagliardo norms alike.
"""

from numbers import Real
from typing import Callable, Optional, Sequence, Union, Any
import logging

import numpy as np

from .errors import QuadratureError, RejectionError
from .exponents import ExponentField, ScalarExponentField
from .grids.functions import GridFunction
from .grids.lattice import Box, UniformGrid
from .grids.norms import exponent_values, midpoint_error
from .models import EnergyReport, LuxemburgResult
from .modular import DiscreteModular, ModularKind, identity_rows
from .settings import LUXEMBURG_RTOL, LUXEMBURG_MAX_ITER, MODULAR_AT_NORM_TOL
from .validation import CheckReport
from .energies.quadrature import SingularQuadSpec
from .energies import directional, gagliardo

logger = logging.getLogger(__name__)

MAX_BRACKET_STEPS = 200


def bisect(
    profile: Callable[[float], float],
    pminus: float,
    pplus: float,
    rtol: float = LUXEMBURG_RTOL,
    max_iter: int = LUXEMBURG_MAX_ITER,
    convention: str = "",
) -> LuxemburgResult:
    """
    Solve profile(λ) = 1 for the strictly decreasing map λ ↦ ρ(u/λ).

    The starting bracket is [min, max] of ρ(u)^{1/p⁻} and ρ(u)^{1/p⁺}; it
    collapses to the exact answer for a constant exponent.

    Args:
        profile: λ ↦ ρ(u/λ)
        pminus: Lower exponent bound of the modular
        pplus: Upper exponent bound of the modular
        rtol: Relative bracket width at exit
        max_iter: Bisection cap
        convention: Modular kind recorded in the result
    """
    rho = profile(1.0)
    if not np.isfinite(rho):
        raise QuadratureError(f"{convention}: modular is not finite")
    if rho == 0.0:
        return LuxemburgResult(0.0, 0.0, 0, (0.0, 0.0), convention)

    a = rho ** (1.0 / pminus)
    b = rho ** (1.0 / pplus)
    lo, hi = min(a, b), max(a, b)
    if lo == hi:
        m = profile(lo)
        if abs(m - 1.0) <= MODULAR_AT_NORM_TOL:
            return LuxemburgResult(lo, m, 0, (lo, hi), convention)

    # rounding can leave the closed-form bracket a hair too tight
    lo *= 1.0 - 1e-12
    hi *= 1.0 + 1e-12
    for _ in range(MAX_BRACKET_STEPS):
        if profile(lo) >= 1.0:
            break
        lo *= 0.5
    for _ in range(MAX_BRACKET_STEPS):
        if profile(hi) <= 1.0:
            break
        hi *= 2.0
    bracket = (lo, hi)

    iterations = 0
    while hi - lo > rtol * hi and iterations < max_iter:
        mid = 0.5 * (lo + hi)
        if profile(mid) > 1.0:
            lo = mid
        else:
            hi = mid
        iterations += 1
    norm = 0.5 * (lo + hi)
    result = LuxemburgResult(norm, profile(norm), iterations, bracket, convention)
    logger.debug(f"Luxemburg {convention}: norm={norm:.12g} after {iterations} bisections")
    return result


def bisect_norm(modular: DiscreteModular, values: np.ndarray,
                rtol: float = LUXEMBURG_RTOL,
                max_iter: int = LUXEMBURG_MAX_ITER) -> LuxemburgResult:
    """Luxemburg norm of node values under a discrete modular."""
    return bisect(modular.profile(values), modular.pminus, modular.pplus,
                  rtol, max_iter, modular.kind.value)


def omega_indices(grid: UniformGrid, omega: Optional[Box]) -> np.ndarray:
    """Flat indices of the nodes inside Ω, or of every node."""
    if omega is None:
        return np.arange(grid.size)
    return np.flatnonzero(gagliardo.omega_mask(grid, omega).ravel())


def lebesgue_modular(grid: UniformGrid, r, weighted: bool = False,
                     omega: Optional[Box] = None) -> DiscreteModular:
    """
    ∫_Ω |u|^{r(x)} dx  (divided by r(x) when weighted) as a DiscreteModular.
    """
    rv = exponent_values(r, grid).ravel()
    idx = omega_indices(grid, omega)
    kind = ModularKind.LEBESGUE_WEIGHTED if weighted else ModularKind.LEBESGUE_PLAIN
    return DiscreteModular(
        kind=kind,
        operator=identity_rows(grid.size, idx),
        weights=np.full(idx.size, grid.cell_volume),
        exponents=rv[idx],
        weighted=weighted,
        cell_volume=grid.cell_volume,
    )


def _two_point(field) -> ExponentField:
    if isinstance(field, Real):
        return ExponentField.constant(field)
    if not isinstance(field, ExponentField):
        raise RejectionError(f"Expected a two-point exponent field, got {type(field).__name__}")
    return field


def build_modular(
    u: GridFunction,
    kind: Union[ModularKind, str],
    field: Any,
    s: Optional[float] = None,
    axis: int = 0,
    delta: Optional[float] = None,
    omega: Optional[Box] = None,
    quad: Optional[SingularQuadSpec] = None,
) -> DiscreteModular:
    """
    Assemble the modular of the given kind for u.

    Args:
        u: Grid function
        kind: ModularKind or its value
        field: Constant, ScalarExponentField (Lebesgue kinds) or ExponentField
        s: Order (nonlocal kinds)
        axis: Direction (directional kinds)
        delta: Horizon (peridynamic_const)
        omega: Integration domain for Lebesgue kinds, Ω for gagliardo
        quad: Singular quadrature parameters
    """
    kind = ModularKind(kind)
    grid = u.grid
    if kind in (ModularKind.LEBESGUE_PLAIN, ModularKind.LEBESGUE_WEIGHTED):
        return lebesgue_modular(grid, field, kind.weighted, omega)
    if s is None:
        raise RejectionError(f"Modular kind '{kind.value}' needs an order s")
    if kind == ModularKind.GAGLIARDO:
        if omega is None:
            omega = grid.box
        modular, mask = gagliardo.gagliardo_operator(grid, omega, s, _two_point(field), True, quad)
        gagliardo.check_vanishes_outside(u, mask)
        return modular
    if kind == ModularKind.DIRECTIONAL_VAREXP:
        return directional.directional_varexp_modular(
            grid, axis, s, _two_point(field), u.support_extent(axis), quad,
            directional.interpolation_for(u),
        )
    if delta is None:
        raise RejectionError("Modular kind 'peridynamic_const' needs a horizon delta")
    p = field if isinstance(field, Real) else _two_point(field).base
    return directional.peridynamic_modular(grid, axis, s, float(p), delta, quad,
                                           directional.interpolation_for(u))


def modular(u: GridFunction, kind: Union[ModularKind, str], field: Any, **params) -> EnergyReport:
    """
    Evaluate a modular of any kind.

    Keyword arguments are those of build_modular (s, axis, delta, omega, quad).

    Returns:
        EnergyReport naming the convention
    """
    discrete = build_modular(u, kind, field, **params)
    value = discrete.value(u.values)
    if not np.isfinite(value):
        raise QuadratureError(f"{discrete.kind.value}: modular diverged for {params}")
    if discrete.kind in (ModularKind.LEBESGUE_PLAIN, ModularKind.LEBESGUE_WEIGHTED):
        t = discrete.differences(u.values)
        integrand = np.zeros(u.grid.size)
        integrand[discrete.operator.indices] = np.abs(t) ** discrete.exponents / (
            discrete.exponents if discrete.weighted else 1.0
        )
        error = midpoint_error(integrand.reshape(u.grid.shape), u.grid)
    else:
        error = discrete.error_estimate(u.values)
    echo = {k: v for k, v in params.items() if k != 'quad' and v is not None}
    if isinstance(echo.get('omega'), Box):
        echo['omega'] = echo['omega'].to_dict()
    echo['field'] = field if isinstance(field, Real) else field.to_dict()
    return EnergyReport(value=value, error_estimate=error,
                        convention=discrete.kind.value, params=echo)


def luxemburg_norm(u: GridFunction, kind: Union[ModularKind, str], field: Any,
                   rtol: float = LUXEMBURG_RTOL, **params) -> LuxemburgResult:
    """
    inf{λ > 0 : modular(u/λ) ≤ 1} by bisection.

    Returns norm 0 without bisecting when the modular of u vanishes.
    """
    discrete = build_modular(u, kind, field, **params)
    return bisect_norm(discrete, u.values, rtol)


def _power_bounds(norm: float, pminus: float, pplus: float):
    if norm >= 1.0:
        return norm ** pminus, norm ** pplus
    return norm ** pplus, norm ** pminus


def norm_modular_relations(u: GridFunction, kind: Union[ModularKind, str], field: Any,
                           tol: float = MODULAR_AT_NORM_TOL, **params) -> CheckReport:
    """
    Check the norm-modular relations for one function.

    ‖u‖ < 1 (= 1, > 1) exactly when ρ(u) < 1 (= 1, > 1), and ρ(u) lies
    between ‖u‖^{p⁻} and ‖u‖^{p⁺} in the order selected by ‖u‖.
    """
    discrete = build_modular(u, kind, field, **params)
    result = bisect_norm(discrete, u.values)
    rho = discrete.value(u.values)
    n = result.norm
    report = CheckReport(name="norm_modular_relations")
    report.data.update(kind=discrete.kind.value, norm=n, modular=rho,
                       pminus=discrete.pminus, pplus=discrete.pplus)
    if n == 0.0:
        report.add_check("zero", rho == 0.0, value=rho, bound=0.0)
        return report
    report.add_check("modular_at_norm", abs(result.modular_at_norm - 1.0) <= tol,
                     value=result.modular_at_norm, bound=1.0)
    if abs(n - 1.0) <= tol:
        report.add_check("unit_norm", abs(rho - 1.0) <= tol * max(discrete.pplus, 1.0),
                         value=rho, bound=1.0)
    else:
        same_side = (n > 1.0) == (rho > 1.0)
        report.add_check("same_side_of_one", same_side, value=rho, bound=1.0,
                         detail="norm and modular on the same side of 1")
    lower, upper = _power_bounds(n, discrete.pminus, discrete.pplus)
    report.add_check("lower_power", rho >= lower * (1.0 - tol), value=rho, bound=lower)
    report.add_check("upper_power", rho <= upper * (1.0 + tol), value=rho, bound=upper)
    return report


def convergence_equivalence(u: GridFunction, v: GridFunction, kind: Union[ModularKind, str],
                            field: Any, n_list: Sequence[int] = (1, 2, 4, 8, 16, 32),
                            tol: float = MODULAR_AT_NORM_TOL, **params) -> CheckReport:
    """
    Norm and modular of u_n - u = v/n vanish together.

    Both sequences must decrease strictly, and once the norm is below 1
    the modular must sit between its p⁺ and p⁻ powers.
    """
    u_n = [u + v / n for n in n_list]
    diffs = [un - u for un in u_n]
    discrete = build_modular(diffs[0], kind, field, **params)
    norms, mods = [], []
    for d in diffs:
        norms.append(bisect_norm(discrete, d.values).norm)
        mods.append(discrete.value(d.values))
    report = CheckReport(name="convergence_equivalence")
    report.data.update(n=list(n_list), norms=norms, modulars=mods)
    report.add_check("norms_decrease", all(b < a for a, b in zip(norms, norms[1:])),
                     value=norms[-1], bound=norms[0])
    report.add_check("modulars_decrease", all(b < a for a, b in zip(mods, mods[1:])),
                     value=mods[-1], bound=mods[0])
    for n, norm, rho in zip(n_list, norms, mods):
        if norm < 1.0:
            lower, upper = _power_bounds(norm, discrete.pminus, discrete.pplus)
            report.add_check(f"sandwich_n{n}",
                             lower * (1.0 - tol) <= rho <= upper * (1.0 + tol),
                             value=rho, bound=upper)
    return report


def sobolev_ratio(u: GridFunction, s: float, field: ExponentField,
                  r: Union[float, ScalarExponentField], omega: Optional[Box] = None,
                  quad: Optional[SingularQuadSpec] = None) -> float:
    """
    ‖u‖_{r,Ω} / ‖u‖_X with ‖u‖_X = ‖u‖_{p̄,Ω} + [u]_{s,p(·,·)}.

    A sanity value for the embedding inequality; it is reported, not checked.
    """
    omega = omega or u.grid.box
    pbar = ScalarExponentField.diagonal_of(field)
    numerator = luxemburg_norm(u, ModularKind.LEBESGUE_WEIGHTED, r, omega=omega).norm
    lebesgue = luxemburg_norm(u, ModularKind.LEBESGUE_WEIGHTED, pbar, omega=omega).norm
    seminorm = luxemburg_norm(u, ModularKind.GAGLIARDO, field, s=s, omega=omega, quad=quad).norm
    denominator = lebesgue + seminorm
    if denominator == 0.0:
        raise RejectionError("u vanishes; the embedding ratio is undefined")
    return numerator / denominator
