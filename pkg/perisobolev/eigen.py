"""
First eigenvalue of the homogeneous nonlocal Rayleigh quotient.

    H_s(u) = K(u)/k(u),   K(u) = [u]_{s,p(·,·)},   k(u) = ‖u‖_{p̄,Ω}

Both norms are Luxemburg norms of weighted modulars (1/p factor), so the
quotient is 0-homogeneous and its infimum over u ≠ 0 vanishing outside Ω
is Λ₁. The minimizer satisfies

    ⟨K'(u), φ⟩ = H_s(u)·⟨k'(u), φ⟩   for every nodal φ,

which is the weak eigen-equation with the normalization factor S(u).
"""

from dataclasses import dataclass, field as dc_field
from functools import cached_property
from numbers import Real
from typing import Any, Callable, Dict, List, Optional, Tuple, Union
import logging

import numpy as np

from .errors import NonConvergenceError, RejectionError
from .exponents import ExponentField, ScalarExponentField, validate_P
from .grids.functions import GridFunction
from .grids.lattice import Box, UniformGrid
from .luxemburg import bisect_norm, lebesgue_modular
from .models import EigenResult
from .modular import DiscreteModular
from .energies.gagliardo import check_vanishes_outside, gagliardo_operator
from .energies.quadrature import SingularQuadSpec
from .settings import (
    ARMIJO_C,
    ARMIJO_MAX_BACKTRACKS,
    ARMIJO_TAU,
    EIGEN_MAX_ITER,
    EIGEN_STEP_MAX,
    EIGEN_TOL,
)
from .validation import CheckReport

logger = logging.getLogger(__name__)

# Norms inside the quotient are bisected far below the Armijo decrease
NORM_RTOL = 1e-13
DERIVATIVE_CHECK_RTOL = 1e-3


@dataclass(frozen=True)
class EigenProblem:
    """
    Eigenproblem for the fractional p(·,·)-Laplacian on a box Ω.

    Attributes:
        grid: Grid covering Ω; only nodes inside Ω are unknowns
        omega: Box Ω
        s: Order in (0, 1)
        field: Symmetric two-point exponent with 1 < p⁻
        quad: Resolution of the interaction with the complement of Ω
    """
    grid: UniformGrid
    omega: Box
    s: float
    field: ExponentField
    quad: SingularQuadSpec = dc_field(default_factory=SingularQuadSpec)

    def __post_init__(self):
        if isinstance(self.field, Real):
            object.__setattr__(self, 'field', ExponentField.constant(float(self.field)))
        report = self.condition_P
        hard = [name for name in report.failed_checks if name != "subcritical"]
        if hard:
            raise RejectionError(f"Exponent field violates condition P: {hard}")

    @cached_property
    def condition_P(self) -> CheckReport:
        return validate_P(self.field, self.s, self.grid.dim)

    @property
    def flags(self) -> List[str]:
        if "subcritical" in self.condition_P.failed_checks:
            return ["condition_P_subcritical"]
        return []

    @cached_property
    def _gagliardo(self) -> Tuple[DiscreteModular, np.ndarray]:
        return gagliardo_operator(self.grid, self.omega, self.s, self.field, True, self.quad)

    @property
    def K_modular(self) -> DiscreteModular:
        return self._gagliardo[0]

    @property
    def mask(self) -> np.ndarray:
        return self._gagliardo[1]

    @cached_property
    def free(self) -> np.ndarray:
        return np.flatnonzero(self.mask.ravel())

    @cached_property
    def k_modular(self) -> DiscreteModular:
        pbar = ScalarExponentField.diagonal_of(self.field)
        return lebesgue_modular(self.grid, pbar, weighted=True, omega=self.omega)

    @cached_property
    def rho_unweighted(self) -> DiscreteModular:
        return gagliardo_operator(self.grid, self.omega, self.s, self.field, False, self.quad)[0]

    def lift(self, values: np.ndarray) -> GridFunction:
        full = np.zeros(self.grid.size)
        full[self.free] = np.asarray(values, dtype=float).ravel()
        return GridFunction(self.grid, full.reshape(self.grid.shape), provenance="eigen")

    def to_dict(self) -> Dict[str, Any]:
        return {
            'grid': self.grid.to_dict(),
            'omega': self.omega.to_dict(),
            's': self.s,
            'field': self.field.to_dict(),
            'quadrature': self.quad.to_dict(),
            'condition_P': self.condition_P.to_dict(),
        }


def _values(u: GridFunction, prob: EigenProblem) -> np.ndarray:
    if u.grid != prob.grid:
        raise RejectionError("Function lives on a different grid than the problem")
    check_vanishes_outside(u, prob.mask)
    return u.values.ravel()


def _K(x: np.ndarray, prob: EigenProblem) -> float:
    return bisect_norm(prob.K_modular, x, rtol=NORM_RTOL).norm


def _k(x: np.ndarray, prob: EigenProblem) -> float:
    return bisect_norm(prob.k_modular, x, rtol=NORM_RTOL).norm


def K(u: GridFunction, prob: EigenProblem) -> float:
    """Luxemburg seminorm [u]_{s,p(·,·)} of the weighted Gagliardo modular."""
    return _K(_values(u, prob), prob)


def k(u: GridFunction, prob: EigenProblem) -> float:
    """Luxemburg norm ‖u‖_{p̄,Ω} of the weighted Lebesgue modular."""
    return _k(_values(u, prob), prob)


def _rayleigh(x: np.ndarray, prob: EigenProblem) -> float:
    kx = _k(x, prob)
    if kx == 0.0:
        raise RejectionError("Rayleigh quotient undefined: u vanishes on Omega")
    return _K(x, prob) / kx


def rayleigh(u: GridFunction, prob: EigenProblem) -> float:
    """H_s(u) = K(u)/k(u)."""
    return _rayleigh(_values(u, prob), prob)


def nabla_s(u: Union[GridFunction, Callable[[np.ndarray], np.ndarray]],
            x: np.ndarray, y: np.ndarray, s: float) -> float:
    """(u(x) - u(y))/|x - y|^s."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    dist = float(np.linalg.norm(x - y))
    if dist == 0.0:
        raise RejectionError("Fractional difference quotient needs x != y")
    evaluate = u.evaluate if isinstance(u, GridFunction) else u
    ux, uy = evaluate(np.stack([x, y]))
    return float(ux - uy) / dist ** s


def _derivative(modular: DiscreteModular, x: np.ndarray, norm: float) -> np.ndarray:
    """Gradient of the Luxemburg norm: Dᵀ(dual terms at x/norm) / Σ w|D(x/norm)|^P."""
    w = x / norm
    denominator = modular.value_unweighted(w)
    if denominator == 0.0:
        raise RejectionError("Degenerate norm derivative: all differences vanish")
    return (modular.operator.T @ modular.dual_terms(w)) / denominator


def _S(x: np.ndarray, prob: EigenProblem, Kx: float, kx: float) -> float:
    return prob.K_modular.value_unweighted(x / Kx) / prob.k_modular.value_unweighted(x / kx)


def S_of(u: GridFunction, prob: EigenProblem) -> float:
    """
    S(u) = Σ w|D(u/K)|^p / ∫_Ω |u/k|^{p̄}; equals 1 for a constant exponent.
    """
    x = _values(u, prob)
    Kx, kx = _K(x, prob), _k(x, prob)
    if Kx == 0.0 or kx == 0.0:
        raise RejectionError("S(u) needs K(u) > 0 and k(u) > 0")
    return _S(x, prob, Kx, kx)


def norm_derivatives(u: GridFunction, prob: EigenProblem) -> Tuple[np.ndarray, np.ndarray]:
    """Nodal vectors ⟨K'(u), φ_j⟩ and ⟨k'(u), φ_j⟩."""
    x = _values(u, prob)
    Kx, kx = _K(x, prob), _k(x, prob)
    if Kx == 0.0 or kx == 0.0:
        raise RejectionError("Norm derivatives need u != 0 on Omega")
    return _derivative(prob.K_modular, x, Kx), _derivative(prob.k_modular, x, kx)


def _gradient(x: np.ndarray, prob: EigenProblem, H: float, Kx: float, kx: float) -> np.ndarray:
    G = _derivative(prob.K_modular, x, Kx) - H * _derivative(prob.k_modular, x, kx)
    G[~prob.mask.ravel()] = 0.0
    return G


def eigen_gradient(u: GridFunction, prob: EigenProblem) -> GridFunction:
    """
    G(φ) = ⟨K'(u), φ⟩ - H_s(u)·⟨k'(u), φ⟩ for every nodal φ inside Ω.
    """
    x = _values(u, prob)
    Kx, kx = _K(x, prob), _k(x, prob)
    if kx == 0.0:
        raise RejectionError("Rayleigh quotient undefined: u vanishes on Omega")
    G = _gradient(x, prob, Kx / kx, Kx, kx)
    return GridFunction(prob.grid, G.reshape(prob.grid.shape), provenance="eigen_gradient")


def residual_check(u: GridFunction, lam: float, prob: EigenProblem) -> CheckReport:
    """
    Weak eigen-equation against every nodal φ.

        LHS(φ) = Σ w|D(u/K)|^{p-2}D(u/K)·Dφ
        RHS(φ) = Σ_Ω |u/k|^{p̄-2}(u/k)φ
        residual = max_φ |LHS - Λ·S(u)·RHS| / max_φ |LHS|

    Testing with φ = u recovers Λ = K(u)/k(u).
    """
    x = _values(u, prob)
    Kx, kx = _K(x, prob), _k(x, prob)
    if Kx == 0.0 or kx == 0.0:
        raise RejectionError("Residual needs u != 0 on Omega")
    free = prob.free
    lhs = (prob.K_modular.operator.T @ prob.K_modular.dual_terms(x / Kx))[free]
    rhs = (prob.k_modular.operator.T @ prob.k_modular.dual_terms(x / kx))[free]
    S = _S(x, prob, Kx, kx)
    residual = float(np.max(np.abs(lhs - lam * S * rhs)) / np.max(np.abs(lhs)))
    lambda_from_u = float(lhs @ x[free]) / (S * float(rhs @ x[free]))
    report = CheckReport(name="eigen_residual")
    report.add_check("residual", residual <= EIGEN_TOL, value=residual, bound=EIGEN_TOL)
    report.data.update(residual=residual, S_of_u=S, lambda_tested=lam,
                       lambda_from_u=lambda_from_u, rayleigh=Kx / kx)
    return report


def kk_inequalities(prob: EigenProblem, u: GridFunction, v: GridFunction,
                    rtol: float = 1e-8) -> CheckReport:
    """|⟨K'(u), v⟩| ≤ K(v) and |⟨k'(u), v⟩| ≤ k(v), plus ⟨K'(u), u⟩ = K(u)."""
    dK, dk = norm_derivatives(u, prob)
    x, y = _values(u, prob), _values(v, prob)
    Ky, ky = _K(y, prob), _k(y, prob)
    Kx = _K(x, prob)
    report = CheckReport(name="kk_inequalities")
    pair_K = abs(float(dK @ y))
    pair_k = abs(float(dk @ y))
    report.add_check("K_bound", pair_K <= Ky * (1.0 + rtol), value=pair_K, bound=Ky)
    report.add_check("k_bound", pair_k <= ky * (1.0 + rtol), value=pair_k, bound=ky)
    euler = float(dK @ x)
    report.add_check("K_euler_identity", abs(euler - Kx) <= 1e-6 * Kx, value=euler, bound=Kx)
    return report


def derivative_check(prob: EigenProblem, u: GridFunction, phi: GridFunction,
                     t: float = 1e-6, rtol: float = DERIVATIVE_CHECK_RTOL) -> CheckReport:
    """Forward differences (K(u+tφ) - K(u))/t and the same for k against the nodal derivatives."""
    x, y = _values(u, prob), _values(phi, prob)
    dK, dk = norm_derivatives(u, prob)
    report = CheckReport(name="derivative_check")
    for name, norm, deriv in (("K", _K, dK), ("k", _k, dk)):
        analytic = float(deriv @ y)
        numeric = (norm(x + t * y, prob) - norm(x, prob)) / t
        rel = abs(analytic - numeric) / max(abs(analytic), abs(numeric), 1e-300)
        report.add_check(name, rel <= rtol, value=rel, bound=rtol)
        report.data[name] = {'analytic': analytic, 'numeric': numeric}
    return report


def nonhomogeneous_rayleigh(u: GridFunction, prob: EigenProblem) -> float:
    """R_s(u) = ∬|u(x)-u(y)|^{p(x,y)}/|x-y|^{N+sp} / ∫_Ω |u|^{p̄(x)} dx."""
    x = _values(u, prob)
    denominator = prob.k_modular.value_unweighted(x)
    if denominator == 0.0:
        raise RejectionError("Quotient undefined: u vanishes on Omega")
    return prob.rho_unweighted.value(x) / denominator


def default_start(prob: EigenProblem) -> GridFunction:
    """Product of distances to the faces of Ω, a positive bump vanishing on ∂Ω."""
    nodes = prob.grid.nodes()
    lo, hi = np.asarray(prob.omega.lo), np.asarray(prob.omega.hi)
    bump = np.prod(np.clip((nodes - lo) * (hi - nodes), 0.0, None), axis=1)
    bump[~prob.mask.ravel()] = 0.0
    return GridFunction(prob.grid, bump.reshape(prob.grid.shape), provenance="eigen_start")


def minimize_rayleigh(
    prob: EigenProblem,
    start: Optional[GridFunction] = None,
    tol: float = EIGEN_TOL,
    max_iter: int = EIGEN_MAX_ITER,
    raise_on_failure: bool = False,
) -> EigenResult:
    """
    Projected gradient descent of H_s on the sphere k(u) = 1.

    The start is replaced by |start| once. Each step moves along -G/V with
    Armijo backtracking on H_s, then renormalizes to k = 1. The trial step
    is min(2τ_prev, EIGEN_STEP_MAX). Converges when the weak-form residual
    drops to `tol`.

    Args:
        prob: The eigenproblem
        start: Nonzero initial guess vanishing outside Ω; a bump by default
        tol: Residual tolerance
        max_iter: Iteration cap (flagged, or raised with raise_on_failure)
        raise_on_failure: Raise NonConvergenceError instead of flagging

    Returns:
        EigenResult with the H_s history and accepted step sizes
    """
    start = default_start(prob) if start is None else start
    x = np.abs(_values(start, prob))
    kx = _k(x, prob)
    if kx == 0.0:
        raise RejectionError("Start vanishes on Omega")
    x = x / kx
    kx = _k(x, prob)
    Kx = _K(x, prob)
    H = Kx / kx
    V = prob.grid.cell_volume
    history, steps = [H], []
    flags = list(prob.flags)
    step = 1.0
    iterations = 0
    residual = residual_check(prob.lift(x[prob.free]), H, prob).data['residual']

    while residual > tol and iterations < max_iter:
        G = _gradient(x, prob, H, Kx, kx)
        direction = -G / V
        decrease = float(G @ G) / V
        accepted = False
        for _ in range(ARMIJO_MAX_BACKTRACKS):
            w = x + step * direction
            kw = _k(w, prob)
            if kw > 0.0:
                Kw = _K(w, prob)
                H_new = Kw / kw
                if H_new <= H - ARMIJO_C * step * decrease and H_new <= H:
                    accepted = True
                    break
            step *= ARMIJO_TAU
        if not accepted:
            flags.append("stopped:line_search")
            logger.warning(f"Line search failed at iteration {iterations} (residual {residual:.3e})")
            break
        x = w / kw
        kx = _k(x, prob)
        Kx = _K(x, prob)
        H = H_new
        iterations += 1
        history.append(H)
        steps.append(step)
        residual = residual_check(prob.lift(x[prob.free]), H, prob).data['residual']
        logger.debug(f"iter {iterations}: H={H:.15g} residual={residual:.3e} step={step:.3e}")
        step = min(2.0 * step, EIGEN_STEP_MAX)

    u = prob.lift(x[prob.free])
    converged = residual <= tol
    if not converged:
        if iterations >= max_iter:
            flags.append("stopped:max_iter")
        message = f"Eigen iteration stopped after {iterations} steps with residual {residual:.3e}"
        if raise_on_failure:
            raise NonConvergenceError(message)
        logger.warning(message)
    else:
        logger.info(f"Lambda_1 = {H:.12g} after {iterations} iterations")

    return EigenResult(
        lambda1=H,
        u=u,
        residual=residual,
        S_of_u=_S(x, prob, Kx, kx),
        k_of_u=kx,
        history=history,
        step_sizes=steps,
        iterations=iterations,
        converged=converged,
        flags=flags,
    )
