"""
Dirichlet problem for the peridynamic fractional anisotropic p-Laplacian.

The discrete energy

    I(v) = Σ_i c_i·J^i_{δ_i}(v) - ∫_Ω f v dx,   J^i_δ = δ^{-p_i(1-s_i)}[v]^i_{s_i,p_i,δ}

is minimized over node values inside Ω (zero outside) by gradient descent
with Barzilai-Borwein trial steps and Armijo backtracking. Directions with
δ_i = 0 use the local functional (2/(p_i(1-s_i)))‖∂_i v‖^{p_i}_{p_i}.
"""

from dataclasses import dataclass, field as dc_field
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Any
import logging

import numpy as np

from .errors import NonConvergenceError, RejectionError
from .exponents import AnisotropyParams
from .grids.functions import GridFunction
from .grids.lattice import Box, UniformGrid
from .grids.norms import lp_norm
from .modular import DiscreteModular, ModularKind, stack_modulars
from .energies.directional import local_modular, peridynamic_modular
from .energies.gagliardo import check_vanishes_outside, omega_mask
from .energies.quadrature import SingularQuadSpec
from .models import SolveResult
from .settings import (
    ARMIJO_C,
    ARMIJO_MAX_BACKTRACKS,
    ARMIJO_TAU,
    DELTA_STUDY_RTOL,
    DELTA_STUDY_STEP_TOL,
    SOLVER_COMPOSITION,
    SOLVER_GRADIENT_CHECK_EVERY,
    SOLVER_MAX_ITER,
    SOLVER_MU_FACTOR,
    SOLVER_STAGNATION_RTOL,
    SOLVER_STAGNATION_WINDOW,
    SOLVER_TOL,
    THREADS,
)
from .validation import CheckReport
from .workers import ordered_map

logger = logging.getLogger(__name__)

COMPOSITIONS = ("inverse_p", "unit")
GRADIENT_CHECK_RTOL = 1e-4


@dataclass(frozen=True)
class DirichletProblem:
    """
    Discrete Dirichlet problem on the nodes of a grid inside Ω.

    Attributes:
        grid: Computational grid; it must contain Ω plus room for the horizons
        omega: Box Ω; unknowns are the nodes inside it
        f: Source sampled on the grid
        params: Orders, exponents and horizons per direction
        quad: Grading parameters of the directional quadrature
        composition: 'inverse_p' weighs direction i by 1/p_i, 'unit' by 1
        mu: Regularization of |t|^{p-2}t for p < 2; None picks 1e-10·scale
        interpolation: Interpolation of shifted values ('linear' or 'cubic')
    """
    grid: UniformGrid
    omega: Box
    f: GridFunction
    params: AnisotropyParams
    quad: SingularQuadSpec = dc_field(default_factory=SingularQuadSpec)
    composition: str = SOLVER_COMPOSITION
    mu: Optional[float] = None
    interpolation: str = "linear"

    def __post_init__(self):
        if self.params.dim != self.grid.dim:
            raise RejectionError(
                f"Parameters have {self.params.dim} directions, grid is {self.grid.dim}-D"
            )
        if self.f.grid != self.grid:
            raise RejectionError("Source lives on a different grid")
        if self.composition not in COMPOSITIONS:
            raise RejectionError(f"Unknown composition '{self.composition}'; choose from {COMPOSITIONS}")
        if self.mu is not None and self.mu < 0:
            raise RejectionError(f"Smoothing must be >= 0, got {self.mu}")
        if self.free.size == 0:
            raise RejectionError("No grid node lies inside Omega")

    @cached_property
    def mask(self) -> np.ndarray:
        return omega_mask(self.grid, self.omega)

    @cached_property
    def free(self) -> np.ndarray:
        """Flat indices of the unknowns."""
        return np.flatnonzero(self.mask.ravel())

    @property
    def direction_constants(self) -> List[float]:
        """c_i in front of J^i_{δ_i}."""
        if self.composition == "unit":
            return [1.0] * self.params.dim
        return [1.0 / p for p in self.params.pvec]

    @property
    def smoothing(self) -> float:
        if self.params.p_min >= 2.0:
            return 0.0
        if self.mu is not None:
            return self.mu
        scale = max(1.0, float(np.max(np.abs(self.f.values))))
        return SOLVER_MU_FACTOR * scale

    @cached_property
    def modular(self) -> DiscreteModular:
        """Σ_i c_i·J^i_{δ_i} as one modular."""
        parts = []
        for i, (s, p, d) in enumerate(zip(self.params.svec, self.params.pvec, self.params.dvec)):
            c = self.direction_constants[i]
            if d == 0.0:
                part = local_modular(self.grid, i, s, p)
            else:
                part = peridynamic_modular(self.grid, i, s, p, d, self.quad, self.interpolation)
                part = part.scaled(d ** (-p * (1.0 - s)))
            parts.append(part.scaled(c))
        combined = stack_modulars(parts, ModularKind.PERIDYNAMIC_CONST)
        return combined.with_smoothing(self.smoothing)

    @cached_property
    def load(self) -> np.ndarray:
        """∫_Ω f φ_k dx for every node: V·f_k inside Ω, 0 outside."""
        b = self.grid.cell_volume * self.f.values.ravel().copy()
        b[~self.mask.ravel()] = 0.0
        return b

    def with_deltas(self, dvec: Sequence[float]) -> "DirichletProblem":
        return DirichletProblem(self.grid, self.omega, self.f, self.params.with_deltas(dvec),
                                self.quad, self.composition, self.mu, self.interpolation)

    def lift(self, values: np.ndarray) -> GridFunction:
        """Grid function with the given values on the unknowns, zero elsewhere."""
        full = np.zeros(self.grid.size)
        full[self.free] = np.asarray(values, dtype=float).ravel()
        return GridFunction(self.grid, full.reshape(self.grid.shape), provenance="dirichlet")

    def to_dict(self) -> Dict[str, Any]:
        return {
            'grid': self.grid.to_dict(),
            'omega': self.omega.to_dict(),
            'params': self.params.to_dict(),
            'quadrature': self.quad.to_dict(),
            'composition': self.composition,
            'mu': self.smoothing,
            'interpolation': self.interpolation,
            'unknowns': int(self.free.size),
        }


def _flat(v: GridFunction, prob: DirichletProblem) -> np.ndarray:
    if v.grid != prob.grid:
        raise RejectionError("Function lives on a different grid than the problem")
    check_vanishes_outside(v, prob.mask)
    return v.values.ravel()


def energy(v: GridFunction, prob: DirichletProblem) -> float:
    """I(v) = Σ_i c_i J^i_{δ_i}(v) - ∫_Ω f v dx."""
    x = _flat(v, prob)
    return prob.modular.value(x) - float(prob.load @ x)


def _energy_change(x: np.ndarray, dx: np.ndarray, prob: DirichletProblem) -> float:
    return prob.modular.increment(x, dx) - float(prob.load @ dx)


def _gradient_flat(x: np.ndarray, prob: DirichletProblem) -> np.ndarray:
    g = prob.modular.gradient(x) - prob.load
    g[~prob.mask.ravel()] = 0.0
    return g


def gradient(v: GridFunction, prob: DirichletProblem) -> GridFunction:
    """
    ⟨I'(v), φ_k⟩ for every nodal hat φ_k inside Ω; zero outside.
    """
    g = _gradient_flat(_flat(v, prob), prob)
    return GridFunction(prob.grid, g.reshape(prob.grid.shape), provenance="gradient")


def gradient_check(v: GridFunction, prob: DirichletProblem, w: Optional[GridFunction] = None,
                   t: float = 1e-6, seed: int = 0) -> CheckReport:
    """
    Central difference (I(v + tw) - I(v - tw))/(2t) against ⟨∇I(v), w⟩.
    """
    x = _flat(v, prob)
    if w is None:
        rng = np.random.default_rng(seed)
        dx = np.zeros(prob.grid.size)
        dx[prob.free] = rng.standard_normal(prob.free.size)
    else:
        dx = _flat(w, prob)
    analytic = float(_gradient_flat(x, prob) @ dx)
    numeric = (_energy_change(x, t * dx, prob) - _energy_change(x, -t * dx, prob)) / (2.0 * t)
    scale = max(abs(analytic), abs(numeric), 1e-300)
    rel = abs(analytic - numeric) / scale
    report = CheckReport(name="gradient_check")
    report.add_check("directional_derivative", rel <= GRADIENT_CHECK_RTOL or
                     abs(analytic - numeric) <= 1e-14, value=rel, bound=GRADIENT_CHECK_RTOL)
    report.data.update(analytic=analytic, numeric=numeric, t=t)
    return report


def weak_residual(u: GridFunction, prob: DirichletProblem) -> float:
    """max over nodal φ of |⟨J'(u), φ⟩ - ∫ f φ|."""
    g = _gradient_flat(_flat(u, prob), prob)
    return float(np.max(np.abs(g[prob.free])))


def solve(
    prob: DirichletProblem,
    start: Optional[GridFunction] = None,
    tol: float = SOLVER_TOL,
    max_iter: int = SOLVER_MAX_ITER,
    stagnation_rtol: float = SOLVER_STAGNATION_RTOL,
    check_every: int = SOLVER_GRADIENT_CHECK_EVERY,
    raise_on_failure: bool = False,
) -> SolveResult:
    """
    Minimize I by gradient descent from v = 0 (or `start`).

    Each step moves along the Riesz direction -∇I/V with a Barzilai-Borwein
    trial length, halved until the Armijo condition holds and the energy
    does not increase. Energies are tracked through exact-increment
    evaluation so that descent continues below eps·|I|.

    Stops on:
        'gradient':     max |⟨I'(v), φ_k⟩| ≤ tol
        'stagnation':   relative energy decrease below stagnation_rtol over
                        SOLVER_STAGNATION_WINDOW steps (0 disables)
        'line_search':  no acceptable step after ARMIJO_MAX_BACKTRACKS halvings
        'max_iter':     iteration cap

    Args:
        prob: The problem
        start: Initial guess, zero outside Ω
        tol: Gradient sup-norm tolerance
        max_iter: Iteration cap
        stagnation_rtol: Stagnation threshold
        check_every: Run a finite-difference gradient check every this many iterations
        raise_on_failure: Raise NonConvergenceError instead of flagging

    Returns:
        SolveResult
    """
    V = prob.grid.cell_volume
    x = np.zeros(prob.grid.size) if start is None else _flat(start, prob).copy()
    E = prob.modular.value(x) - float(prob.load @ x)
    g = _gradient_flat(x, prob)
    gnorm = float(np.max(np.abs(g)))
    energies, gnorms = [E], [gnorm]
    flags: List[str] = []
    step = 1.0
    prev_x = prev_g = None
    stop_reason = "max_iter"
    iterations = 0

    while True:
        if gnorm <= tol:
            stop_reason = "gradient"
            break
        if iterations >= max_iter:
            break
        window = SOLVER_STAGNATION_WINDOW
        if stagnation_rtol > 0 and len(energies) > window:
            drop = energies[-window - 1] - energies[-1]
            if drop <= stagnation_rtol * max(abs(energies[-1]), 1e-300):
                stop_reason = "stagnation"
                break

        direction = -g / V
        if prev_x is not None:
            sx = x - prev_x
            sg = (g - prev_g) / V
            curvature = float(sx @ sg)
            if curvature > 0:
                step = float(sx @ sx) / curvature
            else:
                step = 2.0 * step
        slope = float(g @ direction)

        accepted = False
        for _ in range(ARMIJO_MAX_BACKTRACKS):
            dx = step * direction
            change = _energy_change(x, dx, prob)
            if change <= ARMIJO_C * step * slope and change <= 0.0:
                accepted = True
                break
            step *= ARMIJO_TAU
        if not accepted:
            stop_reason = "line_search"
            break

        prev_x, prev_g = x, g
        x = x + dx
        E = E + change
        g = _gradient_flat(x, prob)
        gnorm = float(np.max(np.abs(g)))
        iterations += 1
        energies.append(E)
        gnorms.append(gnorm)
        logger.debug(f"iter {iterations}: I={E:.15g} |g|={gnorm:.3e} step={step:.3e}")

        if check_every and iterations % check_every == 0:
            check = gradient_check(prob.lift(x[prob.free]), prob, seed=iterations)
            if not check.passed and "gradient_check" not in flags:
                flags.append("gradient_check")

    converged = stop_reason in ("gradient", "stagnation")
    if not converged:
        flags.append(f"stopped:{stop_reason}")
        message = f"Solver stopped by {stop_reason} after {iterations} iterations (|g|={gnorm:.3e})"
        if raise_on_failure:
            raise NonConvergenceError(message)
        logger.warning(message)
    else:
        logger.info(f"Solved in {iterations} iterations ({stop_reason}), I={E:.12g}")

    return SolveResult(
        u=prob.lift(x[prob.free]),
        energy_history=energies,
        grad_norm_history=gnorms,
        grad_norm_final=gnorm,
        iterations=iterations,
        converged=converged,
        stop_reason=stop_reason,
        direction_constants=[c * p for c, p in zip(prob.direction_constants, prob.params.pvec)],
        mu=prob.smoothing,
        flags=flags,
    )


def uniqueness_probe(prob: DirichletProblem, seeds: Sequence[int] = (1, 2),
                     tol: float = SOLVER_TOL, sup_tol: float = 1e-6,
                     scale: float = 0.1, **solve_kw) -> CheckReport:
    """Solutions from random starts agree in sup-norm."""
    solutions = []
    for seed in seeds:
        rng = np.random.default_rng(seed)
        start = prob.lift(scale * rng.standard_normal(prob.free.size))
        solutions.append(solve(prob, start=start, tol=tol, **solve_kw).u.values)
    report = CheckReport(name="uniqueness")
    for k in range(1, len(solutions)):
        gap = float(np.max(np.abs(solutions[k] - solutions[0])))
        report.add_check(f"seed_{seeds[k]}_vs_{seeds[0]}", gap <= sup_tol, value=gap, bound=sup_tol)
    return report


def delta_convergence_study(
    prob: DirichletProblem,
    vanishing: Sequence[int],
    deltas: Sequence[float],
    rtol: float = DELTA_STUDY_RTOL,
    step_tol: float = DELTA_STUDY_STEP_TOL,
    threads: int = THREADS,
    **solve_kw,
) -> CheckReport:
    """
    Solutions u_k with δ_i = δ_k in the vanishing directions against u_0.

    u_0 uses the local functional in those directions and the problem's own
    horizons elsewhere. Distances are L^{p_min} norms of u_k - u_0; the check
    passes when they are nonincreasing up to step_tol and the last one is at
    most rtol·‖u_0‖.
    """
    vanishing = sorted(set(int(i) for i in vanishing))
    if any(not 0 <= i < prob.params.dim for i in vanishing):
        raise RejectionError(f"Vanishing directions {vanishing} out of range")

    def horizons(delta: float) -> List[float]:
        return [delta if i in vanishing else d for i, d in enumerate(prob.params.dvec)]

    p_min = prob.params.p_min
    u0 = solve(prob.with_deltas(horizons(0.0)), **solve_kw).u
    norm0 = lp_norm(u0, p_min)

    def distance(delta: float) -> float:
        uk = solve(prob.with_deltas(horizons(float(delta))), **solve_kw).u
        return lp_norm(uk - u0, p_min)

    distances = ordered_map(distance, list(deltas), threads)
    report = CheckReport(name="delta_convergence")
    report.add_check("nonincreasing",
                     all(b <= a + step_tol for a, b in zip(distances, distances[1:])),
                     value=max((b - a for a, b in zip(distances, distances[1:])), default=0.0),
                     bound=step_tol)
    report.add_check("final_distance", distances[-1] <= rtol * norm0 if distances else True,
                     value=distances[-1] if distances else 0.0, bound=rtol * norm0)
    report.data.update(deltas=[float(d) for d in deltas], distances=distances,
                       limit_norm=norm0, vanishing=vanishing)
    return report
