"""
Result models for perisobolev computations.

Every numerical operation returns one of these records. They validate their
own invariants and serialize to plain dictionaries for the JSON outputs.
"""

from dataclasses import dataclass, field, asdict
from typing import Optional, List, Dict, Any, Tuple
import math

from .settings import MODULAR_AT_NORM_TOL


def _finite(x: float) -> bool:
    return x is not None and math.isfinite(x)


@dataclass
class EnergyReport:
    """
    Value of a modular, seminorm or energy with its quadrature-error estimate.

    The convention names the modular kind so that weighted (1/p) and
    unweighted values are never confused in reports.
    """
    value: float
    error_estimate: float
    convention: str
    params: Dict[str, Any] = field(default_factory=dict)
    flags: List[str] = field(default_factory=list)

    @property
    def flagged(self) -> bool:
        return bool(self.flags)

    def to_dict(self) -> Dict[str, Any]:
        """Convert report to dictionary."""
        return asdict(self)

    def validate(self) -> Tuple[bool, List[str]]:
        """
        Validate report invariants.

        Returns:
            Tuple of (is_valid, list_of_errors)
        """
        errors = []
        if not _finite(self.value):
            errors.append(f"Non-finite value: {self.value}")
        elif self.value < 0:
            errors.append(f"Negative value: {self.value}")
        if not _finite(self.error_estimate) or self.error_estimate < 0:
            errors.append(f"Invalid error estimate: {self.error_estimate}")
        if not self.convention:
            errors.append("Missing convention")
        return len(errors) == 0, errors


@dataclass
class LuxemburgResult:
    """Luxemburg norm obtained by bisection on λ ↦ modular(u/λ)."""
    norm: float
    modular_at_norm: float
    bisection_iterations: int
    bracket: Tuple[float, float]
    convention: str = ""

    def to_dict(self) -> Dict[str, Any]:
        """Convert result to dictionary."""
        return {
            'kind': self.convention,
            'norm': self.norm,
            'modular_at_norm': self.modular_at_norm,
            'iterations': self.bisection_iterations,
            'bracket': list(self.bracket),
        }

    def validate(self) -> Tuple[bool, List[str]]:
        """
        Validate result invariants.

        Returns:
            Tuple of (is_valid, list_of_errors)
        """
        errors = []
        if not _finite(self.norm) or self.norm < 0:
            errors.append(f"Invalid norm: {self.norm}")
        elif self.norm > 0 and abs(self.modular_at_norm - 1.0) > MODULAR_AT_NORM_TOL:
            errors.append(f"Modular at norm is {self.modular_at_norm}, expected 1")
        lo, hi = self.bracket
        if lo > hi:
            errors.append(f"Inverted bracket: {self.bracket}")
        return len(errors) == 0, errors


@dataclass
class SweepResult:
    """
    Aligned parameter/ratio lists of a limit sweep plus extrapolation.

    `parameter` names the swept quantity ('delta' or 's').
    """
    parameter: str
    values: List[float]
    ratios: List[float]
    target: float
    extrapolated: float
    relative_error: float
    passed: bool = False
    flags: List[str] = field(default_factory=list)
    extras: Dict[str, List[float]] = field(default_factory=dict)

    def rows(self) -> List[Dict[str, float]]:
        """One row per sweep point: (param, ratio, target, abs_err, rel_err)."""
        out = []
        for i, (param, ratio) in enumerate(zip(self.values, self.ratios)):
            abs_err = abs(ratio - self.target)
            rel_err = abs_err / abs(self.target) if self.target != 0 else abs_err
            row = {
                'param': param,
                'ratio': ratio,
                'target': self.target,
                'abs_err': abs_err,
                'rel_err': rel_err,
            }
            for name, column in self.extras.items():
                row[name] = column[i]
            out.append(row)
        return out

    def to_dict(self) -> Dict[str, Any]:
        """Convert sweep to dictionary."""
        data = asdict(self)
        data['rows'] = self.rows()
        return data

    def validate(self) -> Tuple[bool, List[str]]:
        """
        Validate sweep invariants.

        Returns:
            Tuple of (is_valid, list_of_errors)
        """
        errors = []
        if len(self.values) != len(self.ratios):
            errors.append("Parameter and ratio lists are not aligned")
        for name, column in self.extras.items():
            if len(column) != len(self.values):
                errors.append(f"Extra column '{name}' is not aligned")
        if self.target != 0:
            expected = abs(self.extrapolated - self.target) / abs(self.target)
            if not math.isclose(expected, self.relative_error, rel_tol=1e-12, abs_tol=1e-15):
                errors.append("relative_error does not match extrapolated and target")
        return len(errors) == 0, errors


@dataclass
class SolveResult:
    """Minimizer of the Dirichlet energy with its convergence history."""
    u: Any
    energy_history: List[float]
    grad_norm_history: List[float]
    grad_norm_final: float
    iterations: int
    converged: bool
    stop_reason: str
    direction_constants: List[float] = field(default_factory=list)
    mu: float = 0.0
    flags: List[str] = field(default_factory=list)

    @property
    def energy(self) -> float:
        return self.energy_history[-1]

    def to_dict(self) -> Dict[str, Any]:
        """Convert result to dictionary, without the solution values."""
        return {
            'energy': self.energy,
            'grad_norm_final': self.grad_norm_final,
            'iterations': self.iterations,
            'converged': self.converged,
            'stop_reason': self.stop_reason,
            'direction_constants': self.direction_constants,
            'mu': self.mu,
            'flags': self.flags,
        }

    def validate(self, tol: Optional[float] = None) -> Tuple[bool, List[str]]:
        """
        Validate solver invariants.

        Args:
            tol: Gradient tolerance the run was configured with

        Returns:
            Tuple of (is_valid, list_of_errors)
        """
        errors = []
        for k in range(1, len(self.energy_history)):
            if self.energy_history[k] > self.energy_history[k - 1]:
                errors.append(f"Energy increased at iteration {k}")
                break
        if len(self.grad_norm_history) != len(self.energy_history):
            errors.append("Energy and gradient histories are not aligned")
        if tol is not None and self.stop_reason == 'gradient' and self.grad_norm_final > tol:
            errors.append(f"Gradient norm {self.grad_norm_final} above tolerance {tol}")
        return len(errors) == 0, errors


@dataclass
class EigenResult:
    """
    First eigenpair of the homogeneous Rayleigh quotient.

    `index` is 1 for the first eigenvalue; higher indices are reserved.
    """
    lambda1: float
    u: Any
    residual: float
    S_of_u: float
    k_of_u: float
    history: List[float]
    step_sizes: List[float]
    iterations: int
    converged: bool
    index: int = 1
    flags: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        """Convert result to dictionary, without the eigenfunction values."""
        return {
            'index': self.index,
            'lambda1': self.lambda1,
            'residual': self.residual,
            'S_of_u': self.S_of_u,
            'k_of_u': self.k_of_u,
            'iterations': self.iterations,
            'converged': self.converged,
            'flags': self.flags,
        }

    def validate(self, tol: Optional[float] = None) -> Tuple[bool, List[str]]:
        """
        Validate eigen invariants.

        Returns:
            Tuple of (is_valid, list_of_errors)
        """
        errors = []
        if not _finite(self.lambda1) or self.lambda1 <= 0:
            errors.append(f"Invalid eigenvalue: {self.lambda1}")
        if abs(self.k_of_u - 1.0) > MODULAR_AT_NORM_TOL:
            errors.append(f"Eigenfunction not normalized: k(u) = {self.k_of_u}")
        for k in range(1, len(self.history)):
            if self.history[k] > self.history[k - 1]:
                errors.append(f"Rayleigh quotient increased at iteration {k}")
                break
        if tol is not None and self.converged and self.residual > tol:
            errors.append(f"Residual {self.residual} above tolerance {tol}")
        return len(errors) == 0, errors
