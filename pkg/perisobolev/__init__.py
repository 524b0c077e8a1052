"""
perisobolev - Peridynamic and anisotropic fractional Sobolev energies

Variable-exponent modulars and Luxemburg norms, directional and Gagliardo
seminorms, numerical checks of their local limits, a Dirichlet solver for
the peridynamic anisotropic p-Laplacian and a first-eigenvalue solver.
"""

__version__ = "0.1.0"

from .errors import (
    PerisobolevError,
    RejectionError,
    SupercriticalError,
    QuadratureError,
    NonConvergenceError,
    ConfigError,
)
from .models import EnergyReport, LuxemburgResult, SweepResult, SolveResult, EigenResult
from .validation import CheckReport
from .exponents import (
    ExponentField,
    ScalarExponentField,
    AnisotropyParams,
    critical_exponent,
    validate_P,
)
from .modular import DiscreteModular, ModularKind
from .luxemburg import modular, luxemburg_norm, norm_modular_relations
from .bbm import (
    bbm_delta_sweep,
    bbm_sequence_liminf_check,
    bbm_s_sweep_varexp,
    gamma_energy_convergence,
)
from .dirichlet import DirichletProblem, solve
from .eigen import EigenProblem, minimize_rayleigh, rayleigh

__all__ = [
    "PerisobolevError",
    "RejectionError",
    "SupercriticalError",
    "QuadratureError",
    "NonConvergenceError",
    "ConfigError",
    "EnergyReport",
    "LuxemburgResult",
    "SweepResult",
    "SolveResult",
    "EigenResult",
    "CheckReport",
    "ExponentField",
    "ScalarExponentField",
    "AnisotropyParams",
    "critical_exponent",
    "validate_P",
    "DiscreteModular",
    "ModularKind",
    "modular",
    "luxemburg_norm",
    "norm_modular_relations",
    "bbm_delta_sweep",
    "bbm_sequence_liminf_check",
    "bbm_s_sweep_varexp",
    "gamma_energy_convergence",
    "DirichletProblem",
    "solve",
    "EigenProblem",
    "minimize_rayleigh",
    "rayleigh",
    "__version__",
]
