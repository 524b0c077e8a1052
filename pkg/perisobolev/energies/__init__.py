"""
Singular nonlocal integrals: directional seminorms and modulars, the full
Gagliardo double integral, and the inequality checks built on them.
"""

from .quadrature import SingularQuadSpec, graded_levels, geometric_levels, sphere_rule
from .directional import (
    peridynamic_modular,
    directional_varexp_modular,
    local_modular,
    peridynamic_seminorm,
    peridynamic_energy,
    directional_modular_varexp,
    directional_seminorm_varexp,
    local_energy,
    lemma_bound,
    peridynamic_norm,
    anisotropic_peridynamic_norm,
    interpolation_for,
)
from .gagliardo import gagliardo_operator, gagliardo_modular, omega_mask
from .checks import (
    mollify_monotonicity_check,
    truncation_check,
    inclusion_check,
    varexp_anisotropic_norm,
)

__all__ = [
    "SingularQuadSpec",
    "graded_levels",
    "geometric_levels",
    "sphere_rule",
    "peridynamic_modular",
    "directional_varexp_modular",
    "local_modular",
    "peridynamic_seminorm",
    "peridynamic_energy",
    "directional_modular_varexp",
    "directional_seminorm_varexp",
    "local_energy",
    "lemma_bound",
    "peridynamic_norm",
    "anisotropic_peridynamic_norm",
    "interpolation_for",
    "gagliardo_operator",
    "gagliardo_modular",
    "omega_mask",
    "mollify_monotonicity_check",
    "truncation_check",
    "inclusion_check",
    "varexp_anisotropic_norm",
]
