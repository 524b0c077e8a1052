"""
Uniform grids, sampled functions and single-integral norms.
"""

from .lattice import Box, UniformGrid
from .functions import (
    GridFunction,
    TestFunction,
    Profile,
    ProfileRegistry,
    register_profile,
    ROUGH,
    C1,
    C2,
)
from .operations import sample, partial_derivative, mollify, truncate, cutoff, cutoff_gradient_sup
from .norms import lp_norm_pow, lp_norm, mixed_norm, exponent_values
from .csv_io import write_grid_function, read_grid_function, write_table

__all__ = [
    "Box",
    "UniformGrid",
    "GridFunction",
    "TestFunction",
    "Profile",
    "ProfileRegistry",
    "register_profile",
    "ROUGH",
    "C1",
    "C2",
    "sample",
    "partial_derivative",
    "mollify",
    "truncate",
    "cutoff",
    "cutoff_gradient_sup",
    "lp_norm_pow",
    "lp_norm",
    "mixed_norm",
    "exponent_values",
    "write_grid_function",
    "read_grid_function",
    "write_table",
]
