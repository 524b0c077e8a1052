"""
Quadrature rules for the singular h-integrals.

The integrand |h|^{p(1-s)-1} is monomial-like on each dyadic level
[a·2^{-l-1}, a·2^{-l}], so a few Gauss-Legendre points per level integrate
it accurately.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Any, Tuple
import math

import numpy as np
from numpy.polynomial.legendre import leggauss

from ..errors import RejectionError
from ..settings import QUAD_LEVELS, QUAD_POINTS_PER_LEVEL, QUAD_FAR_LEVELS, QUAD_ANGLES


@dataclass(frozen=True)
class SingularQuadSpec:
    """
    Grading parameters for singular integrals.

    Attributes:
        levels: Dyadic levels toward h = 0
        points_per_level: Gauss-Legendre points per level
        outer_margin: Extension of the x-domain beyond the support; 0 means
            "use the horizon", which is exact
        far_levels: Dyadic levels of the decaying tail beyond the support
        angles: Ray directions per angular coordinate (N ≥ 2 double integrals)
    """
    levels: int = QUAD_LEVELS
    points_per_level: int = QUAD_POINTS_PER_LEVEL
    outer_margin: float = 0.0
    far_levels: int = QUAD_FAR_LEVELS
    angles: int = QUAD_ANGLES

    def __post_init__(self):
        if self.levels < 4:
            raise RejectionError(f"levels must be >= 4, got {self.levels}")
        if self.points_per_level < 2:
            raise RejectionError(f"points_per_level must be >= 2, got {self.points_per_level}")
        if self.outer_margin < 0:
            raise RejectionError(f"outer_margin must be >= 0, got {self.outer_margin}")
        if self.far_levels < 1:
            raise RejectionError(f"far_levels must be >= 1, got {self.far_levels}")
        if self.angles < 2:
            raise RejectionError(f"angles must be >= 2, got {self.angles}")

    @property
    def coarse_levels(self) -> int:
        return int(math.ceil(self.levels / 2))

    def to_dict(self) -> Dict[str, Any]:
        return {
            'levels': self.levels,
            'points_per_level': self.points_per_level,
            'outer_margin': self.outer_margin,
            'far_levels': self.far_levels,
            'angles': self.angles,
        }


@lru_cache(maxsize=32)
def _gauss(n: int) -> Tuple[np.ndarray, np.ndarray]:
    x, w = leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_on(a: float, b: float, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [a, b]."""
    x, w = _gauss(n)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def graded_levels(top: float, levels: int, points: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Gauss points on [top·2^{-levels}, top], level by level.

    Returns:
        (points, weights, level index of each point); level 0 is the outermost
    """
    xs, ws, ls = [], [], []
    for level in range(levels):
        b = top * 2.0 ** (-level)
        x, w = gauss_on(0.5 * b, b, points)
        xs.append(x)
        ws.append(w)
        ls.append(np.full(points, level))
    return np.concatenate(xs), np.concatenate(ws), np.concatenate(ls)


def geometric_levels(start: float, stop: float, points: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss points on [start, stop] split into doubling levels."""
    if stop <= start:
        return np.zeros(0), np.zeros(0)
    xs, ws = [], []
    a = start
    while a < stop:
        b = min(2.0 * a, stop)
        x, w = gauss_on(a, b, points)
        xs.append(x)
        ws.append(w)
        a = b
    return np.concatenate(xs), np.concatenate(ws)


def sphere_rule(N: int, angles: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Directions and weights integrating over the unit sphere S^{N-1}.

    N = 1: the two directions ±1 with weight 1.
    N = 2: `angles` equispaced directions, weights 2π/angles.
    N = 3: Gauss-Legendre in cos θ times `2·angles` equispaced φ.
    """
    if N == 1:
        return np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    if N == 2:
        theta = (np.arange(angles) + 0.5) * (2.0 * np.pi / angles)
        dirs = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
        return dirs, np.full(angles, 2.0 * np.pi / angles)
    if N == 3:
        z, wz = _gauss(angles)
        n_phi = 2 * angles
        phi = (np.arange(n_phi) + 0.5) * (2.0 * np.pi / n_phi)
        zz, pp = np.meshgrid(z, phi, indexing='ij')
        r = np.sqrt(1.0 - zz ** 2)
        dirs = np.stack([r * np.cos(pp), r * np.sin(pp), zz], axis=-1).reshape(-1, 3)
        weights = (wz[:, None] * np.full(n_phi, 2.0 * np.pi / n_phi)[None, :]).ravel()
        return dirs, weights
    raise RejectionError(f"No sphere rule for N = {N}")
