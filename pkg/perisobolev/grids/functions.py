"""
Analytic test functions and sampled grid functions.

Test-function profiles are registered by kind, the same way new profiles
can be plugged in without touching the sampling code.
"""

from dataclasses import dataclass, field, replace
from typing import Dict, Type, Optional, List, Tuple, Any

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from ..errors import RejectionError
from .lattice import UniformGrid

# Smoothness flags carried by grid functions
ROUGH = 0
C1 = 1
C2 = 2


class Profile:
    """
    Base class for a test-function profile.

    Subclasses evaluate the profile in scaled coordinates z = (x - c)/w.
    """
    kind = "base_profile"
    smoothness = ROUGH
    compact = False
    analytic = True

    @staticmethod
    def value(z: np.ndarray, f: "TestFunction") -> np.ndarray:
        raise NotImplementedError

    @classmethod
    def evaluate(cls, x: np.ndarray, f: "TestFunction") -> np.ndarray:
        """Values at absolute points x of shape (..., N)."""
        return cls.value(f._scaled(x), f)

    @staticmethod
    def scaled_partial(z: np.ndarray, axis: int, f: "TestFunction") -> Optional[np.ndarray]:
        """Derivative with respect to z[axis]; None if not available."""
        return None


class ProfileRegistry:
    """
    Registry mapping a test-function kind to its profile class.
    """

    _profiles: Dict[str, Type[Profile]] = {}

    @classmethod
    def register(cls, profile_class: Type[Profile]) -> None:
        """
        Register a profile class.

        Args:
            profile_class: Class inheriting from Profile with a unique kind
        """
        if not issubclass(profile_class, Profile):
            raise ValueError(f"{profile_class} must inherit from Profile")
        kind = profile_class.kind
        if not kind or kind == "base_profile":
            raise ValueError("Profile must have a unique 'kind' attribute")
        cls._profiles[kind] = profile_class

    @classmethod
    def get(cls, kind: str) -> Optional[Type[Profile]]:
        return cls._profiles.get(kind.lower())

    @classmethod
    def list_kinds(cls) -> List[str]:
        return sorted(cls._profiles.keys())


def register_profile(profile_class: Type[Profile]) -> Type[Profile]:
    """Decorator registering a profile class under its kind."""
    ProfileRegistry.register(profile_class)
    return profile_class


def _r2(z: np.ndarray) -> np.ndarray:
    return np.sum(z * z, axis=-1)


@register_profile
class GaussianProfile(Profile):
    """a·exp(-|z|²)"""
    kind = "gaussian"
    smoothness = C2

    @staticmethod
    def value(z, f):
        return f.amplitude * np.exp(-_r2(z))

    @staticmethod
    def scaled_partial(z, axis, f):
        return f.amplitude * np.exp(-_r2(z)) * (-2.0 * z[..., axis])


@register_profile
class BumpProfile(Profile):
    """a·exp(1 - 1/(1 - |z|²)) inside the unit ball, peak value a."""
    kind = "bump"
    smoothness = C2
    compact = True

    @staticmethod
    def value(z, f):
        g = 1.0 - _r2(z)
        inside = g > 0
        out = np.zeros(g.shape)
        out[inside] = np.exp(1.0 - 1.0 / g[inside])
        return f.amplitude * out

    @staticmethod
    def scaled_partial(z, axis, f):
        g = 1.0 - _r2(z)
        inside = g > 0
        out = np.zeros(g.shape)
        gi = g[inside]
        out[inside] = np.exp(1.0 - 1.0 / gi) * (-2.0 * z[..., axis][inside]) / gi ** 2
        return f.amplitude * out


@register_profile
class PolynomialBumpProfile(Profile):
    """a·(1 - |z|²)³ inside the unit ball."""
    kind = "polynomial_bump"
    smoothness = C2
    compact = True

    @staticmethod
    def value(z, f):
        g = np.clip(1.0 - _r2(z), 0.0, None)
        return f.amplitude * g ** 3

    @staticmethod
    def scaled_partial(z, axis, f):
        g = np.clip(1.0 - _r2(z), 0.0, None)
        return f.amplitude * 3.0 * g ** 2 * (-2.0 * z[..., axis])


@register_profile
class RampBumpProfile(Profile):
    """Affine ramp (1 + slope·z₁) times the bump profile."""
    kind = "ramp_bump"
    smoothness = C2
    compact = True

    @staticmethod
    def value(z, f):
        return (1.0 + f.slope * z[..., 0]) * BumpProfile.value(z, f)

    @staticmethod
    def scaled_partial(z, axis, f):
        out = (1.0 + f.slope * z[..., 0]) * BumpProfile.scaled_partial(z, axis, f)
        if axis == 0:
            out = out + f.slope * BumpProfile.value(z, f)
        return out


@register_profile
class IndicatorProfile(Profile):
    """Amplitude on the closed box [lo, hi], zero elsewhere."""
    kind = "indicator"
    smoothness = ROUGH
    compact = True
    analytic = False

    @classmethod
    def evaluate(cls, x, f):
        inside = np.all((x >= np.array(f.lo)) & (x <= np.array(f.hi)), axis=-1)
        return np.where(inside, f.amplitude, 0.0)


@dataclass(frozen=True)
class TestFunction:
    """
    Analytic test function of a registered kind.

    Smooth kinds are centred at `center` with radius/width `width`;
    the indicator uses the box [lo, hi].
    """
    __test__ = False

    kind: str
    center: Tuple[float, ...] = (0.0,)
    width: float = 1.0
    amplitude: float = 1.0
    slope: float = 0.0
    lo: Optional[Tuple[float, ...]] = None
    hi: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        kind = self.kind.lower()
        if ProfileRegistry.get(kind) is None:
            raise RejectionError(
                f"Unknown test function kind '{self.kind}'; "
                f"available: {', '.join(ProfileRegistry.list_kinds())}"
            )
        object.__setattr__(self, 'kind', kind)
        center = self.center
        if np.isscalar(center):
            center = (center,)
        object.__setattr__(self, 'center', tuple(float(c) for c in center))
        if not self.width > 0:
            raise RejectionError(f"Test function width must be positive, got {self.width}")
        if kind == "indicator":
            if self.lo is None or self.hi is None:
                raise RejectionError("Indicator needs both lo and hi")
            lo = (self.lo,) if np.isscalar(self.lo) else self.lo
            hi = (self.hi,) if np.isscalar(self.hi) else self.hi
            object.__setattr__(self, 'lo', tuple(float(v) for v in lo))
            object.__setattr__(self, 'hi', tuple(float(v) for v in hi))

    @property
    def profile(self) -> Type[Profile]:
        return ProfileRegistry.get(self.kind)

    @property
    def smoothness(self) -> int:
        return self.profile.smoothness

    @property
    def has_analytic_partial(self) -> bool:
        return self.profile.analytic

    def _scaled(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        c = np.array(self.center)
        if c.size == 1 and x.shape[-1] > 1:
            c = np.full(x.shape[-1], c[0])
        if c.size != x.shape[-1]:
            raise RejectionError(
                f"Test function centre has {c.size} coordinates, points have {x.shape[-1]}"
            )
        return (x - c) / self.width

    def __call__(self, x: np.ndarray) -> np.ndarray:
        """Evaluate at points of shape (..., N)."""
        return self.profile.evaluate(np.asarray(x, dtype=float), self)

    def partial(self, x: np.ndarray, axis: int) -> np.ndarray:
        """Analytic partial derivative along `axis` at points (..., N)."""
        if not self.has_analytic_partial:
            raise RejectionError(f"No analytic derivative for kind '{self.kind}'")
        return self.profile.scaled_partial(self._scaled(x), axis, self) / self.width

    def scaled(self, factor: float) -> "TestFunction":
        return replace(self, amplitude=self.amplitude * factor)

    def to_dict(self) -> Dict[str, Any]:
        data = {'kind': self.kind, 'amplitude': self.amplitude}
        if self.kind == "indicator":
            data.update(lo=list(self.lo), hi=list(self.hi))
        else:
            data.update(center=list(self.center), width=self.width)
            if self.kind == "ramp_bump":
                data['slope'] = self.slope
        return data


@dataclass(frozen=True)
class GridFunction:
    """
    Real values on the nodes of a uniform grid, zero outside the grid box.

    Values are stored read-only. `source` keeps the analytic function the
    values were sampled from, when there is one, so exact derivatives stay
    available. `smoothness` records the regularity class that downstream
    quadrature may assume (ROUGH, C1 or C2).
    """
    grid: UniformGrid
    values: np.ndarray
    source: Optional[TestFunction] = None
    smoothness: int = ROUGH
    provenance: str = "values"

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.size == self.grid.size and values.shape != self.grid.shape:
            values = values.reshape(self.grid.shape)
        if values.shape != self.grid.shape:
            raise RejectionError(
                f"Values of shape {values.shape} do not match grid shape {self.grid.shape}"
            )
        bad = ~np.isfinite(values)
        if bad.any():
            index = np.argwhere(bad)[0]
            coords = [float(self.grid.axis_nodes(i)[k]) for i, k in enumerate(index)]
            raise RejectionError(f"Non-finite value at node {coords}")
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

    @classmethod
    def zeros(cls, grid: UniformGrid, smoothness: int = C2) -> "GridFunction":
        return cls(grid, np.zeros(grid.shape), smoothness=smoothness, provenance="zeros")

    @property
    def flat(self) -> np.ndarray:
        return self.values.ravel()

    def with_values(self, values: np.ndarray, provenance: Optional[str] = None,
                    smoothness: Optional[int] = None) -> "GridFunction":
        """Same grid, new values, analytic source dropped."""
        return GridFunction(
            self.grid,
            np.asarray(values, dtype=float).reshape(self.grid.shape),
            source=None,
            smoothness=self.smoothness if smoothness is None else smoothness,
            provenance=provenance or self.provenance,
        )

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """
        Multilinear interpolation at arbitrary points (M, N).

        A ghost layer of zeros half a cell outside the box makes the
        interpolant decay to zero at the box faces; points outside the box
        return exactly 0.
        """
        points = np.atleast_2d(np.asarray(points, dtype=float))
        axes = []
        for i in range(self.grid.dim):
            nodes = self.grid.axis_nodes(i)
            axes.append(np.concatenate(([self.grid.box.lo[i]], nodes, [self.grid.box.hi[i]])))
        padded = np.pad(self.values, 1)
        interp = RegularGridInterpolator(axes, padded, bounds_error=False, fill_value=0.0)
        out = interp(points)
        out[~self.grid.box.contains(points)] = 0.0
        return out

    def support_extent(self, axis: int) -> float:
        """Length along `axis` of the smallest cell-aligned interval holding the support."""
        nonzero = np.any(self.values != 0, axis=tuple(i for i in range(self.grid.dim) if i != axis))
        idx = np.nonzero(nonzero)[0]
        if idx.size == 0:
            return 0.0
        return float((idx[-1] - idx[0] + 1) * self.grid.spacing[axis])

    def shifted(self, cells: int, axis: int) -> "GridFunction":
        """Translate by a whole number of cells; values pushed off the grid must be zero."""
        values = np.zeros_like(self.values)
        n = self.grid.cells[axis]
        if abs(cells) >= n:
            if np.any(self.values != 0):
                raise RejectionError("Shift moves the support off the grid")
            return self.with_values(values, provenance=f"shifted({cells})")
        src = [slice(None)] * self.grid.dim
        dst = [slice(None)] * self.grid.dim
        lost = [slice(None)] * self.grid.dim
        if cells >= 0:
            src[axis] = slice(0, n - cells)
            dst[axis] = slice(cells, n)
            lost[axis] = slice(n - cells, n)
        else:
            src[axis] = slice(-cells, n)
            dst[axis] = slice(0, n + cells)
            lost[axis] = slice(0, -cells)
        if np.any(self.values[tuple(lost)] != 0):
            raise RejectionError("Shift moves part of the support off the grid")
        values[tuple(dst)] = self.values[tuple(src)]
        return self.with_values(values, provenance=f"shifted({cells})")

    def _check_grid(self, other: "GridFunction"):
        if other.grid != self.grid:
            raise RejectionError("Grid functions live on different grids")

    def __add__(self, other: "GridFunction") -> "GridFunction":
        self._check_grid(other)
        return self.with_values(self.values + other.values, provenance="sum",
                                smoothness=min(self.smoothness, other.smoothness))

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        self._check_grid(other)
        return self.with_values(self.values - other.values, provenance="difference",
                                smoothness=min(self.smoothness, other.smoothness))

    def __mul__(self, factor: float) -> "GridFunction":
        factor = float(factor)
        source = self.source.scaled(factor) if self.source is not None else None
        return GridFunction(self.grid, self.values * factor, source=source,
                            smoothness=self.smoothness, provenance=self.provenance)

    __rmul__ = __mul__

    def __neg__(self) -> "GridFunction":
        return self * -1.0

    def __truediv__(self, factor: float) -> "GridFunction":
        return self * (1.0 / float(factor))

    def to_dict(self) -> Dict[str, Any]:
        return {
            'grid': self.grid.to_dict(),
            'smoothness': self.smoothness,
            'provenance': self.provenance,
            'source': self.source.to_dict() if self.source is not None else None,
        }
