"""
Exponent fields and critical-exponent arithmetic.

Two-point fields p(x, y) come from three closed-form families that are
symmetric by construction and carry analytic bounds p⁻ ≤ p ≤ p⁺. Scalar
fields are the diagonal trace p̄(x) = p(x, x), an independent p₀(x), or
the pointwise maximum p_M(x) of several diagonals.
"""

from dataclasses import dataclass
from typing import Dict, Any, Optional, Sequence, Tuple
import itertools
import logging

import numpy as np

from .errors import RejectionError, SupercriticalError
from .grids.lattice import UniformGrid
from .settings import PROBE_POINTS_PER_AXIS, PROBE_HALF_WIDTH
from .validation import CheckReport

logger = logging.getLogger(__name__)

FIELD_KINDS = ("constant", "separable_sum", "radial_in_distance")


def _ramp(x: np.ndarray, slope: float, axis: int) -> np.ndarray:
    return np.clip(slope * x[..., axis], -1.0, 1.0)


@dataclass(frozen=True)
class ExponentField:
    """
    Symmetric two-point exponent.

    constant:            p = base
    separable_sum:       p = base + amplitude·(ramp(x) + ramp(y))/2,
                         ramp(z) = clamp(slope·z[axis], -1, 1)
    radial_in_distance:  p = base + amplitude·exp(-|x - y|²/length²)
    """
    kind: str = "constant"
    base: float = 2.0
    amplitude: float = 0.0
    slope: float = 1.0
    axis: int = 0
    length: float = 1.0

    def __post_init__(self):
        if self.kind not in FIELD_KINDS:
            raise RejectionError(f"Unknown exponent kind '{self.kind}'; choose from {FIELD_KINDS}")
        if self.kind == "radial_in_distance" and not self.length > 0:
            raise RejectionError(f"Length scale must be positive, got {self.length}")
        if not self.pminus > 1.0:
            raise RejectionError(f"Exponent lower bound {self.pminus} must exceed 1")

    @classmethod
    def constant(cls, p: float) -> "ExponentField":
        return cls(kind="constant", base=float(p))

    @property
    def is_constant(self) -> bool:
        return self.kind == "constant" or self.amplitude == 0.0

    @property
    def pminus(self) -> float:
        if self.kind == "constant":
            return self.base
        if self.kind == "separable_sum":
            return self.base - abs(self.amplitude)
        return min(self.base, self.base + self.amplitude)

    @property
    def pplus(self) -> float:
        if self.kind == "constant":
            return self.base
        if self.kind == "separable_sum":
            return self.base + abs(self.amplitude)
        return max(self.base, self.base + self.amplitude)

    def __call__(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Evaluate at point pairs; x and y broadcast with shape (..., N)."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        shape = np.broadcast_shapes(x.shape, y.shape)[:-1]
        if self.kind == "constant":
            return np.full(shape, self.base)
        if self.kind == "separable_sum":
            return self.base + self.amplitude * 0.5 * (
                _ramp(x, self.slope, self.axis) + _ramp(y, self.slope, self.axis)
            )
        d2 = np.sum((x - y) ** 2, axis=-1)
        return self.base + self.amplitude * np.exp(-d2 / self.length ** 2)

    def diagonal(self, x: np.ndarray) -> np.ndarray:
        """p̄(x) = p(x, x)."""
        return self(x, x)

    def to_dict(self) -> Dict[str, Any]:
        data = {'kind': self.kind, 'base': self.base, 'pminus': self.pminus, 'pplus': self.pplus}
        if self.kind == "separable_sum":
            data.update(amplitude=self.amplitude, slope=self.slope, axis=self.axis)
        elif self.kind == "radial_in_distance":
            data.update(amplitude=self.amplitude, length=self.length)
        return data


@dataclass(frozen=True)
class ScalarExponentField:
    """
    One-point exponent r(x).

    diagonal:     r(x) = fields[0](x, x)
    max:          r(x) = max_i fields[i](x, x)
    independent:  r(x) = base + amplitude·clamp(slope·x[axis], -1, 1)
    """
    kind: str
    fields: Tuple[ExponentField, ...] = ()
    base: float = 2.0
    amplitude: float = 0.0
    slope: float = 1.0
    axis: int = 0

    def __post_init__(self):
        if self.kind not in ("diagonal", "max", "independent"):
            raise RejectionError(f"Unknown scalar exponent kind '{self.kind}'")
        if self.kind in ("diagonal", "max") and not self.fields:
            raise RejectionError(f"Scalar field '{self.kind}' needs at least one two-point field")
        if not self.pminus > 1.0:
            raise RejectionError(f"Exponent lower bound {self.pminus} must exceed 1")

    @classmethod
    def diagonal_of(cls, field: ExponentField) -> "ScalarExponentField":
        return cls(kind="diagonal", fields=(field,))

    @classmethod
    def max_of(cls, fields: Sequence[ExponentField]) -> "ScalarExponentField":
        return cls(kind="max", fields=tuple(fields))

    @classmethod
    def independent(cls, base: float, amplitude: float = 0.0, slope: float = 1.0,
                    axis: int = 0) -> "ScalarExponentField":
        return cls(kind="independent", base=base, amplitude=amplitude, slope=slope, axis=axis)

    @staticmethod
    def _diagonal_bounds(field: ExponentField) -> Tuple[float, float]:
        if field.kind == "radial_in_distance":
            value = field.base + field.amplitude
            return value, value
        return field.pminus, field.pplus

    @property
    def pminus(self) -> float:
        if self.kind == "independent":
            return self.base - abs(self.amplitude)
        lows = [self._diagonal_bounds(f)[0] for f in self.fields]
        return max(lows) if self.kind == "max" else lows[0]

    @property
    def pplus(self) -> float:
        if self.kind == "independent":
            return self.base + abs(self.amplitude)
        return max(self._diagonal_bounds(f)[1] for f in self.fields)

    @property
    def is_constant(self) -> bool:
        return self.pminus == self.pplus

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.kind == "independent":
            return self.base + self.amplitude * _ramp(x, self.slope, self.axis)
        values = [f.diagonal(x) for f in self.fields]
        return values[0] if self.kind == "diagonal" else np.max(values, axis=0)

    def on_grid(self, grid: UniformGrid) -> np.ndarray:
        """Values at the grid nodes, shaped like the grid."""
        return self(grid.nodes()).reshape(grid.shape)

    def to_dict(self) -> Dict[str, Any]:
        data = {'kind': self.kind, 'pminus': self.pminus, 'pplus': self.pplus}
        if self.kind == "independent":
            data.update(base=self.base, amplitude=self.amplitude, slope=self.slope, axis=self.axis)
        else:
            data['fields'] = [f.to_dict() for f in self.fields]
        return data


@dataclass(frozen=True)
class AnisotropyParams:
    """
    Direction-wise orders s⃗, integrabilities p⃗ and horizons δ⃗.

    A horizon of 0 marks a direction that uses the local limit functional.
    """
    svec: Tuple[float, ...]
    pvec: Tuple[float, ...]
    dvec: Tuple[float, ...]

    def __post_init__(self):
        svec = tuple(float(s) for s in np.atleast_1d(self.svec))
        pvec = tuple(float(p) for p in np.atleast_1d(self.pvec))
        dvec = tuple(float(d) for d in np.atleast_1d(self.dvec))
        if not (len(svec) == len(pvec) == len(dvec)) or not svec:
            raise RejectionError(
                f"s, p and delta vectors must have equal positive length: "
                f"{len(svec)}, {len(pvec)}, {len(dvec)}"
            )
        for i, (s, p, d) in enumerate(zip(svec, pvec, dvec)):
            if not 0.0 < s < 1.0:
                raise RejectionError(f"s_{i + 1} = {s} outside (0, 1)")
            if not 1.0 < p < np.inf:
                raise RejectionError(f"p_{i + 1} = {p} outside (1, inf)")
            if not (d >= 0.0 and np.isfinite(d)):
                raise RejectionError(f"delta_{i + 1} = {d} must be finite and >= 0")
        object.__setattr__(self, 'svec', svec)
        object.__setattr__(self, 'pvec', pvec)
        object.__setattr__(self, 'dvec', dvec)

    @property
    def dim(self) -> int:
        return len(self.svec)

    @property
    def local_mask(self) -> Tuple[bool, ...]:
        return tuple(d == 0.0 for d in self.dvec)

    @property
    def sbar(self) -> float:
        """Harmonic mean of the s_i."""
        return self.dim / sum(1.0 / s for s in self.svec)

    @property
    def mean_sp(self) -> float:
        """Harmonic mean of the products s_i·p_i."""
        return self.dim / sum(1.0 / (s * p) for s, p in zip(self.svec, self.pvec))

    @property
    def p_min(self) -> float:
        return min(self.pvec)

    @property
    def p_max(self) -> float:
        return max(self.pvec)

    def with_deltas(self, dvec: Sequence[float]) -> "AnisotropyParams":
        return AnisotropyParams(self.svec, self.pvec, tuple(dvec))

    def to_dict(self) -> Dict[str, Any]:
        return {'s': list(self.svec), 'p': list(self.pvec), 'delta': list(self.dvec)}


@dataclass(frozen=True)
class CriticalExponent:
    sbar: float
    spbar: float
    pstar: float
    pmax_subcritical: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            'sbar': self.sbar,
            'spbar': self.spbar,
            'pstar': self.pstar,
            'pmax_subcritical': self.pmax_subcritical,
        }


def critical_exponent(params: AnisotropyParams, N: int) -> CriticalExponent:
    """
    Harmonic means s̄, s̄p̄ and the critical exponent p⃗* = N(s̄p̄/s̄)/(N - s̄p̄).

    Raises:
        SupercriticalError: If s̄p̄ >= N
    """
    if params.dim != N:
        raise RejectionError(f"Parameters have {params.dim} directions, dimension is {N}")
    sbar = params.sbar
    spbar = params.mean_sp
    if spbar >= N:
        raise SupercriticalError(f"supercritical: mean s·p = {spbar} >= N = {N}")
    pstar = N * (spbar / sbar) / (N - spbar)
    result = CriticalExponent(sbar, spbar, pstar, params.p_max < pstar)
    logger.debug(f"Critical exponent: {result.to_dict()}")
    return result


def probe_lattice(N: int, points_per_axis: int = PROBE_POINTS_PER_AXIS,
                  half_width: float = PROBE_HALF_WIDTH) -> np.ndarray:
    """Deterministic probe points on [-half_width, half_width]^N."""
    axis = np.linspace(-half_width, half_width, points_per_axis)
    return np.array(list(itertools.product(axis, repeat=N)), dtype=float)


def validate_P(field: ExponentField, s: float, N: int,
               probe: Optional[np.ndarray] = None) -> CheckReport:
    """
    Check symmetry and 1 < p⁻ ≤ p⁺ < N/s for a two-point field.

    Each half of the condition is reported as its own named check.
    """
    if not 0.0 < s < 1.0:
        raise RejectionError(f"s = {s} outside (0, 1)")
    points = probe_lattice(N) if probe is None else np.asarray(probe, dtype=float)
    x = points[:, None, :]
    y = points[None, :, :]
    pxy = field(x, y)
    pyx = field(y, x)
    report = CheckReport(name="condition_P")
    report.add_check("symmetry", bool(np.all(pxy == pyx)),
                     value=float(np.max(np.abs(pxy - pyx))), bound=0.0)
    sampled_min = float(pxy.min())
    sampled_max = float(pxy.max())
    report.add_check("lower_bound", field.pminus > 1.0 and sampled_min >= field.pminus,
                     value=field.pminus, bound=1.0, detail="1 < p-")
    report.add_check("subcritical", field.pplus < N / s and sampled_max <= field.pplus,
                     value=field.pplus, bound=N / s, detail="p+ < N/s")
    report.data.update(
        field=field.to_dict(), s=s, N=N,
        sampled_min=sampled_min, sampled_max=sampled_max,
    )
    return report


def module_condition(pbar: ScalarExponentField, fields: Sequence[ExponentField],
                     grid: UniformGrid) -> CheckReport:
    """Check p̄(x) ≥ p_M(x) on the grid nodes."""
    pm = ScalarExponentField.max_of(fields).on_grid(grid)
    pb = pbar.on_grid(grid)
    report = CheckReport(name="module_condition")
    gap = float(np.min(pb - pm))
    report.add_check("pbar_dominates_pM", gap >= 0.0, value=gap, bound=0.0)
    return report
