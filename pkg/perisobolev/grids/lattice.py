"""
Boxes and uniform tensor grids.

Grid nodes are cell centres, x_k = lo + (k + 1/2)·spacing, so the composite
midpoint rule is a plain weighted sum over nodes and node coordinates are
reproducible from (box, cells) alone.
"""

from dataclasses import dataclass
from typing import Dict, Any, Sequence, Tuple
import math

import numpy as np

from ..errors import RejectionError

MAX_DIMENSION = 3


def _as_tuple(values, name: str) -> Tuple[float, ...]:
    if np.isscalar(values):
        values = (values,)
    out = tuple(float(v) for v in values)
    if not out:
        raise RejectionError(f"{name} must have at least one entry")
    return out


@dataclass(frozen=True)
class Box:
    """Axis-aligned box [lo, hi] in R^N, 1 ≤ N ≤ 3."""
    lo: Tuple[float, ...]
    hi: Tuple[float, ...]

    def __post_init__(self):
        lo = _as_tuple(self.lo, "lo")
        hi = _as_tuple(self.hi, "hi")
        if len(lo) != len(hi):
            raise RejectionError(f"Box corners differ in dimension: {lo} vs {hi}")
        if len(lo) > MAX_DIMENSION:
            raise RejectionError(f"Dimension {len(lo)} exceeds {MAX_DIMENSION}")
        for i, (a, b) in enumerate(zip(lo, hi)):
            if not (math.isfinite(a) and math.isfinite(b) and a < b):
                raise RejectionError(f"Box axis {i}: need lo < hi, got [{a}, {b}]")
        object.__setattr__(self, 'lo', lo)
        object.__setattr__(self, 'hi', hi)

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def widths(self) -> np.ndarray:
        return np.array(self.hi) - np.array(self.lo)

    @property
    def volume(self) -> float:
        return float(np.prod(self.widths))

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (np.array(self.lo) + np.array(self.hi))

    def contains(self, points: np.ndarray) -> np.ndarray:
        """Boolean mask of points (shape (..., N)) inside the closed box."""
        points = np.asarray(points, dtype=float)
        lo = np.array(self.lo)
        hi = np.array(self.hi)
        return np.all((points >= lo) & (points <= hi), axis=-1)

    def distance_to_boundary(self, points: np.ndarray, directions: np.ndarray) -> np.ndarray:
        """
        Distance from interior points to the boundary along unit directions.

        Args:
            points: Array (M, N) of points inside the box
            directions: Array (R, N) of unit vectors

        Returns:
            Array (M, R) of ray lengths
        """
        points = np.asarray(points, dtype=float)
        directions = np.asarray(directions, dtype=float)
        lo = np.array(self.lo)
        hi = np.array(self.hi)
        with np.errstate(divide='ignore', invalid='ignore'):
            up = (hi[None, None, :] - points[:, None, :]) / directions[None, :, :]
            down = (lo[None, None, :] - points[:, None, :]) / directions[None, :, :]
        d = directions[None, :, :]
        per_axis = np.where(d > 0, up, np.where(d < 0, down, np.inf))
        return per_axis.min(axis=-1)

    def to_dict(self) -> Dict[str, Any]:
        return {'lo': list(self.lo), 'hi': list(self.hi)}


@dataclass(frozen=True)
class UniformGrid:
    """
    Uniform tensor grid of cells_per_axis cells covering a box.

    Node k along axis i sits at lo[i] + (k + 1/2)·spacing[i].
    """
    box: Box
    cells: Tuple[int, ...]

    def __post_init__(self):
        cells = self.cells
        if np.isscalar(cells):
            cells = (cells,)
        cells = tuple(int(c) for c in cells)
        if len(cells) != self.box.dim:
            raise RejectionError(
                f"Grid has {len(cells)} cell counts for a {self.box.dim}-D box"
            )
        if any(c < 1 for c in cells):
            raise RejectionError(f"Cell counts must be positive, got {cells}")
        object.__setattr__(self, 'cells', cells)

    @classmethod
    def from_bounds(cls, lo: Sequence[float], hi: Sequence[float], cells) -> "UniformGrid":
        return cls(Box(lo, hi), cells)

    @property
    def dim(self) -> int:
        return self.box.dim

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.cells

    @property
    def size(self) -> int:
        return int(np.prod(self.cells))

    @property
    def spacing(self) -> np.ndarray:
        return self.box.widths / np.array(self.cells, dtype=float)

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    def axis_nodes(self, axis: int) -> np.ndarray:
        """Node coordinates along one axis."""
        n = self.cells[axis]
        return self.box.lo[axis] + (np.arange(n) + 0.5) * self.spacing[axis]

    def mesh(self):
        """Coordinate arrays, one per axis, each of grid shape."""
        return np.meshgrid(*[self.axis_nodes(i) for i in range(self.dim)], indexing='ij')

    def nodes(self) -> np.ndarray:
        """All node coordinates as an array (size, N) in C order."""
        return np.stack([m.ravel() for m in self.mesh()], axis=-1)

    def padded(self, pad: Sequence[int]) -> "UniformGrid":
        """
        Grid extended by pad[i] whole cells on both sides of axis i.

        Nodes of the original grid are nodes of the padded grid.
        """
        pad = tuple(int(p) for p in pad)
        h = self.spacing
        lo = tuple(self.box.lo[i] - pad[i] * h[i] for i in range(self.dim))
        hi = tuple(self.box.hi[i] + pad[i] * h[i] for i in range(self.dim))
        cells = tuple(self.cells[i] + 2 * pad[i] for i in range(self.dim))
        return UniformGrid(Box(lo, hi), cells)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'box': self.box.to_dict(),
            'cells': list(self.cells),
            'spacing': [float(h) for h in self.spacing],
        }
