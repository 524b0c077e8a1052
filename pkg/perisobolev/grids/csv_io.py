"""
CSV import/export of grid functions.

One node per row (coordinates, value) at 17 significant digits, preceded by
a comment line holding the box and cell counts so the grid is rebuilt exactly.
"""

from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Union
import csv

import numpy as np

from ..errors import RejectionError
from ..settings import FLOAT_FORMAT
from .functions import GridFunction
from .lattice import Box, UniformGrid


def fmt(x: float) -> str:
    return format(float(x), FLOAT_FORMAT)


def _fmt_list(values: Sequence[float]) -> str:
    return " ".join(fmt(v) for v in values)


def write_grid_function(
    u: GridFunction,
    path: Union[str, Path],
    header_comments: Optional[Iterable[str]] = None
):
    """
    Write a grid function as CSV.

    Args:
        u: Grid function to dump
        path: Output file
        header_comments: Extra '# ' lines written first (digest, version)
    """
    grid = u.grid
    nodes = grid.nodes()
    with open(path, 'w', encoding='utf-8', newline='') as f:
        for line in header_comments or []:
            f.write(f"# {line}\n")
        f.write(
            f"# box_lo={_fmt_list(grid.box.lo)}; box_hi={_fmt_list(grid.box.hi)}; "
            f"cells={' '.join(str(c) for c in grid.cells)}\n"
        )
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow([f"x{i + 1}" for i in range(grid.dim)] + ['value'])
        for point, value in zip(nodes, u.flat):
            writer.writerow([fmt(c) for c in point] + [fmt(value)])


def _parse_grid_comment(line: str) -> UniformGrid:
    fields = {}
    for part in line.lstrip('#').split(';'):
        if '=' in part:
            key, value = part.split('=', 1)
            fields[key.strip()] = value.split()
    try:
        lo = [float(v) for v in fields['box_lo']]
        hi = [float(v) for v in fields['box_hi']]
        cells = [int(v) for v in fields['cells']]
    except (KeyError, ValueError) as e:
        raise RejectionError(f"Malformed grid comment: {line.strip()}") from e
    return UniformGrid(Box(lo, hi), cells)


def read_grid_function(path: Union[str, Path], smoothness: int = 0) -> GridFunction:
    """
    Read a grid function written by write_grid_function.

    Raises:
        RejectionError: If the grid comment is missing or rows do not match it
    """
    grid = None
    rows: List[List[str]] = []
    with open(path, 'r', encoding='utf-8') as f:
        data_lines = []
        for line in f:
            if line.startswith('#'):
                if 'box_lo=' in line:
                    grid = _parse_grid_comment(line)
                continue
            data_lines.append(line)
        reader = csv.reader(data_lines)
        header = next(reader, None)
        rows = [r for r in reader if r]
    if grid is None or header is None:
        raise RejectionError(f"{path}: missing grid comment or header")
    if len(rows) != grid.size:
        raise RejectionError(f"{path}: expected {grid.size} rows, found {len(rows)}")
    values = np.array([float(r[-1]) for r in rows])
    return GridFunction(grid, values.reshape(grid.shape), smoothness=smoothness,
                        provenance=f"csv:{Path(path).name}")


def write_table(
    path: Union[str, Path],
    header: Sequence[str],
    rows: Iterable[Sequence],
    header_comments: Optional[Iterable[str]] = None
):
    """Write a plain table; floats at 17 significant digits."""
    with open(path, 'w', encoding='utf-8', newline='') as f:
        for line in header_comments or []:
            f.write(f"# {line}\n")
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(list(header))
        for row in rows:
            writer.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
