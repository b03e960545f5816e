"""2D occupancy grid and grid/world geometry primitives.

Conventions used throughout the package:

* cells are stored row-major with row 0 at the *top* of the map image,
* cell (i, j) covers the world rectangle
  ``[origin_x + j*res, origin_x + (j+1)*res] x
    [origin_y + (height-1-i)*res, origin_y + (height-i)*res]``,
* the world/grid transform is therefore a bijection on in-bounds cells.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum

import numpy as np


class CellState(IntEnum):
    FREE = 0
    OBSTACLE = 1
    UNKNOWN = 2


# Fixed 8-neighborhood scan order: N, NE, E, SE, S, SW, W, NW
# (clockwise, starting north, with rows growing downward).
NEIGHBORS_8 = (
    (-1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
    (1, 0),
    (1, -1),
    (0, -1),
    (-1, -1),
)


@dataclass(frozen=True)
class GridMap:
    """Occupancy grid with world anchoring.

    ``cells`` is a (height, width) uint8 array of :class:`CellState`
    values. The array is frozen after construction; derive new maps
    instead of mutating.
    """

    width: int
    height: int
    resolution: float
    origin_x: float
    origin_y: float
    cells: np.ndarray

    def __post_init__(self):
        if self.resolution <= 0:
            raise ValueError(f"resolution must be > 0, got {self.resolution}")
        if self.width <= 0 or self.height <= 0:
            raise ValueError(f"grid dimensions must be positive, got {self.width}x{self.height}")
        cells = np.ascontiguousarray(self.cells, dtype=np.uint8)
        if cells.shape != (self.height, self.width):
            raise ValueError(
                f"cells shape {cells.shape} does not match {self.height}x{self.width}"
            )
        cells.flags.writeable = False
        object.__setattr__(self, "cells", cells)

    @classmethod
    def filled(cls, width, height, resolution, origin_x=0.0, origin_y=0.0,
               state=CellState.FREE) -> "GridMap":
        cells = np.full((height, width), int(state), dtype=np.uint8)
        return cls(width, height, resolution, origin_x, origin_y, cells)

    def with_cells(self, cells: np.ndarray) -> "GridMap":
        return GridMap(self.width, self.height, self.resolution,
                       self.origin_x, self.origin_y, cells)

    # -- masks ---------------------------------------------------------

    def obstacle_mask(self) -> np.ndarray:
        """Obstacle plus Unknown: unknown space is never traversable."""
        return self.cells != CellState.FREE

    def free_mask(self) -> np.ndarray:
        return self.cells == CellState.FREE

    # -- transforms ----------------------------------------------------

    def in_bounds(self, row: int, col: int) -> bool:
        return 0 <= row < self.height and 0 <= col < self.width

    def cell_center(self, row: int, col: int) -> tuple[float, float]:
        x = self.origin_x + (col + 0.5) * self.resolution
        y = self.origin_y + (self.height - 1 - row + 0.5) * self.resolution
        return x, y

    def world_to_cell(self, x: float, y: float) -> tuple[int, int]:
        """Cell containing the world point (may be out of bounds)."""
        col = math.floor((x - self.origin_x) / self.resolution)
        band = math.floor((y - self.origin_y) / self.resolution)
        return self.height - 1 - band, col

    def cell_centers(self) -> tuple[np.ndarray, np.ndarray]:
        """(H, W) arrays of cell-center world x and y coordinates."""
        cols = np.arange(self.width, dtype=np.float64)
        rows = np.arange(self.height, dtype=np.float64)
        x = self.origin_x + (cols + 0.5) * self.resolution
        y = self.origin_y + (self.height - 1 - rows + 0.5) * self.resolution
        return np.broadcast_to(x, (self.height, self.width)).copy(), \
            np.broadcast_to(y[:, None], (self.height, self.width)).copy()


def supercover_line(grid: GridMap, x0: float, y0: float,
                    x1: float, y1: float) -> list[tuple[int, int]]:
    """All cells traversed by the world segment (x0,y0)-(x1,y1).

    Parametric grid traversal; when the segment crosses a lattice corner
    exactly, both side cells are included (supercover). Returned cells
    may lie outside the grid bounds; callers clip or treat as blocking.
    """
    res = grid.resolution
    u0 = (x0 - grid.origin_x) / res
    v0 = (y0 - grid.origin_y) / res
    u1 = (x1 - grid.origin_x) / res
    v1 = (y1 - grid.origin_y) / res
    du = u1 - u0
    dv = v1 - v0

    cu, cv = math.floor(u0), math.floor(v0)
    eu, ev = math.floor(u1), math.floor(v1)

    def to_cell(cx, cy):
        return grid.height - 1 - cy, cx

    cells = [to_cell(cu, cv)]
    if (cu, cv) == (eu, ev):
        return cells

    step_u = 1 if du > 0 else -1 if du < 0 else 0
    step_v = 1 if dv > 0 else -1 if dv < 0 else 0
    inf = math.inf
    if step_u > 0:
        t_max_u = (cu + 1 - u0) / du
    elif step_u < 0:
        t_max_u = (cu - u0) / du
    else:
        t_max_u = inf
    if step_v > 0:
        t_max_v = (cv + 1 - v0) / dv
    elif step_v < 0:
        t_max_v = (cv - v0) / dv
    else:
        t_max_v = inf
    t_delta_u = abs(1.0 / du) if du != 0 else inf
    t_delta_v = abs(1.0 / dv) if dv != 0 else inf

    max_steps = 2 * (abs(eu - cu) + abs(ev - cv)) + 4
    for _ in range(max_steps):
        if t_max_u < t_max_v:
            cu += step_u
            t_max_u += t_delta_u
        elif t_max_v < t_max_u:
            cv += step_v
            t_max_v += t_delta_v
        else:
            # exact corner crossing: both side cells are touched
            cells.append(to_cell(cu + step_u, cv))
            cells.append(to_cell(cu, cv + step_v))
            cu += step_u
            cv += step_v
            t_max_u += t_delta_u
            t_max_v += t_delta_v
        cells.append(to_cell(cu, cv))
        if (cu, cv) == (eu, ev):
            break
    return cells


def bresenham_line(r0: int, c0: int, r1: int, c1: int) -> list[tuple[int, int]]:
    """8-connected integer line, endpoints included."""
    cells = []
    dr = abs(r1 - r0)
    dc = abs(c1 - c0)
    sr = 1 if r1 > r0 else -1
    sc = 1 if c1 > c0 else -1
    err = dc - dr
    r, c = r0, c0
    while True:
        cells.append((r, c))
        if (r, c) == (r1, c1):
            return cells
        e2 = 2 * err
        if e2 > -dr:
            err -= dr
            c += sc
        if e2 < dc:
            err += dc
            r += sr
