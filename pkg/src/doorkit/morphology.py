"""Binary morphology on occupancy grids.

Closing (dilate, then erode with the same square element) seals small
gaps between nearby obstacles; a final dilation inflates obstacles so
that cells too close to them drop out of the free space.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from .grid import CellState, GridMap


def _square(radius: int) -> np.ndarray:
    return np.ones((2 * radius + 1, 2 * radius + 1), dtype=bool)


def close_mask(mask: np.ndarray, radius: int) -> np.ndarray:
    """Morphological closing with infinite free-plane border semantics."""
    if radius <= 0:
        return mask.copy()
    pad = 2 * radius
    padded = np.pad(mask, pad, constant_values=False)
    padded = ndimage.binary_dilation(padded, structure=_square(radius))
    padded = ndimage.binary_erosion(padded, structure=_square(radius))
    return padded[pad:-pad, pad:-pad]


def inflate_mask(mask: np.ndarray, radius: int) -> np.ndarray:
    if radius <= 0:
        return mask.copy()
    return ndimage.binary_dilation(mask, structure=_square(radius))


def morph_cleanup(grid: GridMap, close_radius: int = 1, inflate_radius: int = 0) -> GridMap:
    """Close small obstacle gaps, then inflate obstacles.

    Unknown counts as obstacle. Closing and inflation only ever add
    obstacle cells, so any cell whose membership is unchanged keeps its
    original state (radii of zero return the map unchanged).
    """
    if close_radius < 0 or inflate_radius < 0:
        raise ValueError("radii must be >= 0")
    before = grid.obstacle_mask()
    after = inflate_mask(close_mask(before, close_radius), inflate_radius)
    cells = np.array(grid.cells, dtype=np.uint8)
    cells[after & ~before] = int(CellState.OBSTACLE)
    return grid.with_cells(cells)
