"""Discrete Voronoi labeling of free space by contour vertices.

Every free cell is labeled with its Euclidean-nearest contour vertex
(site). A free cell lies on the Voronoi boundary when an 8-neighbor
free cell is owned by a different site, the two sites are genuinely
distinct generators (different contours, or far enough apart on the
same contour), and the cell itself sits within half a diagonal step of
the pair's bisector, which keeps the top-two site distances of every
boundary cell within eps*sqrt(2) of each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .contours import Contour
from .grid import NEIGHBORS_8, GridMap

DEFAULT_SITE_SEPARATION = 0.3

_CHUNK_ROWS = 64


@dataclass(frozen=True)
class VoronoiLabeling:
    nearest_site: np.ndarray  # (H, W) int32, -1 outside free space
    site_xy: np.ndarray  # (S, 2) world coordinates of sites
    site_contour: np.ndarray  # (S,) component id per site
    boundary_cells: frozenset  # of (row, col)

    def __post_init__(self):
        for name in ("nearest_site", "site_xy", "site_contour"):
            arr = np.ascontiguousarray(getattr(self, name))
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)


def collect_sites(contours: list[Contour]) -> tuple[np.ndarray, np.ndarray]:
    xs = []
    ids = []
    for contour in contours:
        for x, y in contour.vertices:
            xs.append((x, y))
            ids.append(contour.component_id)
    return np.array(xs, dtype=np.float64), np.array(ids, dtype=np.int64)


def _nearest_sites(grid: GridMap, free: np.ndarray,
                   site_xy: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-cell nearest site index and squared distance (chunked)."""
    cx, cy = grid.cell_centers()
    nearest = np.full(free.shape, -1, dtype=np.int32)
    dist_sq = np.full(free.shape, np.inf, dtype=np.float64)
    sx = site_xy[:, 0]
    sy = site_xy[:, 1]
    for r0 in range(0, grid.height, _CHUNK_ROWS):
        r1 = min(r0 + _CHUNK_ROWS, grid.height)
        dx = cx[r0:r1, :, None] - sx[None, None, :]
        dy = cy[r0:r1, :, None] - sy[None, None, :]
        d = dx * dx + dy * dy
        nearest[r0:r1] = np.argmin(d, axis=2).astype(np.int32)
        dist_sq[r0:r1] = np.min(d, axis=2)
    nearest[~free] = -1
    dist_sq[~free] = np.inf
    return nearest, dist_sq


def voronoi_boundary(grid: GridMap, contours: list[Contour],
                     site_separation: float = DEFAULT_SITE_SEPARATION) -> VoronoiLabeling:
    """Label free cells by nearest site and extract boundary cells."""
    if not contours:
        raise ValueError("no contours")
    if site_separation < 0:
        raise ValueError("site_separation must be >= 0")
    free = grid.free_mask()
    if not free.any():
        raise ValueError("no free space")

    site_xy, site_contour = collect_sites(contours)
    nearest, dist_sq = _nearest_sites(grid, free, site_xy)

    cx, cy = grid.cell_centers()
    own_dist = np.sqrt(dist_sq)
    band = grid.resolution * math.sqrt(2.0) + 1e-9
    sep_sq = site_separation * site_separation

    boundary = np.zeros(free.shape, dtype=bool)
    h, w = free.shape
    for dr, dc in NEIGHBORS_8:
        src_r = slice(max(0, -dr), min(h, h - dr))
        src_c = slice(max(0, -dc), min(w, w - dc))
        dst_r = slice(max(0, dr), min(h, h + dr))
        dst_c = slice(max(0, dc), min(w, w + dc))
        here = nearest[dst_r, dst_c]
        there = nearest[src_r, src_c]
        both_free = free[dst_r, dst_c] & free[src_r, src_c]
        differs = both_free & (here != there)
        if not differs.any():
            continue
        there_safe = np.where(there >= 0, there, 0)
        here_safe = np.where(here >= 0, here, 0)
        diff_contour = site_contour[here_safe] != site_contour[there_safe]
        gap = site_xy[here_safe] - site_xy[there_safe]
        far_apart = gap[..., 0] ** 2 + gap[..., 1] ** 2 >= sep_sq
        distinct = diff_contour | far_apart
        # distance from this cell to the neighbor's site
        ox = cx[dst_r, dst_c] - site_xy[there_safe][..., 0]
        oy = cy[dst_r, dst_c] - site_xy[there_safe][..., 1]
        other_dist = np.sqrt(ox * ox + oy * oy)
        near_bisector = np.abs(other_dist - own_dist[dst_r, dst_c]) <= band
        boundary[dst_r, dst_c] |= differs & distinct & near_bisector

    rr, cc = np.nonzero(boundary)
    return VoronoiLabeling(
        nearest_site=nearest,
        site_xy=site_xy,
        site_contour=site_contour,
        boundary_cells=frozenset((int(r), int(c)) for r, c in zip(rr, cc)),
    )
