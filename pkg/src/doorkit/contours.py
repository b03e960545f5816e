"""Obstacle contour extraction.

One contour per 8-connected obstacle component, traced with
Moore-neighbor boundary following over cell centers and simplified to
the minimum vertex set: a vertex is dropped only when it lies exactly
on the segment between its neighbors (corners and spur tips stay).
Components whose center path degenerates to fewer than three distinct
vertices (single cells, dominoes, straight bars) fall back to the
rectangle around their cell squares.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .grid import GridMap

_EIGHT = np.ones((3, 3), dtype=bool)

# Moore neighborhood in clockwise order: N, NE, E, SE, S, SW, W, NW.
_MOORE = ((-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1))
_MOORE_INDEX = {d: i for i, d in enumerate(_MOORE)}


@dataclass(frozen=True)
class Contour:
    component_id: int
    vertices: np.ndarray  # (K, 2) world coordinates, closed polygon
    closed: bool = True

    def __post_init__(self):
        vertices = np.ascontiguousarray(self.vertices, dtype=np.float64).reshape(-1, 2)
        if len(vertices) < 3:
            raise ValueError("contour needs at least 3 vertices")
        vertices.flags.writeable = False
        object.__setattr__(self, "vertices", vertices)


def moore_trace(mask: np.ndarray) -> list[tuple[int, int]]:
    """Closed boundary walk of a single 8-connected component.

    Walks clockwise from the topmost-leftmost cell; 1-wide protrusions
    are walked out and back, so cells may repeat. The walk is the cycle
    of the deterministic (cell, backtrack) tracing automaton, which
    terminates for every finite component.
    """
    rows, cols = np.nonzero(mask)
    if len(rows) == 0:
        return []
    start = (int(rows[0]), int(cols[0]))  # nonzero scans row-major
    if len(rows) == 1:
        return [start]

    h, w = mask.shape

    def is_set(r, c):
        return 0 <= r < h and 0 <= c < w and bool(mask[r, c])

    def step(p, b):
        bi = _MOORE_INDEX[(b[0] - p[0], b[1] - p[1])]
        for k in range(1, 9):
            idx = (bi + k) % 8
            q = (p[0] + _MOORE[idx][0], p[1] + _MOORE[idx][1])
            if is_set(*q):
                prev = (bi + k - 1) % 8
                return q, (p[0] + _MOORE[prev][0], p[1] + _MOORE[prev][1])
        raise AssertionError("isolated cell reached multi-cell tracer")

    state = (start, (start[0], start[1] - 1))  # entered scanning eastward
    seen: dict = {}
    states = []
    while state not in seen:
        seen[state] = len(states)
        states.append(state)
        state = step(*state)
    return [s[0] for s in states[seen[state]:]]


def _strictly_between(a, b, c) -> bool:
    if a == c:
        return False
    cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    if cross != 0:
        return False
    dot = (b[0] - a[0]) * (c[0] - a[0]) + (b[1] - a[1]) * (c[1] - a[1])
    seg_sq = (c[0] - a[0]) ** 2 + (c[1] - a[1]) ** 2
    return 0 < dot < seg_sq


def simplify_collinear(points: list[tuple[float, float]]) -> list[tuple[float, float]]:
    """Drop vertices lying exactly on the segment between their neighbors."""
    pts = [p for k, p in enumerate(points) if p != points[(k + 1) % len(points)]]
    if not pts:
        pts = points[:1]
    changed = True
    while changed and len(pts) > 2:
        changed = False
        for i in range(len(pts)):
            n = len(pts)
            a, b, c = pts[(i - 1) % n], pts[i], pts[(i + 1) % n]
            if _strictly_between(a, b, c):
                pts.pop(i)
                changed = True
                break
    return pts


def find_contours(grid: GridMap) -> list[Contour]:
    """One simplified world-coordinate contour per obstacle component."""
    labels, count = ndimage.label(grid.obstacle_mask(), structure=_EIGHT)
    contours = []
    for cid in range(1, count + 1):
        comp = labels == cid
        trace = moore_trace(comp)
        centers = [grid.cell_center(r, c) for r, c in trace]
        simplified = simplify_collinear(centers)
        if len(set(simplified)) < 3:
            rows, cols = np.nonzero(comp)
            simplified = _cell_block_rectangle(grid, rows, cols)
        contours.append(Contour(cid, np.array(simplified, dtype=np.float64)))
    return contours


def _cell_block_rectangle(grid: GridMap, rows, cols) -> list[tuple[float, float]]:
    """Rectangle around the component's cell squares (degenerate shapes)."""
    r0, r1 = int(rows.min()), int(rows.max())
    c0, c1 = int(cols.min()), int(cols.max())
    res = grid.resolution
    left = grid.origin_x + c0 * res
    right = grid.origin_x + (c1 + 1) * res
    bottom = grid.origin_y + (grid.height - 1 - r1) * res
    top = grid.origin_y + (grid.height - r0) * res
    return [(left, bottom), (right, bottom), (right, top), (left, top)]
