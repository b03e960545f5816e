"""Navigation graph construction.

The Voronoi boundary cells are pruned to their 2-core (cells of
8-degree <= 1 are removed until none remain, which erodes isolated
cells and dead-end filaments) and the survivors are thinned to the
final 1-cell-wide navigation graph.
"""

from __future__ import annotations

from dataclasses import dataclass

from .grid import NEIGHBORS_8, GridMap
from .skeleton import skeletonize
from .voronoi import VoronoiLabeling


@dataclass(frozen=True)
class NavGraph:
    cells: frozenset  # of (row, col)
    grid: GridMap

    def degree(self, cell: tuple[int, int]) -> int:
        r, c = cell
        return sum((r + dr, c + dc) in self.cells for dr, dc in NEIGHBORS_8)


def prune_low_degree(cells: set[tuple[int, int]]) -> set[tuple[int, int]]:
    """Remove degree<=1 cells until stable (the unique 2-core)."""
    current = set(cells)
    while True:
        doomed = {
            (r, c) for r, c in current
            if sum((r + dr, c + dc) in current for dr, dc in NEIGHBORS_8) <= 1
        }
        if not doomed:
            return current
        current -= doomed


def build_nav_graph(grid: GridMap, labeling: VoronoiLabeling) -> NavGraph:
    pruned = prune_low_degree(set(labeling.boundary_cells))
    return NavGraph(cells=frozenset(skeletonize(pruned)), grid=grid)
