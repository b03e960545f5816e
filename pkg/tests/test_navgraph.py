import random

import numpy as np

from doorkit.contours import find_contours
from doorkit.grid import GridMap, NEIGHBORS_8
from doorkit.navgraph import NavGraph, build_nav_graph, prune_low_degree
from doorkit.voronoi import voronoi_boundary

from conftest import random_grid_map


def ring(r0, c0, size):
    cells = set()
    for k in range(size):
        cells.add((r0, c0 + k))
        cells.add((r0 + size - 1, c0 + k))
        cells.add((r0 + k, c0))
        cells.add((r0 + k, c0 + size - 1))
    return cells


def degree(cells, cell):
    return sum((cell[0] + dr, cell[1] + dc) in cells for dr, dc in NEIGHBORS_8)


def test_pure_cycle_unchanged():
    cycle = ring(1, 1, 5)
    assert prune_low_degree(cycle) == cycle
    grid = GridMap.filled(8, 8, 0.5)
    # full build: skeleton of the thin ring keeps it a single thin cycle
    from doorkit.skeleton import skeletonize
    assert skeletonize(cycle) == cycle


def test_dangling_tail_fully_eroded():
    # diagonal tail off the ring corner: each tip removal drops the next
    # cell to degree 1, so the whole branch cascades away
    cycle = ring(1, 1, 5)
    tail = {(6, 6), (7, 7), (8, 8)}
    pruned = prune_low_degree(cycle | tail)
    assert pruned == cycle


def test_isolated_cell_removed():
    assert prune_low_degree({(2, 2)}) == set()


def test_post_filter_degrees_at_least_two():
    rng = random.Random(31)
    for _ in range(50):
        cells = {(rng.randrange(15), rng.randrange(15)) for _ in range(rng.randrange(1, 60))}
        pruned = prune_low_degree(cells)
        for cell in pruned:
            assert degree(pruned, cell) >= 2


def test_build_nav_graph_subset_of_free():
    rng = random.Random(32)
    built = 0
    for _ in range(30):
        grid = random_grid_map(rng, max_side=25)
        if not grid.obstacle_mask().any() or not grid.free_mask().any():
            continue
        labeling = voronoi_boundary(grid, find_contours(grid))
        graph = build_nav_graph(grid, labeling)
        free = grid.free_mask()
        for r, c in graph.cells:
            assert free[r, c]
        assert graph.cells <= prune_low_degree(set(labeling.boundary_cells))
        built += 1
    assert built > 10
