import random

import numpy as np
import pytest

from doorkit.grid import CellState, GridMap
from doorkit.metrics import Box, Detection, DoorStatus, GroundTruthBox
from doorkit.navgraph import NavGraph


@pytest.fixture
def corridor_graph() -> NavGraph:
    """9-cell straight line, eps = 0.5 m; seed 2 starts at the left end."""
    grid = GridMap.filled(11, 3, 0.5)
    return NavGraph(cells=frozenset((1, c) for c in range(1, 10)), grid=grid)


CORRIDOR_END_SEED = 2


def random_grid_map(rng: random.Random, max_side=40, resolution=0.25) -> GridMap:
    h = rng.randrange(8, max_side + 1)
    w = rng.randrange(8, max_side + 1)
    cells = np.zeros((h, w), np.uint8)
    for _ in range(rng.randrange(1, 6)):
        r0 = rng.randrange(h - 1)
        c0 = rng.randrange(w - 1)
        cells[r0:min(h, r0 + rng.randrange(1, 6)),
              c0:min(w, c0 + rng.randrange(1, 6))] = int(CellState.OBSTACLE)
    return GridMap(w, h, resolution, 0.0, 0.0, cells)


def random_image_instance(rng: random.Random, image_id="img",
                          max_gts=4, max_dets=6):
    gts = [
        GroundTruthBox(image_id,
                       Box(rng.uniform(0, 60), rng.uniform(0, 60),
                           rng.uniform(4, 40), rng.uniform(4, 40)),
                       rng.choice(list(DoorStatus)))
        for _ in range(rng.randrange(0, max_gts + 1))
    ]
    dets = [
        Detection(image_id,
                  Box(rng.uniform(0, 60), rng.uniform(0, 60),
                      rng.uniform(4, 40), rng.uniform(4, 40)),
                  rng.choice(list(DoorStatus)),
                  round(rng.random(), 2))
        for _ in range(rng.randrange(0, max_dets + 1))
    ]
    return gts, dets
