import math
import random
from collections import Counter

import pytest

from doorkit.grid import GridMap
from doorkit.navgraph import NavGraph
from doorkit.poses import (PerceptionPose, PoseConfig, csv_to_poses,
                           extract_poses, extract_poses_traced, poses_to_csv)

from conftest import CORRIDOR_END_SEED


THETAS = tuple(math.pi * i / 4 for i in range(8))


def random_graph(rng: random.Random, resolution=0.5) -> NavGraph:
    """Random-walk cell set: connected, branchy."""
    h = rng.randrange(8, 25)
    w = rng.randrange(8, 25)
    grid = GridMap.filled(w, h, resolution)
    cells = set()
    for _ in range(rng.randrange(1, 4)):
        r, c = rng.randrange(h), rng.randrange(w)
        cells.add((r, c))
        for _ in range(rng.randrange(5, 60)):
            dr, dc = rng.choice([(-1, 0), (1, 0), (0, -1), (0, 1), (1, 1), (-1, -1)])
            r = min(max(r + dr, 0), h - 1)
            c = min(max(c + dc, 0), w - 1)
            cells.add((r, c))
    return NavGraph(cells=frozenset(cells), grid=grid)


def test_corridor_fixture_64_poses(corridor_graph):
    cfg = PoseConfig(distance=1.0, seed=CORRIDOR_END_SEED)
    trace = extract_poses_traced(corridor_graph, cfg)
    assert len(trace.poses) == 64
    assert trace.emission_cells == [(1, 3), (1, 5), (1, 7), (1, 9)]
    assert all(gap == pytest.approx(1.0) for gap in trace.emission_gaps)


def test_cluster_structure(corridor_graph):
    poses = extract_poses(corridor_graph, PoseConfig(seed=CORRIDOR_END_SEED))
    assert len(poses) % 16 == 0
    for k in range(0, len(poses), 16):
        cluster = poses[k:k + 16]
        assert len({(p.x, p.y) for p in cluster}) == 1
        assert Counter(p.theta for p in cluster) == Counter({t: 2 for t in THETAS})
        assert Counter(p.h for p in cluster) == Counter({0.7: 8, 0.1: 8})


def test_short_graph_no_poses():
    grid = GridMap.filled(4, 3, 0.5)
    graph = NavGraph(cells=frozenset({(1, 1), (1, 2)}), grid=grid)
    assert extract_poses(graph, PoseConfig(distance=5.0)) == []


def test_empty_graph_error():
    grid = GridMap.filled(3, 3, 0.5)
    with pytest.raises(ValueError, match="empty navigation graph"):
        extract_poses(NavGraph(cells=frozenset(), grid=grid))


def test_determinism():
    rng = random.Random(41)
    for _ in range(10):
        graph = random_graph(rng)
        cfg = PoseConfig(seed=rng.randrange(100))
        assert extract_poses(graph, cfg) == extract_poses(graph, cfg)


def test_invariants_on_random_graphs():
    rng = random.Random(42)
    for _ in range(60):
        graph = random_graph(rng)
        cfg = PoseConfig(distance=rng.choice([0.8, 1.0, 1.5]), seed=rng.randrange(1000))
        trace = extract_poses_traced(graph, cfg)
        eps = graph.grid.resolution
        assert len(trace.poses) % 16 == 0
        centers = {graph.grid.cell_center(r, c) for r, c in graph.cells}
        for pose in trace.poses:
            assert (pose.x, pose.y) in centers
            assert pose.theta in THETAS
            assert pose.h in (cfg.h_low, cfg.h_high)
        for gap in trace.emission_gaps:
            assert cfg.distance <= gap < cfg.distance + eps * math.sqrt(2) + 1e-9


def test_csv_round_trip():
    poses = [PerceptionPose(1.25, 2.5, 0.1, 0.785398)]
    text = poses_to_csv(poses)
    assert text.splitlines()[0] == "x,y,h,theta"
    back = csv_to_poses(text)
    assert back == poses
    assert poses_to_csv(back) == text  # stable at 6 decimals


def test_csv_empty():
    assert poses_to_csv([]) == "x,y,h,theta\n"
    assert csv_to_poses("x,y,h,theta\n") == []


def test_csv_corridor_65_lines(corridor_graph):
    poses = extract_poses(corridor_graph, PoseConfig(seed=CORRIDOR_END_SEED))
    text = poses_to_csv(poses)
    assert len(text.splitlines()) == 65


def test_csv_malformed_row_names_line():
    with pytest.raises(ValueError, match="line 3"):
        csv_to_poses("x,y,h,theta\n1,2,0.1,0\n1,2\n")
    with pytest.raises(ValueError, match="line 2"):
        csv_to_poses("x,y,h,theta\na,b,c,d\n")
    with pytest.raises(ValueError, match="line 1"):
        csv_to_poses("wrong,header\n")
