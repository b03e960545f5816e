"""Perception-pose extraction from a navigation graph.

A depth-first traversal accumulates walked distance between
consecutively visited cells and, whenever at least D meters have been
covered, emits a cluster of 16 poses at the current cell: two camera
heights times eight headings at 45-degree increments. Backtrack jumps
of the traversal (consecutive visits that are not grid-adjacent) do
not count as covered distance, so cluster spacing along the walk stays
in [D, D + eps*sqrt(2)).
"""

from __future__ import annotations

import csv
import io
import math
import random
from dataclasses import dataclass, field

from .grid import NEIGHBORS_8
from .navgraph import NavGraph

THETA_COUNT = 8

DEFAULT_DISTANCE = 1.0
DEFAULT_H_LOW = 0.1
DEFAULT_H_HIGH = 0.7


@dataclass(frozen=True)
class PerceptionPose:
    x: float
    y: float
    h: float
    theta: float


@dataclass(frozen=True)
class PoseConfig:
    distance: float = DEFAULT_DISTANCE
    h_low: float = DEFAULT_H_LOW
    h_high: float = DEFAULT_H_HIGH
    seed: int = 0

    def __post_init__(self):
        if self.distance <= 0:
            raise ValueError("distance must be > 0")
        if self.h_low >= self.h_high:
            raise ValueError("h_low must be < h_high")


@dataclass
class PoseTrace:
    """Traversal record kept for diagnostics and property checks."""

    poses: list = field(default_factory=list)
    emission_gaps: list = field(default_factory=list)
    emission_cells: list = field(default_factory=list)


def _cluster(x: float, y: float, cfg: PoseConfig) -> list[PerceptionPose]:
    return [
        PerceptionPose(x, y, h, math.pi * i / 4)
        for h in (cfg.h_high, cfg.h_low)
        for i in range(THETA_COUNT)
    ]


def extract_poses_traced(graph: NavGraph, cfg: PoseConfig = PoseConfig()) -> PoseTrace:
    if not graph.cells:
        raise ValueError("empty navigation graph")
    cells = sorted(graph.cells)
    rng = random.Random(cfg.seed)
    start = cells[rng.randrange(len(cells))]

    grid = graph.grid
    step_limit = grid.resolution * math.sqrt(2.0) + 1e-9
    trace = PoseTrace()
    explored = set()
    stack = [start]
    cur = start
    d = 0.0
    while stack:
        cell = stack.pop()
        explored.add(cell)
        ax, ay = grid.cell_center(*cur)
        bx, by = grid.cell_center(*cell)
        step = math.hypot(bx - ax, by - ay)
        if step <= step_limit:
            d += step
        cur = cell
        if d >= cfg.distance:
            trace.poses.extend(_cluster(bx, by, cfg))
            trace.emission_gaps.append(d)
            trace.emission_cells.append(cell)
            d = 0.0
        for dr, dc in NEIGHBORS_8:
            neighbor = (cell[0] + dr, cell[1] + dc)
            if neighbor in graph.cells and neighbor not in explored:
                stack.append(neighbor)
    return trace


def extract_poses(graph: NavGraph, cfg: PoseConfig = PoseConfig()) -> list[PerceptionPose]:
    return extract_poses_traced(graph, cfg).poses


# -- CSV interchange ----------------------------------------------------

CSV_HEADER = ["x", "y", "h", "theta"]


def poses_to_csv(poses: list[PerceptionPose]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for p in poses:
        writer.writerow([f"{p.x:.6f}", f"{p.y:.6f}", f"{p.h:.6f}", f"{p.theta:.6f}"])
    return out.getvalue()


def csv_to_poses(text: str) -> list[PerceptionPose]:
    reader = csv.reader(io.StringIO(text))
    rows = list(reader)
    if not rows or rows[0] != CSV_HEADER:
        raise ValueError("line 1: expected header 'x,y,h,theta'")
    poses = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 4:
            raise ValueError(f"line {lineno}: expected 4 fields, got {len(row)}")
        try:
            values = [float(v) for v in row]
        except ValueError:
            raise ValueError(f"line {lineno}: non-numeric field") from None
        poses.append(PerceptionPose(*values))
    return poses
