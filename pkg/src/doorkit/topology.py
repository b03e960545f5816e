"""Door-status topology inference along a robot run.

Detections associated to door instances over a whole trajectory are
tallied per door; each door's traversability status is inferred as the
majority label and compared against its true status. Open doors become
edges of a room graph. Doors that never collected a vote are split into
those that were in view at least once (undetected) and those the run
never looked at (unobserved); both stay in the accuracy denominator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .grid import CellState, GridMap, supercover_line
from .metrics import DoorStatus

DEFAULT_FOV = math.pi / 2
DEFAULT_MAX_RANGE = 5.0


class VerdictOutcome(str, Enum):
    CORRECT_OPEN = "correct_open"
    CORRECT_CLOSED = "correct_closed"
    WRONG_STATUS = "wrong_status"
    UNDECIDED = "undecided"
    UNDETECTED = "undetected"
    UNOBSERVED = "unobserved"


CORRECT_OUTCOMES = (VerdictOutcome.CORRECT_OPEN, VerdictOutcome.CORRECT_CLOSED)


@dataclass(frozen=True)
class DoorRecord:
    door_id: str
    center: tuple[float, float]
    rooms: tuple[str, str]
    true_status: DoorStatus

    def __post_init__(self):
        if self.rooms[0] == self.rooms[1]:
            raise ValueError(f"door {self.door_id}: rooms must be distinct")
        if not all(math.isfinite(v) for v in self.center):
            raise ValueError(f"door {self.door_id}: center must be finite")


@dataclass(frozen=True)
class Observation:
    image_id: str
    pose: tuple[float, float, float]  # x, y, theta
    votes: tuple = ()  # of (door_id, DoorStatus)
    in_view: tuple | None = None  # door ids in view; None means voted doors


@dataclass(frozen=True)
class DoorVerdict:
    door_id: str
    open_votes: int
    closed_votes: int
    view_count: int
    outcome: VerdictOutcome
    inferred: DoorStatus | None  # None when the vote gave no decision


@dataclass(frozen=True)
class TopologyGraph:
    nodes: frozenset
    edges: frozenset  # of frozenset({a, b})


def associate(pose: tuple[float, float, float], doors: list[DoorRecord],
              grid: GridMap, fov: float = DEFAULT_FOV,
              max_range: float = DEFAULT_MAX_RANGE) -> list[str]:
    """Doors in range, inside the field of view, with clear line of sight."""
    if not 0 < fov <= 2 * math.pi:
        raise ValueError("fov must be in (0, 2*pi]")
    if max_range <= 0:
        raise ValueError("max_range must be > 0")
    x, y, theta = pose
    visible = []
    for door in doors:
        dx = door.center[0] - x
        dy = door.center[1] - y
        if math.hypot(dx, dy) > max_range:
            continue
        bearing = math.atan2(dy, dx)
        off = math.atan2(math.sin(bearing - theta), math.cos(bearing - theta))
        if abs(off) > fov / 2:
            continue
        if _line_of_sight_blocked(grid, (x, y), door.center):
            continue
        visible.append(door.door_id)
    return visible


def _line_of_sight_blocked(grid: GridMap, a, b) -> bool:
    for row, col in supercover_line(grid, a[0], a[1], b[0], b[1]):
        if not grid.in_bounds(row, col):
            return True
        if grid.cells[row, col] != CellState.FREE:
            return True
    return False


def majority_vote(doors: list[DoorRecord],
                  observations: list[Observation]) -> list[DoorVerdict]:
    known = {d.door_id for d in doors}
    tallies = {d.door_id: {DoorStatus.OPEN: 0, DoorStatus.CLOSED: 0} for d in doors}
    views = {d.door_id: 0 for d in doors}

    unknown = set()
    for obs in observations:
        for door_id, status in obs.votes:
            if door_id not in known:
                unknown.add(door_id)
            else:
                tallies[door_id][DoorStatus(status)] += 1
        in_view = obs.in_view if obs.in_view is not None else \
            tuple(door_id for door_id, _ in obs.votes)
        for door_id in set(in_view):
            if door_id not in known:
                unknown.add(door_id)
            else:
                views[door_id] += 1
    if unknown:
        raise ValueError(f"unknown door id(s): {', '.join(sorted(unknown))}")

    verdicts = []
    for door in doors:
        opens = tallies[door.door_id][DoorStatus.OPEN]
        closes = tallies[door.door_id][DoorStatus.CLOSED]
        seen = views[door.door_id]
        if opens == closes == 0:
            outcome = VerdictOutcome.UNDETECTED if seen > 0 else VerdictOutcome.UNOBSERVED
            inferred = None
        elif opens == closes:
            outcome = VerdictOutcome.UNDECIDED
            inferred = None
        else:
            inferred = DoorStatus.OPEN if opens > closes else DoorStatus.CLOSED
            if inferred == door.true_status:
                outcome = (VerdictOutcome.CORRECT_OPEN if inferred == DoorStatus.OPEN
                           else VerdictOutcome.CORRECT_CLOSED)
            else:
                outcome = VerdictOutcome.WRONG_STATUS
        verdicts.append(DoorVerdict(door.door_id, opens, closes, seen, outcome, inferred))
    return verdicts


def recognition_accuracy(verdicts: list[DoorVerdict]) -> float:
    """Percentage of doors whose status the run recovered."""
    if not verdicts:
        raise ValueError("no doors")
    correct = sum(v.outcome in CORRECT_OUTCOMES for v in verdicts)
    return 100.0 * correct / len(verdicts)


def build_topology(doors: list[DoorRecord], verdicts: list[DoorVerdict],
                   undecided_default: DoorStatus = DoorStatus.CLOSED) -> TopologyGraph:
    by_id = {v.door_id: v for v in verdicts}
    nodes = set()
    edges = set()
    for door in doors:
        nodes.update(door.rooms)
        verdict = by_id.get(door.door_id)
        if verdict is None:
            raise ValueError(f"missing verdict for door {door.door_id}")
        status = verdict.inferred if verdict.inferred is not None else undecided_default
        if status == DoorStatus.OPEN:
            edges.add(frozenset(door.rooms))
    return TopologyGraph(nodes=frozenset(nodes), edges=frozenset(edges))


def true_topology(doors: list[DoorRecord]) -> TopologyGraph:
    nodes = set()
    edges = set()
    for door in doors:
        nodes.update(door.rooms)
        if door.true_status == DoorStatus.OPEN:
            edges.add(frozenset(door.rooms))
    return TopologyGraph(nodes=frozenset(nodes), edges=frozenset(edges))


@dataclass(frozen=True)
class TopologyComparison:
    edge_precision: float
    edge_recall: float
    door_diffs: tuple  # of (door_id, VerdictOutcome)


def compare_topologies(inferred: TopologyGraph, truth: TopologyGraph,
                       verdicts: list[DoorVerdict] = ()) -> TopologyComparison:
    if inferred.nodes != truth.nodes:
        raise ValueError("topologies cover different room sets")
    hit = len(inferred.edges & truth.edges)
    precision = hit / len(inferred.edges) if inferred.edges else 1.0
    recall = hit / len(truth.edges) if truth.edges else 1.0
    diffs = tuple((v.door_id, v.outcome) for v in verdicts
                  if v.outcome not in CORRECT_OUTCOMES)
    return TopologyComparison(precision, recall, diffs)
