"""Typed operations behind the evaluation endpoints.

The CLI calls these directly when no server is configured; the HTTP
routes are thin wrappers around the same functions, so both paths
produce identical payloads.
"""

from __future__ import annotations

from .. import schemas
from ..datafile import dataset_from_payload
from ..grid import GridMap
from ..metrics import (DoorStatus, OpiConfig, OpiReport, confidence_sweep,
                       map_score, opi_dataset)
from ..navgraph import NavGraph
from ..poses import PoseConfig, extract_poses
from ..topology import (DoorRecord, Observation, build_topology,
                        compare_topologies, majority_vote,
                        recognition_accuracy, true_topology)


def _opi_payload(report: OpiReport) -> schemas.OpiPayload:
    return schemas.OpiPayload(
        tp_count=report.tp_count, fp_count=report.fp_count,
        bfd_count=report.bfd_count, y_bar=report.y_bar,
        tp_rate=report.tp_rate, fp_rate=report.fp_rate,
        bfd_rate=report.bfd_rate, undefined=report.undefined,
    )


def run_eval(request: schemas.EvalRequest) -> schemas.EvalResponse:
    dataset = dataset_from_payload(request.dataset)
    cfg = request.config
    gts = list(dataset.annotations)
    dets = list(dataset.detections)

    per_class: dict[str, float | None] = {}
    pr_points: dict[str, list[schemas.PrPoint]] = {}
    if gts:
        report = map_score(gts, dets, rho_a=cfg.rho_a,
                           rho_c=cfg.rho_c if cfg.ap_confidence_gate else None,
                           mode=cfg.ap_mode)
        mean = report.map_score
        for cls in DoorStatus:
            if cls in report.per_class_ap:
                per_class[cls.value] = report.per_class_ap[cls]
                pr_points[cls.value] = [
                    schemas.PrPoint(recall=r, precision=p)
                    for r, p in report.pr_points[cls]
                ]
            else:
                per_class[cls.value] = None
    else:
        mean = 0.0
        per_class = {cls.value: None for cls in DoorStatus}

    opi = opi_dataset(gts, dets, OpiConfig(rho_c=cfg.rho_c, rho_a=cfg.rho_a))
    return schemas.EvalResponse(config=cfg, per_class_ap=per_class,
                                map_score=mean, pr_points=pr_points,
                                opi=_opi_payload(opi))


def run_sweep(request: schemas.SweepRequest) -> schemas.SweepResponse:
    dataset = dataset_from_payload(request.dataset)
    series = confidence_sweep(list(dataset.annotations), list(dataset.detections),
                              rho_a=request.rho_a, thresholds=request.thresholds)
    return schemas.SweepResponse(
        rho_a=request.rho_a,
        points=[schemas.SweepPoint(threshold=t, opi=_opi_payload(r)) for t, r in series],
    )


def doors_from_payload(payloads) -> list[DoorRecord]:
    return [
        DoorRecord(door_id=p.door_id, center=tuple(p.center),
                   rooms=tuple(p.rooms), true_status=DoorStatus(p.true_status))
        for p in payloads
    ]


def observations_from_payload(payloads) -> list[Observation]:
    return [
        Observation(
            image_id=p.image_id,
            pose=tuple(p.pose),
            votes=tuple((v.door_id, DoorStatus(v.label)) for v in p.votes),
            in_view=tuple(p.in_view) if p.in_view is not None else None,
        )
        for p in payloads
    ]


def _edge_list(edges) -> list[tuple[str, str]]:
    return sorted(tuple(sorted(edge)) for edge in edges)


def run_topology(request: schemas.TopologyRequest) -> schemas.TopologyResponse:
    doors = doors_from_payload(request.doors)
    observations = observations_from_payload(request.observations)
    verdicts = majority_vote(doors, observations)
    inferred = build_topology(doors, verdicts,
                              undecided_default=DoorStatus(request.undecided_default))
    truth = true_topology(doors)
    comparison = compare_topologies(inferred, truth, verdicts)
    return schemas.TopologyResponse(
        verdicts=[
            schemas.VerdictPayload(
                door_id=v.door_id, open_votes=v.open_votes,
                closed_votes=v.closed_votes, view_count=v.view_count,
                outcome=v.outcome.value,
                inferred=v.inferred.value if v.inferred else None,
            )
            for v in verdicts
        ],
        recognition_accuracy=recognition_accuracy(verdicts),
        nodes=sorted(inferred.nodes),
        inferred_edges=_edge_list(inferred.edges),
        true_edges=_edge_list(truth.edges),
        edge_precision=comparison.edge_precision,
        edge_recall=comparison.edge_recall,
    )


def graph_from_payload(payload: schemas.GraphPayload) -> NavGraph:
    meta = payload.grid
    grid = GridMap.filled(meta.width, meta.height, meta.resolution,
                          origin_x=meta.origin[0], origin_y=meta.origin[1])
    cells = frozenset((int(r), int(c)) for r, c in payload.cells)
    for r, c in cells:
        if not grid.in_bounds(r, c):
            raise ValueError(f"graph cell ({r}, {c}) outside the {meta.width}x{meta.height} grid")
    return NavGraph(cells=cells, grid=grid)


def graph_to_payload(graph: NavGraph) -> schemas.GraphPayload:
    grid = graph.grid
    return schemas.GraphPayload(
        grid=schemas.GridMeta(width=grid.width, height=grid.height,
                              resolution=grid.resolution,
                              origin=(grid.origin_x, grid.origin_y)),
        cells=sorted(graph.cells),
    )


def run_poses(request: schemas.PosesRequest) -> schemas.PosesResponse:
    graph = graph_from_payload(request.graph)
    cfg = PoseConfig(distance=request.distance, h_low=request.h_low,
                     h_high=request.h_high, seed=request.seed)
    poses = extract_poses(graph, cfg)
    return schemas.PosesResponse(
        poses=[schemas.PosePayload(x=p.x, y=p.y, h=p.h, theta=p.theta) for p in poses]
    )
