"""Command-line interface.

Evaluation-style subcommands (eval, sweep, topology, poses) build the
same request payloads the HTTP service accepts and execute them either
in-process or, with --server, against a running instance; file-bound
subcommands (map-from-mesh, navgraph, proposals) transform local files
directly. Exit codes: 0 success, 1 input error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from . import schemas
from .annotation import open_session
from .contours import find_contours
from .datafile import (DatasetFile, dataset_to_payload, load_dataset,
                       dataset_from_payload, save_dataset)
from .datafile import ImageInfo
from .mapio import load_map, save_map
from .meshing import (DEFAULT_Z_END, DEFAULT_Z_START, DEFAULT_Z_STEP,
                      load_obj, slice_mesh_to_map)
from .metrics import DEFAULT_RHO_A, DEFAULT_RHO_C, GroundTruthBox, DoorStatus
from .morphology import morph_cleanup
from .navgraph import build_nav_graph
from .poses import (DEFAULT_DISTANCE, DEFAULT_H_HIGH, DEFAULT_H_LOW,
                    PerceptionPose, poses_to_csv)
from .semantic import (DEFAULT_MIN_AREA, DOOR_FRACTION_THRESHOLD,
                       SemanticFrame, door_pixel_fraction, propose_boxes)
from .service import ops
from .topology import DEFAULT_FOV, DEFAULT_MAX_RANGE, associate
from .voronoi import DEFAULT_SITE_SEPARATION, voronoi_boundary


class InputError(Exception):
    """File or payload problem: exit status 1."""


def _write_or_print(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _dump_model(model) -> str:
    return json.dumps(model.model_dump(), indent=2) + "\n"


def _post(server: str, path: str, request, response_model):
    import httpx

    reply = httpx.post(server.rstrip("/") + path, json=request.model_dump(), timeout=60.0)
    if reply.status_code != 200:
        raise InputError(f"server returned {reply.status_code}: {reply.text}")
    return response_model.model_validate(reply.json())


def _load_payload(path, model):
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise InputError(f"{path}: no such file") from None
    except json.JSONDecodeError as err:
        raise InputError(f"{path}: not valid JSON: {err}") from None
    try:
        return model.model_validate(data)
    except ValidationError as err:
        raise InputError(f"{path}: {schemas.format_validation_error(err)}") from None


def _load_dataset_payload(path) -> schemas.DatasetFilePayload:
    payload = _load_payload(path, schemas.DatasetFilePayload)
    try:
        dataset_from_payload(payload)  # cross-reference and bounds checks
    except ValueError as err:
        raise InputError(f"{path}: {err}") from None
    return payload


# -- subcommands -----------------------------------------------------------


def cmd_map_from_mesh(args) -> int:
    try:
        mesh = load_obj(args.mesh)
    except FileNotFoundError:
        raise InputError(f"{args.mesh}: no such file") from None
    except ValueError as err:
        raise InputError(str(err)) from None
    grid = slice_mesh_to_map(mesh, resolution=args.resolution,
                             z_start=args.z_start, z_step=args.z_step,
                             z_end=args.z_end)
    grid = morph_cleanup(grid, close_radius=args.close_radius,
                         inflate_radius=args.inflate_radius)
    sidecar = save_map(grid, args.out)
    print(f"wrote {args.out} and {sidecar} ({grid.width}x{grid.height} cells)")
    return 0


def _navgraph_from_map(map_path, site_separation):
    try:
        grid = load_map(map_path)
    except FileNotFoundError:
        raise InputError(f"{map_path}: no such file") from None
    except ValueError as err:
        raise InputError(str(err)) from None
    contours = find_contours(grid)
    if not contours:
        raise InputError(f"{map_path}: map has no obstacles")
    labeling = voronoi_boundary(grid, contours, site_separation=site_separation)
    return build_nav_graph(grid, labeling)


def cmd_navgraph(args) -> int:
    graph = _navgraph_from_map(args.map, args.site_separation)
    payload = ops.graph_to_payload(graph)
    _write_or_print(_dump_model(payload), args.out)
    if args.out:
        print(f"wrote {args.out} ({len(payload.cells)} cells)")
    return 0


def cmd_poses(args) -> int:
    if args.graph:
        payload = _load_payload(args.graph, schemas.GraphPayload)
    else:
        payload = ops.graph_to_payload(_navgraph_from_map(args.map, args.site_separation))
    request = schemas.PosesRequest(graph=payload, distance=args.distance_d,
                                   h_low=args.h_low, h_high=args.h_high,
                                   seed=args.seed)
    try:
        if args.server:
            response = _post(args.server, "/api/poses", request, schemas.PosesResponse)
        else:
            response = ops.run_poses(request)
    except ValueError as err:
        raise InputError(str(err)) from None
    poses = [PerceptionPose(p.x, p.y, p.h, p.theta) for p in response.poses]
    _write_or_print(poses_to_csv(poses), args.out)
    if args.out:
        print(f"wrote {args.out} ({len(poses)} poses)")
    return 0


def _read_frame(path, door_classes) -> SemanticFrame:
    from PIL import Image

    try:
        with Image.open(path) as img:
            arr = np.array(img.convert("L") if img.mode not in ("I", "L") else img)
    except FileNotFoundError:
        raise InputError(f"{path}: no such file") from None
    except OSError as err:
        raise InputError(f"{path}: cannot read image: {err}") from None
    return SemanticFrame(class_of=arr, door_class_ids=frozenset(door_classes))


def cmd_proposals(args) -> int:
    door_classes = args.door_class or [1]
    images = []
    annotations = []
    kept = 0
    for path in args.frames:
        frame = _read_frame(path, door_classes)
        fraction = door_pixel_fraction(frame)
        if fraction < args.min_door_fraction:
            continue
        kept += 1
        image_id = Path(path).stem
        images.append(ImageInfo(image_id=image_id, file_name=Path(path).name,
                                width=frame.width, height=frame.height))
        for box in propose_boxes(frame, min_area=args.min_area):
            annotations.append(GroundTruthBox(image_id=image_id, box=box,
                                              label=DoorStatus(args.label)))
    dataset = DatasetFile(images=tuple(images), annotations=tuple(annotations))
    text = _dump_model(dataset_to_payload(dataset))
    _write_or_print(text, args.out)
    if args.out:
        print(f"wrote {args.out}: kept {kept}/{len(args.frames)} frames, "
              f"{len(annotations)} proposals")
    return 0


def _eval_config(args) -> schemas.EvalConfig:
    return schemas.EvalConfig(rho_c=args.rho_c, rho_a=args.rho_a,
                              ap_mode=args.ap_mode,
                              ap_confidence_gate=not args.no_ap_confidence_gate)


def _render_eval(response: schemas.EvalResponse) -> str:
    cfg = response.config
    lines = [
        f"config: rho_c={cfg.rho_c:.3f} rho_a={cfg.rho_a:.3f} "
        f"ap_mode={cfg.ap_mode} ap_confidence_gate={'on' if cfg.ap_confidence_gate else 'off'}",
    ]
    for cls in ("open", "closed"):
        ap = response.per_class_ap.get(cls)
        lines.append(f"AP[{cls}]={'absent' if ap is None else f'{ap:.3f}'}")
    lines.append(f"mAP={response.map_score:.3f}")
    opi = response.opi
    lines.append(f"y_bar={opi.y_bar} tp_count={opi.tp_count} "
                 f"fp_count={opi.fp_count} bfd_count={opi.bfd_count}"
                 + (" (no ground truth: rates undefined)" if opi.undefined else ""))
    lines.append(f"tp_rate={opi.tp_rate:.3f}")
    lines.append(f"fp_rate={opi.fp_rate:.3f}")
    lines.append(f"bfd_rate={opi.bfd_rate:.3f}")
    return "\n".join(lines) + "\n"


def cmd_eval(args, parser) -> int:
    config = _eval_config(args)
    if args.dump_config:
        sys.stdout.write(_dump_model(config))
        return 0
    if not args.dataset:
        parser.error("--dataset is required (unless --dump-config)")
    request = schemas.EvalRequest(dataset=_load_dataset_payload(args.dataset),
                                  config=config)
    try:
        if args.server:
            response = _post(args.server, "/api/eval", request, schemas.EvalResponse)
        else:
            response = ops.run_eval(request)
    except ValueError as err:
        raise InputError(str(err)) from None
    if args.out:
        Path(args.out).write_text(_dump_model(response), encoding="utf-8")
    sys.stdout.write(_dump_model(response) if args.json else _render_eval(response))
    return 0


def cmd_sweep(args, parser) -> int:
    thresholds = _parse_thresholds(args.thresholds, parser)
    request = schemas.SweepRequest(dataset=_load_dataset_payload(args.dataset),
                                   rho_a=args.rho_a, thresholds=thresholds)
    try:
        if args.server:
            response = _post(args.server, "/api/sweep", request, schemas.SweepResponse)
        else:
            response = ops.run_sweep(request)
    except ValueError as err:
        raise InputError(str(err)) from None
    if args.out:
        Path(args.out).write_text(_dump_model(response), encoding="utf-8")
    if args.json:
        sys.stdout.write(_dump_model(response))
    else:
        lines = ["threshold tp_rate fp_rate bfd_rate"]
        for point in response.points:
            o = point.opi
            lines.append(f"{point.threshold:.3f} {o.tp_rate:.3f} "
                         f"{o.fp_rate:.3f} {o.bfd_rate:.3f}")
        sys.stdout.write("\n".join(lines) + "\n")
    return 0


def _parse_thresholds(text: str, parser) -> list[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip() != ""]
    except ValueError:
        parser.error(f"--thresholds: not a comma-separated number list: {text!r}")
    if not values:
        parser.error("--thresholds: empty list")
    if values != sorted(values):
        parser.error("--thresholds must be sorted ascending")
    return values


def cmd_topology(args) -> int:
    doors_payload = _load_payload(args.doors, schemas.DoorsFilePayload)
    observations = _load_observations(args.observations)
    if args.map:
        observations = _fill_in_view(observations, doors_payload, args)
    request = schemas.TopologyRequest(doors=doors_payload.doors,
                                      observations=observations,
                                      undecided_default=args.undecided_default)
    try:
        if args.server:
            response = _post(args.server, "/api/topology", request, schemas.TopologyResponse)
        else:
            response = ops.run_topology(request)
    except ValueError as err:
        raise InputError(str(err)) from None
    if args.out:
        Path(args.out).write_text(_dump_model(response), encoding="utf-8")
    sys.stdout.write(_dump_model(response) if args.json else _render_topology(response))
    return 0


def _load_observations(path) -> list[schemas.ObservationPayload]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise InputError(f"{path}: no such file") from None
    observations = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            data = json.loads(line)
        except json.JSONDecodeError as err:
            raise InputError(f"{path}: line {lineno}: not valid JSON: {err}") from None
        try:
            observations.append(schemas.ObservationPayload.model_validate(data))
        except ValidationError as err:
            raise InputError(
                f"{path}: line {lineno}: {schemas.format_validation_error(err)}"
            ) from None
    return observations


def _fill_in_view(observations, doors_payload, args):
    try:
        grid = load_map(args.map)
    except ValueError as err:
        raise InputError(str(err)) from None
    doors = ops.doors_from_payload(doors_payload.doors)
    filled = []
    for obs in observations:
        visible = associate(tuple(obs.pose), doors, grid,
                            fov=args.fov, max_range=args.max_range)
        filled.append(obs.model_copy(update={"in_view": visible}))
    return filled


def _render_topology(response: schemas.TopologyResponse) -> str:
    outcomes = {}
    for v in response.verdicts:
        outcomes[v.outcome] = outcomes.get(v.outcome, 0) + 1
    correct = outcomes.get("correct_open", 0) + outcomes.get("correct_closed", 0)
    lines = [
        f"doors={len(response.verdicts)} correct={correct} "
        f"wrong={outcomes.get('wrong_status', 0)} "
        f"undecided={outcomes.get('undecided', 0)} "
        f"undetected={outcomes.get('undetected', 0)} "
        f"unobserved={outcomes.get('unobserved', 0)}",
        f"RA={response.recognition_accuracy:.2f}%",
        f"edge_precision={response.edge_precision:.3f} "
        f"edge_recall={response.edge_recall:.3f}",
        "inferred_edges: " + (", ".join("-".join(e) for e in response.inferred_edges) or "(none)"),
        "true_edges: " + (", ".join("-".join(e) for e in response.true_edges) or "(none)"),
    ]
    for v in response.verdicts:
        if v.outcome not in ("correct_open", "correct_closed"):
            lines.append(f"door {v.door_id}: {v.outcome} "
                         f"(open={v.open_votes} closed={v.closed_votes} views={v.view_count})")
    return "\n".join(lines) + "\n"


def cmd_annotate_serve(args) -> int:
    import uvicorn

    from .service import create_app

    session = None
    if args.dir:
        try:
            session = open_session(args.dir, args.period, store_path=args.store)
        except ValueError as err:
            raise InputError(str(err)) from None
        print(f"session '{session.session_id}': {len(session.frames)} frames, "
              f"store {session.store_path}")
    app = create_app(session)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="doorkit",
                                     description="Door-detection research pipeline")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("map-from-mesh", help="slice a mesh into an occupancy map")
    p.add_argument("--mesh", required=True, help="OBJ mesh file")
    p.add_argument("--resolution", type=float, required=True, help="meters per cell")
    p.add_argument("--z-start", type=float, default=DEFAULT_Z_START)
    p.add_argument("--z-step", type=float, default=DEFAULT_Z_STEP)
    p.add_argument("--z-end", type=float, default=DEFAULT_Z_END)
    p.add_argument("--close-radius", type=int, default=1, help="closing radius in cells")
    p.add_argument("--inflate-radius", type=int, default=0, help="inflation radius in cells")
    p.add_argument("--out", required=True, help="output PGM path")

    p = sub.add_parser("navgraph", help="compute the navigation graph of a map")
    p.add_argument("--map", required=True, help="map sidecar or PGM path")
    p.add_argument("--site-separation", type=float, default=DEFAULT_SITE_SEPARATION)
    p.add_argument("--out", help="output graph JSON path (default stdout)")

    p = sub.add_parser("poses", help="extract perception poses")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--graph", help="navigation graph JSON")
    src.add_argument("--map", help="map path (graph computed on the fly)")
    p.add_argument("--site-separation", type=float, default=DEFAULT_SITE_SEPARATION)
    p.add_argument("--distance-d", type=float, default=DEFAULT_DISTANCE,
                   help="distance between pose clusters, meters")
    p.add_argument("--h-low", type=float, default=DEFAULT_H_LOW)
    p.add_argument("--h-high", type=float, default=DEFAULT_H_HIGH)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--server", help="run against a doorkit server")
    p.add_argument("--out", help="output CSV path (default stdout)")

    p = sub.add_parser("proposals", help="box proposals from semantic frames")
    p.add_argument("frames", nargs="+", help="semantic frame images (pixel = class id)")
    p.add_argument("--door-class", type=int, action="append",
                   help="class id meaning door (repeatable; default 1)")
    p.add_argument("--min-area", type=int, default=DEFAULT_MIN_AREA)
    p.add_argument("--min-door-fraction", type=float, default=DOOR_FRACTION_THRESHOLD)
    p.add_argument("--label", choices=["open", "closed"], default="closed",
                   help="label assigned to proposals")
    p.add_argument("--out", help="output dataset JSON path (default stdout)")

    p = sub.add_parser("eval", help="mAP and operational indicators for a dataset")
    p.add_argument("--dataset", help="dataset JSON file")
    p.add_argument("--rho-c", type=float, default=DEFAULT_RHO_C)
    p.add_argument("--rho-a", type=float, default=DEFAULT_RHO_A)
    p.add_argument("--ap-mode", choices=["voc11", "enriched"], default="enriched")
    p.add_argument("--no-ap-confidence-gate", action="store_true",
                   help="build PR curves from all detections, not only confident ones")
    p.add_argument("--dump-config", action="store_true",
                   help="print the effective configuration and exit")
    p.add_argument("--json", action="store_true", help="machine-readable stdout")
    p.add_argument("--server", help="run against a doorkit server")
    p.add_argument("--out", help="also write the report JSON here")

    p = sub.add_parser("sweep", help="operational indicators over confidence thresholds")
    p.add_argument("--dataset", required=True)
    p.add_argument("--rho-a", type=float, default=DEFAULT_RHO_A)
    p.add_argument("--thresholds", required=True,
                   help="comma-separated ascending list, e.g. 0,0.25,0.5,0.75,1")
    p.add_argument("--json", action="store_true")
    p.add_argument("--server", help="run against a doorkit server")
    p.add_argument("--out")

    p = sub.add_parser("topology", help="infer door-status topology from a run")
    p.add_argument("--doors", required=True, help="doors JSON file")
    p.add_argument("--observations", required=True, help="observation JSONL file")
    p.add_argument("--map", help="map path; computes in-view doors geometrically")
    p.add_argument("--fov", type=float, default=DEFAULT_FOV, help="field of view, radians")
    p.add_argument("--max-range", type=float, default=DEFAULT_MAX_RANGE, help="meters")
    p.add_argument("--undecided-default", choices=["open", "closed"], default="closed")
    p.add_argument("--json", action="store_true")
    p.add_argument("--server", help="run against a doorkit server")
    p.add_argument("--out")

    p = sub.add_parser("annotate-serve", help="serve the annotation workflow")
    p.add_argument("--dir", help="directory of timestamp-named images")
    p.add_argument("--period", type=float, default=1.0, help="sampling period, seconds")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--store", help="annotation store path (default <dir>/annotations.json)")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "map-from-mesh":
            return cmd_map_from_mesh(args)
        if args.command == "navgraph":
            return cmd_navgraph(args)
        if args.command == "poses":
            return cmd_poses(args)
        if args.command == "proposals":
            return cmd_proposals(args)
        if args.command == "eval":
            return cmd_eval(args, parser)
        if args.command == "sweep":
            return cmd_sweep(args, parser)
        if args.command == "topology":
            return cmd_topology(args)
        if args.command == "annotate-serve":
            return cmd_annotate_serve(args)
        parser.error(f"unknown command {args.command}")
    except InputError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    return 2


if __name__ == "__main__":
    sys.exit(main())
