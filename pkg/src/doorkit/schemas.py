"""Wire and file payload schemas.

Single source of truth for every structured-text format the toolkit
reads, writes, or serves over HTTP. All models reject unknown keys so
schema violations surface with the exact offending path.
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError

Label = Literal["open", "closed"]
BoxTuple = tuple[float, float, float, float]  # x, y, w, h


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


def format_validation_error(err: ValidationError) -> str:
    """One line per error, dotted/bracketed path first."""
    lines = []
    for e in err.errors():
        path = ""
        for part in e["loc"]:
            path += f"[{part}]" if isinstance(part, int) else (f".{part}" if path else str(part))
        lines.append(f"{path or '<root>'}: {e['msg']}")
    return "; ".join(lines)


# -- dataset file ---------------------------------------------------------


class ImageRecord(StrictModel):
    image_id: str
    file_name: str
    width: int = Field(gt=0)
    height: int = Field(gt=0)


class AnnotationRecord(StrictModel):
    image_id: str
    box: BoxTuple
    label: Label


class DetectionRecord(StrictModel):
    image_id: str
    box: BoxTuple
    label: Label
    confidence: float = Field(ge=0.0, le=1.0)


class DatasetFilePayload(StrictModel):
    images: list[ImageRecord]
    annotations: list[AnnotationRecord]
    detections: list[DetectionRecord]


# -- navigation graph -----------------------------------------------------


class GridMeta(StrictModel):
    width: int = Field(gt=0)
    height: int = Field(gt=0)
    resolution: float = Field(gt=0)
    origin: tuple[float, float]


class GraphPayload(StrictModel):
    grid: GridMeta
    cells: list[tuple[int, int]]  # (row, col)


# -- doors and observations ------------------------------------------------


class DoorPayload(StrictModel):
    door_id: str
    center: tuple[float, float]
    rooms: tuple[str, str]
    true_status: Label


class DoorsFilePayload(StrictModel):
    doors: list[DoorPayload]


class VotePayload(StrictModel):
    door_id: str
    label: Label


class ObservationPayload(StrictModel):
    image_id: str
    pose: tuple[float, float, float]
    votes: list[VotePayload]
    in_view: Optional[list[str]] = None


# -- evaluation service ----------------------------------------------------


class EvalConfig(StrictModel):
    rho_c: float = Field(default=0.75, ge=0.0, le=1.0)
    rho_a: float = Field(default=0.5, ge=0.0, le=1.0)
    ap_mode: Literal["voc11", "enriched"] = "enriched"
    ap_confidence_gate: bool = True


class EvalRequest(StrictModel):
    dataset: DatasetFilePayload
    config: EvalConfig = EvalConfig()


class OpiPayload(StrictModel):
    tp_count: int
    fp_count: int
    bfd_count: int
    y_bar: int
    tp_rate: float
    fp_rate: float
    bfd_rate: float
    undefined: bool


class PrPoint(StrictModel):
    recall: float
    precision: float


class EvalResponse(StrictModel):
    config: EvalConfig
    per_class_ap: dict[str, Optional[float]]
    map_score: float
    pr_points: dict[str, list[PrPoint]]
    opi: OpiPayload


class SweepRequest(StrictModel):
    dataset: DatasetFilePayload
    rho_a: float = Field(default=0.5, ge=0.0, le=1.0)
    thresholds: list[float]


class SweepPoint(StrictModel):
    threshold: float
    opi: OpiPayload


class SweepResponse(StrictModel):
    rho_a: float
    points: list[SweepPoint]


class TopologyRequest(StrictModel):
    doors: list[DoorPayload]
    observations: list[ObservationPayload]
    undecided_default: Label = "closed"


class VerdictPayload(StrictModel):
    door_id: str
    open_votes: int
    closed_votes: int
    view_count: int
    outcome: str
    inferred: Optional[Label]


class TopologyResponse(StrictModel):
    verdicts: list[VerdictPayload]
    recognition_accuracy: float
    nodes: list[str]
    inferred_edges: list[tuple[str, str]]
    true_edges: list[tuple[str, str]]
    edge_precision: float
    edge_recall: float


class PosesRequest(StrictModel):
    graph: GraphPayload
    distance: float = Field(default=1.0, gt=0)
    h_low: float = 0.1
    h_high: float = 0.7
    seed: int = 0


class PosePayload(StrictModel):
    x: float
    y: float
    h: float
    theta: float


class PosesResponse(StrictModel):
    poses: list[PosePayload]


# -- annotation service ------------------------------------------------------


class FrameRecord(StrictModel):
    image_id: str
    file_name: str
    timestamp_ms: int


class SessionResponse(StrictModel):
    session_id: str
    image_dir: str
    sample_period: float
    frames: list[FrameRecord]


class BoxAnnotation(StrictModel):
    box: BoxTuple
    label: Label


class AnnotationsResponse(StrictModel):
    image_id: str
    boxes: list[BoxAnnotation]
    provenance: Literal["saved", "carried"]


class PutAnnotationsRequest(StrictModel):
    boxes: list[BoxAnnotation]


class PutAnnotationsResponse(StrictModel):
    image_id: str
    saved: int
