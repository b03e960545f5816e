"""Dataset interchange file: images, door annotations, detections.

JSON on disk, validated strictly against the shared payload schema;
boxes are clamped to their image bounds on load.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from pydantic import ValidationError

from .metrics import Box, Detection, DoorStatus, GroundTruthBox
from .schemas import (AnnotationRecord, DatasetFilePayload, DetectionRecord,
                      ImageRecord, format_validation_error)


@dataclass(frozen=True)
class ImageInfo:
    image_id: str
    file_name: str
    width: int
    height: int


@dataclass(frozen=True)
class DatasetFile:
    images: tuple = ()
    annotations: tuple = ()  # of GroundTruthBox
    detections: tuple = ()  # of Detection


def _clamp_box(box, width: int, height: int) -> Box:
    x, y, w, h = box
    if x >= 0 and y >= 0 and x + w <= width and y + h <= height:
        return Box(x=x, y=y, w=w, h=h)
    x0 = min(max(x, 0.0), float(width))
    y0 = min(max(y, 0.0), float(height))
    x1 = min(max(x + w, 0.0), float(width))
    y1 = min(max(y + h, 0.0), float(height))
    return Box(x=x0, y=y0, w=x1 - x0, h=y1 - y0)


def dataset_from_payload(payload: DatasetFilePayload) -> DatasetFile:
    images = {}
    for k, rec in enumerate(payload.images):
        if rec.image_id in images:
            raise ValueError(f"images[{k}].image_id: duplicate id '{rec.image_id}'")
        images[rec.image_id] = ImageInfo(rec.image_id, rec.file_name, rec.width, rec.height)

    def resolve(kind: str, k: int, rec):
        info = images.get(rec.image_id)
        if info is None:
            raise ValueError(f"{kind}[{k}].image_id: unknown image '{rec.image_id}'")
        return info

    annotations = []
    for k, rec in enumerate(payload.annotations):
        info = resolve("annotations", k, rec)
        annotations.append(GroundTruthBox(
            image_id=rec.image_id,
            box=_clamp_box(rec.box, info.width, info.height),
            label=DoorStatus(rec.label),
        ))
    detections = []
    for k, rec in enumerate(payload.detections):
        info = resolve("detections", k, rec)
        detections.append(Detection(
            image_id=rec.image_id,
            box=_clamp_box(rec.box, info.width, info.height),
            label=DoorStatus(rec.label),
            confidence=rec.confidence,
        ))
    return DatasetFile(images=tuple(images.values()),
                       annotations=tuple(annotations),
                       detections=tuple(detections))


def dataset_to_payload(dataset: DatasetFile) -> DatasetFilePayload:
    return DatasetFilePayload(
        images=[ImageRecord(image_id=i.image_id, file_name=i.file_name,
                            width=i.width, height=i.height) for i in dataset.images],
        annotations=[AnnotationRecord(image_id=a.image_id,
                                      box=(a.box.x, a.box.y, a.box.w, a.box.h),
                                      label=a.label.value) for a in dataset.annotations],
        detections=[DetectionRecord(image_id=d.image_id,
                                    box=(d.box.x, d.box.y, d.box.w, d.box.h),
                                    label=d.label.value, confidence=d.confidence)
                    for d in dataset.detections],
    )


def parse_dataset(data) -> DatasetFile:
    try:
        payload = DatasetFilePayload.model_validate(data)
    except ValidationError as err:
        raise ValueError(format_validation_error(err)) from None
    return dataset_from_payload(payload)


def load_dataset(path) -> DatasetFile:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as err:
        raise ValueError(f"{path}: not valid JSON: {err}") from None
    try:
        return parse_dataset(data)
    except ValueError as err:
        raise ValueError(f"{path}: {err}") from None


def dumps_dataset(dataset: DatasetFile) -> str:
    payload = dataset_to_payload(dataset)
    return json.dumps(payload.model_dump(), indent=2) + "\n"


def save_dataset(dataset: DatasetFile, path) -> None:
    Path(path).write_text(dumps_dataset(dataset), encoding="utf-8")
