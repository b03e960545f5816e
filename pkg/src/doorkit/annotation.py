"""Annotation session store for the human-in-the-loop labeling flow.

A session wraps a directory of timestamp-named images, subsampled at a
fixed period. Saved box lists live in a single JSON store persisted
with write-ahead-then-rename, so an acknowledged save always survives a
crash. Frames without a saved list inherit the boxes of the nearest
preceding saved frame ("carried"); saving an empty list is an explicit
statement that the frame has no doors and stops that inheritance.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass
from pathlib import Path

from PIL import Image

from .datafile import DatasetFile, ImageInfo
from .metrics import Box, DoorStatus, GroundTruthBox

IMAGE_EXTENSIONS = {".jpg", ".jpeg", ".png", ".pgm", ".bmp", ".gif", ".tif", ".tiff"}

SAVED = "saved"
CARRIED = "carried"


@dataclass(frozen=True)
class Frame:
    image_id: str
    file_name: str
    timestamp_ms: int


def _scan_frames(image_dir: Path) -> list[Frame]:
    frames = []
    for entry in sorted(image_dir.iterdir()):
        if not entry.is_file() or entry.suffix.lower() not in IMAGE_EXTENSIONS:
            continue
        try:
            ts = int(entry.stem)
        except ValueError:
            raise ValueError(
                f"{entry.name}: file name must be <integer-milliseconds>{entry.suffix}"
            ) from None
        frames.append(Frame(image_id=entry.stem, file_name=entry.name, timestamp_ms=ts))
    frames.sort(key=lambda f: f.timestamp_ms)
    return frames


def _subsample(frames: list[Frame], period_s: float) -> list[Frame]:
    period_ms = period_s * 1000.0
    kept = []
    for frame in frames:
        if not kept or frame.timestamp_ms - kept[-1].timestamp_ms >= period_ms:
            kept.append(frame)
    return kept


class AnnotationSession:
    def __init__(self, image_dir, sample_period: float, store_path=None):
        self.image_dir = Path(image_dir)
        if not self.image_dir.is_dir():
            raise ValueError(f"{self.image_dir}: not a directory")
        if sample_period < 0:
            raise ValueError("sample period must be >= 0")
        self.sample_period = sample_period
        self.session_id = self.image_dir.name
        all_frames = _scan_frames(self.image_dir)
        if not all_frames:
            raise ValueError(f"{self.image_dir}: no images found")
        self.frames = _subsample(all_frames, sample_period)
        self._by_id = {f.image_id: f for f in self.frames}
        self.store_path = Path(store_path) if store_path else self.image_dir / "annotations.json"
        self._lock = threading.Lock()
        self._sizes: dict[str, tuple[int, int]] = {}
        self._store: dict[str, list[GroundTruthBox]] = {}
        if self.store_path.exists():
            self._load_store()

    # -- store persistence ----------------------------------------------

    def _load_store(self) -> None:
        data = json.loads(self.store_path.read_text(encoding="utf-8"))
        store = {}
        for image_id, boxes in data.get("annotations", {}).items():
            if image_id not in self._by_id:
                continue  # frame dropped by resampling; keep store minimal
            store[image_id] = [
                GroundTruthBox(image_id=image_id,
                               box=Box(*entry["box"]),
                               label=DoorStatus(entry["label"]))
                for entry in boxes
            ]
        self._store = store

    def _persist(self) -> None:
        payload = {
            "version": 1,
            "annotations": {
                image_id: [
                    {"box": [b.box.x, b.box.y, b.box.w, b.box.h], "label": b.label.value}
                    for b in boxes
                ]
                for image_id, boxes in sorted(self._store.items())
            },
        }
        tmp = self.store_path.with_name(self.store_path.name + ".tmp")
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, self.store_path)

    # -- frame helpers ----------------------------------------------------

    def frame(self, image_id: str) -> Frame:
        frame = self._by_id.get(image_id)
        if frame is None:
            raise KeyError(image_id)
        return frame

    def image_path(self, image_id: str) -> Path:
        return self.image_dir / self.frame(image_id).file_name

    def image_size(self, image_id: str) -> tuple[int, int]:
        if image_id not in self._sizes:
            with Image.open(self.image_path(image_id)) as img:
                self._sizes[image_id] = img.size  # (width, height)
        return self._sizes[image_id]

    # -- core operations ---------------------------------------------------

    def get_annotations(self, image_id: str) -> tuple[list[GroundTruthBox], str]:
        frame = self.frame(image_id)
        store = self._store
        if image_id in store:
            return list(store[image_id]), SAVED
        idx = self.frames.index(frame)
        for prev in reversed(self.frames[:idx]):
            if prev.image_id in store:
                carried = [
                    GroundTruthBox(image_id=image_id, box=b.box, label=b.label)
                    for b in store[prev.image_id]
                ]
                return carried, CARRIED
        return [], CARRIED

    def put_annotations(self, image_id: str, boxes: list[GroundTruthBox]) -> int:
        self.frame(image_id)
        width, height = self.image_size(image_id)
        clamped = []
        for b in boxes:
            x0 = min(max(b.box.x, 0.0), float(width))
            y0 = min(max(b.box.y, 0.0), float(height))
            x1 = min(max(b.box.x + b.box.w, 0.0), float(width))
            y1 = min(max(b.box.y + b.box.h, 0.0), float(height))
            clamped.append(GroundTruthBox(
                image_id=image_id,
                box=Box(x=x0, y=y0, w=x1 - x0, h=y1 - y0),
                label=DoorStatus(b.label),
            ))
        with self._lock:
            self._store[image_id] = clamped
            self._persist()
        return len(clamped)

    def export_dataset(self) -> DatasetFile:
        images = []
        annotations = []
        for frame in self.frames:
            width, height = self.image_size(frame.image_id)
            images.append(ImageInfo(image_id=frame.image_id,
                                    file_name=frame.file_name,
                                    width=width, height=height))
            annotations.extend(self._store.get(frame.image_id, ()))
        return DatasetFile(images=tuple(images), annotations=tuple(annotations))


def open_session(image_dir, sample_period: float, store_path=None) -> AnnotationSession:
    return AnnotationSession(image_dir, sample_period, store_path)
