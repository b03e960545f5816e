"""Dataset preparation from per-pixel semantic frames.

Frames are kept for annotation when door pixels make up at least 2.5%
of the image, and axis-aligned box proposals are generated around each
4-connected blob of door pixels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .metrics import Box

DOOR_FRACTION_THRESHOLD = 0.025
DEFAULT_MIN_AREA = 20

_FOUR = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)


@dataclass(frozen=True)
class SemanticFrame:
    class_of: np.ndarray  # (H, W) integer class ids
    door_class_ids: frozenset

    def __post_init__(self):
        arr = np.ascontiguousarray(self.class_of)
        if arr.ndim != 2:
            raise ValueError("class_of must be a 2D array")
        arr.flags.writeable = False
        object.__setattr__(self, "class_of", arr)
        object.__setattr__(self, "door_class_ids", frozenset(self.door_class_ids))

    @property
    def height(self) -> int:
        return self.class_of.shape[0]

    @property
    def width(self) -> int:
        return self.class_of.shape[1]

    def door_mask(self) -> np.ndarray:
        mask = np.zeros(self.class_of.shape, dtype=bool)
        for cid in self.door_class_ids:
            mask |= self.class_of == cid
        return mask


def door_pixel_fraction(frame: SemanticFrame) -> float:
    total = frame.class_of.size
    if total == 0:
        raise ValueError("zero-size frame")
    return float(frame.door_mask().sum()) / total


def passes_door_filter(frame: SemanticFrame,
                       threshold: float = DOOR_FRACTION_THRESHOLD) -> bool:
    """Frames below the threshold carry too little door to annotate."""
    return door_pixel_fraction(frame) >= threshold


def propose_boxes(frame: SemanticFrame, min_area: int = DEFAULT_MIN_AREA) -> list[Box]:
    """One bounding box per 4-connected door blob of at least min_area pixels."""
    if min_area < 0:
        raise ValueError("min_area must be >= 0")
    labels, count = ndimage.label(frame.door_mask(), structure=_FOUR)
    boxes = []
    for cid in range(1, count + 1):
        rows, cols = np.nonzero(labels == cid)
        if len(rows) < min_area:
            continue
        x, y = int(cols.min()), int(rows.min())
        boxes.append(Box(x=x, y=y,
                         w=int(cols.max()) - x + 1,
                         h=int(rows.max()) - y + 1))
    return boxes
