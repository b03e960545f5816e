"""Detector evaluation: IoU, operational performance indicators, and
average precision.

The operational indicators classify each confident prediction of an
image as a true positive (best match of a real door, correct
traversability label), a false positive (best match, wrong label) or a
background false detection (no door overlaps it enough); extra
predictions on an already-matched door are discarded. Rates are taken
over the total number of ground-truth doors.

Average precision interpolates the precision/recall curve at the 11
even recall levels, and in enriched mode additionally at every recall
the curve attains, which covers all precision peaks and makes the
Riemann sum equal the exact area under the interpolated curve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

VOC11_LEVELS = tuple(i / 10 for i in range(11))

DEFAULT_RHO_C = 0.75
DEFAULT_RHO_A = 0.5


class DoorStatus(str, Enum):
    OPEN = "open"
    CLOSED = "closed"


@dataclass(frozen=True)
class Box:
    x: float
    y: float
    w: float
    h: float

    def __post_init__(self):
        if self.w < 0 or self.h < 0:
            raise ValueError("box width/height must be >= 0")
        for v in (self.x, self.y, self.w, self.h):
            if not math.isfinite(v):
                raise ValueError("box coordinates must be finite")

    @property
    def area(self) -> float:
        return self.w * self.h


@dataclass(frozen=True)
class GroundTruthBox:
    image_id: str
    box: Box
    label: DoorStatus


@dataclass(frozen=True)
class Detection:
    image_id: str
    box: Box
    label: DoorStatus
    confidence: float

    def __post_init__(self):
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence must be in [0, 1], got {self.confidence}")


def iou(a: Box, b: Box) -> float:
    ix = min(a.x + a.w, b.x + b.w) - max(a.x, b.x)
    iy = min(a.y + a.h, b.y + b.h) - max(a.y, b.y)
    inter = max(0.0, ix) * max(0.0, iy)
    union = a.area + b.area - inter
    if union <= 0:
        return 0.0
    return inter / union


# -- Operational Performance Indicators ---------------------------------


@dataclass(frozen=True)
class OpiConfig:
    rho_c: float = DEFAULT_RHO_C
    rho_a: float = DEFAULT_RHO_A

    def __post_init__(self):
        if not 0.0 <= self.rho_c <= 1.0 or not 0.0 <= self.rho_a <= 1.0:
            raise ValueError("rho_c and rho_a must be in [0, 1]")


@dataclass(frozen=True)
class OpiImageResult:
    """Index sets into the image's detection list."""

    tp: frozenset
    fp: frozenset
    bfd: frozenset
    gt_count: int


def opi_image(gts: list[GroundTruthBox], dets: list[Detection],
              cfg: OpiConfig = OpiConfig()) -> OpiImageResult:
    ids = {g.image_id for g in gts} | {d.image_id for d in dets}
    if len(ids) > 1:
        raise ValueError(f"cross-image input: {sorted(ids)}")

    confident = [k for k, d in enumerate(dets) if d.confidence >= cfg.rho_c]

    bfd = set()
    assigned_gt = {}
    for k in confident:
        best_iou = -1.0
        best_gt = None
        for gi, g in enumerate(gts):
            v = iou(dets[k].box, g.box)
            if v > best_iou:
                best_iou = v
                best_gt = gi
        if best_gt is None or best_iou < cfg.rho_a:
            bfd.add(k)
        else:
            assigned_gt[k] = best_gt

    tp = set()
    fp = set()
    for gi, g in enumerate(gts):
        matched = [k for k in confident if assigned_gt.get(k) == gi]
        if not matched:
            continue
        best = max(matched, key=lambda k: (dets[k].confidence, -k))
        if dets[best].label == g.label:
            tp.add(best)
        else:
            fp.add(best)

    return OpiImageResult(frozenset(tp), frozenset(fp), frozenset(bfd), len(gts))


@dataclass(frozen=True)
class OpiReport:
    tp_count: int
    fp_count: int
    bfd_count: int
    y_bar: int
    tp_rate: float
    fp_rate: float
    bfd_rate: float
    undefined: bool = False  # set when y_bar == 0


def opi_aggregate(results: list[OpiImageResult], y_bar: int | None = None) -> OpiReport:
    tp = sum(len(r.tp) for r in results)
    fp = sum(len(r.fp) for r in results)
    bfd = sum(len(r.bfd) for r in results)
    total = sum(r.gt_count for r in results) if y_bar is None else y_bar
    if total > 0:
        return OpiReport(tp, fp, bfd, total, tp / total, fp / total, bfd / total)
    return OpiReport(tp, fp, bfd, 0, 0.0, 0.0, 0.0, undefined=True)


def opi_dataset(gts: list[GroundTruthBox], dets: list[Detection],
                cfg: OpiConfig = OpiConfig()) -> OpiReport:
    by_image: dict[str, tuple[list, list]] = {}
    for g in gts:
        by_image.setdefault(g.image_id, ([], []))[0].append(g)
    for d in dets:
        by_image.setdefault(d.image_id, ([], []))[1].append(d)
    results = [opi_image(g, d, cfg) for g, d in by_image.values()]
    return opi_aggregate(results)


def confidence_sweep(gts: list[GroundTruthBox], dets: list[Detection],
                     rho_a: float, thresholds: list[float]) -> list[tuple[float, OpiReport]]:
    if list(thresholds) != sorted(thresholds):
        raise ValueError("thresholds must be sorted ascending")
    out = []
    for t in thresholds:
        # thresholds may lie outside [0, 1]; gate here and disable the
        # config gate so the per-image run sees the same confident set
        passing = [d for d in dets if d.confidence >= t]
        out.append((t, opi_dataset(gts, passing, OpiConfig(rho_c=0.0, rho_a=rho_a))))
    return out


# -- Average precision ---------------------------------------------------


@dataclass(frozen=True)
class ApResult:
    ap: float
    pr_points: tuple  # ((recall, precision), ...) in detection order


@dataclass(frozen=True)
class ApReport:
    per_class_ap: dict
    map_score: float
    pr_points: dict = field(default_factory=dict)


def _pr_curve(gts, dets, cls: DoorStatus, rho_a: float, rho_c: float | None):
    """Cumulative (recall, precision) points for one class."""
    gt_by_image: dict[str, list] = {}
    for g in gts:
        if g.label == cls:
            gt_by_image.setdefault(g.image_id, []).append(g)
    n_pos = sum(len(v) for v in gt_by_image.values())
    if n_pos == 0:
        raise ValueError(f"no ground truth of class '{cls.value}'")

    candidates = [d for d in dets if d.label == cls]
    if rho_c is not None:
        candidates = [d for d in candidates if d.confidence >= rho_c]
    order = sorted(range(len(candidates)),
                   key=lambda k: (-candidates[k].confidence, k))

    matched: dict[str, set] = {}
    points = []
    tp_cum = 0
    for rank, k in enumerate(order, start=1):
        det = candidates[k]
        gts_here = gt_by_image.get(det.image_id, [])
        used = matched.setdefault(det.image_id, set())
        best_iou = -1.0
        best_gi = None
        for gi, g in enumerate(gts_here):
            if gi in used:
                continue
            v = iou(det.box, g.box)
            if v > best_iou:
                best_iou = v
                best_gi = gi
        if best_gi is not None and best_iou >= rho_a:
            used.add(best_gi)
            tp_cum += 1
        points.append((tp_cum / n_pos, tp_cum / rank))
    return points


def _interpolated(points, r: float) -> float:
    """max precision over curve points with recall >= r."""
    best = 0.0
    for recall, precision in points:
        if recall >= r and precision > best:
            best = precision
    return best


def average_precision(gts, dets, cls: DoorStatus,
                      rho_a: float = DEFAULT_RHO_A,
                      rho_c: float | None = DEFAULT_RHO_C,
                      mode: str = "enriched") -> ApResult:
    if mode not in ("voc11", "enriched"):
        raise ValueError(f"unknown AP mode '{mode}'")
    points = _pr_curve(gts, dets, cls, rho_a, rho_c)
    if mode == "voc11":
        ap = sum(_interpolated(points, r) for r in VOC11_LEVELS) / len(VOC11_LEVELS)
    else:
        samples = sorted(set(VOC11_LEVELS) | {r for r, _ in points})
        ap = 0.0
        prev = 0.0
        for r in samples:
            ap += (r - prev) * _interpolated(points, r)
            prev = r
    return ApResult(ap=ap, pr_points=tuple(points))


def map_score(gts, dets, rho_a: float = DEFAULT_RHO_A,
              rho_c: float | None = DEFAULT_RHO_C,
              mode: str = "enriched") -> ApReport:
    if not gts:
        raise ValueError("empty ground truth")
    present = [cls for cls in DoorStatus if any(g.label == cls for g in gts)]
    per_class = {}
    pr = {}
    for cls in present:
        result = average_precision(gts, dets, cls, rho_a, rho_c, mode)
        per_class[cls] = result.ap
        pr[cls] = result.pr_points
    mean = sum(per_class.values()) / len(per_class)
    return ApReport(per_class_ap=per_class, map_score=mean, pr_points=pr)
