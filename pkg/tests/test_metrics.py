import random

import pytest

from doorkit.metrics import (Box, Detection, DoorStatus, GroundTruthBox,
                             OpiConfig, average_precision, confidence_sweep,
                             iou, map_score, opi_aggregate, opi_dataset,
                             opi_image)

from conftest import random_image_instance

OPEN = DoorStatus.OPEN
CLOSED = DoorStatus.CLOSED


def gt(box, label=OPEN, image_id="img"):
    return GroundTruthBox(image_id, box, label)


def det(box, label=OPEN, conf=0.9, image_id="img"):
    return Detection(image_id, box, label, conf)


# -- IoU -------------------------------------------------------------------


def test_iou_identical():
    b = Box(3, 4, 10, 12)
    assert iou(b, b) == 1.0


def test_iou_disjoint():
    assert iou(Box(0, 0, 5, 5), Box(10, 10, 2, 2)) == 0.0


def test_iou_third():
    assert iou(Box(0, 0, 10, 10), Box(5, 0, 10, 10)) == pytest.approx(1 / 3)


def test_iou_properties():
    rng = random.Random(1)
    for _ in range(200):
        a = Box(rng.uniform(0, 50), rng.uniform(0, 50), rng.uniform(0, 30), rng.uniform(0, 30))
        b = Box(rng.uniform(0, 50), rng.uniform(0, 50), rng.uniform(0, 30), rng.uniform(0, 30))
        v = iou(a, b)
        assert v == iou(b, a)
        assert 0.0 <= v <= 1.0
    assert iou(Box(0, 0, 0, 0), Box(0, 0, 0, 0)) == 0.0  # zero-union convention


def test_box_validation():
    with pytest.raises(ValueError):
        Box(0, 0, -1, 5)
    with pytest.raises(ValueError):
        Box(0, 0, float("nan"), 5)


# -- OPI (worked example of the indicator procedure) --------------------------


def worked_example():
    gts = [gt(Box(0, 0, 10, 10), OPEN)]
    dets = [
        det(Box(0, 0, 6, 10), OPEN, 0.9),      # IoU 0.60, most confident
        det(Box(0, 0, 5.5, 10), OPEN, 0.8),    # IoU 0.55, discarded
        det(Box(0, 0, 1, 10), CLOSED, 0.8),    # IoU 0.10, background
    ]
    return gts, dets


def test_opi_worked_example():
    gts, dets = worked_example()
    r = opi_image(gts, dets, OpiConfig(rho_c=0.75, rho_a=0.5))
    assert r.tp == frozenset({0})
    assert r.fp == frozenset()
    assert r.bfd == frozenset({2})


def test_opi_no_detections():
    gts, _ = worked_example()
    r = opi_image(gts, [])
    assert r.tp == r.fp == r.bfd == frozenset()


def test_opi_wrong_label_fp():
    gts = [gt(Box(0, 0, 10, 10), OPEN)]
    r = opi_image(gts, [det(Box(0, 0, 7, 10), CLOSED, 0.8)])
    assert r.fp == frozenset({0})
    assert r.tp == frozenset()


def test_opi_cross_image_error():
    with pytest.raises(ValueError, match="cross-image"):
        opi_image([gt(Box(0, 0, 5, 5), image_id="a")],
                  [det(Box(0, 0, 5, 5), image_id="b")])


def test_opi_aggregate_rates():
    gts, dets = worked_example()
    r = opi_image(gts, dets)
    report = opi_aggregate([r])
    assert report.y_bar == 1
    assert (report.tp_rate, report.fp_rate, report.bfd_rate) == (1.0, 0.0, 1.0)


def test_opi_aggregate_additive():
    gts, dets = worked_example()
    r = opi_image(gts, dets)
    report = opi_aggregate([r, r])
    assert report.y_bar == 2
    assert report.tp_rate == 1.0


def test_opi_aggregate_empty_flag():
    report = opi_aggregate([])
    assert report.undefined
    assert (report.tp_rate, report.fp_rate, report.bfd_rate) == (0.0, 0.0, 0.0)


def test_opi_partition():
    rng = random.Random(7)
    for _ in range(200):
        gts, dets = random_image_instance(rng)
        r = opi_image(gts, dets)
        confident = {k for k, d in enumerate(dets) if d.confidence >= 0.75}
        assert r.tp | r.fp | r.bfd <= confident
        assert not (r.tp & r.fp) and not (r.tp & r.bfd) and not (r.fp & r.bfd)
        # each ground truth contributes at most one element to TP u FP
        assert len(r.tp) + len(r.fp) <= len(gts)


def test_opi_monotone_in_rho_c():
    rng = random.Random(8)
    for _ in range(100):
        gts, dets = random_image_instance(rng)
        sizes = []
        for rho_c in (0.0, 0.25, 0.5, 0.75, 1.0):
            r = opi_image(gts, dets, OpiConfig(rho_c=rho_c, rho_a=0.5))
            sizes.append(len(r.tp) + len(r.fp) + len(r.bfd))
        assert sizes == sorted(sizes, reverse=True)


# -- average precision --------------------------------------------------------


def test_ap_single_perfect():
    gts = [gt(Box(0, 0, 10, 10))]
    dets = [det(Box(0, 0, 10, 10), OPEN, 0.9)]
    assert average_precision(gts, dets, OPEN, mode="voc11").ap == 1.0
    assert average_precision(gts, dets, OPEN, mode="enriched").ap == 1.0


def test_ap_two_gts_one_det():
    gts = [gt(Box(0, 0, 10, 10)), gt(Box(50, 50, 10, 10))]
    dets = [det(Box(0, 0, 10, 10), OPEN, 0.9)]
    assert average_precision(gts, dets, OPEN, mode="voc11").ap == pytest.approx(6 / 11)


def test_ap_tp_then_fp():
    gts = [gt(Box(0, 0, 10, 10))]
    dets = [det(Box(0, 0, 10, 10), OPEN, 0.9),
            det(Box(70, 0, 5, 5), OPEN, 0.8)]
    assert average_precision(gts, dets, OPEN, mode="voc11").ap == 1.0


def test_ap_no_ground_truth_error():
    with pytest.raises(ValueError, match="closed"):
        average_precision([gt(Box(0, 0, 5, 5), OPEN)], [], CLOSED)


def test_ap_confidence_gate():
    gts = [gt(Box(0, 0, 10, 10))]
    dets = [det(Box(0, 0, 10, 10), OPEN, 0.5)]  # below the gate
    assert average_precision(gts, dets, OPEN, rho_c=0.75).ap == 0.0
    assert average_precision(gts, dets, OPEN, rho_c=None).ap == 1.0


def test_enriched_degenerates_without_extra_recalls():
    # all attained recalls on the 11 levels: enriched equals the
    # Riemann form over exactly those levels
    gts = [gt(Box(k * 20, 0, 10, 10)) for k in range(10)]
    dets = [det(Box(k * 20, 0, 10, 10), OPEN, 0.9 - 0.01 * k) for k in range(5)]
    result = average_precision(gts, dets, OPEN, mode="enriched")
    attained = {r for r, _ in result.pr_points}
    assert attained <= {k / 10 for k in range(11)}
    from doorkit.metrics import VOC11_LEVELS, _interpolated
    riemann = 0.0
    prev = 0.0
    for r in VOC11_LEVELS:
        riemann += (r - prev) * _interpolated(result.pr_points, r)
        prev = r
    assert result.ap == pytest.approx(riemann)


def test_map_both_classes():
    gts = [gt(Box(0, 0, 10, 10), OPEN), gt(Box(30, 0, 10, 10), CLOSED)]
    dets = [det(Box(0, 0, 10, 10), OPEN, 0.9),
            det(Box(30, 0, 10, 10), CLOSED, 0.9)]
    report = map_score(gts, dets)
    assert report.map_score == 1.0


def test_map_excludes_absent_class():
    gts = [gt(Box(0, 0, 10, 10), OPEN)]
    dets = [det(Box(0, 0, 10, 10), OPEN, 0.9)]
    report = map_score(gts, dets)
    assert list(report.per_class_ap) == [OPEN]
    assert report.map_score == 1.0


def test_map_mean():
    # open 6/11, closed 0 -> mAP 3/11
    gts = [gt(Box(0, 0, 10, 10), OPEN), gt(Box(50, 50, 10, 10), OPEN),
           gt(Box(100, 100, 10, 10), CLOSED)]
    dets = [det(Box(0, 0, 10, 10), OPEN, 0.9)]
    report = map_score(gts, dets, mode="voc11")
    assert report.map_score == pytest.approx(3 / 11)


def test_map_empty_ground_truth_error():
    with pytest.raises(ValueError, match="empty ground truth"):
        map_score([], [])


# -- confidence sweep ----------------------------------------------------------


def test_sweep_nothing_passes_above_one():
    gts, dets = worked_example()
    [(_, report)] = confidence_sweep(gts, dets, 0.5, [1.01])
    assert report.tp_count == report.fp_count == report.bfd_count == 0


def test_sweep_zero_threshold_maximal():
    rng = random.Random(9)
    for _ in range(30):
        gts, dets = random_image_instance(rng)
        series = confidence_sweep(gts, dets, 0.5, [0.0, 0.25, 0.5, 0.75, 1.0])
        counts = [r.tp_count + r.fp_count + r.bfd_count for _, r in series]
        assert counts[0] == max(counts)


def test_sweep_matches_independent_runs():
    rng = random.Random(10)
    instances = [random_image_instance(rng, image_id=f"im{k}") for k in range(20)]
    gts = [g for i, _ in instances for g in i]
    dets = [d for _, i in instances for d in i]
    thresholds = [0.0, 0.25, 0.5, 0.75, 1.0]
    series = confidence_sweep(gts, dets, 0.5, thresholds)
    for t, report in series:
        independent = opi_dataset(gts, dets, OpiConfig(rho_c=t, rho_a=0.5))
        assert report == independent


def test_sweep_unsorted_rejected():
    with pytest.raises(ValueError, match="ascending"):
        confidence_sweep([], [], 0.5, [0.5, 0.25])
