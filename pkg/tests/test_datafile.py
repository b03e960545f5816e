import json
import random

import pytest

from doorkit.datafile import (DatasetFile, ImageInfo, dumps_dataset,
                              load_dataset, parse_dataset, save_dataset)
from doorkit.metrics import Box, Detection, DoorStatus, GroundTruthBox


def sample_dataset() -> DatasetFile:
    images = (ImageInfo("im0", "im0.png", 100, 80),
              ImageInfo("im1", "im1.png", 100, 80))
    annotations = (
        GroundTruthBox("im0", Box(0, 0, 10, 10), DoorStatus.OPEN),
        GroundTruthBox("im1", Box(5, 5, 20, 30), DoorStatus.CLOSED),
    )
    detections = (
        Detection("im0", Box(0, 0, 6, 10), DoorStatus.OPEN, 0.9),
        Detection("im0", Box(0, 0, 1, 10), DoorStatus.CLOSED, 0.8),
    )
    return DatasetFile(images, annotations, detections)


def random_dataset(rng: random.Random) -> DatasetFile:
    images = []
    annotations = []
    detections = []
    for k in range(rng.randrange(0, 5)):
        w, h = rng.randrange(20, 200), rng.randrange(20, 200)
        images.append(ImageInfo(f"im{k}", f"im{k}.png", w, h))
        for _ in range(rng.randrange(0, 4)):
            # quarter-cell lattice keeps boxes exactly within bounds
            x = rng.randrange(0, 4 * (w - 4)) / 4
            y = rng.randrange(0, 4 * (h - 4)) / 4
            box = Box(x, y,
                      rng.randrange(1, int(4 * (w - x)) + 1) / 4,
                      rng.randrange(1, int(4 * (h - y)) + 1) / 4)
            label = rng.choice(list(DoorStatus))
            if rng.random() < 0.5:
                annotations.append(GroundTruthBox(f"im{k}", box, label))
            else:
                detections.append(Detection(f"im{k}", box, label, round(rng.random(), 4)))
    return DatasetFile(tuple(images), tuple(annotations), tuple(detections))


def test_empty_round_trip(tmp_path):
    path = tmp_path / "empty.json"
    save_dataset(DatasetFile(), path)
    assert load_dataset(path) == DatasetFile()


def test_worked_example_round_trip(tmp_path):
    dataset = sample_dataset()
    path = tmp_path / "d.json"
    save_dataset(dataset, path)
    assert load_dataset(path) == dataset


def test_round_trip_random(tmp_path):
    rng = random.Random(19)
    for k in range(100):
        dataset = random_dataset(rng)
        path = tmp_path / f"r{k}.json"
        save_dataset(dataset, path)
        loaded = load_dataset(path)
        assert loaded == dataset
        # byte-stable second generation
        assert dumps_dataset(loaded) == path.read_text()


def test_unknown_label_names_path():
    data = {
        "images": [{"image_id": "a", "file_name": "a.png", "width": 10, "height": 10}],
        "annotations": [{"image_id": "a", "box": [0, 0, 1, 1], "label": "ajar"}],
        "detections": [],
    }
    with pytest.raises(ValueError, match=r"annotations\[0\].label"):
        parse_dataset(data)


def test_unknown_key_rejected():
    data = {"images": [], "annotations": [], "detections": [], "extra": 1}
    with pytest.raises(ValueError, match="extra"):
        parse_dataset(data)
    nested = {
        "images": [{"image_id": "a", "file_name": "a.png", "width": 10,
                    "height": 10, "exif": {}}],
        "annotations": [], "detections": [],
    }
    with pytest.raises(ValueError, match=r"images\[0\].exif"):
        parse_dataset(nested)


def test_missing_top_level_key_rejected():
    with pytest.raises(ValueError, match="detections"):
        parse_dataset({"images": [], "annotations": []})


def test_unknown_image_reference():
    data = {
        "images": [],
        "annotations": [{"image_id": "ghost", "box": [0, 0, 1, 1], "label": "open"}],
        "detections": [],
    }
    with pytest.raises(ValueError, match=r"annotations\[0\].image_id"):
        parse_dataset(data)


def test_boxes_clamped_to_image_bounds():
    data = {
        "images": [{"image_id": "a", "file_name": "a.png", "width": 50, "height": 40}],
        "annotations": [{"image_id": "a", "box": [-5, 30, 20, 100], "label": "open"}],
        "detections": [],
    }
    dataset = parse_dataset(data)
    box = dataset.annotations[0].box
    assert (box.x, box.y) == (0, 30)
    assert (box.x + box.w, box.y + box.h) == (15, 40)


def test_bad_json_reported(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(ValueError, match="not valid JSON"):
        load_dataset(path)


def test_confidence_out_of_range():
    data = {
        "images": [{"image_id": "a", "file_name": "a.png", "width": 10, "height": 10}],
        "annotations": [],
        "detections": [{"image_id": "a", "box": [0, 0, 1, 1], "label": "open",
                        "confidence": 1.5}],
    }
    with pytest.raises(ValueError, match=r"detections\[0\].confidence"):
        parse_dataset(data)
