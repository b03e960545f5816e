import random

import numpy as np
import pytest

from doorkit.grid import CellState, GridMap
from doorkit.mapio import (load_map, pixels_to_states, read_pgm, save_map,
                           write_pgm)

from conftest import random_grid_map


def test_two_by_two_round_trip(tmp_path):
    cells = np.array([[0, 1], [2, 0]], np.uint8)  # free, obstacle; unknown, free
    grid = GridMap(2, 2, 0.05, 1.5, -2.0, cells)
    save_map(grid, tmp_path / "m.pgm")
    loaded = load_map(tmp_path / "m.yaml")
    assert np.array_equal(loaded.cells, grid.cells)
    assert loaded.resolution == 0.05
    assert (loaded.origin_x, loaded.origin_y) == (1.5, -2.0)


def test_threshold_rules():
    pixels = np.array([[255, 250, 128], [205, 50, 0]], np.uint8)
    states = pixels_to_states(pixels)
    assert states[0, 0] == CellState.FREE
    assert states[0, 1] == CellState.FREE
    assert states[0, 2] == CellState.UNKNOWN
    assert states[1, 0] == CellState.UNKNOWN
    assert states[1, 1] == CellState.OBSTACLE
    assert states[1, 2] == CellState.OBSTACLE


def test_round_trip_random(tmp_path):
    rng = random.Random(23)
    for k in range(60):
        grid = random_grid_map(rng, max_side=30)
        # sprinkle unknowns
        cells = np.array(grid.cells)
        mask = np.random.default_rng(k).random(cells.shape) < 0.1
        cells[mask] = int(CellState.UNKNOWN)
        grid = grid.with_cells(cells)
        pgm = tmp_path / f"m{k}.pgm"
        save_map(grid, pgm)
        loaded = load_map(pgm)
        assert np.array_equal(loaded.cells, grid.cells)
        assert loaded.resolution == grid.resolution
        # byte-stable second save
        save_map(loaded, tmp_path / f"n{k}.pgm")
        assert (tmp_path / f"n{k}.pgm").read_bytes() == pgm.read_bytes()


def test_pgm_comment_skipped(tmp_path):
    path = tmp_path / "c.pgm"
    path.write_bytes(b"P5\n# a comment\n2 1\n255\n\xfe\x00")
    pixels = read_pgm(path)
    assert pixels.tolist() == [[254, 0]]


def test_pgm_bad_magic(tmp_path):
    path = tmp_path / "bad.pgm"
    path.write_bytes(b"P2\n2 1\n255\n")
    with pytest.raises(ValueError, match="not a binary PGM"):
        read_pgm(path)


def test_pgm_dimension_mismatch(tmp_path):
    path = tmp_path / "short.pgm"
    path.write_bytes(b"P5\n4 4\n255\n\x00\x00")
    with pytest.raises(ValueError, match="expected 16 pixels"):
        read_pgm(path)


def test_pgm_bad_maxval(tmp_path):
    path = tmp_path / "m.pgm"
    path.write_bytes(b"P5\n1 1\n65535\n\x00\x00")
    with pytest.raises(ValueError, match="maxval"):
        read_pgm(path)


def test_sidecar_missing_field(tmp_path):
    write_pgm(tmp_path / "x.pgm", np.zeros((2, 2), np.uint8))
    (tmp_path / "x.yaml").write_text("image: x.pgm\nresolution: 0.1\n")
    with pytest.raises(ValueError, match="origin"):
        load_map(tmp_path / "x.yaml")


def test_sidecar_not_found(tmp_path):
    with pytest.raises(ValueError, match="sidecar not found"):
        load_map(tmp_path / "missing.pgm")
