"""Occupancy map persistence: binary PGM plus a YAML sidecar.

The sidecar carries the image file name, the resolution in meters per
cell, and the world origin of the bottom-left corner. Pixel values map
to cell states with the usual occupancy conventions: bright is free,
dark is obstacle, anything in between is unknown.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import yaml

from .grid import CellState, GridMap

FREE_PIXEL = 254
OBSTACLE_PIXEL = 0
UNKNOWN_PIXEL = 205

FREE_MIN = 250
OBSTACLE_MAX = 50


def write_pgm(path, pixels: np.ndarray) -> None:
    h, w = pixels.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(np.ascontiguousarray(pixels, dtype=np.uint8).tobytes())


def read_pgm(path) -> np.ndarray:
    raw = Path(path).read_bytes()

    pos = 0

    def token():
        nonlocal pos
        while pos < len(raw):
            if raw[pos:pos + 1].isspace():
                pos += 1
            elif raw[pos:pos + 1] == b"#":
                while pos < len(raw) and raw[pos] != 0x0A:
                    pos += 1
            else:
                break
        start = pos
        while pos < len(raw) and not raw[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ValueError(f"{path}: truncated PGM header")
        return raw[start:pos]

    magic = token()
    if magic != b"P5":
        raise ValueError(f"{path}: not a binary PGM (magic {magic!r})")
    try:
        w = int(token())
        h = int(token())
        maxval = int(token())
    except ValueError:
        raise ValueError(f"{path}: malformed PGM header") from None
    if maxval != 255:
        raise ValueError(f"{path}: unsupported maxval {maxval}, expected 255")
    pos += 1  # single whitespace after maxval
    data = raw[pos:pos + w * h]
    if len(data) != w * h:
        raise ValueError(f"{path}: expected {w * h} pixels, found {len(data)}")
    return np.frombuffer(data, dtype=np.uint8).reshape(h, w)


def pixels_to_states(pixels: np.ndarray) -> np.ndarray:
    states = np.full(pixels.shape, int(CellState.UNKNOWN), dtype=np.uint8)
    states[pixels >= FREE_MIN] = int(CellState.FREE)
    states[pixels <= OBSTACLE_MAX] = int(CellState.OBSTACLE)
    return states


def states_to_pixels(states: np.ndarray) -> np.ndarray:
    pixels = np.full(states.shape, UNKNOWN_PIXEL, dtype=np.uint8)
    pixels[states == CellState.FREE] = FREE_PIXEL
    pixels[states == CellState.OBSTACLE] = OBSTACLE_PIXEL
    return pixels


def _sidecar_path(pgm_path: Path) -> Path:
    return pgm_path.with_suffix(".yaml")


def save_map(grid: GridMap, pgm_path) -> Path:
    """Write <name>.pgm and <name>.yaml; returns the sidecar path."""
    pgm_path = Path(pgm_path)
    write_pgm(pgm_path, states_to_pixels(grid.cells))
    sidecar = _sidecar_path(pgm_path)
    meta = {
        "image": pgm_path.name,
        "resolution": float(grid.resolution),
        "origin": [float(grid.origin_x), float(grid.origin_y), 0.0],
    }
    sidecar.write_text(yaml.safe_dump(meta, sort_keys=True), encoding="utf-8")
    return sidecar


def load_map(path) -> GridMap:
    """Load from the sidecar or the PGM path (sibling sidecar required)."""
    path = Path(path)
    sidecar = path if path.suffix in (".yaml", ".yml") else _sidecar_path(path)
    if not sidecar.exists():
        raise ValueError(f"{sidecar}: map sidecar not found")
    try:
        meta = yaml.safe_load(sidecar.read_text(encoding="utf-8"))
    except yaml.YAMLError as err:
        raise ValueError(f"{sidecar}: invalid YAML: {err}") from None
    if not isinstance(meta, dict):
        raise ValueError(f"{sidecar}: sidecar must be a mapping")
    for key in ("image", "resolution", "origin"):
        if key not in meta:
            raise ValueError(f"{sidecar}: missing field '{key}'")
    origin = meta["origin"]
    if not isinstance(origin, (list, tuple)) or len(origin) < 2:
        raise ValueError(f"{sidecar}: origin must be [x, y, theta]")
    resolution = float(meta["resolution"])
    pixels = read_pgm(sidecar.parent / str(meta["image"]))
    states = pixels_to_states(pixels)
    h, w = states.shape
    return GridMap(width=w, height=h, resolution=resolution,
                   origin_x=float(origin[0]), origin_y=float(origin[1]),
                   cells=states)
