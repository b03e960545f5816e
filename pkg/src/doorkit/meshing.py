"""Triangle meshes and cross-section slicing into occupancy grids.

A 2D map is extracted from a 3D environment mesh by cutting the mesh
with a stack of horizontal planes and rasterizing every triangle/plane
intersection segment onto the grid; the union over all planes is the
obstacle set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import CellState, GridMap, supercover_line

# Defaults: cut a few centimeters above the floor up to the tallest
# camera mount, with a 10 cm pitch.
DEFAULT_Z_START = 0.05
DEFAULT_Z_STEP = 0.1
DEFAULT_Z_END = 0.7


@dataclass(frozen=True)
class TriangleMesh:
    vertices: np.ndarray  # (N, 3) float64, meters
    triangles: np.ndarray  # (M, 3) int64 vertex indices

    def __post_init__(self):
        vertices = np.ascontiguousarray(self.vertices, dtype=np.float64).reshape(-1, 3)
        triangles = np.ascontiguousarray(self.triangles, dtype=np.int64).reshape(-1, 3)
        if triangles.size and (triangles.min() < 0 or triangles.max() >= len(vertices)):
            raise ValueError("triangle index out of range")
        vertices.flags.writeable = False
        triangles.flags.writeable = False
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "triangles", triangles)

    def is_empty(self) -> bool:
        return len(self.vertices) == 0 or len(self.triangles) == 0


def load_obj(path) -> TriangleMesh:
    """Minimal Wavefront OBJ reader: v and f records, fan triangulation."""
    vertices = []
    faces = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if parts[0] == "v":
                if len(parts) < 4:
                    raise ValueError(f"{path}: line {lineno}: vertex needs 3 coordinates")
                vertices.append([float(p) for p in parts[1:4]])
            elif parts[0] == "f":
                idx = []
                for token in parts[1:]:
                    head = token.split("/")[0]
                    i = int(head)
                    idx.append(i - 1 if i > 0 else len(vertices) + i)
                if len(idx) < 3:
                    raise ValueError(f"{path}: line {lineno}: face needs 3+ vertices")
                for k in range(1, len(idx) - 1):
                    faces.append([idx[0], idx[k], idx[k + 1]])
    return TriangleMesh(np.array(vertices, dtype=np.float64).reshape(-1, 3),
                        np.array(faces, dtype=np.int64).reshape(-1, 3))


def _plane_heights(z_start: float, z_step: float, z_end: float) -> list[float]:
    count = int(math.floor((z_end - z_start) / z_step + 1e-9)) + 1
    return [z_start + k * z_step for k in range(count)]


def _triangle_plane_segments(tri: np.ndarray, z: float) -> list[tuple[np.ndarray, np.ndarray]]:
    """XY segments of one triangle cut by the plane at height z.

    A triangle coplanar with the plane contributes its three edges;
    a single-vertex touch contributes nothing.
    """
    d = tri[:, 2] - z
    if np.all(d > 0) or np.all(d < 0):
        return []
    points = []
    for i in range(3):
        if d[i] == 0:
            points.append(tri[i, :2])
    for i in range(3):
        j = (i + 1) % 3
        if d[i] * d[j] < 0:
            t = d[i] / (d[i] - d[j])
            points.append(tri[i, :2] + t * (tri[j, :2] - tri[i, :2]))
    # dedupe exact duplicates (shared vertices on the plane)
    unique = []
    for p in points:
        if not any(np.array_equal(p, q) for q in unique):
            unique.append(p)
    if len(unique) < 2:
        return []
    if len(unique) == 2:
        return [(unique[0], unique[1])]
    # coplanar triangle: rasterize its outline
    return [(unique[k], unique[(k + 1) % len(unique)]) for k in range(len(unique))]


def slice_mesh_to_map(mesh: TriangleMesh, resolution: float,
                      z_start: float = DEFAULT_Z_START,
                      z_step: float = DEFAULT_Z_STEP,
                      z_end: float = DEFAULT_Z_END) -> GridMap:
    """Cut the mesh with horizontal planes and aggregate obstacle cells.

    The grid covers the mesh's XY bounding rectangle padded by one cell;
    every cell touched by any intersection segment of any plane becomes
    Obstacle, everything else Free. Plane results combine by set union,
    so the per-plane work is order-independent.
    """
    if mesh.is_empty():
        raise ValueError("empty mesh")
    if not np.isfinite(mesh.vertices).all():
        raise ValueError("invalid geometry")
    if resolution <= 0:
        raise ValueError("resolution must be > 0")
    if z_step <= 0:
        raise ValueError("z_step must be > 0")
    if z_start > z_end:
        raise ValueError("z_start must be <= z_end")

    min_x, min_y = mesh.vertices[:, 0].min(), mesh.vertices[:, 1].min()
    max_x, max_y = mesh.vertices[:, 0].max(), mesh.vertices[:, 1].max()
    width = int(math.ceil((max_x - min_x) / resolution - 1e-9)) + 2
    height = int(math.ceil((max_y - min_y) / resolution - 1e-9)) + 2
    grid = GridMap.filled(width, height, resolution,
                          origin_x=min_x - resolution,
                          origin_y=min_y - resolution)

    cells = np.full((height, width), int(CellState.FREE), dtype=np.uint8)
    tris = mesh.vertices[mesh.triangles]  # (M, 3, 3)
    for z in _plane_heights(z_start, z_step, z_end):
        zs = tris[:, :, 2]
        hit = ~(np.all(zs > z, axis=1) | np.all(zs < z, axis=1))
        for tri in tris[hit]:
            for a, b in _triangle_plane_segments(tri, z):
                for row, col in supercover_line(grid, a[0], a[1], b[0], b[1]):
                    if 0 <= row < height and 0 <= col < width:
                        cells[row, col] = int(CellState.OBSTACLE)
    return grid.with_cells(cells)
