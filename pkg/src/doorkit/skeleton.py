"""Thinning of cell sets to 1-cell-wide skeletons.

Classic two-subpass parallel thinning, followed by a conservative
cleanup pass that removes residual 2x2 blocks one simple cell at a
time (a cell is simple when its set neighbors form a single
8-connected cluster, so deleting it cannot split the component).
Components the parallel passes erase completely (an isolated 2x2
block is the canonical case) keep one representative cell, so the
8-connected component count is always preserved. The whole procedure
iterates to a fixpoint.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

# Neighbor ring order: N, NE, E, SE, S, SW, W, NW.
_RING = ((-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1))


def _neighbors(bitmap: np.ndarray) -> list[np.ndarray]:
    h, w = bitmap.shape
    padded = np.pad(bitmap, 1, constant_values=False)
    out = []
    for dr, dc in _RING:
        out.append(padded[1 + dr:1 + dr + h, 1 + dc:1 + dc + w])
    return out


def _zhang_suen_pass(bitmap: np.ndarray, second: bool) -> np.ndarray:
    n = _neighbors(bitmap)
    ints = [a.astype(np.int8) for a in n]
    b = sum(ints)
    seq = ints + [ints[0]]
    a = sum(((seq[i] == 0) & (seq[i + 1] == 1)) for i in range(8))
    p2, p4, p6, p8 = n[0], n[2], n[4], n[6]
    if not second:
        cond = ~(p2 & p4 & p6) & ~(p4 & p6 & p8)
    else:
        cond = ~(p2 & p4 & p8) & ~(p2 & p6 & p8)
    removable = bitmap & (b >= 2) & (b <= 6) & (a == 1) & cond
    return bitmap & ~removable


def _thin_until_stable(bitmap: np.ndarray) -> np.ndarray:
    while True:
        after = _zhang_suen_pass(bitmap, second=False)
        after = _zhang_suen_pass(after, second=True)
        if np.array_equal(after, bitmap):
            return after
        bitmap = after


# 8-adjacency between ring positions (consecutive cells plus the
# cardinal pairs that touch diagonally across a corner).
_RING_ADJ = [[] for _ in range(8)]
for _i in range(8):
    for _j in range(8):
        if _i != _j:
            dr = _RING[_i][0] - _RING[_j][0]
            dc = _RING[_i][1] - _RING[_j][1]
            if abs(dr) <= 1 and abs(dc) <= 1:
                _RING_ADJ[_i].append(_j)


def _component_count(mask_bits: int) -> int:
    todo = {i for i in range(8) if mask_bits >> i & 1}
    count = 0
    while todo:
        count += 1
        stack = [todo.pop()]
        while stack:
            v = stack.pop()
            for u in _RING_ADJ[v]:
                if u in todo:
                    todo.remove(u)
                    stack.append(u)
    return count


_SIMPLE = np.array([_component_count(m) == 1 for m in range(256)], dtype=bool)


def _neighbor_bits(bitmap: np.ndarray) -> np.ndarray:
    bits = np.zeros(bitmap.shape, dtype=np.int32)
    for i, arr in enumerate(_neighbors(bitmap)):
        bits |= arr.astype(np.int32) << i
    return bits


def _two_by_two_members(bitmap: np.ndarray) -> np.ndarray:
    blocks = bitmap[:-1, :-1] & bitmap[:-1, 1:] & bitmap[1:, :-1] & bitmap[1:, 1:]
    member = np.zeros_like(bitmap)
    member[:-1, :-1] |= blocks
    member[:-1, 1:] |= blocks
    member[1:, :-1] |= blocks
    member[1:, 1:] |= blocks
    return member


def _clear_square_blocks(bitmap: np.ndarray) -> np.ndarray:
    """Delete simple cells from remaining 2x2 blocks, one at a time."""
    bitmap = bitmap.copy()
    while True:
        member = _two_by_two_members(bitmap)
        if not member.any():
            return bitmap
        candidates = member & _SIMPLE[_neighbor_bits(bitmap)]
        rows, cols = np.nonzero(candidates)
        if len(rows) == 0:
            return bitmap  # nothing deletable without splitting
        bitmap[rows[0], cols[0]] = False


def skeletonize(cells: set[tuple[int, int]]) -> set[tuple[int, int]]:
    """Thin a cell set to a 1-cell-wide, component-preserving skeleton."""
    if not cells:
        return set()
    rows = [r for r, _ in cells]
    cols = [c for _, c in cells]
    r0, c0 = min(rows), min(cols)
    h = max(rows) - r0 + 1
    w = max(cols) - c0 + 1
    bitmap = np.zeros((h, w), dtype=bool)
    for r, c in cells:
        bitmap[r - r0, c - c0] = True

    labels, count = ndimage.label(bitmap, structure=np.ones((3, 3), dtype=bool))
    while True:
        after = _clear_square_blocks(_thin_until_stable(bitmap))
        if np.array_equal(after, bitmap):
            break
        bitmap = after

    for cid in range(1, count + 1):
        comp = labels == cid
        if not (bitmap & comp).any():
            rows2, cols2 = np.nonzero(comp)
            bitmap[rows2[0], cols2[0]] = True

    rr, cc = np.nonzero(bitmap)
    return {(int(r) + r0, int(c) + c0) for r, c in zip(rr, cc)}
