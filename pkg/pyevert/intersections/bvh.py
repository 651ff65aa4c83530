# pyevert/intersections/bvh.py

"""
Axis-aligned bounding box tree over mesh faces.

Candidate face pairs for self-intersection are the pairs whose boxes
overlap. :class:`FaceBVH` finds them by a self-traversal of the tree;
:func:`brute_force_pairs` tests every pair and is kept as the oracle the
tree is checked against. Both return the same sorted ``(i, j)``, ``i < j``
array.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List

import numpy as np

logger = logging.getLogger(__name__)


def face_boxes(positions: np.ndarray, faces: np.ndarray, pad: float = 0.0) -> np.ndarray:
    """(F, 2, 3) lower/upper corners, grown by ``pad`` on every side."""
    tri = positions[faces]
    return np.stack([tri.min(axis=1) - pad, tri.max(axis=1) + pad], axis=1)


def _overlap(lo_a, hi_a, lo_b, hi_b) -> np.ndarray:
    return np.all((lo_a <= hi_b) & (lo_b <= hi_a), axis=-1)


def _sorted_pairs(i: np.ndarray, j: np.ndarray) -> np.ndarray:
    if i.size == 0:
        return np.zeros((0, 2), dtype=np.int64)
    pairs = np.column_stack([np.minimum(i, j), np.maximum(i, j)]).astype(np.int64)
    return np.unique(pairs, axis=0)


def brute_force_pairs(boxes: np.ndarray, chunk: int = 512) -> np.ndarray:
    """All ``i < j`` with overlapping boxes, tested exhaustively."""
    n = boxes.shape[0]
    found_i: List[np.ndarray] = []
    found_j: List[np.ndarray] = []
    for start in range(0, n, chunk):
        rows = np.arange(start, min(start + chunk, n))
        hit = _overlap(
            boxes[rows, 0][:, None], boxes[rows, 1][:, None], boxes[None, :, 0], boxes[None, :, 1]
        )
        r, c = np.nonzero(hit)
        keep = rows[r] < c
        found_i.append(rows[r][keep])
        found_j.append(c[keep])
    return _sorted_pairs(np.concatenate(found_i), np.concatenate(found_j))


@dataclass
class _Node:
    lo: np.ndarray
    hi: np.ndarray
    start: int
    stop: int
    left: int = -1
    right: int = -1

    @property
    def is_leaf(self) -> bool:
        return self.left < 0


class FaceBVH:
    """
    Median-split bounding volume hierarchy over face boxes.

    Parameters
    ----------
    boxes : np.ndarray
        (F, 2, 3) face boxes from :func:`face_boxes`.
    leaf_size : int, default 8
        Largest number of faces in a leaf.
    """

    def __init__(self, boxes: np.ndarray, leaf_size: int = 8):
        if leaf_size < 1:
            raise ValueError(f"leaf_size must be >= 1, got {leaf_size}")
        self.boxes = np.asarray(boxes, dtype=np.float64)
        self.leaf_size = int(leaf_size)
        self.order = np.arange(self.boxes.shape[0])
        self.nodes: List[_Node] = []
        if self.boxes.shape[0]:
            self._build()

    def _build(self) -> None:
        centers = 0.5 * (self.boxes[:, 0] + self.boxes[:, 1])
        stack = [(0, self.boxes.shape[0], -1, False)]
        while stack:
            start, stop, parent, is_right = stack.pop()
            idx = self.order[start:stop]
            node = _Node(self.boxes[idx, 0].min(axis=0), self.boxes[idx, 1].max(axis=0), start, stop)
            index = len(self.nodes)
            self.nodes.append(node)
            if parent >= 0:
                if is_right:
                    self.nodes[parent].right = index
                else:
                    self.nodes[parent].left = index
            if stop - start <= self.leaf_size:
                continue
            c = centers[idx]
            axis = int(np.argmax(c.max(axis=0) - c.min(axis=0)))
            ranked = idx[np.argsort(c[:, axis], kind="stable")]
            self.order[start:stop] = ranked
            mid = start + (stop - start) // 2
            stack.append((mid, stop, index, True))
            stack.append((start, mid, index, False))

    @property
    def depth(self) -> int:
        def walk(i: int) -> int:
            node = self.nodes[i]
            return 1 if node.is_leaf else 1 + max(walk(node.left), walk(node.right))

        return walk(0) if self.nodes else 0

    def _leaf_pairs(self, a: _Node, b: _Node, same: bool):
        ia = self.order[a.start:a.stop]
        ib = self.order[b.start:b.stop]
        hit = _overlap(
            self.boxes[ia, 0][:, None], self.boxes[ia, 1][:, None],
            self.boxes[ib, 0][None], self.boxes[ib, 1][None],
        )
        r, c = np.nonzero(hit)
        if same:
            keep = r < c
            r, c = r[keep], c[keep]
        return ia[r], ib[c]

    def self_pairs(self) -> np.ndarray:
        """All face pairs ``i < j`` with overlapping boxes, sorted."""
        if not self.nodes:
            return np.zeros((0, 2), dtype=np.int64)
        found_i: List[np.ndarray] = []
        found_j: List[np.ndarray] = []
        stack = [(0, 0)]
        while stack:
            a, b = stack.pop()
            na, nb = self.nodes[a], self.nodes[b]
            if a == b:
                if na.is_leaf:
                    i, j = self._leaf_pairs(na, na, same=True)
                    found_i.append(i)
                    found_j.append(j)
                else:
                    stack.extend([(na.left, na.left), (na.right, na.right), (na.left, na.right)])
                continue
            if not _overlap(na.lo, na.hi, nb.lo, nb.hi):
                continue
            if na.is_leaf and nb.is_leaf:
                i, j = self._leaf_pairs(na, nb, same=False)
                found_i.append(i)
                found_j.append(j)
            elif nb.is_leaf or (not na.is_leaf and na.stop - na.start >= nb.stop - nb.start):
                stack.extend([(na.left, b), (na.right, b)])
            else:
                stack.extend([(a, nb.left), (a, nb.right)])
        if not found_i:
            return np.zeros((0, 2), dtype=np.int64)
        pairs = _sorted_pairs(np.concatenate(found_i), np.concatenate(found_j))
        logger.debug("BVH: %d nodes, %d overlapping face pairs", len(self.nodes), pairs.shape[0])
        return pairs
