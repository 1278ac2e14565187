"""Axis-aligned boxes in (x1, y1, x2, y2) corner convention.

Areas are continuous, ``(x2 - x1) * (y2 - y1)``, with no +1 pixel term.
"""

from __future__ import annotations

import math
from typing import NamedTuple, Sequence

import numpy as np

from ._backend import kernels


class BoxXYXY(NamedTuple):
    x1: float
    y1: float
    x2: float
    y2: float

    @classmethod
    def make(cls, x1, y1, x2, y2) -> "BoxXYXY":
        """Validated constructor: finite coordinates, non-negative extents."""
        vals = tuple(float(v) for v in (x1, y1, x2, y2))
        if not all(math.isfinite(v) for v in vals):
            raise ValueError(f"non-finite box coordinates {vals}")
        if vals[2] < vals[0] or vals[3] < vals[1]:
            raise ValueError(f"negative box extent {vals}")
        return cls(*vals)

    @property
    def area(self) -> float:
        return (self.x2 - self.x1) * (self.y2 - self.y1)


def as_boxes(boxes) -> np.ndarray:
    """Coerce to a C-contiguous float64 ``(N, 4)`` array and validate it."""
    arr = np.ascontiguousarray(np.asarray(boxes, dtype=np.float64).reshape(-1, 4))
    check_boxes(arr)
    return arr


def check_boxes(arr: np.ndarray) -> None:
    if not np.all(np.isfinite(arr)):
        raise ValueError("box coordinates must be finite")
    if np.any(arr[:, 2] < arr[:, 0]) or np.any(arr[:, 3] < arr[:, 1]):
        raise ValueError("boxes must satisfy x1 <= x2 and y1 <= y2")


def area(boxes) -> np.ndarray:
    b = as_boxes(boxes)
    return (b[:, 2] - b[:, 0]) * (b[:, 3] - b[:, 1])


def iou(a: Sequence[float], b: Sequence[float]) -> float:
    """IoU of two boxes; 0 when both are degenerate (zero union)."""
    return float(kernels.iou_matrix(as_boxes(a), as_boxes(b))[0, 0])


def iou_matrix(a, b) -> np.ndarray:
    """Pairwise IoU, shape ``(len(a), len(b))``."""
    return kernels.iou_matrix(as_boxes(a), as_boxes(b))


def score_order(scores) -> np.ndarray:
    """Indices by descending score; equal scores keep the lower index first."""
    s = np.asarray(scores, dtype=np.float64)
    return np.argsort(-s, kind="stable").astype(np.int64)


def nms(boxes, scores, iou_threshold: float = 0.5) -> list[int]:
    """Greedy non-maximum suppression.

    Returns kept indices in descending-score order. A box is suppressed when
    its IoU with an already kept box is strictly above ``iou_threshold``.
    """
    if not 0.0 <= iou_threshold <= 1.0:
        raise ValueError("iou_threshold must lie in [0, 1]")
    b = as_boxes(boxes)
    s = np.asarray(scores, dtype=np.float64).reshape(-1)
    if len(s) != len(b):
        raise ValueError("boxes and scores differ in length")
    if len(b) == 0:
        return []
    if not np.all(np.isfinite(s)):
        raise ValueError("scores must be finite")
    return kernels.nms_sorted(b, score_order(s), float(iou_threshold)).tolist()


def batched_nms(boxes, scores, groups, iou_threshold: float = 0.5) -> np.ndarray:
    """NMS run independently inside each group (e.g. class id).

    Output indices are sorted by descending score, ties by lower index.
    """
    b = as_boxes(boxes)
    s = np.asarray(scores, dtype=np.float64).reshape(-1)
    g = np.asarray(groups).reshape(-1)
    kept = []
    for key in np.unique(g):
        idx = np.flatnonzero(g == key)
        local = kernels.nms_sorted(np.ascontiguousarray(b[idx]), score_order(s[idx]),
                                   float(iou_threshold))
        kept.append(idx[local])
    if not kept:
        return np.zeros(0, dtype=np.int64)
    out = np.sort(np.concatenate(kept))
    return out[score_order(s[out])]
