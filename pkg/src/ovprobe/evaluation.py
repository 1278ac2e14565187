"""Box AP at a single IoU threshold, per class and aggregated over base,
novel and all classes."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from ._backend import kernels
from .datastore import Dataset
from .errors import DanglingReference
from .geometry import as_boxes


@dataclass
class EvalReport:
    per_class: dict[int, float]
    ap_novel: float
    ap_base: float
    ap_all: float
    gt_counts: dict[int, int] = field(default_factory=dict)
    det_counts: dict[int, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "per_class": {str(k): v for k, v in sorted(self.per_class.items())},
            "ap_novel": self.ap_novel,
            "ap_base": self.ap_base,
            "ap_all": self.ap_all,
            "counts": {
                "gt": {str(k): v for k, v in sorted(self.gt_counts.items())},
                "detections": {str(k): v for k, v in sorted(self.det_counts.items())},
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_text(self, names: dict[int, str] | None = None) -> str:
        names = names or {}
        lines = [f"{'AP_novel':>10} {'AP_base':>10} {'AP':>10}",
                 f"{100 * self.ap_novel:10.1f} {100 * self.ap_base:10.1f} {100 * self.ap_all:10.1f}",
                 "",
                 f"{'class':<16} {'AP50':>8} {'#gt':>6} {'#det':>6}"]
        for c in sorted(self.per_class):
            lines.append(f"{names.get(c, str(c)):<16} {100 * self.per_class[c]:8.1f} "
                         f"{self.gt_counts.get(c, 0):6d} {self.det_counts.get(c, 0):6d}")
        return "\n".join(lines) + "\n"


def _match_arrays(det_boxes, det_images, gt_boxes, gt_images, iou_threshold):
    gt_images = np.asarray(gt_images, dtype=np.int64)
    order = np.argsort(gt_images, kind="stable")
    sorted_imgs = gt_images[order]
    det_images = np.asarray(det_images, dtype=np.int64)
    lo = np.searchsorted(sorted_imgs, det_images, "left").astype(np.int64)
    hi = np.searchsorted(sorted_imgs, det_images, "right").astype(np.int64)
    return kernels.greedy_match(as_boxes(det_boxes), as_boxes(gt_boxes)[order],
                                lo, hi, float(iou_threshold))


def match_detections(dets, gts, iou_threshold: float = 0.5) -> np.ndarray:
    """TP/FP flag per detection for one class.

    ``dets`` must already be in descending score order. Each detection takes
    the unmatched ground truth of its image with the highest IoU at or above
    the threshold (equal IoU: lower ground-truth index); a ground truth is
    matched at most once.
    """
    if len(dets) == 0:
        return np.zeros(0, dtype=bool)
    return _match_arrays([d.box for d in dets], [d.image_id for d in dets],
                         np.asarray([g.box for g in gts], dtype=np.float64).reshape(-1, 4),
                         [g.image_id for g in gts], iou_threshold)


def average_precision(flags, n_gt: int) -> float:
    """Area under the precision envelope of the PR curve (all-point interpolation)."""
    if n_gt <= 0:
        return 0.0
    tp = np.asarray(flags, dtype=bool)
    if len(tp) == 0:
        return 0.0
    ctp = np.cumsum(tp)
    recall = ctp / n_gt
    precision = ctp / np.arange(1, len(tp) + 1)
    envelope = np.maximum.accumulate(precision[::-1])[::-1]
    steps = np.diff(np.concatenate([[0.0], recall]))
    return float((steps * envelope).sum())


def _mean(values) -> float:
    return float(np.mean(values)) if values else 0.0


def evaluate_dataset(dataset: Dataset, detections, iou_threshold: float = 0.5,
                     split: str = "test") -> EvalReport:
    """Per-class AP and the novel/base/all means over classes with ground truth."""
    known_img = set(dataset.image_ids(split))
    known_cls = set(dataset.class_ids)
    for d in detections:
        if d.image_id not in known_img:
            raise DanglingReference(f"detection on unknown {split} image {d.image_id}")
        if d.class_id not in known_cls:
            raise DanglingReference(f"detection with unknown class {d.class_id}")

    gt_mask = dataset.gt_split == split
    per_class, gt_counts, det_counts = {}, {}, {}
    for c in dataset.class_ids:
        m = gt_mask & (dataset.gt_class == c)
        n_gt = int(m.sum())
        dets = [d for d in detections if d.class_id == c]
        # descending score; ties by lower image id, then input order
        dets.sort(key=lambda d: (-d.score, d.image_id))
        gt_counts[c], det_counts[c] = n_gt, len(dets)
        if n_gt == 0:
            continue
        if dets:
            flags = _match_arrays([d.box for d in dets], [d.image_id for d in dets],
                                  dataset.gt_box[m], dataset.gt_image[m], iou_threshold)
        else:
            flags = np.zeros(0, dtype=bool)
        per_class[c] = average_precision(flags, n_gt)

    novel = [per_class[c] for c in dataset.novel_ids if c in per_class]
    base = [per_class[c] for c in dataset.base_ids if c in per_class]
    return EvalReport(per_class, _mean(novel), _mean(base), _mean(novel + base),
                      gt_counts, det_counts)
