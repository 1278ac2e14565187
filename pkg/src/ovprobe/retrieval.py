"""Pseudo-labels for novel classes by exact top-K text-to-proposal retrieval,
and the IoU-based positive/negative sampler that turns boxes into training samples."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .datastore import ClassEmbedding, Dataset
from .errors import DimensionMismatch, EmptyPseudoLabelSet, InvalidConfig, MissingFile
from .geometry import iou_matrix
from .probe import NEGATIVE, TrainSample


@dataclass(frozen=True)
class PseudoLabel:
    proposal_index: int
    class_id: int
    similarity: float


class PseudoLabelSet:
    """Retrieved (proposal, novel class) pairs, grouped by class.

    Within a class, entries are ordered by descending similarity with ties
    broken by the lower proposal index.
    """

    def __init__(self, entries):
        self.entries = list(entries)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __eq__(self, other):
        return isinstance(other, PseudoLabelSet) and self.entries == other.entries

    def by_class(self) -> dict[int, list[PseudoLabel]]:
        out: dict[int, list[PseudoLabel]] = {}
        for e in self.entries:
            out.setdefault(e.class_id, []).append(e)
        return out

    def to_json(self) -> str:
        rows = [
            {"class_id": e.class_id, "proposal_index": e.proposal_index, "similarity": e.similarity}
            for e in self.entries
        ]
        return json.dumps(rows, indent=1) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "PseudoLabelSet":
        return cls(
            PseudoLabel(int(r["proposal_index"]), int(r["class_id"]), float(r["similarity"]))
            for r in json.loads(text)
        )

    def write(self, path) -> Path:
        p = Path(path)
        p.write_text(self.to_json(), encoding="utf-8")
        return p

    @classmethod
    def read(cls, path) -> "PseudoLabelSet":
        p = Path(path)
        if not p.is_file():
            raise MissingFile(f"missing pseudo-label file: {p}")
        return cls.from_json(p.read_text(encoding="utf-8"))


@dataclass(frozen=True)
class SamplingConfig:
    iou_positive_threshold: float = 0.5
    samples_per_image: int = 512
    positive_fraction: float = 0.25
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.iou_positive_threshold < 1.0:
            raise InvalidConfig("iou_positive_threshold must lie in (0, 1)")
        if not 0.0 < self.positive_fraction <= 1.0:
            raise InvalidConfig("positive_fraction must lie in (0, 1]")
        if self.samples_per_image <= 0:
            raise InvalidConfig("samples_per_image must be positive")


def filter_proposals(dataset: Dataset, tau: float = 0.6) -> list[int]:
    """Training-split proposals with objectness strictly above ``tau``."""
    if not 0.0 <= tau <= 1.0:
        raise ValueError("tau must lie in [0, 1]")
    keep = (dataset.proposal_split() == "train") & (dataset.prop_objectness > tau)
    return np.flatnonzero(keep).tolist()


def cosine_similarities(query, vectors) -> np.ndarray:
    """Cosine between ``query`` and each row of ``vectors``.

    Rows with zero norm score -1 so they rank last.
    """
    q = np.asarray(query, dtype=np.float64).reshape(-1)
    v = np.asarray(vectors, dtype=np.float64)
    if v.ndim != 2 or v.shape[1] != len(q):
        raise DimensionMismatch(f"query dim {len(q)} vs vectors {v.shape}")
    qn = np.sqrt((q * q).sum())
    if qn == 0:
        raise ValueError("query vector has zero norm")
    norms = np.sqrt((v * v).sum(1))
    sims = np.full(len(v), -1.0)
    ok = norms > 0
    sims[ok] = ((v[ok] / norms[ok, None]) * (q / qn)).sum(1)
    return sims


def topk_order(scores, k: int) -> np.ndarray:
    """Positions of the ``k`` largest scores, descending, ties by lower position.

    Exact: partitions around the k-th value, then fully orders only the
    candidates at or above it.
    """
    s = np.asarray(scores, dtype=np.float64)
    n = len(s)
    k = min(k, n)
    if k <= 0:
        return np.zeros(0, dtype=np.int64)
    if k < n:
        kth = -np.partition(-s, k - 1)[k - 1]
        cand = np.flatnonzero(s >= kth)
    else:
        cand = np.arange(n)
    order = np.lexsort((cand, -s[cand]))
    return cand[order[:k]]


def retrieve_topk(dataset: Dataset, filtered, novel_classes: list[ClassEmbedding], k: int = 100
                  ) -> PseudoLabelSet:
    """For each novel class, the ``k`` filtered proposals closest to its text embedding.

    A proposal may be retrieved for several classes.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    pool = np.asarray(filtered, dtype=np.int64).reshape(-1)
    emb = dataset.prop_e_img[pool]
    entries = []
    for cls in novel_classes:
        if len(cls.e_text) != dataset.d_emb:
            raise DimensionMismatch(f"class {cls.class_id}: text dim {len(cls.e_text)} != {dataset.d_emb}")
        if len(pool) == 0:
            continue
        sims = cosine_similarities(cls.e_text, emb)
        for pos in topk_order(sims, k):
            entries.append(PseudoLabel(int(pool[pos]), int(cls.class_id), float(sims[pos])))
    return PseudoLabelSet(entries)


def _assign(dataset, props, ref_boxes, ref_classes, thr):
    """Label per proposal: class of the best-overlapping reference box, or NEGATIVE."""
    labels = np.full(len(props), NEGATIVE, dtype=np.int64)
    if len(ref_boxes) == 0 or len(props) == 0:
        return labels
    # order references by class id so argmax's first-max rule breaks IoU ties by lower class
    order = np.argsort(ref_classes, kind="stable")
    ref_boxes, ref_classes = ref_boxes[order], ref_classes[order]
    ious = iou_matrix(dataset.prop_box[props], ref_boxes)
    best = ious.argmax(1)
    hit = ious[np.arange(len(props)), best] > thr
    labels[hit] = ref_classes[best[hit]]
    return labels


def _subsample(props, labels, config: SamplingConfig, image_id: int):
    pos = np.flatnonzero(labels != NEGATIVE)
    neg = np.flatnonzero(labels == NEGATIVE)
    n_pos = min(len(pos), int(config.samples_per_image * config.positive_fraction))
    n_neg = min(len(neg), config.samples_per_image - n_pos)
    rng = np.random.default_rng([config.seed, image_id])
    if n_pos < len(pos):
        pos = np.sort(rng.choice(pos, n_pos, replace=False))
    if n_neg < len(neg):
        neg = np.sort(rng.choice(neg, n_neg, replace=False))
    keep = np.sort(np.concatenate([pos, neg]))
    return [TrainSample(int(props[i]), int(labels[i])) for i in keep]


def _sample_against(dataset, boxes_by_image, config):
    samples = []
    by_image = dataset.proposals_by_image()
    for image_id in dataset.image_ids("train"):
        props = by_image[image_id]
        ref = boxes_by_image.get(image_id)
        if ref is None:
            labels = np.full(len(props), NEGATIVE, dtype=np.int64)
        else:
            labels = _assign(dataset, props, ref[0], ref[1], config.iou_positive_threshold)
        samples.extend(_subsample(props, labels, config, image_id))
    return samples


def sample_pos_neg(dataset: Dataset, pseudo: PseudoLabelSet, config: SamplingConfig = SamplingConfig()
                   ) -> list[TrainSample]:
    """Training samples for the novel head from pseudo ground truth.

    A proposal whose IoU with some pseudo box in its image is strictly above
    the threshold takes that box's class (highest IoU wins, ties to the lower
    class id); every other proposal of every training image is a negative.
    Each image is then subsampled to at most ``samples_per_image`` with at
    most ``positive_fraction`` positives, using a per-image seeded stream.
    """
    if len(pseudo) == 0:
        raise EmptyPseudoLabelSet("no pseudo labels to sample from")
    refs: dict[int, tuple[list, list]] = {}
    seen = set()
    for e in pseudo:
        key = (e.proposal_index, e.class_id)
        if key in seen:
            continue
        seen.add(key)
        img = int(dataset.prop_image[e.proposal_index])
        boxes, classes = refs.setdefault(img, ([], []))
        boxes.append(dataset.prop_box[e.proposal_index])
        classes.append(e.class_id)
    arrays = {
        img: (np.asarray(b, dtype=np.float64), np.asarray(c, dtype=np.int64))
        for img, (b, c) in refs.items()
    }
    return _sample_against(dataset, arrays, config)


def sample_from_annotations(dataset: Dataset, config: SamplingConfig = SamplingConfig(),
                            class_ids=None) -> list[TrainSample]:
    """Same sampler, with the annotated training boxes as references."""
    keep = dataset.gt_split == "train"
    if class_ids is not None:
        keep &= np.isin(dataset.gt_class, list(class_ids))
    refs = {}
    for img in np.unique(dataset.gt_image[keep]):
        m = keep & (dataset.gt_image == img)
        refs[int(img)] = (dataset.gt_box[m], dataset.gt_class[m])
    return _sample_against(dataset, refs, config)
