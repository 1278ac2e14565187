"""Scoring proposals with the unified head and the distillation branch, fusing
scores with objectness, and turning them into per-image detections."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .datastore import ClassEmbedding, ClassifierHead, Dataset, DistillationProjector
from .errors import DimensionMismatch, InvalidConfig, MissingFile
from .geometry import batched_nms
from .probe import sigmoid_scores


@dataclass(frozen=True)
class FusionParams:
    beta: float = 0.8
    kappa: float = 0.01
    score_threshold: float = 0.05
    nms_iou: float = 0.5
    max_detections: int = 100
    use_objectness: bool = True  # ablation switch; off drops the objectness factor

    def __post_init__(self):
        if not 0.0 <= self.beta <= 1.0:
            raise InvalidConfig("beta must lie in [0, 1]")
        if not self.kappa > 0.0:
            raise InvalidConfig("kappa must be positive")
        if not 0.0 <= self.score_threshold <= 1.0:
            raise InvalidConfig("score_threshold must lie in [0, 1]")
        if not 0.0 <= self.nms_iou <= 1.0:
            raise InvalidConfig("nms_iou must lie in [0, 1]")
        if self.max_detections <= 0:
            raise InvalidConfig("max_detections must be positive")


@dataclass(frozen=True)
class Detection:
    image_id: int
    box: tuple
    class_id: int
    score: float
    proposal: int = -1

    def to_dict(self) -> dict:
        return {"image_id": self.image_id, "class_id": self.class_id,
                "box": list(self.box), "score": self.score}


def _text_matrix(all_text) -> np.ndarray:
    if isinstance(all_text, np.ndarray):
        return all_text.astype(np.float64)
    return np.asarray([t.e_text for t in all_text], dtype=np.float64)


def distillation_scores(f_dis, all_text, kappa: float = 0.01) -> np.ndarray:
    """Softmax over classes of cosine(f_dis, text) / kappa.

    ``f_dis`` may be one vector or a batch of rows; ``all_text`` is a list of
    :class:`ClassEmbedding` or an array of text embeddings.
    """
    if not kappa > 0:
        raise ValueError("kappa must be positive")
    text = _text_matrix(all_text)
    f = np.asarray(f_dis, dtype=np.float64)
    if f.shape[-1] != text.shape[1]:
        raise DimensionMismatch(f"distillation dim {f.shape[-1]} != text dim {text.shape[1]}")
    tn = text / np.sqrt((text * text).sum(1, keepdims=True))
    fnorm = np.sqrt((f * f).sum(-1, keepdims=True))
    fn = np.divide(f, fnorm, out=np.zeros_like(f), where=fnorm > 0)
    logits = (fn[..., None, :] * tn).sum(-1) / kappa
    logits -= logits.max(-1, keepdims=True)
    e = np.exp(logits)
    return e / e.sum(-1, keepdims=True)


def fuse_scores(o, s_cls, s_dis, class_kind: str, beta: float = 0.8):
    """Final proposal score.

    base: ``o * s_cls``; novel: ``o * s_cls**beta * s_dis**(1 - beta)``.
    ``0**0`` is 1, so beta of 0 or 1 reduces exactly to a single factor.
    Works elementwise on arrays.
    """
    if class_kind == "base":
        return o * s_cls
    if class_kind == "novel":
        return o * (s_cls**beta) * (s_dis ** (1.0 - beta))
    raise ValueError(f"class_kind must be 'base' or 'novel', not {class_kind!r}")


def _objectness(dataset, props, fusion):
    if fusion.use_objectness:
        return dataset.prop_objectness[props].astype(np.float64)
    return np.ones(len(props))


def _postprocess(dataset, image_id, props, scores, class_ids, fusion) -> list[Detection]:
    # enumerate candidates proposal-major, class-id-minor so stable ordering
    # breaks score ties by lower proposal index, then lower class id
    col = np.argsort(class_ids, kind="stable")
    scores = scores[:, col]
    cids = np.asarray(class_ids)[col]
    p_pos, c_pos = np.nonzero(scores >= fusion.score_threshold)
    if len(p_pos) == 0:
        return []
    cand_scores = scores[p_pos, c_pos]
    boxes = dataset.prop_box[props[p_pos]].astype(np.float64)
    keep = batched_nms(boxes, cand_scores, cids[c_pos], fusion.nms_iou)[: fusion.max_detections]
    return [
        Detection(
            image_id=int(image_id),
            box=tuple(float(v) for v in dataset.prop_box[props[p_pos[i]]]),
            class_id=int(cids[c_pos[i]]),
            score=float(cand_scores[i]),
            proposal=int(props[p_pos[i]]),
        )
        for i in keep
    ]


def detect_image(dataset: Dataset, image_id: int, unified_head: ClassifierHead,
                 projector: DistillationProjector | None = None,
                 fusion: FusionParams = FusionParams()) -> list[Detection]:
    """Detections for one image: classifier and distillation scores fused with
    objectness, thresholded, class-wise NMS, capped. Boxes are the proposal
    boxes unchanged."""
    projector = projector if projector is not None else unified_head.projector
    if projector is None:
        raise ValueError("a distillation projector is required")
    if unified_head.d_cls != dataset.d_cls or projector.d_cls != dataset.d_cls:
        raise DimensionMismatch("head feature dim differs from the dataset")
    if projector.d_emb != dataset.d_emb:
        raise DimensionMismatch("projector output dim differs from the dataset")
    props = dataset.proposals_by_image()[image_id]
    if len(props) == 0:
        return []
    class_ids = unified_head.class_ids
    feats = dataset.prop_f_cls[props]
    s_cls = sigmoid_scores(unified_head, feats)
    s_dis = distillation_scores(projector(feats), dataset.class_embeddings(class_ids), fusion.kappa)
    o = _objectness(dataset, props, fusion)[:, None]
    novel = np.isin(class_ids, dataset.novel_ids)
    scores = np.where(
        novel,
        fuse_scores(o, s_cls, s_dis, "novel", fusion.beta),
        fuse_scores(o, s_cls, s_dis, "base", fusion.beta),
    )
    return _postprocess(dataset, image_id, props, scores, class_ids, fusion)


def baseline_similarity_detect(dataset: Dataset, image_id: int, projector: DistillationProjector,
                               all_text: list[ClassEmbedding] | None = None,
                               fusion: FusionParams = FusionParams()) -> list[Detection]:
    """Similarity-only comparison: every class scored ``o * s_dis``."""
    all_text = dataset.class_embeddings() if all_text is None else all_text
    if projector.d_cls != dataset.d_cls or projector.d_emb != dataset.d_emb:
        raise DimensionMismatch("projector dims differ from the dataset")
    props = dataset.proposals_by_image()[image_id]
    if len(props) == 0:
        return []
    s_dis = distillation_scores(projector(dataset.prop_f_cls[props]), all_text, fusion.kappa)
    scores = _objectness(dataset, props, fusion)[:, None] * s_dis
    return _postprocess(dataset, image_id, props, scores, [t.class_id for t in all_text], fusion)


def sort_detections(dets) -> list[Detection]:
    """Order by image id, then descending score (stable otherwise)."""
    return sorted(dets, key=lambda d: (d.image_id, -d.score))


def detect_split(dataset: Dataset, unified_head: ClassifierHead, fusion: FusionParams = FusionParams(),
                 split: str = "test", baseline: bool = False) -> list[Detection]:
    out = []
    for image_id in dataset.image_ids(split):
        if baseline:
            out.extend(baseline_similarity_detect(dataset, image_id, unified_head.projector,
                                                  None, fusion))
        else:
            out.extend(detect_image(dataset, image_id, unified_head, None, fusion))
    return sort_detections(out)


def write_detections(dets, path) -> Path:
    p = Path(path)
    lines = [json.dumps(d.to_dict()) for d in sort_detections(dets)]
    p.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    return p


def read_detections(path) -> list[Detection]:
    p = Path(path)
    if not p.is_file():
        raise MissingFile(f"missing detections file: {p}")
    out = []
    for line in p.read_text(encoding="utf-8").splitlines():
        if line.strip():
            r = json.loads(line)
            out.append(Detection(int(r["image_id"]), tuple(r["box"]), int(r["class_id"]),
                                 float(r["score"])))
    return out
