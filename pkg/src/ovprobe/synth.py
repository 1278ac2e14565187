"""Seeded synthetic detection datasets built from frozen-feature assumptions.

Construction per class ``c``:

* an orthonormal embedding prototype ``u_c``; the text embedding and the
  image embedding of every proposal drawn around a class-``c`` object are
  ``u_c`` plus isotropic noise. Image embeddings do not depend on how well
  the proposal box fits the object.
* a feature prototype ``p_c``, orthogonal to the embedding subspace.
  ``f_cls = gain * (scale * iou * p_c + R @ e_img + noise)`` where ``R`` embeds the
  image embedding into the remaining feature directions. Only the
  ``p_c`` term carries box quality, so a linear probe can separate tight
  boxes from loose duplicates while a linear projector can recover ``e_img``.
* objectness rises linearly with IoU, plus Gaussian noise.

Training images annotate base classes only; novel objects are present but
unlabelled. Test images annotate every class.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields

import numpy as np

from .datastore import ClassInfo, Dataset, ImageInfo
from .errors import InvalidConfig


@dataclass(frozen=True)
class SynthConfig:
    n_base: int = 5
    n_novel: int = 3
    train_images: int = 200
    test_images: int = 100
    objects_per_image: int = 3
    proposals_per_object: int = 6
    low_quality_fraction: float = 0.3
    background_per_image: int = 4
    distractors_per_image: int = 2
    d_cls: int = 64
    d_emb: int = 32
    sigma_cls: float = 0.5
    sigma_emb: float = 0.25
    feature_scale: float = 4.0
    feature_gain: float = 1.0
    quality_noise: float = 0.15
    objectness_base: float = 0.62
    objectness_slope: float = 0.15
    objectness_noise: float = 0.15
    background_objectness: float = 0.15
    image_width: float = 640.0
    image_height: float = 480.0
    min_object_size: float = 60.0
    max_object_size: float = 180.0
    high_quality_iou: tuple = (0.7, 1.0)
    low_quality_iou: tuple = (0.1, 0.45)

    def __post_init__(self):
        object.__setattr__(self, "high_quality_iou", tuple(self.high_quality_iou))
        object.__setattr__(self, "low_quality_iou", tuple(self.low_quality_iou))
        positive = ("n_base", "n_novel", "train_images", "test_images", "objects_per_image",
                    "proposals_per_object", "d_cls", "d_emb", "feature_scale", "feature_gain",
                    "image_width", "image_height", "min_object_size")
        for name in positive:
            if not getattr(self, name) > 0:
                raise InvalidConfig(f"{name} must be positive")
        for name in ("background_per_image", "distractors_per_image", "sigma_cls", "sigma_emb", "objectness_noise",
                     "quality_noise"):
            if getattr(self, name) < 0:
                raise InvalidConfig(f"{name} must be non-negative")
        if not 0.0 <= self.low_quality_fraction <= 1.0:
            raise InvalidConfig("low_quality_fraction must lie in [0, 1]")
        n_classes = self.n_base + self.n_novel
        if n_classes > self.d_emb:
            raise InvalidConfig("d_emb must be at least the number of classes")
        if self.d_cls < self.d_emb + n_classes:
            raise InvalidConfig("d_cls must be at least d_emb + number of classes")
        if self.max_object_size < self.min_object_size:
            raise InvalidConfig("max_object_size must be >= min_object_size")
        if self.max_object_size * self.objects_per_image > max(self.image_width, self.image_height) * 3:
            raise InvalidConfig("objects do not fit into the image")

    @classmethod
    def from_dict(cls, data: dict) -> "SynthConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise InvalidConfig(f"unknown synth fields: {sorted(unknown)}")
        return cls(**data)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["high_quality_iou"] = list(self.high_quality_iou)
        d["low_quality_iou"] = list(self.low_quality_iou)
        return d


def _orthonormal_rows(m: np.ndarray) -> np.ndarray:
    # Gram-Schmidt without LAPACK/BLAS so output never depends on thread count
    out = []
    for row in m:
        v = row.copy()
        for u in out:
            v -= (v * u).sum() * u
        out.append(v / np.sqrt((v * v).sum()))
    return np.asarray(out)


def _box_iou(a, b) -> float:
    w = min(a[2], b[2]) - max(a[0], b[0])
    h = min(a[3], b[3]) - max(a[1], b[1])
    if w <= 0 or h <= 0:
        return 0.0
    inter = w * h
    union = (a[2] - a[0]) * (a[3] - a[1]) + (b[2] - b[0]) * (b[3] - b[1]) - inter
    return inter / union


def _clip(box, width, height):
    x1, y1, x2, y2 = box
    x1, x2 = min(max(x1, 0.0), width), min(max(x2, 0.0), width)
    y1, y2 = min(max(y1, 0.0), height), min(max(y2, 0.0), height)
    return [x1, y1, max(x1, x2), max(y1, y2)]


def _f32box(box):
    return [float(np.float32(v)) for v in box]


def _place_objects(rng, cfg, n):
    boxes = []
    while len(boxes) < n:
        for _ in range(1000):
            w = rng.uniform(cfg.min_object_size, cfg.max_object_size)
            h = rng.uniform(cfg.min_object_size, cfg.max_object_size)
            x1 = rng.uniform(0, cfg.image_width - w)
            y1 = rng.uniform(0, cfg.image_height - h)
            cand = _f32box([x1, y1, x1 + w, y1 + h])
            if all(_box_iou(cand, b) == 0.0 for b in boxes):
                boxes.append(cand)
                break
        else:
            raise InvalidConfig("could not place non-overlapping objects; image too small")
    return boxes


def _jitter(rng, cfg, gt, band, loose):
    """Draw a proposal around ``gt`` whose IoU falls inside ``band``."""
    x1, y1, x2, y2 = gt
    w, h = x2 - x1, y2 - y1
    lo, hi = band
    for _ in range(10000):
        if loose:
            # shift the box off the object and rescale it
            cx = (x1 + x2) / 2 + rng.uniform(-0.8, 0.8) * w
            cy = (y1 + y2) / 2 + rng.uniform(-0.8, 0.8) * h
            nw, nh = w * rng.uniform(0.5, 1.6), h * rng.uniform(0.5, 1.6)
            cand = [cx - nw / 2, cy - nh / 2, cx + nw / 2, cy + nh / 2]
        else:
            cand = [x1 + rng.normal(0, 0.06) * w, y1 + rng.normal(0, 0.06) * h,
                    x2 + rng.normal(0, 0.06) * w, y2 + rng.normal(0, 0.06) * h]
        cand = _f32box(_clip(cand, cfg.image_width, cfg.image_height))
        if cand[2] - cand[0] < 1.0 or cand[3] - cand[1] < 1.0:
            continue
        q = _box_iou(cand, gt)
        if lo <= q <= hi:
            return cand, q
    raise InvalidConfig(f"could not draw a proposal with IoU in {band}")


def _background(rng, cfg, gts):
    for _ in range(10000):
        w = rng.uniform(cfg.min_object_size / 2, cfg.max_object_size)
        h = rng.uniform(cfg.min_object_size / 2, cfg.max_object_size)
        x1 = rng.uniform(0, cfg.image_width - w)
        y1 = rng.uniform(0, cfg.image_height - h)
        cand = _f32box([x1, y1, x1 + w, y1 + h])
        if all(_box_iou(cand, g) < 0.1 for g in gts):
            return cand
    raise InvalidConfig("could not place a background proposal")


def generate_synthetic(config: SynthConfig = SynthConfig(), seed: int = 0) -> Dataset:
    """Build a dataset deterministically from ``(config, seed)``."""
    cfg = config
    rng = np.random.default_rng(seed)
    n_classes = cfg.n_base + cfg.n_novel

    basis = _orthonormal_rows(rng.normal(size=(cfg.d_emb + n_classes, cfg.d_cls)))
    embed_map = basis[:cfg.d_emb].T  # (d_cls, d_emb), orthonormal columns
    feat_proto = basis[cfg.d_emb:]  # (n_classes, d_cls), orthogonal to embed_map
    emb_proto = _orthonormal_rows(rng.normal(size=(n_classes, cfg.d_emb)))

    emb_noise = cfg.sigma_emb / np.sqrt(cfg.d_emb)
    cls_noise = cfg.sigma_cls / np.sqrt(cfg.d_cls)

    classes = [ClassInfo(c, f"base_{c}", "base") for c in range(cfg.n_base)]
    classes += [ClassInfo(cfg.n_base + j, f"novel_{j}", "novel") for j in range(cfg.n_novel)]
    text = emb_proto + rng.normal(0, emb_noise, size=emb_proto.shape)

    images, p_img, p_box, p_obj, p_f, p_e, t_cls, t_iou = [], [], [], [], [], [], [], []
    g_img, g_cls, g_box, g_split = [], [], [], []
    novel = set(range(cfg.n_base, n_classes))
    image_id = 0
    for split, n_images in (("train", cfg.train_images), ("test", cfg.test_images)):
        n_obj = n_images * cfg.objects_per_image
        labels = rng.permutation(np.arange(n_obj) % n_classes)
        for i in range(n_images):
            images.append(ImageInfo(image_id, cfg.image_width, cfg.image_height, split))
            gts = _place_objects(rng, cfg, cfg.objects_per_image)
            rows = []
            for j, gt in enumerate(gts):
                c = int(labels[i * cfg.objects_per_image + j])
                if split == "test" or c not in novel:
                    g_img.append(image_id)
                    g_cls.append(c)
                    g_box.append(gt)
                    g_split.append(split)
                for _ in range(cfg.proposals_per_object):
                    loose = rng.random() < cfg.low_quality_fraction
                    band = cfg.low_quality_iou if loose else cfg.high_quality_iou
                    box, q = _jitter(rng, cfg, gt, band, loose)
                    e = emb_proto[c] + rng.normal(0, emb_noise, cfg.d_emb)
                    rows.append((box, q, c, e, None))
            for _ in range(cfg.background_per_image):
                box = _background(rng, cfg, gts)
                e = rng.normal(size=cfg.d_emb)
                e /= np.sqrt((e * e).sum())
                rows.append((box, 0.0, -1, e, None))
            for _ in range(cfg.distractors_per_image):
                box = _background(rng, cfg, gts)
                look = int(rng.integers(n_classes))
                e = emb_proto[look] + rng.normal(0, emb_noise, cfg.d_emb)
                rows.append((box, 0.0, -1, e, (look, rng.uniform(*cfg.high_quality_iou))))
            for k in rng.permutation(len(rows)):
                box, q, c, e, fake = rows[k]
                if fake is not None:
                    proto, q_seen = feat_proto[fake[0]], fake[1]
                elif c >= 0:
                    proto, q_seen = feat_proto[c], q + rng.normal(0, cfg.quality_noise)
                else:
                    proto, q_seen = np.zeros(cfg.d_cls), 0.0
                f = cfg.feature_gain * (cfg.feature_scale * q_seen * proto + (embed_map * e).sum(1)
                                        + rng.normal(0, cls_noise, cfg.d_cls))
                o_mean = cfg.objectness_base + cfg.objectness_slope * q if c >= 0 else cfg.background_objectness
                o = o_mean + rng.normal(0, cfg.objectness_noise)
                p_img.append(image_id)
                p_box.append(box)
                p_obj.append(min(max(o, 0.0), 1.0))
                p_f.append(f)
                p_e.append(e)
                t_cls.append(c)
                t_iou.append(q)
            image_id += 1

    d_cls, d_emb = cfg.d_cls, cfg.d_emb
    return Dataset(
        d_cls=d_cls,
        d_emb=d_emb,
        classes=classes,
        images=images,
        prop_image=p_img,
        prop_box=np.asarray(p_box, dtype=np.float32).reshape(-1, 4),
        prop_objectness=np.asarray(p_obj, dtype=np.float32),
        prop_f_cls=np.asarray(p_f, dtype=np.float32).reshape(-1, d_cls),
        prop_e_img=np.asarray(p_e, dtype=np.float32).reshape(-1, d_emb),
        text_class=np.arange(n_classes),
        text_emb=text.astype(np.float32),
        gt_image=g_img,
        gt_class=g_cls,
        gt_box=np.asarray(g_box, dtype=np.float64).reshape(-1, 4),
        gt_split=g_split,
        truth_class=t_cls,
        truth_iou=t_iou,
    )
