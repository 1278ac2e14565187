"""Dataset model and the on-disk formats.

A dataset directory holds a human-readable JSON manifest plus binary bulk
files. Every multi-byte value is little-endian and vectors are float32.

Proposals (``OVPF``)::

    magic "OVPF" | version u16 | count u64 | d_cls u32 | d_emb u32
    count x (image_id u32, box 4xf32, objectness f32, f_cls d_cls xf32, e_img d_emb xf32)

Text embeddings (``OVTE``)::

    magic "OVTE" | version u16 | count u64 | d_emb u32
    count x (class_id u32, e_text d_emb xf32)

Head checkpoints (``OVHD``)::

    magic "OVHD" | version u16 | count u64 | d_cls u32
    class ids count xu32 | weights count*d_cls xf32 (row-major) | biases count xf32
    has_projector u8 [| d_emb u32 | weights d_emb*d_cls xf32 | biases d_emb xf32]
"""

from __future__ import annotations

import json
import os
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    BadMagic,
    DanglingReference,
    DimensionMismatch,
    InvalidDataset,
    IoFailure,
    MissingFile,
)

FORMAT_VERSION = 1
MANIFEST_NAME = "manifest.json"
PROPOSALS_NAME = "proposals.bin"
TEXT_NAME = "text_embeddings.bin"
ANNOTATIONS_NAME = "annotations.json"
TRUTH_NAME = "truth.json"

_PROPOSAL_HEADER = struct.Struct("<4sHQII")
_TEXT_HEADER = struct.Struct("<4sHQI")
_HEAD_HEADER = struct.Struct("<4sHQI")

SPLITS = ("train", "test")
KINDS = ("base", "novel")


@dataclass(frozen=True)
class ClassInfo:
    id: int
    name: str
    split: str  # "base" or "novel"


@dataclass(frozen=True)
class ImageInfo:
    id: int
    width: float
    height: float
    split: str  # "train" or "test"


@dataclass(frozen=True)
class ProposalRecord:
    image_id: int
    box: tuple
    objectness: float
    f_cls: np.ndarray
    e_img: np.ndarray


@dataclass(frozen=True)
class ClassEmbedding:
    class_id: int
    name: str
    e_text: np.ndarray


@dataclass(frozen=True)
class GroundTruthBox:
    image_id: int
    box: tuple
    class_id: int
    split: str


def _f32(a, shape) -> np.ndarray:
    return np.ascontiguousarray(np.asarray(a, dtype=np.float32).reshape(shape))


@dataclass(eq=False)
class Dataset:
    """Struct-of-arrays dataset.

    Proposal arrays are float32 (the stored precision), ground-truth boxes
    float64. ``truth_class``/``truth_iou`` are optional generator provenance:
    the class of the object each proposal was drawn around (-1 for
    background) and its IoU with that object.
    """

    d_cls: int
    d_emb: int
    classes: list[ClassInfo]
    images: list[ImageInfo]
    prop_image: np.ndarray
    prop_box: np.ndarray
    prop_objectness: np.ndarray
    prop_f_cls: np.ndarray
    prop_e_img: np.ndarray
    text_class: np.ndarray
    text_emb: np.ndarray
    gt_image: np.ndarray
    gt_class: np.ndarray
    gt_box: np.ndarray
    gt_split: np.ndarray
    truth_class: np.ndarray | None = None
    truth_iou: np.ndarray | None = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        n = len(np.asarray(self.prop_image).reshape(-1))
        self.prop_image = np.asarray(self.prop_image, dtype=np.int64).reshape(-1)
        self.prop_box = _f32(self.prop_box, (n, 4))
        self.prop_objectness = _f32(self.prop_objectness, (n,))
        self.prop_f_cls = np.ascontiguousarray(np.asarray(self.prop_f_cls, dtype=np.float32))
        self.prop_e_img = np.ascontiguousarray(np.asarray(self.prop_e_img, dtype=np.float32))
        if n == 0:
            self.prop_f_cls = self.prop_f_cls.reshape(0, self.d_cls)
            self.prop_e_img = self.prop_e_img.reshape(0, self.d_emb)
        self.text_class = np.asarray(self.text_class, dtype=np.int64).reshape(-1)
        self.text_emb = np.ascontiguousarray(np.asarray(self.text_emb, dtype=np.float32))
        if len(self.text_class) == 0:
            self.text_emb = self.text_emb.reshape(0, self.d_emb)
        m = len(np.asarray(self.gt_image).reshape(-1))
        self.gt_image = np.asarray(self.gt_image, dtype=np.int64).reshape(-1)
        self.gt_class = np.asarray(self.gt_class, dtype=np.int64).reshape(-1)
        self.gt_box = np.ascontiguousarray(np.asarray(self.gt_box, dtype=np.float64).reshape(m, 4))
        self.gt_split = np.asarray(self.gt_split, dtype="<U5").reshape(-1)
        if self.truth_class is not None:
            self.truth_class = np.asarray(self.truth_class, dtype=np.int64).reshape(-1)
            self.truth_iou = np.asarray(self.truth_iou, dtype=np.float64).reshape(-1)
        self.validate()

    # -- derived views ---------------------------------------------------

    @property
    def n_proposals(self) -> int:
        return len(self.prop_image)

    @property
    def class_ids(self) -> list[int]:
        return [c.id for c in self.classes]

    @property
    def base_ids(self) -> list[int]:
        return [c.id for c in self.classes if c.split == "base"]

    @property
    def novel_ids(self) -> list[int]:
        return [c.id for c in self.classes if c.split == "novel"]

    def image_ids(self, split: str | None = None) -> list[int]:
        return [im.id for im in self.images if split is None or im.split == split]

    def proposal_split(self) -> np.ndarray:
        if "prop_split" not in self._cache:
            lookup = {im.id: im.split for im in self.images}
            self._cache["prop_split"] = np.array(
                [lookup[int(i)] for i in self.prop_image], dtype="<U5"
            )
        return self._cache["prop_split"]

    def proposals_by_image(self) -> dict[int, np.ndarray]:
        """Image id -> ascending proposal indices (every image present)."""
        if "by_image" not in self._cache:
            groups = {im.id: [] for im in self.images}
            for i, img in enumerate(self.prop_image.tolist()):
                groups[img].append(i)
            self._cache["by_image"] = {
                k: np.asarray(v, dtype=np.int64) for k, v in groups.items()
            }
        return self._cache["by_image"]

    def proposal(self, i: int) -> ProposalRecord:
        return ProposalRecord(
            image_id=int(self.prop_image[i]),
            box=tuple(float(v) for v in self.prop_box[i]),
            objectness=float(self.prop_objectness[i]),
            f_cls=self.prop_f_cls[i],
            e_img=self.prop_e_img[i],
        )

    def class_embeddings(self, class_ids=None) -> list[ClassEmbedding]:
        names = {c.id: c.name for c in self.classes}
        row = {int(c): r for r, c in enumerate(self.text_class)}
        ids = self.class_ids if class_ids is None else class_ids
        return [ClassEmbedding(int(c), names[int(c)], self.text_emb[row[int(c)]]) for c in ids]

    def ground_truth(self, split: str | None = None) -> list[GroundTruthBox]:
        return [
            GroundTruthBox(int(i), tuple(float(v) for v in b), int(c), str(s))
            for i, b, c, s in zip(self.gt_image, self.gt_box, self.gt_class, self.gt_split)
            if split is None or s == split
        ]

    # -- invariants ------------------------------------------------------

    def validate(self) -> None:
        if self.d_cls <= 0 or self.d_emb <= 0:
            raise DimensionMismatch("d_cls and d_emb must be positive")
        ids = [c.id for c in self.classes]
        if len(set(ids)) != len(ids):
            # an id listed twice would belong to both base and novel at once
            raise InvalidDataset("class ids must be unique; base and novel sets must be disjoint")
        for c in self.classes:
            if c.split not in KINDS:
                raise InvalidDataset(f"class {c.id}: split must be base or novel")
        img_ids = [im.id for im in self.images]
        if len(set(img_ids)) != len(img_ids):
            raise InvalidDataset("image ids must be unique")
        for im in self.images:
            if im.split not in SPLITS:
                raise InvalidDataset(f"image {im.id}: split must be train or test")

        n = self.n_proposals
        if self.prop_f_cls.shape != (n, self.d_cls):
            raise DimensionMismatch(f"f_cls shape {self.prop_f_cls.shape} != ({n}, {self.d_cls})")
        if self.prop_e_img.shape != (n, self.d_emb):
            raise DimensionMismatch(f"e_img shape {self.prop_e_img.shape} != ({n}, {self.d_emb})")
        for name in ("prop_box", "prop_objectness", "prop_f_cls", "prop_e_img", "text_emb"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise InvalidDataset(f"{name} has non-finite entries")
        if np.any(self.prop_objectness < 0) or np.any(self.prop_objectness > 1):
            raise InvalidDataset("objectness must lie in [0, 1]")
        for boxes in (self.prop_box, self.gt_box):
            if np.any(boxes[:, 2] < boxes[:, 0]) or np.any(boxes[:, 3] < boxes[:, 1]):
                raise InvalidDataset("boxes must satisfy x1 <= x2 and y1 <= y2")
        if not np.all(np.isfinite(self.gt_box)):
            raise InvalidDataset("ground-truth boxes must be finite")

        known_img = set(img_ids)
        if not set(self.prop_image.tolist()) <= known_img:
            raise DanglingReference("proposal references an unknown image")
        if not set(self.gt_image.tolist()) <= known_img:
            raise DanglingReference("ground truth references an unknown image")
        known_cls = set(ids)
        if not set(self.gt_class.tolist()) <= known_cls:
            raise DanglingReference("ground truth references an unknown class")
        if not set(self.text_class.tolist()) <= known_cls:
            raise DanglingReference("text embedding references an unknown class")

        if self.text_emb.shape != (len(self.text_class), self.d_emb):
            raise DimensionMismatch(
                f"text embedding shape {self.text_emb.shape} != ({len(self.text_class)}, {self.d_emb})"
            )
        if sorted(self.text_class.tolist()) != sorted(ids):
            raise InvalidDataset("every class needs exactly one text embedding")
        if len(self.text_emb) and np.any(np.all(self.text_emb == 0, axis=1)):
            raise InvalidDataset("text embeddings must be nonzero")

        if not (len(self.gt_class) == len(self.gt_split)):
            raise InvalidDataset("ground-truth arrays differ in length")
        split_of = {im.id: im.split for im in self.images}
        for img, s in zip(self.gt_image.tolist(), self.gt_split.tolist()):
            if split_of[img] != s:
                raise InvalidDataset(f"ground truth split {s} disagrees with image {img}")
        novel = set(self.novel_ids)
        train_cls = self.gt_class[self.gt_split == "train"]
        if any(int(c) in novel for c in train_cls):
            raise InvalidDataset("training split may only annotate base classes")

        if self.truth_class is not None:
            if self.truth_class.shape != (n,) or self.truth_iou.shape != (n,):
                raise DimensionMismatch("provenance arrays must match the proposal count")

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        arrays = ("prop_image", "prop_box", "prop_objectness", "prop_f_cls", "prop_e_img",
                  "text_class", "text_emb", "gt_image", "gt_class", "gt_box", "gt_split")
        if (self.d_cls, self.d_emb, self.classes, self.images) != (
            other.d_cls, other.d_emb, other.classes, other.images
        ):
            return False
        if not all(np.array_equal(getattr(self, a), getattr(other, a)) for a in arrays):
            return False
        if (self.truth_class is None) != (other.truth_class is None):
            return False
        if self.truth_class is not None:
            return np.array_equal(self.truth_class, other.truth_class) and np.array_equal(
                self.truth_iou, other.truth_iou
            )
        return True


# -- binary record layouts -----------------------------------------------


def proposal_dtype(d_cls: int, d_emb: int) -> np.dtype:
    return np.dtype([
        ("image_id", "<u4"),
        ("box", "<f4", (4,)),
        ("objectness", "<f4"),
        ("f_cls", "<f4", (d_cls,)),
        ("e_img", "<f4", (d_emb,)),
    ])


def text_dtype(d_emb: int) -> np.dtype:
    return np.dtype([("class_id", "<u4"), ("e_text", "<f4", (d_emb,))])


def _read_bytes(path: Path) -> bytes:
    if not path.is_file():
        raise MissingFile(f"missing file: {path}")
    try:
        return path.read_bytes()
    except OSError as exc:
        raise IoFailure(str(exc)) from exc


def _write_bytes(path: Path, data: bytes) -> None:
    try:
        path.write_bytes(data)
    except OSError as exc:
        raise IoFailure(str(exc)) from exc


def _write_text(path: Path, text: str) -> None:
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise IoFailure(str(exc)) from exc


def _unpack_header(raw: bytes, header: struct.Struct, magic: bytes, path: Path):
    if len(raw) < header.size:
        raise BadMagic(f"{path}: truncated header")
    fields = header.unpack_from(raw)
    if fields[0] != magic:
        raise BadMagic(f"{path}: expected magic {magic!r}, found {fields[0]!r}")
    if fields[1] != FORMAT_VERSION:
        raise BadMagic(f"{path}: unsupported format version {fields[1]}")
    return fields[2:]


def _records(raw: bytes, offset: int, dtype: np.dtype, count: int, path: Path) -> np.ndarray:
    if len(raw) - offset != count * dtype.itemsize:
        raise DimensionMismatch(
            f"{path}: payload of {len(raw) - offset} bytes does not hold {count} records "
            f"of {dtype.itemsize} bytes"
        )
    return np.frombuffer(raw, dtype=dtype, count=count, offset=offset)


def encode_proposals(ds: Dataset) -> bytes:
    rec = np.zeros(ds.n_proposals, dtype=proposal_dtype(ds.d_cls, ds.d_emb))
    rec["image_id"] = ds.prop_image
    rec["box"] = ds.prop_box
    rec["objectness"] = ds.prop_objectness
    rec["f_cls"] = ds.prop_f_cls
    rec["e_img"] = ds.prop_e_img
    head = _PROPOSAL_HEADER.pack(b"OVPF", FORMAT_VERSION, ds.n_proposals, ds.d_cls, ds.d_emb)
    return head + rec.tobytes()


def decode_proposals(raw: bytes, path: Path = Path("<bytes>")):
    count, d_cls, d_emb = _unpack_header(raw, _PROPOSAL_HEADER, b"OVPF", path)
    return d_cls, d_emb, _records(raw, _PROPOSAL_HEADER.size, proposal_dtype(d_cls, d_emb), count, path)


def encode_text(ds: Dataset) -> bytes:
    rec = np.zeros(len(ds.text_class), dtype=text_dtype(ds.d_emb))
    rec["class_id"] = ds.text_class
    rec["e_text"] = ds.text_emb
    return _TEXT_HEADER.pack(b"OVTE", FORMAT_VERSION, len(rec), ds.d_emb) + rec.tobytes()


def decode_text(raw: bytes, path: Path = Path("<bytes>")):
    count, d_emb = _unpack_header(raw, _TEXT_HEADER, b"OVTE", path)
    return d_emb, _records(raw, _TEXT_HEADER.size, text_dtype(d_emb), count, path)


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def write_dataset(ds: Dataset, out_dir) -> Path:
    """Write manifest and bulk files; returns the manifest path.

    Output is byte-identical for value-identical datasets.
    """
    ds.validate()
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
    files = {
        "proposals": PROPOSALS_NAME,
        "text_embeddings": TEXT_NAME,
        "annotations": ANNOTATIONS_NAME,
    }
    _write_bytes(out / PROPOSALS_NAME, encode_proposals(ds))
    _write_bytes(out / TEXT_NAME, encode_text(ds))
    annotations = [
        {"image_id": int(i), "class_id": int(c), "box": [float(v) for v in b], "split": str(s)}
        for i, c, b, s in zip(ds.gt_image, ds.gt_class, ds.gt_box, ds.gt_split)
    ]
    _write_text(out / ANNOTATIONS_NAME, _json(annotations))
    if ds.truth_class is not None:
        files["truth"] = TRUTH_NAME
        _write_text(out / TRUTH_NAME, _json({
            "source_class": ds.truth_class.tolist(),
            "source_iou": ds.truth_iou.tolist(),
        }))
    manifest = {
        "version": FORMAT_VERSION,
        "d_cls": ds.d_cls,
        "d_emb": ds.d_emb,
        "classes": [{"id": c.id, "name": c.name, "split": c.split} for c in ds.classes],
        "images": [
            {"id": im.id, "width": im.width, "height": im.height, "split": im.split}
            for im in ds.images
        ],
        "files": files,
    }
    path = out / MANIFEST_NAME
    _write_text(path, _json(manifest))
    return path


def _load_json(path: Path):
    if not path.is_file():
        raise MissingFile(f"missing file: {path}")
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InvalidDataset(f"{path}: invalid JSON ({exc})") from exc


def load_dataset(manifest_path) -> Dataset:
    """Load and fully validate a dataset from its manifest."""
    mpath = Path(manifest_path)
    if mpath.is_dir():
        mpath = mpath / MANIFEST_NAME
    manifest = _load_json(mpath)
    root = mpath.parent
    try:
        d_cls, d_emb = int(manifest["d_cls"]), int(manifest["d_emb"])
        files = manifest["files"]
        classes = [ClassInfo(int(c["id"]), str(c["name"]), str(c["split"])) for c in manifest["classes"]]
        images = [
            ImageInfo(int(im["id"]), im["width"], im["height"], str(im["split"]))
            for im in manifest["images"]
        ]
        prop_path = root / files["proposals"]
        text_path = root / files["text_embeddings"]
        ann_path = root / files["annotations"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidDataset(f"{mpath}: malformed manifest ({exc})") from exc

    pd_cls, pd_emb, props = decode_proposals(_read_bytes(prop_path), prop_path)
    if (pd_cls, pd_emb) != (d_cls, d_emb):
        raise DimensionMismatch(
            f"{prop_path}: header dims ({pd_cls}, {pd_emb}) != manifest ({d_cls}, {d_emb})"
        )
    td_emb, text = decode_text(_read_bytes(text_path), text_path)
    if td_emb != d_emb:
        raise DimensionMismatch(f"{text_path}: header d_emb {td_emb} != manifest {d_emb}")
    anns = _load_json(ann_path)

    truth_class = truth_iou = None
    if "truth" in files:
        truth = _load_json(root / files["truth"])
        truth_class, truth_iou = truth["source_class"], truth["source_iou"]

    return Dataset(
        d_cls=d_cls,
        d_emb=d_emb,
        classes=classes,
        images=images,
        prop_image=props["image_id"],
        prop_box=props["box"],
        prop_objectness=props["objectness"],
        prop_f_cls=props["f_cls"],
        prop_e_img=props["e_img"],
        text_class=text["class_id"],
        text_emb=text["e_text"],
        gt_image=[a["image_id"] for a in anns],
        gt_class=[a["class_id"] for a in anns],
        gt_box=[a["box"] for a in anns],
        gt_split=[a["split"] for a in anns],
        truth_class=truth_class,
        truth_iou=truth_iou,
    )


# -- head checkpoints ----------------------------------------------------


@dataclass(eq=False)
class DistillationProjector:
    """Linear map from classification features to the embedding space."""

    weights: np.ndarray  # (d_emb, d_cls)
    bias: np.ndarray  # (d_emb,)

    def __post_init__(self):
        self.weights = np.ascontiguousarray(self.weights, dtype=np.float32)
        self.bias = np.ascontiguousarray(self.bias, dtype=np.float32).reshape(-1)
        if self.weights.ndim != 2 or self.bias.shape != (self.weights.shape[0],):
            raise DimensionMismatch("projector weights/bias shapes disagree")

    @property
    def d_emb(self) -> int:
        return self.weights.shape[0]

    @property
    def d_cls(self) -> int:
        return self.weights.shape[1]

    def __call__(self, f) -> np.ndarray:
        from .probe import linear

        return linear(f, self.weights, self.bias)

    def __eq__(self, other):
        if not isinstance(other, DistillationProjector):
            return NotImplemented
        return np.array_equal(self.weights, other.weights) and np.array_equal(self.bias, other.bias)


@dataclass(eq=False)
class ClassifierHead:
    """Per-class sigmoid classifier: one weight row and one bias per class id.

    Also serves as the on-disk head checkpoint, optionally carrying the
    distillation projector trained alongside a base head.
    """

    class_ids: list[int]
    weights: np.ndarray  # (n_classes, d_cls)
    bias: np.ndarray  # (n_classes,)
    projector: DistillationProjector | None = None

    def __post_init__(self):
        self.class_ids = [int(c) for c in self.class_ids]
        self.weights = np.ascontiguousarray(self.weights, dtype=np.float32)
        self.bias = np.ascontiguousarray(self.bias, dtype=np.float32).reshape(-1)
        if self.weights.ndim != 2 or self.weights.shape[0] != len(self.class_ids):
            raise DimensionMismatch("weight rows must match the class-id list")
        if self.bias.shape != (len(self.class_ids),):
            raise DimensionMismatch("bias length must match the class-id list")
        if len(set(self.class_ids)) != len(self.class_ids):
            raise InvalidDataset("duplicate class ids in head")
        if not (np.all(np.isfinite(self.weights)) and np.all(np.isfinite(self.bias))):
            raise InvalidDataset("head parameters must be finite")
        if self.projector is not None and self.projector.d_cls != self.d_cls:
            raise DimensionMismatch("projector input dim differs from head d_cls")

    @property
    def d_cls(self) -> int:
        return self.weights.shape[1]

    def __eq__(self, other):
        if not isinstance(other, ClassifierHead):
            return NotImplemented
        return (
            self.class_ids == other.class_ids
            and np.array_equal(self.weights, other.weights)
            and np.array_equal(self.bias, other.bias)
            and self.projector == other.projector
        )


HeadCheckpoint = ClassifierHead


def encode_head(head: ClassifierHead) -> bytes:
    parts = [
        _HEAD_HEADER.pack(b"OVHD", FORMAT_VERSION, len(head.class_ids), head.d_cls),
        np.asarray(head.class_ids, dtype="<u4").tobytes(),
        head.weights.astype("<f4").tobytes(),
        head.bias.astype("<f4").tobytes(),
    ]
    if head.projector is None:
        parts.append(b"\x00")
    else:
        p = head.projector
        parts += [
            b"\x01",
            struct.pack("<I", p.d_emb),
            p.weights.astype("<f4").tobytes(),
            p.bias.astype("<f4").tobytes(),
        ]
    return b"".join(parts)


def decode_head(raw: bytes, path: Path = Path("<bytes>")) -> ClassifierHead:
    count, d_cls = _unpack_header(raw, _HEAD_HEADER, b"OVHD", path)
    off = _HEAD_HEADER.size
    need = off + 4 * count + 4 * count * d_cls + 4 * count + 1
    if len(raw) < need:
        raise DimensionMismatch(f"{path}: truncated head payload")
    ids = np.frombuffer(raw, "<u4", count, off)
    off += 4 * count
    weights = np.frombuffer(raw, "<f4", count * d_cls, off).reshape(count, d_cls)
    off += 4 * count * d_cls
    bias = np.frombuffer(raw, "<f4", count, off)
    off += 4 * count
    flag = raw[off]
    off += 1
    projector = None
    if flag == 1:
        (d_emb,) = struct.unpack_from("<I", raw, off)
        off += 4
        if len(raw) != off + 4 * d_emb * d_cls + 4 * d_emb:
            raise DimensionMismatch(f"{path}: projector block size mismatch")
        pw = np.frombuffer(raw, "<f4", d_emb * d_cls, off).reshape(d_emb, d_cls)
        off += 4 * d_emb * d_cls
        pb = np.frombuffer(raw, "<f4", d_emb, off)
        projector = DistillationProjector(pw, pb)
    elif flag != 0 or len(raw) != off:
        raise DimensionMismatch(f"{path}: trailing bytes or bad projector flag")
    return ClassifierHead(ids.tolist(), weights, bias, projector)


def write_head(head: ClassifierHead, path) -> Path:
    p = Path(path)
    if p.parent and not p.parent.exists():
        os.makedirs(p.parent, exist_ok=True)
    _write_bytes(p, encode_head(head))
    return p


def read_head(path) -> ClassifierHead:
    p = Path(path)
    return decode_head(_read_bytes(p), p)
