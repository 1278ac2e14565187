"""Hand-built datasets for unit tests."""
import numpy as np

from ovprobe.datastore import ClassInfo, Dataset, ImageInfo


def make_dataset(props, gts=(), classes=((1, "base"), (2, "novel")), images=((0, "train"),),
                 d_cls=4, d_emb=3, text=None):
    """``props``: list of dicts with image, box and optional objectness/f_cls/e_img.
    ``gts``: list of (image, box, class)."""
    rng = np.random.default_rng(0)
    n = len(props)
    f_cls = np.array([p.get("f_cls", rng.normal(size=d_cls)) for p in props], dtype=np.float32).reshape(n, d_cls)
    e_img = np.array([p.get("e_img", rng.normal(size=d_emb)) for p in props], dtype=np.float32).reshape(n, d_emb)
    if text is None:
        text = np.eye(max(d_emb, len(classes)))[:len(classes), :d_emb] + 0.01
    split_of = dict(images)
    return Dataset(
        d_cls=d_cls, d_emb=d_emb,
        classes=[ClassInfo(c, f"c{c}", s) for c, s in classes],
        images=[ImageInfo(i, 100, 100, s) for i, s in images],
        prop_image=[p["image"] for p in props],
        prop_box=[p["box"] for p in props],
        prop_objectness=[p.get("objectness", 0.9) for p in props],
        prop_f_cls=f_cls, prop_e_img=e_img,
        text_class=[c for c, _ in classes], text_emb=text,
        gt_image=[g[0] for g in gts], gt_box=[g[1] for g in gts], gt_class=[g[2] for g in gts],
        gt_split=[split_of[g[0]] for g in gts],
    )
