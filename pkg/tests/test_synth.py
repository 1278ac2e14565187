import numpy as np
import pytest

from ovprobe.errors import InvalidConfig
from ovprobe.synth import SynthConfig, generate_synthetic

from conftest import SMALL


def test_deterministic():
    assert generate_synthetic(SMALL, 3) == generate_synthetic(SMALL, 3)
    assert not (generate_synthetic(SMALL, 3) == generate_synthetic(SMALL, 4))


def test_train_has_no_novel_gt(default_ds):
    novel = set(default_ds.novel_ids)
    assert len(novel) == 3
    train = default_ds.gt_class[default_ds.gt_split == "train"]
    assert len(train) > 0
    assert not any(int(c) in novel for c in train)


def test_test_split_has_every_class(default_ds):
    test = set(default_ds.gt_class[default_ds.gt_split == "test"].tolist())
    assert test == set(default_ds.class_ids)


def test_novel_objects_exist_in_train(default_ds):
    split = default_ds.proposal_split()
    novel = set(default_ds.novel_ids)
    assert any(int(c) in novel for c in default_ds.truth_class[split == "train"])


def test_low_quality_fraction(default_ds):
    obj = default_ds.truth_class >= 0
    low = default_ds.truth_iou[obj] < 0.5
    assert low.mean() == pytest.approx(0.3, abs=0.05)


def test_objectness_tracks_quality(default_ds):
    obj = default_ds.truth_class >= 0
    o = default_ds.prop_objectness[obj]
    q = default_ds.truth_iou[obj]
    assert o[q >= 0.7].mean() > o[q < 0.5].mean()


def test_embedding_margin(default_ds):
    cfg = SynthConfig()
    obj = default_ds.truth_class >= 0
    e = default_ds.prop_e_img[obj].astype(np.float64)
    e /= np.linalg.norm(e, axis=1, keepdims=True)
    t = default_ds.text_emb.astype(np.float64)
    t /= np.linalg.norm(t, axis=1, keepdims=True)
    row = {int(c): r for r, c in enumerate(default_ds.text_class)}
    cos = (e[:, None, :] * t[None, :, :]).sum(-1)
    own_rows = np.array([row[int(c)] for c in default_ds.truth_class[obj]])
    own = cos[np.arange(len(e)), own_rows].mean()
    for r in range(len(t)):
        others = cos[own_rows != r, r].mean()
        assert own - others >= 3 * cfg.sigma_emb


def test_quality_independent_embeddings(default_ds):
    obj = default_ds.truth_class >= 0
    norms = np.linalg.norm(default_ds.prop_e_img[obj], axis=1)
    q = default_ds.truth_iou[obj]
    assert abs(norms[q >= 0.7].mean() - norms[q < 0.5].mean()) < 0.05


@pytest.mark.parametrize("field", ["n_base", "n_novel", "train_images", "d_cls", "d_emb", "proposals_per_object"])
def test_invalid_counts(field):
    with pytest.raises(InvalidConfig):
        SynthConfig(**{field: 0})


def test_config_dict_round_trip():
    cfg = SynthConfig(n_base=2, sigma_emb=0.1)
    assert SynthConfig.from_dict(cfg.to_dict()) == cfg
