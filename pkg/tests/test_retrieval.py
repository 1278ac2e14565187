import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from builders import make_dataset
from ovprobe.datastore import ClassEmbedding
from ovprobe.errors import DimensionMismatch, EmptyPseudoLabelSet, MissingFile
from ovprobe.probe import NEGATIVE
from ovprobe.retrieval import (
    PseudoLabel, PseudoLabelSet, SamplingConfig, cosine_similarities, filter_proposals,
    retrieve_topk, sample_pos_neg, topk_order,
)


def props_with(objectness=None, e_img=None, boxes=None, image=0):
    n = len(objectness or e_img or boxes)
    out = []
    for i in range(n):
        p = {"image": image, "box": boxes[i] if boxes else (0, 0, 1, 1)}
        if objectness:
            p["objectness"] = objectness[i]
        if e_img:
            p["e_img"] = e_img[i]
        out.append(p)
    return out


def test_filter_boundary():
    ds = make_dataset(props_with(objectness=[0.59, 0.60, 0.61]))
    assert filter_proposals(ds, 0.6) == [2]
    assert filter_proposals(make_dataset([]), 0.6) == []


def test_filter_tau_zero_and_split():
    ds = make_dataset(props_with(objectness=[0.0, 0.3, 1.0]))
    assert filter_proposals(ds, 0.0) == [1, 2]
    test_ds = make_dataset(props_with(objectness=[0.9]), images=((0, "test"),))
    assert filter_proposals(test_ds, 0.5) == []


@given(st.lists(st.floats(0, 1), max_size=30), st.floats(0, 1), st.floats(0, 1))
@settings(max_examples=100, deadline=None)
def test_filter_monotone(obj, t1, t2):
    ds = make_dataset(props_with(objectness=obj)) if obj else make_dataset([])
    lo, hi = sorted((t1, t2))
    assert set(filter_proposals(ds, hi)) <= set(filter_proposals(ds, lo))


def test_parallel_vector_similarity_one():
    ds = make_dataset(props_with(e_img=[[2.0, 0.0, 0.0]]))
    out = retrieve_topk(ds, [0], [ClassEmbedding(2, "c2", np.array([1.0, 0, 0]))], k=1)
    assert list(out) == [PseudoLabel(0, 2, 1.0)]


def test_tie_goes_to_lower_index():
    ds = make_dataset(props_with(e_img=[[0, 1.0, 0], [1.0, 0, 0], [1.0, 0, 0]]))
    out = retrieve_topk(ds, [0, 1, 2], [ClassEmbedding(2, "c2", np.array([1.0, 0, 0]))], k=1)
    assert [e.proposal_index for e in out] == [1]


def test_zero_norm_ranks_last():
    sims = cosine_similarities([1.0, 0.0], [[0.0, 0.0], [-1.0, 0.0], [0.0, 1.0]])
    assert sims.tolist() == [-1.0, -1.0, 0.0]
    assert topk_order(sims, 3).tolist() == [2, 0, 1]


def test_dimension_mismatch():
    ds = make_dataset(props_with(e_img=[[1.0, 0, 0]]))
    with pytest.raises(DimensionMismatch):
        retrieve_topk(ds, [0], [ClassEmbedding(2, "c2", np.ones(4))], k=1)


def brute_force(sims, pool, k):
    ranked = sorted(range(len(pool)), key=lambda i: (-sims[i], pool[i]))
    return [pool[i] for i in ranked[:k]]


def test_similarity_matches_independent_cosine():
    rng = np.random.default_rng(3)
    v = rng.normal(size=(50, 6))
    q = rng.normal(size=6)
    sims = cosine_similarities(q, v)
    for row, s in zip(v, sims):
        ref = sum(a * b for a, b in zip(row, q)) / (math.sqrt(sum(a * a for a in row)) * math.sqrt(sum(b * b for b in q)))
        assert s == pytest.approx(ref, abs=1e-12)


def test_matches_full_sort_oracle():
    rng = np.random.default_rng(4)
    n, d = 1000, 8
    e = rng.normal(size=(n, d))
    e[100:140] = e[0]  # exact ties
    e[500:510] = 0.0
    ds = make_dataset([{"image": 0, "box": (0, 0, 1, 1), "e_img": x} for x in e], d_emb=d,
                      classes=[(1, "base")] + [(c, "novel") for c in range(2, 7)],
                      text=np.vstack([e[0] * 1.5, rng.normal(size=(5, d))]))
    pool = sorted(rng.choice(n, 800, replace=False).tolist())
    novel = ds.class_embeddings(ds.novel_ids) + [ClassEmbedding(1, "c1", ds.text_emb[0])]
    out = retrieve_topk(ds, pool, novel, k=100).by_class()
    for cls in novel:
        sims = cosine_similarities(cls.e_text, ds.prop_e_img[pool])
        assert [x.proposal_index for x in out[cls.class_id]] == brute_force(sims.tolist(), pool, 100)


@given(st.lists(st.sampled_from([-1.0, 0.0, 0.25, 0.5, 1.0]), min_size=1, max_size=40), st.integers(1, 45))
@settings(max_examples=200, deadline=None)
def test_topk_order_property(scores, k):
    got = topk_order(scores, k).tolist()
    assert got == brute_force(scores, list(range(len(scores))), k)


def test_cardinality_is_min_k_pool():
    ds = make_dataset(props_with(e_img=[[1.0, 0, 0]] * 5))
    out = retrieve_topk(ds, [0, 2, 4], ds.class_embeddings([2]), k=100)
    assert len(out) == 3


def test_pseudo_label_json_round_trip(tmp_path):
    s = PseudoLabelSet([PseudoLabel(3, 2, 0.5), PseudoLabel(1, 4, -0.25)])
    assert PseudoLabelSet.read(s.write(tmp_path / "p.json")) == s
    with pytest.raises(MissingFile):
        PseudoLabelSet.read(tmp_path / "missing.json")


def test_positive_and_boundary_labels():
    boxes = [(0, 0, 10, 10),  # pseudo GT for class 2
             (0, 0, 10, 6),   # IoU 0.6
             (0, 0, 10, 5)]   # IoU exactly 0.5
    ds = make_dataset(props_with(boxes=boxes))
    samples = sample_pos_neg(ds, PseudoLabelSet([PseudoLabel(0, 2, 1.0)]))
    assert [(s.proposal, s.target) for s in samples] == [(0, 2), (1, 2), (2, NEGATIVE)]


def test_iou_tie_goes_to_lower_class():
    boxes = [(0, 0, 10, 10), (0, 0, 10, 10), (0, 0, 10, 9)]
    ds = make_dataset(props_with(boxes=boxes), classes=((1, "base"), (2, "novel"), (3, "novel")),
                      text=np.eye(3))
    pseudo = PseudoLabelSet([PseudoLabel(0, 3, 1.0), PseudoLabel(1, 2, 1.0)])
    assert [s.target for s in sample_pos_neg(ds, pseudo)] == [2, 2, 2]


def test_subsample_counts():
    boxes = [(0, 0, 10, 10)] * 10 + [(50, 50, 60, 60)] * 600
    ds = make_dataset(props_with(boxes=boxes))
    samples = sample_pos_neg(ds, PseudoLabelSet([PseudoLabel(0, 2, 1.0)]), SamplingConfig(samples_per_image=512,
                                                                                      positive_fraction=0.25))
    assert sum(s.target != NEGATIVE for s in samples) == 10
    assert sum(s.target == NEGATIVE for s in samples) == 502
    assert samples == sample_pos_neg(ds, PseudoLabelSet([PseudoLabel(0, 2, 1.0)]))


def test_positive_cap():
    boxes = [(0, 0, 10, 10)] * 20 + [(50, 50, 60, 60)] * 20
    ds = make_dataset(props_with(boxes=boxes))
    samples = sample_pos_neg(ds, PseudoLabelSet([PseudoLabel(0, 2, 1.0)]),
                             SamplingConfig(samples_per_image=16, positive_fraction=0.25))
    assert len(samples) == 16
    assert sum(s.target != NEGATIVE for s in samples) == 4


def test_empty_pseudo():
    with pytest.raises(EmptyPseudoLabelSet):
        sample_pos_neg(make_dataset([]), PseudoLabelSet([]))


def test_precision_at_k(default_ds):
    pool = filter_proposals(default_ds, 0.6)
    out = retrieve_topk(default_ds, pool, default_ds.class_embeddings(default_ds.novel_ids), k=100)
    for cls, entries in out.by_class().items():
        truth = [int(default_ds.truth_class[e.proposal_index]) for e in entries]
        assert len(entries) == 100
        assert Counter(truth).most_common(1)[0][0] == cls
        assert sum(t == cls for t in truth) / len(truth) >= 0.9
