"""Acceptance criteria, one test each.

Each test prints a PASS/FAIL line and the summary section at the end of the
run lists them all. Runtime limits are asserted inside the tests.
"""
import csv
import json
import os
import subprocess
import sys
import time

import numpy as np
import pytest

from oracles import greedy_flags, random_scene, sweep_ap
from ovprobe import datastore
from ovprobe.config import load_config
from ovprobe.datastore import ClassifierHead, GroundTruthBox
from ovprobe.evaluation import average_precision, evaluate_dataset, match_detections
from ovprobe.inference import Detection, detect_split
from ovprobe.probe import FocalLossParams, concat_heads, focal_loss_and_grad, sigmoid_scores
from ovprobe.retrieval import cosine_similarities, retrieve_topk

from builders import make_dataset


def report_line(number, ok, detail):
    print(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")


def cli(args, env=None, cwd=None):
    full_env = dict(os.environ, **(env or {}))
    start = time.perf_counter()
    r = subprocess.run([sys.executable, "-m", "ovprobe", *args], capture_output=True, text=True,
                       env=full_env, cwd=cwd)
    elapsed = time.perf_counter() - start
    assert r.returncode == 0, r.stderr
    return r, elapsed


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """Default synthetic dataset written by the CLI."""
    root = tmp_path_factory.mktemp("accept")
    cfg = root / "cfg.json"
    cfg.write_text(json.dumps({"dataset": str(root / "data" / "manifest.json"), "out_dir": str(root / "out")}))
    cli(["synth", "--config", str(cfg)])
    return root, cfg


@pytest.mark.criterion(1, "benchmark-scale numbers not reproducible at desk scale; criteria 2-9 substitute")
def test_criterion_1_substituted():
    # Nothing to run: the benchmark-scale result needs external data and models.
    # The substitute property suites are the remaining criteria in this module.
    substitutes = [name for name in globals() if name.startswith("test_criterion_")]
    assert len(substitutes) == 9
    report_line(1, True, "substituted by criteria 2-9")


@pytest.mark.criterion(2, "sigmoid independence under concat_heads is bit-exact (1,000 vectors, < 5 s)")
def test_criterion_2_sigmoid_independence():
    start = time.perf_counter()
    rng = np.random.default_rng(202)
    d = 64
    f = rng.normal(size=(1000, d)).astype(np.float32)
    ok = True
    for trial in range(5):
        nb, nn = int(rng.integers(1, 60)), int(rng.integers(1, 30))
        base = ClassifierHead(list(range(nb)), rng.normal(size=(nb, d)), rng.normal(size=nb))
        novel = ClassifierHead(list(range(nb, nb + nn)), rng.normal(size=(nn, d)), rng.normal(size=nn))
        unified = concat_heads(base, novel)
        before = sigmoid_scores(base, f)
        after = sigmoid_scores(unified, f)[:, :nb]
        ok &= before.tobytes() == after.tobytes()
        for i in range(0, 1000, 97):  # single-vector path too
            ok &= sigmoid_scores(base, f[i]).tobytes() == sigmoid_scores(unified, f[i])[:nb].tobytes()
    elapsed = time.perf_counter() - start
    report_line(2, ok and elapsed < 5, f"bit-identical={ok} in {elapsed:.2f} s")
    assert ok
    assert elapsed < 5


@pytest.mark.criterion(3, "focal gradient vs central differences h=1e-4, rel err <= 1e-4 (100 cases, < 5 s)")
def test_criterion_3_focal_gradient():
    start = time.perf_counter()
    rng = np.random.default_rng(303)
    h = 1e-4
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(1, 9))
        x = rng.uniform(-8, 8, n)
        t = rng.integers(0, 2, n)
        params = FocalLossParams(float(rng.uniform(0.05, 0.95)), float(rng.uniform(0, 5)))
        _, g = focal_loss_and_grad(x, t, params)
        fd = np.array([
            (focal_loss_and_grad(x + h * e, t, params)[0] - focal_loss_and_grad(x - h * e, t, params)[0]) / (2 * h)
            for e in np.eye(n)
        ])
        # relative error of the whole gradient vector of each case
        rel = np.linalg.norm(g - fd) / max(np.linalg.norm(g), np.linalg.norm(fd))
        worst = max(worst, rel)
    elapsed = time.perf_counter() - start
    report_line(3, worst <= 1e-4 and elapsed < 5, f"worst relative error {worst:.2e} in {elapsed:.2f} s")
    assert worst <= 1e-4
    assert elapsed < 5


@pytest.mark.criterion(4, "retrieve_topk equals full-sort oracle incl. ties (10,000 vectors, K=100, 5 classes, < 10 s)")
def test_criterion_4_retrieval_oracle():
    rng = np.random.default_rng(404)
    n, d = 10_000, 16
    e = rng.normal(size=(n, d))
    e[5000:5050] = e[17]  # exact ties
    e[9000:9010] = 0.0  # zero norm
    text = np.vstack([rng.normal(size=d), e[17] * 2.0, rng.normal(size=(4, d))])
    ds = make_dataset([{"image": 0, "box": (0, 0, 1, 1), "e_img": v} for v in e], d_emb=d,
                      classes=[(0, "base")] + [(c, "novel") for c in range(1, 6)], text=text)
    pool = list(range(n))
    novel = ds.class_embeddings(ds.novel_ids)
    start = time.perf_counter()
    got = retrieve_topk(ds, pool, novel, k=100).by_class()
    elapsed = time.perf_counter() - start
    ok = True
    for cls in novel:
        sims = cosine_similarities(cls.e_text, ds.prop_e_img).tolist()
        expect = sorted(pool, key=lambda i: (-sims[i], i))[:100]
        ok &= [x.proposal_index for x in got[cls.class_id]] == expect
        ok &= [x.similarity for x in got[cls.class_id]] == [sims[i] for i in expect]
    report_line(4, ok and elapsed < 10, f"exact match={ok}, retrieval {elapsed:.2f} s")
    assert ok
    assert elapsed < 10


@pytest.mark.criterion(5, "average_precision equals threshold-sweep oracle within 1e-9 (500 scenes, < 10 s)")
def test_criterion_5_ap_oracle():
    start = time.perf_counter()
    rng = np.random.default_rng(505)
    worst = 0.0
    for _ in range(500):
        gts, dets, scores = random_scene(rng)
        flags = match_detections(
            [Detection(img, tuple(b), 1, s) for (img, b), s in zip(dets, scores)],
            [GroundTruthBox(img, tuple(b), 1, "test") for img, b in gts], 0.5)
        assert flags.tolist() == greedy_flags(dets, gts, 0.5)
        ap = average_precision(flags, len(gts))
        worst = max(worst, abs(ap - sweep_ap(scores, flags.tolist(), len(gts))))
    elapsed = time.perf_counter() - start
    report_line(5, worst <= 1e-9 and elapsed < 10, f"max |AP - oracle| {worst:.1e} in {elapsed:.2f} s")
    assert worst <= 1e-9
    assert elapsed < 10


@pytest.mark.criterion(6, "run-all AP_novel >= 0.95 and >= baseline + 0.10 on default synthetic data (< 2 min)")
def test_criterion_6_end_to_end(workspace):
    root, cfg = workspace
    _, elapsed = cli(["run-all", "--config", str(cfg)], env={"OMP_NUM_THREADS": "1", "OPENBLAS_NUM_THREADS": "1"})
    report = json.loads((root / "out" / "report.json").read_text())
    conf = load_config(cfg)
    ds = datastore.load_dataset(conf.dataset)
    unified = datastore.read_head(root / "out" / "unified_head.ovhd")
    baseline = evaluate_dataset(ds, detect_split(ds, unified, conf.fusion(), baseline=True))
    ours = report["ap_novel"]
    ok = ours >= 0.95 and ours - baseline.ap_novel >= 0.10 and elapsed < 120
    report_line(6, ok, f"AP_novel {ours:.3f}, baseline {baseline.ap_novel:.3f}, run-all {elapsed:.1f} s")
    assert ours >= 0.95
    assert ours - baseline.ap_novel >= 0.10
    assert elapsed < 120


@pytest.mark.criterion(7, "AP_novel with objectness >= without (< 2 min)")
def test_criterion_7_objectness(workspace):
    root, cfg = workspace
    out = root / "ablate"
    _, elapsed = cli(["ablate", "--config", str(cfg), "--out", str(out)])
    rows = {r["variant"]: r for r in csv.DictReader((out / "ablation.csv").open())}
    with_o = float(rows["full"]["ap_novel"])
    without = float(rows["no_objectness"]["ap_novel"])
    ok = with_o >= without and elapsed < 120
    report_line(7, ok, f"with {with_o:.3f} vs without {without:.3f}, {elapsed:.1f} s")
    assert with_o >= without
    assert elapsed < 120


@pytest.mark.criterion(8, "K sweep 5..100: AP_novel(K=100) >= AP_novel(K=5), CSV emitted (< 5 min)")
def test_criterion_8_k_sweep(workspace):
    root, cfg = workspace
    out = root / "sweep"
    _, elapsed = cli(["sweep", "--config", str(cfg), "--out", str(out), "--param", "k",
                      "--values", "5,10,20,50,100"])
    rows = list(csv.DictReader((out / "sweep.csv").open()))
    ap = {int(r["k"]): float(r["ap_novel"]) for r in rows}
    ok = len(rows) == 5 and ap[100] >= ap[5] and elapsed < 300
    report_line(8, ok, "AP_novel by K " + ", ".join(f"{k}:{v:.3f}" for k, v in ap.items()) + f"; {elapsed:.1f} s")
    assert len(rows) == 5
    assert ap[100] >= ap[5]
    assert elapsed < 300


ARTIFACTS = ("report.json", "base_head.ovhd", "novel_head.ovhd", "unified_head.ovhd",
             "pseudo_labels.json", "detections.jsonl")


@pytest.mark.criterion(9, "run-all is bit-identical across thread settings and kernel backends")
def test_criterion_9_determinism(workspace):
    root, cfg = workspace
    envs = {
        "one": {"OMP_NUM_THREADS": "1", "OPENBLAS_NUM_THREADS": "1", "MKL_NUM_THREADS": "1"},
        "many": {"OMP_NUM_THREADS": "8", "OPENBLAS_NUM_THREADS": "8", "MKL_NUM_THREADS": "8"},
        "fallback": {"OVPROBE_PURE_PYTHON": "1"},
    }
    outputs = {}
    for name, env in envs.items():
        out = root / f"det-{name}"
        cli(["run-all", "--config", str(cfg), "--out", str(out)], env=env)
        outputs[name] = {a: (out / a).read_bytes() for a in ARTIFACTS}
    ref = outputs["one"]
    same = {name: all(o[a] == ref[a] for a in ARTIFACTS) for name, o in outputs.items()}
    ok = all(same.values())
    report_line(9, ok, "identical artifacts: " + ", ".join(f"{k}={v}" for k, v in same.items()))
    assert ok
