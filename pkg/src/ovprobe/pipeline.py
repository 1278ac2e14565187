"""End-to-end stages shared by the CLI and the acceptance harness."""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import datastore
from .config import PipelineConfig
from .datastore import ClassifierHead, Dataset
from .evaluation import EvalReport, evaluate_dataset
from .inference import detect_split, write_detections
from .probe import concat_heads, train_classifier_head, train_distillation_head
from .retrieval import PseudoLabelSet, filter_proposals, retrieve_topk, sample_from_annotations, sample_pos_neg

log = logging.getLogger(__name__)

BASE_HEAD = "base_head.ovhd"
NOVEL_HEAD = "novel_head.ovhd"
UNIFIED_HEAD = "unified_head.ovhd"
PSEUDO_LABELS = "pseudo_labels.json"
DETECTIONS = "detections.jsonl"
REPORT = "report.json"
REPORT_TEXT = "report.txt"
SWEEP = "sweep.csv"
ABLATION = "ablation.csv"


def train_base(ds: Dataset, cfg: PipelineConfig) -> ClassifierHead:
    """Base sigmoid head on annotated base boxes plus the distillation projector."""
    samples = sample_from_annotations(ds, cfg.sampler("base"), ds.base_ids)
    head = train_classifier_head(ds, samples, ds.base_ids, cfg.focal, cfg.schedule("base"))
    train_props = np.flatnonzero(ds.proposal_split() == "train")
    head.projector = train_distillation_head(ds, train_props, cfg.schedule("distill"))
    return head


def retrieve(ds: Dataset, cfg: PipelineConfig, k: int | None = None) -> PseudoLabelSet:
    pool = filter_proposals(ds, cfg.tau)
    return retrieve_topk(ds, pool, ds.class_embeddings(ds.novel_ids), cfg.k if k is None else k)


def probe(ds: Dataset, pseudo: PseudoLabelSet, cfg: PipelineConfig) -> ClassifierHead:
    samples = sample_pos_neg(ds, pseudo, cfg.sampler("novel"))
    return train_classifier_head(ds, samples, ds.novel_ids, cfg.focal, cfg.schedule("probe"))


@dataclass
class RunResult:
    base: ClassifierHead
    pseudo: PseudoLabelSet
    novel: ClassifierHead
    unified: ClassifierHead
    detections: list
    report: EvalReport


def run_all(ds: Dataset, cfg: PipelineConfig, out_dir=None) -> RunResult:
    base = train_base(ds, cfg)
    pseudo = retrieve(ds, cfg)
    novel = probe(ds, pseudo, cfg)
    unified = concat_heads(base, novel)
    dets = detect_split(ds, unified, cfg.fusion())
    report = evaluate_dataset(ds, dets)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        datastore.write_head(base, out / BASE_HEAD)
        pseudo.write(out / PSEUDO_LABELS)
        datastore.write_head(novel, out / NOVEL_HEAD)
        datastore.write_head(unified, out / UNIFIED_HEAD)
        write_detections(dets, out / DETECTIONS)
        (out / REPORT).write_text(report.to_json(), encoding="utf-8")
        names = {c.id: c.name for c in ds.classes}
        (out / REPORT_TEXT).write_text(report.to_text(names), encoding="utf-8")
    return RunResult(base, pseudo, novel, unified, dets, report)


def sweep(ds: Dataset, cfg: PipelineConfig, param: str, values, base: ClassifierHead | None = None):
    """AP_novel for each value of ``k`` or ``beta``; returns ``[(value, ap_novel), ...]``."""
    if param not in ("k", "beta"):
        raise ValueError("sweep parameter must be 'k' or 'beta'")
    base = base if base is not None else train_base(ds, cfg)
    rows = []
    novel = None
    if param == "beta":
        novel = probe(ds, retrieve(ds, cfg), cfg)
    for v in values:
        if param == "k":
            head = concat_heads(base, probe(ds, retrieve(ds, cfg, k=int(v)), cfg))
            fusion = cfg.fusion()
        else:
            head = concat_heads(base, novel)
            fusion = cfg.fusion(beta=float(v))
        report = evaluate_dataset(ds, detect_split(ds, head, fusion))
        log.info("%s=%s ap_novel=%.4f", param, v, report.ap_novel)
        rows.append((v, report.ap_novel))
    return rows


def ablate(ds: Dataset, cfg: PipelineConfig, base: ClassifierHead | None = None) -> dict[str, EvalReport]:
    """Reports for the component ablations.

    * ``full``: retrieval + novel probe, objectness on
    * ``no_objectness``: same heads, objectness factor dropped
    * ``no_retrieval``: no novel probe; novel classes scored by distillation only
    * ``similarity_baseline``: every class scored objectness x distillation
    """
    base = base if base is not None else train_base(ds, cfg)
    novel = probe(ds, retrieve(ds, cfg), cfg)
    unified = concat_heads(base, novel)
    zeros = ClassifierHead(ds.novel_ids, np.zeros((len(ds.novel_ids), ds.d_cls)),
                           np.zeros(len(ds.novel_ids)))
    return {
        "full": evaluate_dataset(ds, detect_split(ds, unified, cfg.fusion())),
        "no_objectness": evaluate_dataset(ds, detect_split(ds, unified, cfg.fusion(use_objectness=False))),
        "no_retrieval": evaluate_dataset(ds, detect_split(ds, concat_heads(base, zeros), cfg.fusion(beta=0.0))),
        "similarity_baseline": evaluate_dataset(ds, detect_split(ds, unified, cfg.fusion(), baseline=True)),
    }


def sweep_csv(param: str, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([param, "ap_novel"])
    for v, ap in rows:
        w.writerow([v, repr(ap)])
    return buf.getvalue()


def ablation_csv(reports: dict[str, EvalReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["variant", "ap_novel", "ap_base", "ap_all"])
    for name, r in reports.items():
        w.writerow([name, repr(r.ap_novel), repr(r.ap_base), repr(r.ap_all)])
    return buf.getvalue()
