"""Command-line driver.

Exit status: 0 on success, 2 on configuration or flag errors, 1 on runtime
failures such as missing inputs.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import datastore, pipeline
from .config import PipelineConfig, load_config
from .errors import OvprobeError, ParseError, RangeError
from .evaluation import evaluate_dataset
from .inference import detect_split, read_detections, write_detections
from .probe import concat_heads
from .retrieval import PseudoLabelSet
from .synth import generate_synthetic

log = logging.getLogger("ovprobe")


class ConfigFailure(Exception):
    pass


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ovprobe", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    commands = {
        "synth": "generate a synthetic dataset into --out",
        "train-base": "train the base head and distillation projector",
        "retrieve": "retrieve top-K pseudo labels for novel classes",
        "probe": "train the novel head on pseudo labels; write the unified head",
        "infer": "run detection on the test split",
        "eval": "evaluate detections against test annotations",
        "run-all": "run the whole pipeline",
        "sweep": "AP_novel over a grid of k or beta values",
        "ablate": "component ablations (objectness, retrieval, similarity baseline)",
    }
    for name, help_text in commands.items():
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--config", type=Path, help="JSON config (defaults if omitted)")
        sp.add_argument("--out", type=Path, help="output directory")
        sp.add_argument("--seed", type=int, help="override the config seed")
        sp.add_argument("-v", "--verbose", action="store_true")
        if name == "sweep":
            sp.add_argument("--param", choices=("k", "beta"), required=True)
            sp.add_argument("--values", required=True, help="comma-separated values")
    return p


def _config(args) -> PipelineConfig:
    try:
        cfg = load_config(args.config) if args.config is not None else PipelineConfig()
        if args.seed is not None:
            cfg = replace(cfg, seed=args.seed)
    except (ParseError, RangeError) as exc:
        field = getattr(exc, "field", None)
        raise ConfigFailure(f"config error{f' in field {field!r}' if field else ''}: {exc}") from exc
    return cfg


def _out_dir(args, cfg) -> Path:
    out = args.out if args.out is not None else Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _sweep_values(param, raw):
    try:
        values = [int(v) if param == "k" else float(v) for v in raw.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigFailure(f"bad --values for {param}: {raw!r}") from exc
    if not values:
        raise ConfigFailure("--values is empty")
    for v in values:
        if (param == "k" and v < 1) or (param == "beta" and not 0.0 <= v <= 1.0):
            raise ConfigFailure(f"--values: {v} out of range for {param}")
    return values


def run(args) -> int:
    cfg = _config(args)
    values = _sweep_values(args.param, args.values) if args.command == "sweep" else None

    if args.command == "synth":
        out = args.out if args.out is not None else Path(cfg.dataset).parent
        ds = generate_synthetic(cfg.synth, cfg.stage_seed("synth"))
        path = datastore.write_dataset(ds, out)
        log.info("wrote %s (%d proposals)", path, ds.n_proposals)
        return 0

    ds = datastore.load_dataset(cfg.dataset)
    out = _out_dir(args, cfg)

    if args.command == "train-base":
        datastore.write_head(pipeline.train_base(ds, cfg), out / pipeline.BASE_HEAD)
    elif args.command == "retrieve":
        pipeline.retrieve(ds, cfg).write(out / pipeline.PSEUDO_LABELS)
    elif args.command == "probe":
        pseudo = PseudoLabelSet.read(out / pipeline.PSEUDO_LABELS)
        base = datastore.read_head(out / pipeline.BASE_HEAD)
        novel = pipeline.probe(ds, pseudo, cfg)
        datastore.write_head(novel, out / pipeline.NOVEL_HEAD)
        datastore.write_head(concat_heads(base, novel), out / pipeline.UNIFIED_HEAD)
    elif args.command == "infer":
        unified = datastore.read_head(out / pipeline.UNIFIED_HEAD)
        write_detections(detect_split(ds, unified, cfg.fusion()), out / pipeline.DETECTIONS)
    elif args.command == "eval":
        report = evaluate_dataset(ds, read_detections(out / pipeline.DETECTIONS))
        (out / pipeline.REPORT).write_text(report.to_json(), encoding="utf-8")
        text = report.to_text({c.id: c.name for c in ds.classes})
        (out / pipeline.REPORT_TEXT).write_text(text, encoding="utf-8")
        print(text, end="")
    elif args.command == "run-all":
        result = pipeline.run_all(ds, cfg, out)
        print(result.report.to_text({c.id: c.name for c in ds.classes}), end="")
    elif args.command == "sweep":
        rows = pipeline.sweep(ds, cfg, args.param, values)
        text = pipeline.sweep_csv(args.param, rows)
        (out / pipeline.SWEEP).write_text(text, encoding="utf-8")
        print(text, end="")
    elif args.command == "ablate":
        text = pipeline.ablation_csv(pipeline.ablate(ds, cfg))
        (out / pipeline.ABLATION).write_text(text, encoding="utf-8")
        print(text, end="")
    return 0


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return run(args)
    except ConfigFailure as exc:
        print(f"ovprobe: {exc}", file=sys.stderr)
        return 2
    except (OvprobeError, OSError) as exc:
        print(f"ovprobe: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
