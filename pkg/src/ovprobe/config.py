"""Pipeline configuration: JSON file -> validated :class:`PipelineConfig`.

Omitted fields take the standard defaults (tau 0.6, K 100, beta 0.8,
kappa 0.01 and the two SGD schedules).
"""

from __future__ import annotations

import json
import zlib
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .errors import InvalidConfig, MissingFile, ParseError, RangeError
from .inference import FusionParams
from .probe import BASE_SCHEDULE, PROBE_SCHEDULE, FocalLossParams, SgdSchedule
from .retrieval import SamplingConfig
from .synth import SynthConfig


@dataclass(frozen=True)
class PipelineConfig:
    dataset: str = "data/manifest.json"
    out_dir: str = "out"
    tau: float = 0.6
    k: int = 100
    beta: float = 0.8
    kappa: float = 0.01
    focal: FocalLossParams = FocalLossParams()
    base_schedule: SgdSchedule = BASE_SCHEDULE
    probe_schedule: SgdSchedule = PROBE_SCHEDULE
    sampling: SamplingConfig = SamplingConfig()
    score_threshold: float = 0.05
    nms_iou: float = 0.5
    max_detections: int = 100
    seed: int = 0
    synth: SynthConfig = field(default_factory=SynthConfig)

    def __post_init__(self):
        if not 0.0 <= self.tau <= 1.0:
            raise RangeError("tau", "tau must lie in [0, 1]")
        if not (isinstance(self.k, int) and self.k >= 1):
            raise RangeError("k", "k must be a positive integer")
        if not 0.0 <= self.beta <= 1.0:
            raise RangeError("beta", "beta must lie in [0, 1]")
        if not self.kappa > 0.0:
            raise RangeError("kappa", "kappa must be positive")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise RangeError("seed", "seed must be a non-negative integer")
        if not 0.0 <= self.score_threshold <= 1.0:
            raise RangeError("score_threshold", "score_threshold must lie in [0, 1]")
        if not 0.0 <= self.nms_iou <= 1.0:
            raise RangeError("nms_iou", "nms_iou must lie in [0, 1]")
        if not self.max_detections >= 1:
            raise RangeError("max_detections", "max_detections must be positive")

    def fusion(self, **overrides) -> FusionParams:
        kw = dict(beta=self.beta, kappa=self.kappa, score_threshold=self.score_threshold,
                  nms_iou=self.nms_iou, max_detections=self.max_detections)
        kw.update(overrides)
        return FusionParams(**kw)

    def stage_seed(self, stage: str) -> int:
        """Sub-seed for one pipeline stage, derived from the single config seed."""
        ss = np.random.SeedSequence([self.seed, zlib.crc32(stage.encode())])
        return int(ss.generate_state(1)[0])

    def schedule(self, which: str) -> SgdSchedule:
        base = self.base_schedule if which in ("base", "distill") else self.probe_schedule
        return replace(base, seed=self.stage_seed(which))

    def sampler(self, which: str) -> SamplingConfig:
        return replace(self.sampling, seed=self.stage_seed("sample-" + which))

    def to_dict(self) -> dict:
        d = asdict(self)
        for key in ("base_schedule", "probe_schedule"):
            d[key]["decay_epochs"] = list(d[key]["decay_epochs"])
        d["synth"] = self.synth.to_dict()
        return d


_NESTED = {
    "focal": FocalLossParams,
    "base_schedule": SgdSchedule,
    "probe_schedule": SgdSchedule,
    "sampling": SamplingConfig,
}


def config_from_dict(data: dict) -> PipelineConfig:
    if not isinstance(data, dict):
        raise ParseError("config must be a JSON object")
    known = {f.name for f in fields(PipelineConfig)}
    unknown = set(data) - known
    if unknown:
        raise RangeError(sorted(unknown)[0], f"unknown config field(s): {sorted(unknown)}")
    kw = {}
    defaults = PipelineConfig.__dataclass_fields__
    for name, value in data.items():
        if name in _NESTED:
            if not isinstance(value, dict):
                raise RangeError(name, f"{name} must be an object")
            cls = _NESTED[name]
            default = defaults[name].default
            sub_known = {f.name for f in fields(cls)}
            bad = set(value) - sub_known
            if bad:
                raise RangeError(f"{name}.{sorted(bad)[0]}", f"unknown field(s) in {name}: {sorted(bad)}")
            try:
                kw[name] = replace(default, **value)
            except (InvalidConfig, TypeError, ValueError) as exc:
                raise RangeError(name, f"{name}: {exc}") from exc
        elif name == "synth":
            try:
                kw[name] = SynthConfig.from_dict(value)
            except (InvalidConfig, TypeError, ValueError) as exc:
                raise RangeError("synth", f"synth: {exc}") from exc
        else:
            kw[name] = value
    for name in ("tau", "beta", "kappa", "score_threshold", "nms_iou"):
        if name in kw and (isinstance(kw[name], bool) or not isinstance(kw[name], (int, float))):
            raise RangeError(name, f"{name} must be a number")
    for name in ("k", "seed", "max_detections"):
        if name in kw and (isinstance(kw[name], bool) or not isinstance(kw[name], int)):
            raise RangeError(name, f"{name} must be an integer")
    for name in ("dataset", "out_dir"):
        if name in kw and not isinstance(kw[name], str):
            raise RangeError(name, f"{name} must be a string path")
    return PipelineConfig(**kw)


def load_config(path) -> PipelineConfig:
    p = Path(path)
    if not p.is_file():
        raise MissingFile(f"missing config file: {p}")
    try:
        data = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{p}: {exc}") from exc
    return config_from_dict(data)
