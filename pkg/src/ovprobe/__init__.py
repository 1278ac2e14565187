"""Open-vocabulary detection heads on frozen region features.

Base sigmoid head + distillation projector, top-K retrieval pseudo labels
for novel classes, a linear novel probe, fused inference and AP50 evaluation.
"""

from ._backend import NAME as BACKEND
from .datastore import (
    ClassEmbedding,
    ClassifierHead,
    Dataset,
    DistillationProjector,
    GroundTruthBox,
    HeadCheckpoint,
    ProposalRecord,
    load_dataset,
    read_head,
    write_dataset,
    write_head,
)
from .evaluation import EvalReport, average_precision, evaluate_dataset, match_detections
from .geometry import BoxXYXY, iou, nms
from .inference import (
    Detection,
    FusionParams,
    baseline_similarity_detect,
    detect_image,
    distillation_scores,
    fuse_scores,
)
from .probe import (
    FocalLossParams,
    SgdSchedule,
    TrainSample,
    concat_heads,
    focal_loss_and_grad,
    sigmoid_scores,
    train_classifier_head,
    train_distillation_head,
)
from .retrieval import PseudoLabelSet, SamplingConfig, filter_proposals, retrieve_topk, sample_pos_neg
from .synth import SynthConfig, generate_synthetic

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ClassEmbedding",
    "ClassifierHead",
    "Dataset",
    "DistillationProjector",
    "GroundTruthBox",
    "HeadCheckpoint",
    "ProposalRecord",
    "load_dataset",
    "read_head",
    "write_dataset",
    "write_head",
    "EvalReport",
    "average_precision",
    "evaluate_dataset",
    "match_detections",
    "BoxXYXY",
    "iou",
    "nms",
    "Detection",
    "FusionParams",
    "baseline_similarity_detect",
    "detect_image",
    "distillation_scores",
    "fuse_scores",
    "FocalLossParams",
    "SgdSchedule",
    "TrainSample",
    "concat_heads",
    "focal_loss_and_grad",
    "sigmoid_scores",
    "train_classifier_head",
    "train_distillation_head",
    "PseudoLabelSet",
    "SamplingConfig",
    "filter_proposals",
    "retrieve_topk",
    "sample_pos_neg",
    "SynthConfig",
    "generate_synthetic",
]
