"""Linear heads trained on frozen proposal features.

All reductions avoid BLAS: dot products are elementwise products summed
along a contiguous axis, so a class's logit depends only on its own weight
row and results do not change with the thread count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .datastore import ClassifierHead, Dataset, DistillationProjector
from .errors import (
    DimensionMismatch,
    EmptySampleSet,
    InvalidConfig,
    OverlappingClassIds,
    UnknownClassInTargets,
)

NEGATIVE = -1


@dataclass(frozen=True)
class TrainSample:
    proposal: int
    target: int = NEGATIVE  # class id, or NEGATIVE for the all-zero target


@dataclass(frozen=True)
class FocalLossParams:
    alpha: float = 0.25
    gamma: float = 2.0

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise InvalidConfig("alpha must lie in (0, 1)")
        if not self.gamma >= 0.0:
            raise InvalidConfig("gamma must be >= 0")


@dataclass(frozen=True)
class SgdSchedule:
    """Plain SGD: linear warmup over the first iterations, then step decay.

    ``decay_epochs`` are 0-based epoch indices from which the rate is
    multiplied by ``decay_factor`` once more.
    """

    lr: float
    epochs: int
    decay_epochs: tuple = ()
    decay_factor: float = 0.1
    warmup_iters: int = 0
    batch_size: int = 32
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "decay_epochs", tuple(int(e) for e in self.decay_epochs))
        if self.lr <= 0 or self.epochs <= 0 or self.batch_size <= 0:
            raise InvalidConfig("lr, epochs and batch_size must be positive")
        if self.decay_factor <= 0 or self.warmup_iters < 0:
            raise InvalidConfig("decay_factor must be positive and warmup_iters >= 0")
        d = self.decay_epochs
        if any(b <= a for a, b in zip(d, d[1:])) or any(e <= 0 or e >= self.epochs for e in d):
            raise InvalidConfig("decay epochs must be strictly increasing and inside (0, epochs)")

    def lr_at(self, epoch: int, iteration: int) -> float:
        n_decays = sum(1 for e in self.decay_epochs if epoch >= e)
        lr = self.lr * self.decay_factor**n_decays
        if iteration < self.warmup_iters:
            lr *= (iteration + 1) / self.warmup_iters
        return lr

    def batches(self, n: int):
        """Yield ``(epoch, iteration, lr, index_batch)`` in seed-fixed order."""
        rng = np.random.default_rng(self.seed)
        it = 0
        for epoch in range(self.epochs):
            order = rng.permutation(n)
            for start in range(0, n, self.batch_size):
                yield epoch, it, self.lr_at(epoch, it), order[start:start + self.batch_size]
                it += 1


BASE_SCHEDULE = SgdSchedule(lr=0.02, epochs=20, decay_epochs=(16, 19), warmup_iters=500, batch_size=8)
PROBE_SCHEDULE = SgdSchedule(lr=0.01, epochs=12, decay_epochs=(8, 11), warmup_iters=0, batch_size=8)


def linear(f, weights, bias) -> np.ndarray:
    """``weights @ f + bias`` for one vector ``(d,)`` or a batch ``(n, d)``.

    Each output entry is a row-local sum, so appending rows to ``weights``
    never perturbs the existing outputs.
    """
    x = np.asarray(f, dtype=np.float64)
    w = np.asarray(weights, dtype=np.float64)
    if x.shape[-1] != w.shape[1]:
        raise DimensionMismatch(f"feature dim {x.shape[-1]} != head dim {w.shape[1]}")
    return (x[..., None, :] * w).sum(-1) + np.asarray(bias, dtype=np.float64)


def sigmoid(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    e = np.exp(-np.abs(x))
    return np.where(x >= 0, 1.0 / (1.0 + e), e / (1.0 + e))


def sigmoid_scores(head: ClassifierHead, f) -> np.ndarray:
    """Independent per-class probabilities for one feature vector or a batch."""
    return sigmoid(linear(f, head.weights, head.bias))


def _focal_terms(x, t, alpha, gamma):
    sign = 2.0 * t - 1.0
    z = sign * x
    log_pt = -np.logaddexp(0.0, -z)
    pt = sigmoid(z)
    one_minus = sigmoid(-z)
    alpha_t = np.where(t > 0, alpha, 1.0 - alpha)
    mod = one_minus**gamma
    loss = -alpha_t * mod * log_pt
    grad = sign * alpha_t * mod * (gamma * pt * log_pt - one_minus)
    return loss, grad


def focal_loss_and_grad(logits, targets, params: FocalLossParams = FocalLossParams()):
    """Sigmoid focal loss summed over classes, and its gradient w.r.t. the logits."""
    x = np.asarray(logits, dtype=np.float64)
    t = np.asarray(targets, dtype=np.float64)
    if x.shape != t.shape:
        raise DimensionMismatch(f"logits {x.shape} vs targets {t.shape}")
    if not np.all((t == 0) | (t == 1)):
        raise ValueError("targets must be 0 or 1")
    loss, grad = _focal_terms(x, t, params.alpha, params.gamma)
    return float(loss.sum()), grad


def _targets(samples, class_ids):
    col = {c: j for j, c in enumerate(class_ids)}
    idx = np.empty(len(samples), dtype=np.int64)
    tgt = np.zeros((len(samples), len(class_ids)))
    for i, s in enumerate(samples):
        idx[i] = s.proposal
        if s.target != NEGATIVE:
            if s.target not in col:
                raise UnknownClassInTargets(f"target class {s.target} not in {class_ids}")
            tgt[i, col[s.target]] = 1.0
    return idx, tgt


def mean_focal_loss(head: ClassifierHead, feats, targets, params: FocalLossParams) -> float:
    loss, _ = _focal_terms(linear(feats, head.weights, head.bias), targets, params.alpha, params.gamma)
    return float(loss.sum(1).mean())


def train_classifier_head(
    dataset: Dataset,
    samples,
    class_ids,
    params: FocalLossParams = FocalLossParams(),
    schedule: SgdSchedule = PROBE_SCHEDULE,
    history: list | None = None,
) -> ClassifierHead:
    """Fit a sigmoid head over ``class_ids`` by mini-batch SGD on the focal loss.

    Weights start at zero; the per-batch objective is the mean over samples of
    the class-summed focal loss. When ``history`` is given, the full-set mean
    loss is appended after every epoch.
    """
    class_ids = [int(c) for c in class_ids]
    if not samples:
        raise EmptySampleSet("no training samples")
    idx, tgt = _targets(samples, class_ids)
    if np.any(idx < 0) or np.any(idx >= dataset.n_proposals):
        raise IndexError("sample references a proposal outside the dataset")
    feats = dataset.prop_f_cls[idx].astype(np.float64)
    w = np.zeros((len(class_ids), dataset.d_cls))
    b = np.zeros(len(class_ids))
    last_epoch = 0
    for epoch, _, lr, batch in schedule.batches(len(idx)):
        if history is not None and epoch != last_epoch:
            history.append(_epoch_loss(class_ids, w, b, feats, tgt, params))
            last_epoch = epoch
        x, t = feats[batch], tgt[batch]
        _, g = _focal_terms(linear(x, w, b), t, params.alpha, params.gamma)
        g /= len(batch)
        w -= lr * (g[:, :, None] * x[:, None, :]).sum(0)
        b -= lr * g.sum(0)
    if history is not None:
        history.append(_epoch_loss(class_ids, w, b, feats, tgt, params))
    return ClassifierHead(class_ids, w.astype(np.float32), b.astype(np.float32))


def _epoch_loss(class_ids, w, b, feats, tgt, params):
    loss, _ = _focal_terms(linear(feats, w, b), tgt, params.alpha, params.gamma)
    return float(loss.sum(1).mean())


def train_distillation_head(
    dataset: Dataset,
    proposal_indices,
    schedule: SgdSchedule = BASE_SCHEDULE,
    history: list | None = None,
) -> DistillationProjector:
    """Fit a linear map f_cls -> e_img minimising the L1 distance.

    The per-batch objective is the mean over samples of the summed absolute
    residual; the subgradient at a zero residual is taken as 0.
    """
    idx = np.asarray(proposal_indices, dtype=np.int64).reshape(-1)
    if len(idx) == 0:
        raise EmptySampleSet("no proposals for distillation")
    x_all = dataset.prop_f_cls[idx].astype(np.float64)
    y_all = dataset.prop_e_img[idx].astype(np.float64)
    w = np.zeros((dataset.d_emb, dataset.d_cls))
    b = np.zeros(dataset.d_emb)
    last_epoch = 0
    for epoch, _, lr, batch in schedule.batches(len(idx)):
        if history is not None and epoch != last_epoch:
            history.append(_l1(w, b, x_all, y_all))
            last_epoch = epoch
        x, y = x_all[batch], y_all[batch]
        g = np.sign(linear(x, w, b) - y) / len(batch)
        w -= lr * (g[:, :, None] * x[:, None, :]).sum(0)
        b -= lr * g.sum(0)
    if history is not None:
        history.append(_l1(w, b, x_all, y_all))
    return DistillationProjector(w.astype(np.float32), b.astype(np.float32))


def _l1(w, b, x, y) -> float:
    return float(np.abs(linear(x, w, b) - y).sum(1).mean())


def distillation_l1(projector: DistillationProjector, dataset: Dataset, proposal_indices) -> float:
    """Mean (over proposals) summed-absolute residual of ``projector``."""
    idx = np.asarray(proposal_indices, dtype=np.int64)
    return _l1(projector.weights, projector.bias,
               dataset.prop_f_cls[idx].astype(np.float64), dataset.prop_e_img[idx].astype(np.float64))


def concat_heads(base: ClassifierHead, novel: ClassifierHead) -> ClassifierHead:
    """Stack base rows then novel rows into one head.

    The base head's projector (if any) is carried over.
    """
    if base.d_cls != novel.d_cls:
        raise DimensionMismatch(f"head dims differ: {base.d_cls} vs {novel.d_cls}")
    overlap = set(base.class_ids) & set(novel.class_ids)
    if overlap:
        raise OverlappingClassIds(f"class ids in both heads: {sorted(overlap)}")
    return ClassifierHead(
        base.class_ids + novel.class_ids,
        np.concatenate([base.weights, novel.weights]),
        np.concatenate([base.bias, novel.bias]),
        base.projector if base.projector is not None else novel.projector,
    )
