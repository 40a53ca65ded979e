"""Joint training loop for the learned adjacency and the classifier.

Each epoch runs one dropout forward pass, assembles the full objective
(smoothness, sparsity, adjacency-validity penalties, optional proximity to
a reference graph, masked cross-entropy on the training nodes), backpropagates
to the two weight matrices and the raw adjacency, and applies one Adam step
per parameter. The gradient reaching the raw adjacency is the symmetrized
gradient of the symmetrized adjacency, so the raw matrix may drift while the
effective operator stays symmetric.

Per-epoch scalars land in `TrainRecord` rows which round-trip through a
fixed-header CSV; copies of the effective adjacency can be captured at
chosen epochs to visualize convergence.
"""

import csv
import io
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from .datasets import Dataset
from .fileio import atomic_write_text
from .graphs import symmetrize
from .linalg import Matrix, Rng, frobenius_sq
from .losses import (LossReport, LossWeights, glr_loss, gt_loss,
                     masked_cross_entropy, properties_loss,
                     softmax_cross_entropy_logit_grad, sparsity_loss)
from .network import LearnedGraphGcn, backward, forward, init_model, predict, with_params
from .optim import AdamState, adam_step

CSV_HEADER = ("epoch", "glr", "sparsity", "properties", "gt", "cross_entropy",
              "total", "train_acc", "val_acc", "test_acc", "gt_rel_frob")


class NonFiniteLossError(RuntimeError):
    """A loss term or parameter went NaN/inf; training cannot continue."""

    def __init__(self, epoch: int, term: str):
        super().__init__(f"epoch {epoch}: non-finite value in {term}")
        self.epoch = epoch
        self.term = term


@dataclass(frozen=True)
class TrainConfig:
    """Everything that determines a training run besides the dataset."""

    epochs: int = 200
    weights: LossWeights = field(default_factory=LossWeights)
    lr: float = 0.01
    seed: int = 0
    snapshot_epochs: Tuple[int, ...] = (1, 5, 15, 50)
    use_gt_loss: bool = False
    average_ce: bool = True
    clamp_nonneg: bool = False
    early_stop_patience: Optional[int] = None
    hidden: int = 16
    dropout_rate: float = 0.5
    weight_decay: float = 5e-4

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        bad = [e for e in self.snapshot_epochs if not 1 <= e <= self.epochs]
        if bad:
            raise ValueError(f"snapshot epochs {bad} outside 1..{self.epochs}")
        if self.early_stop_patience is not None and self.early_stop_patience < 1:
            raise ValueError("early_stop_patience must be >= 1 when set")


@dataclass(frozen=True)
class TrainRecord:
    """One epoch's loss terms and accuracies (None where not evaluated)."""

    epoch: int
    glr: float
    sparsity: float
    properties: float
    gt: float
    cross_entropy: float
    total: float
    train_acc: float
    val_acc: Optional[float] = None
    test_acc: Optional[float] = None
    gt_rel_frob: Optional[float] = None


@dataclass(frozen=True)
class TrainResult:
    model: LearnedGraphGcn
    records: List[TrainRecord]
    snapshots: Dict[int, Matrix]
    stopped_epoch: int


def _check_finite(epoch: int, term: str, value) -> None:
    if not np.all(np.isfinite(value)):
        raise NonFiniteLossError(epoch, term)


def _accuracy(pred: np.ndarray, labels: np.ndarray, idx: np.ndarray) -> float:
    return float(np.mean(pred[idx] == labels[idx]))


def evaluate(model: LearnedGraphGcn, ds: Dataset, which: str = "test") -> float:
    """Dropout-free accuracy on one of the dataset's index sets."""
    idx = {"train": ds.train_idx, "val": ds.val_idx, "test": ds.test_idx}.get(which)
    if idx is None:
        raise ValueError(f"evaluate: no index set {which!r}")
    cache = forward(model, ds.x, training=False)
    return _accuracy(predict(cache.probs), ds.labels(), idx)


def train(ds: Dataset, cfg: TrainConfig) -> TrainResult:
    """Run the joint optimization and return the final model, the per-epoch
    records, and adjacency snapshots keyed by epoch."""
    if ds.train_idx is None:
        raise ValueError("train: dataset has no splits assigned")
    if cfg.use_gt_loss and ds.gt is None:
        raise ValueError("train: use_gt_loss set but the dataset has no reference graph")
    w = cfg.weights
    if w.lambda2 != 0.0:
        raise ValueError(
            "train: the antisymmetry penalty is structurally zero here "
            "(the effective adjacency is symmetric); set lambda2=0")

    rng = Rng(cfg.seed)
    model = init_model(rng, ds.n_nodes, ds.n_features, cfg.hidden, ds.n_classes,
                       weights=w, dropout_rate=cfg.dropout_rate,
                       weight_decay=cfg.weight_decay)
    opt_a = AdamState.for_param(model.adj.raw, lr=cfg.lr)
    opt_w0 = AdamState.for_param(model.w0, lr=cfg.lr)
    opt_w1 = AdamState.for_param(model.w1, lr=cfg.lr)

    labels = ds.labels()
    gt_norm_ref = None
    if ds.gt is not None:
        gt_norm_ref = np.sqrt(frobenius_sq(ds.gt.normalized))

    records: List[TrainRecord] = []
    snapshots: Dict[int, Matrix] = {}
    want_snapshot = set(cfg.snapshot_epochs)
    best_val = -1.0
    stale = 0
    stopped = cfg.epochs

    for epoch in range(1, cfg.epochs + 1):
        cache = forward(model, ds.x, training=True, rng=rng)
        a_out = cache.a_out

        if w.lambda0 != 0.0:
            glr_v, glr_g = glr_loss(ds.x, a_out, w.lambda0)
        else:
            glr_v, glr_g = 0.0, None
        sp_v, sp_g = sparsity_loss(a_out, w.lambda1)
        pr_v, pr_g = properties_loss(a_out, w)
        if cfg.use_gt_loss:
            gt_v, gt_g = gt_loss(a_out, ds.gt.normalized)
        else:
            gt_v, gt_g = 0.0, None
        ce_v, _ = masked_cross_entropy(cache.probs, ds.y, ds.train_idx,
                                       average=cfg.average_ce)
        for term, value in (("glr", glr_v), ("sparsity", sp_v),
                            ("properties", pr_v), ("gt", gt_v),
                            ("cross_entropy", ce_v)):
            _check_finite(epoch, term, value)
        report = LossReport.assemble(glr_v, sp_v, pr_v, gt_v, ce_v, w.alpha)

        grad_logits = softmax_cross_entropy_logit_grad(
            cache.probs, ds.y, ds.train_idx, average=cfg.average_ce)
        grad_w0, grad_w1, grad_a_out = backward(model, cache, ds.x, grad_logits)
        if glr_g is not None:
            grad_a_out = grad_a_out + glr_g
        grad_a_out = grad_a_out + sp_g + pr_g
        if gt_g is not None:
            grad_a_out = grad_a_out + w.alpha * gt_g
        grad_a_raw = symmetrize(grad_a_out)

        a_raw = adam_step(opt_a, model.adj.raw, grad_a_raw)
        if cfg.clamp_nonneg:
            a_raw = np.maximum(a_raw, 0.0)
        w0 = adam_step(opt_w0, model.w0, grad_w0)
        w1 = adam_step(opt_w1, model.w1, grad_w1)
        for term, value in (("adjacency", a_raw), ("w0", w0), ("w1", w1)):
            _check_finite(epoch, term, value)
        model = with_params(model, a_raw, w0, w1)

        eval_cache = forward(model, ds.x, training=False)
        pred = predict(eval_cache.probs)
        train_acc = _accuracy(pred, labels, ds.train_idx)
        val_acc = _accuracy(pred, labels, ds.val_idx) if ds.val_idx is not None and ds.val_idx.size else None
        test_acc = _accuracy(pred, labels, ds.test_idx) if ds.test_idx is not None and ds.test_idx.size else None
        rel = None
        if gt_norm_ref is not None and gt_norm_ref > 0.0:
            diff = model.adj.symmetrized - ds.gt.normalized
            rel = float(np.sqrt(frobenius_sq(diff)) / gt_norm_ref)

        records.append(TrainRecord(epoch=epoch, glr=report.glr, sparsity=report.sparsity,
                                   properties=report.properties, gt=report.gt,
                                   cross_entropy=report.cross_entropy, total=report.total,
                                   train_acc=train_acc, val_acc=val_acc,
                                   test_acc=test_acc, gt_rel_frob=rel))
        if epoch in want_snapshot:
            snapshots[epoch] = model.adj.symmetrized.copy()

        if cfg.early_stop_patience is not None and val_acc is not None:
            if val_acc > best_val:
                best_val = val_acc
                stale = 0
            else:
                stale += 1
                if stale >= cfg.early_stop_patience:
                    stopped = epoch
                    break

    return TrainResult(model=model, records=records, snapshots=snapshots,
                       stopped_epoch=stopped)


def _cell(value) -> str:
    return "" if value is None else repr(value)


def records_to_csv(records, path) -> None:
    """Write epoch records with the fixed column header; floats are written
    with repr so parsing them back is exact."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in records:
        writer.writerow([r.epoch] + [_cell(getattr(r, k)) for k in CSV_HEADER[1:]])
    atomic_write_text(path, buf.getvalue())


def parse_records_csv(path) -> List[TrainRecord]:
    """Read a CSV written by `records_to_csv` back into records."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != CSV_HEADER:
            raise ValueError(f"parse_records_csv: unexpected header {header}")
        out = []
        for row in reader:
            if not row:
                continue
            vals = dict(zip(CSV_HEADER, row))
            out.append(TrainRecord(
                epoch=int(vals["epoch"]),
                glr=float(vals["glr"]),
                sparsity=float(vals["sparsity"]),
                properties=float(vals["properties"]),
                gt=float(vals["gt"]),
                cross_entropy=float(vals["cross_entropy"]),
                total=float(vals["total"]),
                train_acc=float(vals["train_acc"]),
                val_acc=float(vals["val_acc"]) if vals["val_acc"] else None,
                test_acc=float(vals["test_acc"]) if vals["test_acc"] else None,
                gt_rel_frob=float(vals["gt_rel_frob"]) if vals["gt_rel_frob"] else None,
            ))
    return out
