"""Two-layer graph convolutional classifier over a learned adjacency.

Forward model:

    probs = row_softmax( A_s relu( A_s drop(X) W0 ) W1 )

where A_s is the symmetrized view of the trainable adjacency and drop() is
inverted dropout, active in training mode only (on the input signal and on
the hidden activations). The backward pass is hand-derived reverse-mode;
products are associated so that no N x N x C-sized multiplication occurs
(the expensive contractions are all N^2 x hidden-size).
"""

import struct
from dataclasses import dataclass, replace
from typing import Optional, Tuple

import numpy as np

from .fileio import atomic_write_bytes
from .graphs import LearnedAdjacency
from .linalg import (Matrix, Rng, ShapeError, glorot_uniform, rand_uniform,
                     relu, row_softmax)
from .losses import LossWeights

CHECKPOINT_MAGIC = b"GRLCKPT1"


@dataclass(frozen=True)
class LearnedGraphGcn:
    """Parameter bundle: trainable adjacency, the two weight matrices, the
    loss weights, and the regularization settings."""

    adj: LearnedAdjacency
    w0: Matrix
    w1: Matrix
    weights: LossWeights
    dropout_rate: float = 0.5
    weight_decay: float = 5e-4

    @property
    def n_nodes(self) -> int:
        return self.adj.n

    @property
    def n_features(self) -> int:
        return self.w0.shape[0]

    @property
    def n_hidden(self) -> int:
        return self.w0.shape[1]

    @property
    def n_classes(self) -> int:
        return self.w1.shape[1]


@dataclass(frozen=True)
class ForwardCache:
    """Every intermediate the backward pass needs. `xw0` is drop(X) @ W0;
    `hidden_dropped` is the hidden activation after its dropout mask. The
    masks are None in evaluation mode."""

    a_out: Matrix
    xw0: Matrix
    pre_relu: Matrix
    hidden: Matrix
    hidden_dropped: Matrix
    logits: Matrix
    probs: Matrix
    mask_x: Optional[Matrix]
    mask_h: Optional[Matrix]


def init_model(rng: Rng, n: int, c: int, h: int, f: int,
               weights: Optional[LossWeights] = None,
               dropout_rate: float = 0.5,
               weight_decay: float = 5e-4) -> LearnedGraphGcn:
    """Fresh model: adjacency entries i.i.d. U(0, 2/n) so each row sums to 1
    in expectation (near the row-sum penalty's feasible set), weight matrices
    Glorot-uniform. Draw order: adjacency, then W0, then W1."""
    if min(n, c, h, f) <= 0:
        raise ValueError(f"init_model: dimensions must be positive, got {(n, c, h, f)}")
    a_raw = rand_uniform(rng, n, n, 0.0, 2.0 / n)
    w0 = glorot_uniform(rng, c, h)
    w1 = glorot_uniform(rng, h, f)
    return LearnedGraphGcn(adj=LearnedAdjacency(a_raw), w0=w0, w1=w1,
                           weights=weights if weights is not None else LossWeights(),
                           dropout_rate=dropout_rate, weight_decay=weight_decay)


def _dropout_mask(rng: Rng, rows: int, cols: int, rate: float) -> Matrix:
    keep = 1.0 - rate
    return (rng.random(rows, cols) < keep) / keep


def forward(model: LearnedGraphGcn, x: Matrix, training: bool = False,
            rng: Optional[Rng] = None) -> ForwardCache:
    """Run the forward model. In training mode dropout masks are drawn from
    `rng` (input mask first, hidden mask second) with inverted scaling, so
    evaluation applies no compensation. Evaluation mode is a pure function
    of (model, x)."""
    n, c = model.n_nodes, model.n_features
    if x.shape != (n, c):
        raise ShapeError(f"forward: signal shape {x.shape}, expected {(n, c)}")
    use_dropout = training and model.dropout_rate > 0.0
    if use_dropout and rng is None:
        raise ValueError("forward: training-mode dropout needs an Rng")
    a_out = model.adj.symmetrized
    mask_x = mask_h = None
    x_in = x
    if use_dropout:
        mask_x = _dropout_mask(rng, n, c, model.dropout_rate)
        x_in = x * mask_x
    xw0 = x_in @ model.w0
    pre_relu = a_out @ xw0
    hidden = relu(pre_relu)
    hidden_dropped = hidden
    if use_dropout:
        mask_h = _dropout_mask(rng, n, model.n_hidden, model.dropout_rate)
        hidden_dropped = hidden * mask_h
    logits = a_out @ (hidden_dropped @ model.w1)
    probs = row_softmax(logits)
    return ForwardCache(a_out=a_out, xw0=xw0, pre_relu=pre_relu, hidden=hidden,
                        hidden_dropped=hidden_dropped, logits=logits, probs=probs,
                        mask_x=mask_x, mask_h=mask_h)


def backward(model: LearnedGraphGcn, cache: ForwardCache, x: Matrix,
             grad_logits: Matrix) -> Tuple[Matrix, Matrix, Matrix]:
    """Reverse-mode gradients (grad_w0, grad_w1, grad_a_out) of a loss whose
    logit gradient is `grad_logits` (for the masked cross-entropy that is the
    fused (probs - targets) / |labeled| on labeled rows).

    The adjacency enters the forward model twice, so grad_a_out sums both
    paths. Weight decay contributes 2 * weight_decay * W0 to grad_w0 (first
    layer only). Chaining to the raw adjacency is the caller's job via
    `symmetrize(grad_a_out)`.
    """
    if grad_logits.shape != cache.logits.shape:
        raise ShapeError(
            f"backward: logit grad shape {grad_logits.shape} does not match "
            f"cache {cache.logits.shape}")
    n, c = model.n_nodes, model.n_features
    if x.shape != (n, c) or cache.xw0.shape != (n, model.n_hidden):
        raise ShapeError("backward: cache is stale for this model/signal")
    a_out = cache.a_out  # exactly symmetric, so it serves as its own transpose

    # output layer: logits = a_out @ (hidden_dropped @ w1)
    hw1 = cache.hidden_dropped @ model.w1
    grad_a_out = grad_logits @ hw1.T
    d_hw1 = a_out @ grad_logits
    grad_w1 = cache.hidden_dropped.T @ d_hw1
    d_hidden = d_hw1 @ model.w1.T
    if cache.mask_h is not None:
        d_hidden = d_hidden * cache.mask_h
    d_pre = d_hidden * (cache.pre_relu > 0.0)

    # input layer: pre_relu = a_out @ xw0, xw0 = (x * mask_x) @ w0
    grad_a_out = grad_a_out + d_pre @ cache.xw0.T
    d_xw0 = a_out @ d_pre
    x_in = x if cache.mask_x is None else x * cache.mask_x
    grad_w0 = x_in.T @ d_xw0 + (2.0 * model.weight_decay) * model.w0
    return grad_w0, grad_w1, grad_a_out


def predict(probs: Matrix) -> np.ndarray:
    """Per-row argmax; ties resolve to the lowest class index."""
    return np.argmax(probs, axis=1)


def with_params(model: LearnedGraphGcn, a_raw: Matrix, w0: Matrix,
                w1: Matrix) -> LearnedGraphGcn:
    """Copy of the model with replaced parameters (settings unchanged)."""
    return replace(model, adj=LearnedAdjacency(a_raw), w0=w0, w1=w1)


def save_checkpoint(model: LearnedGraphGcn, path) -> None:
    """Write the parameters to a flat binary file: an 8-byte magic string,
    four little-endian uint32 dims (n, c, h, f), then the raw adjacency, W0
    and W1 as little-endian float64 in row-major order. Loss weights and
    regularization settings are not serialized."""
    n, c = model.n_nodes, model.n_features
    h, f = model.n_hidden, model.n_classes
    blob = bytearray()
    blob += CHECKPOINT_MAGIC
    blob += struct.pack("<4I", n, c, h, f)
    for arr in (model.adj.raw, model.w0, model.w1):
        blob += np.ascontiguousarray(arr, dtype="<f8").tobytes()
    atomic_write_bytes(path, bytes(blob))


def load_checkpoint(path, weights: Optional[LossWeights] = None,
                    dropout_rate: float = 0.5,
                    weight_decay: float = 5e-4) -> LearnedGraphGcn:
    """Read a checkpoint written by `save_checkpoint`. Settings that are not
    serialized are taken from the arguments."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:8] != CHECKPOINT_MAGIC:
        raise ValueError(f"load_checkpoint: {path} is not a model checkpoint")
    n, c, h, f = struct.unpack_from("<4I", blob, 8)
    sizes = (n * n, c * h, h * f)
    expected = 8 + 16 + 8 * sum(sizes)
    if len(blob) != expected:
        raise ValueError(
            f"load_checkpoint: {path} is truncated or corrupt "
            f"({len(blob)} bytes, expected {expected})")
    arrays = []
    offset = 24
    for count, shape in zip(sizes, ((n, n), (c, h), (h, f))):
        arrays.append(np.frombuffer(blob, dtype="<f8", count=count,
                                    offset=offset).astype(np.float64).reshape(shape))
        offset += 8 * count
    a_raw, w0, w1 = arrays
    return LearnedGraphGcn(adj=LearnedAdjacency(a_raw), w0=w0, w1=w1,
                           weights=weights if weights is not None else LossWeights(),
                           dropout_rate=dropout_rate, weight_decay=weight_decay)
