"""Loss terms for joint graph and classifier training, with hand-derived
analytic gradients.

Five terms in total:

* smoothness (graph Laplacian regularizer) of the node features over the
  learned graph,
* an L1 sparsity penalty on the learned adjacency (subgradient),
* validity penalties (asymmetry, row sums deviating from 1, nonzero trace),
* squared Frobenius distance to a known reference adjacency,
* masked cross-entropy over the labeled nodes.

Each function returns ``(value, gradient)`` where the gradient is taken with
respect to the first matrix argument. All matrix norms written as squares are
sums of squared entries.
"""

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from .linalg import Matrix, ShapeError, sgn

PROB_FLOOR = 1e-12


@dataclass(frozen=True)
class LossWeights:
    """Nonnegative weights for the loss terms.

    `lambda2` (asymmetry penalty) must stay 0 while the adjacency is
    symmetrized before use, which makes the penalty identically zero anyway.
    """

    lambda0: float = 0.01
    lambda1: float = 0.1
    lambda2: float = 0.0
    lambda3: float = 0.1
    lambda4: float = 0.001
    alpha: float = 10.0

    def __post_init__(self):
        for name in ("lambda0", "lambda1", "lambda2", "lambda3", "lambda4", "alpha"):
            if getattr(self, name) < 0:
                raise ValueError(f"LossWeights.{name} must be nonnegative")


@dataclass(frozen=True)
class LossReport:
    """Per-term loss values plus their weighted total."""

    glr: float
    sparsity: float
    properties: float
    gt: float
    cross_entropy: float
    total: float

    @classmethod
    def assemble(cls, glr: float, sparsity: float, properties: float,
                 gt: float, cross_entropy: float, alpha: float) -> "LossReport":
        total = glr + sparsity + properties + alpha * gt + cross_entropy
        return cls(glr, sparsity, properties, gt, cross_entropy, total)


def glr_loss(x: Matrix, a_out: Matrix, lambda0: float,
             squared: bool = True) -> Tuple[float, Matrix]:
    """Smoothness of the signal matrix over the learned graph.

    For each feature channel c, q_c = x_c^T (I - a_out) x_c. The default
    (squared) form is lambda0 * sum_c q_c^2 with gradient
    -2 * lambda0 * sum_c q_c x_c x_c^T; `squared=False` gives the linear
    variant lambda0 * sum_c q_c with constant gradient -lambda0 * x x^T.
    Either gradient is exactly symmetric.
    """
    n = a_out.shape[0]
    if a_out.ndim != 2 or a_out.shape[1] != n:
        raise ShapeError(f"glr_loss: adjacency is not square, shape {a_out.shape}")
    if x.ndim != 2 or x.shape[0] != n:
        raise ShapeError(f"glr_loss: signal shape {x.shape} does not match n={n}")
    if lambda0 == 0.0:
        return 0.0, np.zeros((n, n))
    residual = x - a_out @ x
    q = np.einsum("nc,nc->c", x, residual)
    if squared:
        value = lambda0 * float(q @ q)
        grad = (-2.0 * lambda0) * ((x * q) @ x.T)
    else:
        value = lambda0 * float(q.sum())
        grad = (-lambda0) * (x @ x.T)
    # mathematically symmetric already; re-symmetrize so it is exact bitwise
    grad = 0.5 * (grad.T + grad)
    return value, grad


def sparsity_loss(a_out: Matrix, lambda1: float) -> Tuple[float, Matrix]:
    """L1 penalty lambda1 * sum |a_ij|, with subgradient lambda1 * sign(a)."""
    value = lambda1 * float(np.abs(a_out).sum())
    return value, lambda1 * sgn(a_out)


def properties_loss(a_out: Matrix, w: LossWeights) -> Tuple[float, Matrix]:
    """Penalties pulling the adjacency toward a valid one: symmetric
    (lambda2, zero when symmetrization is active), rows summing to 1
    (lambda3), and zero trace (lambda4)."""
    n = a_out.shape[0]
    if a_out.ndim != 2 or a_out.shape[1] != n:
        raise ShapeError(f"properties_loss: matrix is not square, shape {a_out.shape}")
    row_dev = a_out.sum(axis=1) - 1.0
    tr = float(np.trace(a_out))
    value = (w.lambda3 * float(row_dev @ row_dev) + w.lambda4 * tr * tr)
    grad = np.zeros((n, n))
    grad += (2.0 * w.lambda3) * row_dev[:, None]
    idx = np.arange(n)
    grad[idx, idx] += 2.0 * w.lambda4 * tr
    if w.lambda2 != 0.0:
        asym = a_out.T - a_out
        value += w.lambda2 * float((asym * asym).sum())
        grad += (4.0 * w.lambda2) * (a_out - a_out.T)
    return value, grad


def gt_loss(a_out: Matrix, a_gt: Matrix) -> Tuple[float, Matrix]:
    """Squared entrywise distance to the reference adjacency. The overall
    objective weights this term by alpha; that scaling is applied by the
    caller assembling the total."""
    if a_out.shape != a_gt.shape:
        raise ShapeError(f"gt_loss: shape mismatch {a_out.shape} vs {a_gt.shape}")
    diff = a_out - a_gt
    return float((diff * diff).sum()), 2.0 * diff


def masked_cross_entropy(z: Matrix, y: Matrix, labeled: Sequence[int],
                         average: bool = True) -> Tuple[float, Matrix]:
    """Cross-entropy of predicted row distributions against one-hot labels,
    restricted to the labeled nodes.

    Probabilities are clamped at 1e-12 inside the log so the value stays
    finite. By default the sum is divided by the number of labeled nodes;
    `average=False` keeps the plain sum. The gradient is with respect to z
    and is zero on unlabeled rows.
    """
    if z.shape != y.shape:
        raise ShapeError(f"masked_cross_entropy: shape mismatch {z.shape} vs {y.shape}")
    idx = np.asarray(labeled, dtype=np.int64)
    if idx.size == 0:
        raise ValueError("masked_cross_entropy: labeled set is empty")
    y_lab = y[idx]
    if not (np.all((y_lab == 0.0) | (y_lab == 1.0)) and np.all(y_lab.sum(axis=1) == 1.0)):
        raise ValueError("masked_cross_entropy: labeled rows of y must be one-hot")
    z_lab = np.maximum(z[idx], PROB_FLOOR)
    scale = 1.0 / idx.size if average else 1.0
    value = -scale * float((y_lab * np.log(z_lab)).sum())
    grad = np.zeros_like(z)
    grad[idx] = -scale * (y_lab / z_lab)
    return value, grad


def softmax_cross_entropy_logit_grad(probs: Matrix, y: Matrix, labeled: Sequence[int],
                                     average: bool = True) -> Matrix:
    """Gradient of the masked cross-entropy with respect to the logits that
    produced `probs` via a row softmax: (probs - y) on labeled rows, zero
    elsewhere, scaled by 1/|labeled| when averaging.

    Fusing the softmax into the cross-entropy gradient avoids dividing by
    near-zero probabilities; it is mathematically identical to chaining
    `masked_cross_entropy`'s gradient through the softmax Jacobian.
    """
    if probs.shape != y.shape:
        raise ShapeError(f"logit grad: shape mismatch {probs.shape} vs {y.shape}")
    idx = np.asarray(labeled, dtype=np.int64)
    if idx.size == 0:
        raise ValueError("logit grad: labeled set is empty")
    scale = 1.0 / idx.size if average else 1.0
    grad = np.zeros_like(probs)
    grad[idx] = scale * (probs[idx] - y[idx])
    return grad


def graph_learning_loss(x: Matrix, a_out: Matrix,
                        w: LossWeights) -> Tuple[LossReport, Matrix]:
    """Sum of the three adjacency-only terms (smoothness + sparsity +
    validity) as a partial LossReport, with the combined gradient."""
    glr_v, glr_g = glr_loss(x, a_out, w.lambda0)
    sp_v, sp_g = sparsity_loss(a_out, w.lambda1)
    pr_v, pr_g = properties_loss(a_out, w)
    report = LossReport.assemble(glr_v, sp_v, pr_v, gt=0.0, cross_entropy=0.0,
                                 alpha=w.alpha)
    return report, glr_g + sp_g + pr_g
