"""Adjacency-matrix semantics: degree matrices, Laplacians, symmetrization,
and ground-truth graph preprocessing."""

from dataclasses import dataclass
from typing import Iterable, Tuple

import numpy as np

from .linalg import Matrix, ShapeError


def _check_square(a: Matrix, op: str) -> None:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeError(f"{op}: matrix is not square, shape {a.shape}")


def degree_matrix(a: Matrix) -> Matrix:
    """Diagonal matrix of row sums."""
    _check_square(a, "degree_matrix")
    return np.diag(a.sum(axis=1))


def combinatorial_laplacian(a: Matrix) -> Matrix:
    """D - A, where D is the diagonal degree matrix of A."""
    _check_square(a, "combinatorial_laplacian")
    return degree_matrix(a) - a


def normalized_laplacian(a: Matrix) -> Matrix:
    """I - D^{-1/2} A D^{-1/2}.

    Requires strictly positive row sums; an isolated node is reported by
    index so the caller can handle it.
    """
    _check_square(a, "normalized_laplacian")
    d = a.sum(axis=1)
    bad = np.flatnonzero(d <= 0.0)
    if bad.size:
        raise ValueError(f"normalized_laplacian: node {bad[0]} has zero degree")
    inv_sqrt = 1.0 / np.sqrt(d)
    return np.eye(a.shape[0]) - inv_sqrt[:, None] * a * inv_sqrt[None, :]


def symmetrize(raw: Matrix) -> Matrix:
    """(raw^T + raw) / 2. Output is exactly symmetric (entrywise additions
    commute, so [i,j] and [j,i] round identically)."""
    _check_square(raw, "symmetrize")
    return 0.5 * (raw.T + raw)


class LearnedAdjacency:
    """A trainable square adjacency matrix together with its symmetrized view.

    `raw` is the matrix updated by the optimizer; `symmetrized` is the view
    every downstream consumer (convolutions, losses) sees.
    """

    __slots__ = ("raw", "symmetrized")

    def __init__(self, raw: Matrix):
        _check_square(raw, "LearnedAdjacency")
        self.raw = raw
        self.symmetrized = symmetrize(raw)

    @property
    def n(self) -> int:
        return self.raw.shape[0]


@dataclass(frozen=True)
class GroundTruthGraph:
    """A known reference graph: `binary` is the symmetric 0/1 adjacency with
    zero diagonal; `normalized` is D^{-1/2} A D^{-1/2} of it, with isolated
    nodes left as all-zero rows."""

    binary: Matrix
    normalized: Matrix

    @property
    def n(self) -> int:
        return self.binary.shape[0]


def preprocess_ground_truth(edges: Iterable[Tuple[int, int]], n: int) -> GroundTruthGraph:
    """Build a GroundTruthGraph from an undirected edge list.

    Self-loops are dropped and duplicate edges collapse; endpoints must lie
    in [0, n). Normalization deliberately adds no self-loops, so the target
    stays consistent with the zero-trace and sparsity penalties applied to
    the learned matrix.
    """
    binary = np.zeros((n, n))
    for e in edges:
        i, j = e
        if not (0 <= i < n and 0 <= j < n):
            raise ValueError(f"preprocess_ground_truth: edge {e!r} out of range for n={n}")
        if i == j:
            continue
        binary[i, j] = 1.0
        binary[j, i] = 1.0
    d = binary.sum(axis=1)
    inv_sqrt = np.where(d > 0.0, 1.0 / np.sqrt(np.where(d > 0.0, d, 1.0)), 0.0)
    normalized = inv_sqrt[:, None] * binary * inv_sqrt[None, :]
    return GroundTruthGraph(binary=binary, normalized=normalized)
