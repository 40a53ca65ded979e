"""Dense float64 matrix kernels and a seeded random source.

Every array handled by this package is a 2-D C-contiguous float64 ndarray
(referred to as `Matrix` below). The functions here are thin, shape-checked
wrappers around NumPy; all other modules build on them.
"""

import numpy as np

Matrix = np.ndarray


class ShapeError(ValueError):
    """Raised when operand shapes are incompatible."""


def as_matrix(a) -> Matrix:
    """Coerce `a` to a 2-D float64 array (copying only if needed)."""
    m = np.ascontiguousarray(a, dtype=np.float64)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2:
        raise ShapeError(f"expected a 2-D matrix, got ndim={m.ndim}")
    return m


def _check_same_shape(a: Matrix, b: Matrix, op: str) -> None:
    if a.shape != b.shape:
        raise ShapeError(f"{op}: shape mismatch {a.shape} vs {b.shape}")


def matmul(a: Matrix, b: Matrix) -> Matrix:
    """Matrix product with 64-bit accumulation."""
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"matmul: inner dimensions differ, {a.shape} x {b.shape}")
    return a @ b


def transpose(a: Matrix) -> Matrix:
    return np.ascontiguousarray(a.T)


def add(a: Matrix, b: Matrix) -> Matrix:
    _check_same_shape(a, b, "add")
    return a + b


def sub(a: Matrix, b: Matrix) -> Matrix:
    _check_same_shape(a, b, "sub")
    return a - b


def mul(a: Matrix, b: Matrix) -> Matrix:
    """Entrywise (Hadamard) product."""
    _check_same_shape(a, b, "mul")
    return a * b


def scale(a: Matrix, c: float) -> Matrix:
    return a * float(c)


def sum_all(a: Matrix) -> float:
    return float(a.sum())


def trace(a: Matrix) -> float:
    if a.shape[0] != a.shape[1]:
        raise ShapeError(f"trace: matrix is not square, shape {a.shape}")
    return float(np.trace(a))


def frobenius_sq(a: Matrix) -> float:
    """Sum of squared entries."""
    return float((a * a).sum())


def l1_norm(a: Matrix) -> float:
    """Sum of absolute values of all entries."""
    return float(np.abs(a).sum())


def row_sums(a: Matrix) -> Matrix:
    """Per-row sums as an n x 1 matrix."""
    return a.sum(axis=1, keepdims=True)


def relu(a: Matrix) -> Matrix:
    return np.maximum(a, 0.0)


def relu_mask(a: Matrix) -> Matrix:
    """Subgradient mask of relu: 1 where entry > 0, else 0 (0 at exactly 0)."""
    return (a > 0.0).astype(np.float64)


def row_softmax(a: Matrix) -> Matrix:
    """Per-row softmax, computed with row-max subtraction so large logits
    cannot overflow. Each output row sums to 1 (within 1e-12)."""
    shifted = a - a.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def sgn(a: Matrix) -> Matrix:
    """Entrywise sign: -1 for negative, 0 at zero, +1 for positive."""
    return np.sign(a)


class Rng:
    """Deterministic random source backed by NumPy's PCG64 generator.

    The same seed yields the same sample stream on every platform. An Rng
    is single-owner: it must not be shared across concurrent consumers.
    """

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._gen = np.random.Generator(np.random.PCG64(self.seed))

    def random(self, rows: int, cols: int) -> Matrix:
        """i.i.d. U[0, 1) entries."""
        return self._gen.random((rows, cols))

    def permutation(self, n: int) -> np.ndarray:
        return self._gen.permutation(n)


def rand_uniform(rng: Rng, rows: int, cols: int, lo: float, hi: float) -> Matrix:
    """Matrix with i.i.d. U[lo, hi) entries."""
    if not lo < hi:
        raise ValueError(f"rand_uniform: requires lo < hi, got lo={lo}, hi={hi}")
    return lo + (hi - lo) * rng.random(rows, cols)


def glorot_uniform(rng: Rng, rows: int, cols: int) -> Matrix:
    """Uniform init on [-b, b) with b = sqrt(6 / (rows + cols))."""
    bound = np.sqrt(6.0 / (rows + cols))
    return rand_uniform(rng, rows, cols, -bound, bound)
