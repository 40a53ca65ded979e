import numpy as np
import pytest

from gslearn import (LearnedAdjacency, Rng, combinatorial_laplacian,
                     degree_matrix, normalized_laplacian,
                     preprocess_ground_truth, rand_uniform, symmetrize)
from gslearn.linalg import ShapeError, as_matrix


def test_degree_matrix():
    assert np.array_equal(degree_matrix(as_matrix([[0.0, 1.0], [1.0, 0.0]])),
                          np.diag([1.0, 1.0]))
    assert np.array_equal(degree_matrix(np.zeros((3, 3))), np.zeros((3, 3)))
    a = as_matrix([[0.0, 2.0, 1.0], [2.0, 0.0, 0.0], [1.0, 0.0, 0.0]])
    assert np.array_equal(degree_matrix(a), np.diag([3.0, 2.0, 1.0]))
    with pytest.raises(ShapeError):
        degree_matrix(np.ones((2, 3)))


def test_combinatorial_laplacian():
    path2 = as_matrix([[0.0, 1.0], [1.0, 0.0]])
    assert np.array_equal(combinatorial_laplacian(path2),
                          [[1.0, -1.0], [-1.0, 1.0]])
    assert np.array_equal(combinatorial_laplacian(np.zeros((4, 4))),
                          np.zeros((4, 4)))


def test_combinatorial_laplacian_zero_row_sums():
    a = rand_uniform(Rng(1), 6, 6, 0.0, 1.0)
    lap = combinatorial_laplacian(a)
    assert np.max(np.abs(lap.sum(axis=1))) <= 1e-12


def test_laplacian_quadratic_form_nonnegative():
    rng = Rng(4)
    a = symmetrize(rand_uniform(rng, 8, 8, 0.0, 1.0))
    lap = combinatorial_laplacian(a)
    for _ in range(100):
        x = rand_uniform(rng, 8, 1, -3.0, 3.0)[:, 0]
        assert x @ lap @ x >= -1e-10


def test_normalized_laplacian():
    path2 = as_matrix([[0.0, 1.0], [1.0, 0.0]])
    assert np.allclose(normalized_laplacian(path2), [[1.0, -1.0], [-1.0, 1.0]])


def test_normalized_laplacian_spectrum_in_zero_two():
    rng = Rng(8)
    a = symmetrize(rand_uniform(rng, 10, 10, 0.0, 1.0))
    np.fill_diagonal(a, 0.0)
    eig = np.linalg.eigvalsh(normalized_laplacian(a))
    assert eig.min() >= -1e-10 and eig.max() <= 2.0 + 1e-10


def test_normalized_laplacian_regular_graph():
    ring = np.zeros((5, 5))
    for i in range(5):
        ring[i, (i + 1) % 5] = ring[(i + 1) % 5, i] = 1.0
    expected = combinatorial_laplacian(ring) / 2.0
    assert np.allclose(normalized_laplacian(ring), expected)


def test_normalized_laplacian_rejects_isolated_node():
    a = np.zeros((3, 3))
    a[0, 1] = a[1, 0] = 1.0
    with pytest.raises(ValueError, match="node 2"):
        normalized_laplacian(a)


def test_symmetrize():
    assert np.array_equal(symmetrize(as_matrix([[0.0, 2.0], [0.0, 0.0]])),
                          [[0.0, 1.0], [1.0, 0.0]])
    sym = symmetrize(rand_uniform(Rng(3), 5, 5, -1.0, 1.0))
    assert np.array_equal(symmetrize(sym), sym)
    assert np.array_equal(sym - sym.T, np.zeros((5, 5)))


def test_symmetrize_is_linear():
    rng = Rng(6)
    a = rand_uniform(rng, 5, 5, -1.0, 1.0)
    b = rand_uniform(rng, 5, 5, -1.0, 1.0)
    lhs = symmetrize(2.0 * a + b)
    rhs = 2.0 * symmetrize(a) + symmetrize(b)
    assert np.max(np.abs(lhs - rhs)) < 1e-15


def test_learned_adjacency_exact_symmetry():
    adj = LearnedAdjacency(rand_uniform(Rng(5), 7, 7, -1.0, 1.0))
    assert adj.n == 7
    assert np.array_equal(adj.symmetrized, adj.symmetrized.T)
    assert np.array_equal(adj.symmetrized, symmetrize(adj.raw))


def test_preprocess_ground_truth_basic():
    gt = preprocess_ground_truth([(0, 1)], 2)
    assert np.array_equal(gt.binary, [[0.0, 1.0], [1.0, 0.0]])


def test_preprocess_ground_truth_dedup_and_loops():
    gt = preprocess_ground_truth([(0, 1), (1, 0), (0, 0)], 2)
    assert np.array_equal(gt.binary, [[0.0, 1.0], [1.0, 0.0]])


def test_preprocess_ground_truth_triangle_normalization():
    gt = preprocess_ground_truth([(0, 1), (1, 2), (0, 2)], 3)
    off = gt.normalized[~np.eye(3, dtype=bool)]
    assert np.allclose(off, 0.5)
    assert np.allclose(np.diag(gt.normalized), 0.0)


def test_preprocess_ground_truth_isolated_nodes_and_symmetry():
    gt = preprocess_ground_truth([(0, 1)], 4)
    assert np.array_equal(gt.normalized[2], np.zeros(4))
    assert np.array_equal(gt.normalized[3], np.zeros(4))
    assert np.max(np.abs(gt.normalized - gt.normalized.T)) < 1e-12


def test_preprocess_ground_truth_rejects_bad_edge():
    with pytest.raises(ValueError, match=r"\(0, 5\)"):
        preprocess_ground_truth([(0, 5)], 3)
