"""A walk through the graph primitives: adjacency, degree, Laplacians,
and what the Laplacian quadratic form says about a signal.

Run from the repository root:

    python3 demos/01_graph_basics.py
"""

import numpy as np

from gslearn import (combinatorial_laplacian, degree_matrix,
                     normalized_laplacian, symmetrize)


def show(name, m):
    print(f"{name} =")
    print(np.array2string(np.asarray(m), precision=3, suppress_small=True))
    print()


def main():
    # A 5-node graph: a triangle 0-1-2 joined to a path 2-3-4.
    a = np.zeros((5, 5))
    for i, j in [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4)]:
        a[i, j] = a[j, i] = 1.0
    show("adjacency A", a)

    d = degree_matrix(a)
    show("degree matrix D", d)

    lap = combinatorial_laplacian(a)
    show("Laplacian L = D - A", lap)
    print("row sums of L (always ~0):", lap.sum(axis=1).round(12))
    print()

    show("normalized Laplacian", normalized_laplacian(a))

    # The quadratic form x'Lx measures how much a signal changes across
    # edges. A signal that follows the graph structure scores low.
    smooth = np.array([1.0, 1.0, 1.0, 0.5, 0.0])
    rough = np.array([1.0, -1.0, 1.0, -1.0, 1.0])
    print(f"smoothness of a gently varying signal: {smooth @ lap @ smooth:.3f}")
    print(f"smoothness of an alternating signal:   {rough @ lap @ rough:.3f}")
    print()

    # Learned adjacencies are stored as a free square matrix and used
    # through their symmetrized form, so gradients can stay unconstrained.
    raw = np.array([[0.0, 2.0, 0.0],
                    [0.0, 0.0, 1.0],
                    [4.0, 1.0, 0.0]])
    show("raw (asymmetric) matrix", raw)
    show("symmetrize(raw) = (raw' + raw) / 2", symmetrize(raw))


if __name__ == "__main__":
    main()
