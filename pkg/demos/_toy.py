"""Shared toy data for the demo scripts: a planted two-community graph."""

import numpy as np

from gslearn import Dataset, preprocess_ground_truth


def two_block_dataset(n=30, seed=0, n_features=8, p_in=0.5, p_out=0.05,
                      noise=0.5):
    """Two blocks of nodes, dense inside each block and sparse across,
    with features centered on the block id. The block is the class label."""
    rng = np.random.Generator(np.random.PCG64(seed))
    half = n // 2
    block = np.array([0] * half + [1] * (n - half))
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            p = p_in if block[i] == block[j] else p_out
            if rng.random() < p:
                edges.append((i, j))
    gt = preprocess_ground_truth(edges, n)
    x = rng.normal(loc=block[:, None] * 2.0 - 1.0, scale=noise,
                   size=(n, n_features))
    y = np.zeros((n, 2))
    y[np.arange(n), block] = 1.0
    return Dataset(name="two-block", x=x, y=y, gt=gt)
