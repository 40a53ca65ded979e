"""Joint graph-structure and classifier learning on node-attributed data.

The package learns a dense adjacency matrix together with a two-layer graph
convolutional classifier by minimizing one objective: a graph-smoothness
term on the node features, L1 sparsity, penalties keeping the adjacency
row-stochastic and hollow, an optional pull toward a known reference graph,
and masked cross-entropy on the labeled nodes. Everything runs on plain
NumPy arrays with hand-derived gradients.
"""

from .datasets import (Dataset, SplitSpec, downsample, load_cache, load_linqs,
                       make_split, save_cache)
from .graphs import (GroundTruthGraph, LearnedAdjacency, combinatorial_laplacian,
                     degree_matrix, normalized_laplacian, preprocess_ground_truth,
                     symmetrize)
from .harness import (DEFAULT_LAMBDA0, DatasetRef, ExperimentSpec, export_heatmap,
                      load_dataset, run_lambda0_sweep, run_robustness_sweep,
                      run_single)
from .linalg import Matrix, Rng, ShapeError, glorot_uniform, rand_uniform
from .losses import (LossReport, LossWeights, glr_loss, gt_loss,
                     masked_cross_entropy, properties_loss,
                     softmax_cross_entropy_logit_grad, sparsity_loss)
from .network import (LearnedGraphGcn, backward, forward, init_model,
                      load_checkpoint, predict, save_checkpoint, with_params)
from .optim import AdamState, adam_step
from .training import (NonFiniteLossError, TrainConfig, TrainRecord, TrainResult,
                       evaluate, parse_records_csv, records_to_csv, train)

__version__ = "0.1.0"

__all__ = [
    "AdamState", "DEFAULT_LAMBDA0", "Dataset", "DatasetRef", "ExperimentSpec",
    "GroundTruthGraph", "LearnedAdjacency", "LearnedGraphGcn", "LossReport",
    "LossWeights", "Matrix", "NonFiniteLossError", "Rng", "ShapeError",
    "SplitSpec", "TrainConfig", "TrainRecord", "TrainResult", "adam_step",
    "backward", "combinatorial_laplacian", "degree_matrix", "downsample",
    "evaluate", "export_heatmap", "forward", "glorot_uniform", "glr_loss",
    "gt_loss", "init_model", "load_cache", "load_checkpoint", "load_dataset",
    "load_linqs", "make_split", "masked_cross_entropy", "normalized_laplacian",
    "parse_records_csv", "predict", "preprocess_ground_truth", "rand_uniform",
    "records_to_csv", "run_lambda0_sweep", "run_robustness_sweep", "run_single",
    "save_cache", "save_checkpoint", "softmax_cross_entropy_logit_grad",
    "sparsity_loss", "symmetrize", "train", "with_params",
]
