"""Experiment orchestration: repeated seeded runs, sweeps, and artifacts.

Every experiment writes into its own output directory: one metrics CSV and
one checkpoint per seed, grayscale PGM heatmaps of the learned adjacency at
the snapshot epochs, and a `summary.json` with mean/std accuracies. Sweeps
nest one such directory per cell plus a top-level table. A run that dies
leaves its partial files in place next to a `FAILED` marker describing the
error, so a long sweep is diagnosable after the fact.
"""

import json
import traceback
from dataclasses import dataclass, replace
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .datasets import Dataset, SplitSpec, downsample, load_cache, load_linqs, make_split
from .fileio import atomic_write_bytes, atomic_write_text
from .linalg import Matrix
from .network import save_checkpoint
from .training import TrainConfig, TrainResult, records_to_csv, train

# Best-performing smoothness weight per bundled benchmark, by sweep argmax.
DEFAULT_LAMBDA0 = {
    "terrorists-rel": 0.1,
    "terror-attack": 1.0,
    "citeseer": 1.0,
    "cora": 0.01,
    "pubmed": 1.0,
}


@dataclass(frozen=True)
class DatasetRef:
    """Where a dataset comes from: either a binary cache or a content/cites
    text pair, optionally downsampled after loading."""

    name: str
    content_path: Optional[str] = None
    cites_path: Optional[str] = None
    cache_path: Optional[str] = None
    row_normalize: bool = False
    downsample_to: Optional[int] = None
    downsample_seed: int = 0


@dataclass(frozen=True)
class ExperimentSpec:
    dataset: DatasetRef
    split: SplitSpec
    config: TrainConfig
    repeats: int = 5
    output_dir: str = "runs"

    def __post_init__(self):
        if self.repeats < 1:
            raise ValueError(f"repeats must be >= 1, got {self.repeats}")


def load_dataset(ref: DatasetRef) -> Dataset:
    """Materialize a DatasetRef (cache preferred over re-parsing text)."""
    if ref.cache_path is not None and Path(ref.cache_path).exists():
        ds = load_cache(ref.cache_path)
    elif ref.content_path is not None:
        ds = load_linqs(ref.content_path, ref.cites_path, name=ref.name,
                        row_normalize=ref.row_normalize)
    elif ref.cache_path is not None:
        raise FileNotFoundError(
            f"dataset {ref.name!r}: cache {ref.cache_path} does not exist")
    else:
        raise ValueError(f"dataset {ref.name!r}: no cache or content path given")
    if ref.downsample_to is not None:
        ds = downsample(ds, ref.downsample_to, seed=ref.downsample_seed)
    return ds


def _final_accuracy(result: TrainResult) -> Optional[float]:
    last = result.records[-1]
    for acc in (last.test_acc, last.val_acc, last.train_acc):
        if acc is not None:
            return acc
    return None


def _mean_std(values: Sequence[float]) -> Tuple[float, float]:
    arr = np.asarray(values, dtype=np.float64)
    return float(arr.mean()), float(arr.std())


def run_single(spec: ExperimentSpec, ds: Optional[Dataset] = None) -> dict:
    """Train `repeats` models with consecutive seeds and collect artifacts.

    Returns the summary dict that is also written to `summary.json`:
    per-seed final accuracies plus mean/std over seeds.
    """
    out = Path(spec.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    try:
        if ds is None:
            ds = load_dataset(spec.dataset)
        if ds.train_idx is None:
            ds = make_split(ds, spec.split)

        if ds.gt is not None:
            window = _default_window(ds.n_nodes)
            export_heatmap(ds.gt.binary, window, out / "gt.pgm")

        per_seed = []
        for i in range(spec.repeats):
            cfg = replace(spec.config, seed=spec.config.seed + i)
            result = train(ds, cfg)
            records_to_csv(result.records, out / f"run_seed{cfg.seed}.csv")
            save_checkpoint(result.model, out / f"run_seed{cfg.seed}.ckpt")
            for epoch, snap in sorted(result.snapshots.items()):
                export_heatmap(snap, _default_window(ds.n_nodes),
                               out / f"run_seed{cfg.seed}_epoch{epoch}.pgm")
            last = result.records[-1]
            per_seed.append({
                "seed": cfg.seed,
                "epochs_run": result.stopped_epoch,
                "final_accuracy": _final_accuracy(result),
                "final_test_acc": last.test_acc,
                "final_val_acc": last.val_acc,
                "final_train_acc": last.train_acc,
                "final_total_loss": last.total,
                "final_gt_rel_frob": last.gt_rel_frob,
            })

        accs = [r["final_accuracy"] for r in per_seed if r["final_accuracy"] is not None]
        mean, std = _mean_std(accs) if accs else (float("nan"), float("nan"))
        summary = {
            "dataset": spec.dataset.name,
            "n_nodes": ds.n_nodes,
            "repeats": spec.repeats,
            "lambda0": spec.config.weights.lambda0,
            "mean_accuracy": mean,
            "std_accuracy": std,
            "runs": per_seed,
        }
        atomic_write_text(out / "summary.json", json.dumps(summary, indent=2) + "\n")
        return summary
    except Exception:
        atomic_write_text(out / "FAILED", traceback.format_exc())
        raise


def run_lambda0_sweep(spec: ExperimentSpec, values: Sequence[float],
                      ds: Optional[Dataset] = None) -> List[dict]:
    """One run_single per smoothness weight, plus a sweep table."""
    if not values:
        raise ValueError("run_lambda0_sweep: empty value list")
    out = Path(spec.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    if ds is None:
        ds = load_dataset(spec.dataset)
    if ds.train_idx is None:
        ds = make_split(ds, spec.split)

    rows = []
    for v in values:
        cell = replace(
            spec,
            config=replace(spec.config, weights=replace(spec.config.weights, lambda0=v)),
            output_dir=str(out / f"lambda0_{v!r}"))
        summary = run_single(cell, ds=ds)
        rows.append({"lambda0": v, "mean_accuracy": summary["mean_accuracy"],
                     "std_accuracy": summary["std_accuracy"]})

    lines = ["lambda0,mean_accuracy,std_accuracy"]
    lines += [f"{r['lambda0']!r},{r['mean_accuracy']!r},{r['std_accuracy']!r}"
              for r in rows]
    atomic_write_text(out / "sweep_lambda0.csv", "\n".join(lines) + "\n")

    labels = [repr(r["lambda0"]) for r in rows]
    width = max(len("lambda0"), max(len(s) for s in labels))
    text = [f"{spec.dataset.name}: accuracy vs smoothness weight",
            "lambda0".ljust(width) + "  accuracy"]
    for label, r in zip(labels, rows):
        mean_pct = 100.0 * r["mean_accuracy"]
        std_pct = 100.0 * r["std_accuracy"]
        text.append(f"{label.ljust(width)}  {mean_pct:.1f} +/- {std_pct:.1f}")
    atomic_write_text(out / "sweep_lambda0.txt", "\n".join(text) + "\n")
    return rows


def run_robustness_sweep(spec: ExperimentSpec, rates: Sequence[float],
                         with_baseline_scheme: bool = True,
                         ds: Optional[Dataset] = None) -> List[dict]:
    """Accuracy vs label rate, with a fixed test set across rates.

    For each rate the full objective is trained; when `with_baseline_scheme`
    is set, a second pass with the smoothness term removed (weight forced to
    zero) runs on the identical split for comparison.
    """
    if not rates:
        raise ValueError("run_robustness_sweep: empty rate list")
    if any(not 0.0 < r < 1.0 for r in rates):
        raise ValueError(f"run_robustness_sweep: rates must lie in (0, 1), got {list(rates)}")
    out = Path(spec.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    if ds is None:
        ds = load_dataset(spec.dataset)

    rows = []
    for rate in rates:
        split = replace(spec.split, kind="label-rate", rate=rate)
        ds_rate = make_split(ds, split)
        full = run_single(replace(spec, output_dir=str(out / f"rate_{rate!r}" / "full")),
                          ds=ds_rate)
        row = {"rate": rate, "train_count": int(ds_rate.train_idx.size),
               "full_mean": full["mean_accuracy"], "full_std": full["std_accuracy"],
               "noglr_mean": None, "noglr_std": None}
        if with_baseline_scheme:
            noglr_cfg = replace(spec.config,
                                weights=replace(spec.config.weights, lambda0=0.0))
            base = run_single(replace(spec, config=noglr_cfg,
                                      output_dir=str(out / f"rate_{rate!r}" / "noglr")),
                              ds=ds_rate)
            row["noglr_mean"] = base["mean_accuracy"]
            row["noglr_std"] = base["std_accuracy"]
        rows.append(row)

    lines = ["rate,train_count,full_mean,full_std,noglr_mean,noglr_std"]
    for r in rows:
        cells = [repr(r["rate"]), str(r["train_count"]),
                 repr(r["full_mean"]), repr(r["full_std"]),
                 "" if r["noglr_mean"] is None else repr(r["noglr_mean"]),
                 "" if r["noglr_std"] is None else repr(r["noglr_std"])]
        lines.append(",".join(cells))
    atomic_write_text(out / "sweep_labelrate.csv", "\n".join(lines) + "\n")
    return rows


def _default_window(n: int) -> Tuple[int, int, int]:
    return (0, 0, min(30, n))


def export_heatmap(matrix: Matrix, window: Tuple[int, int, int], path) -> None:
    """Write a binary (P5) grayscale PGM of a square submatrix.

    Zero maps to white and the submatrix maximum to black, so stronger
    edges print darker. Negative entries clip to zero; an all-zero window
    comes out all white.
    """
    row0, col0, size = window
    n_rows, n_cols = matrix.shape
    if size < 1 or row0 < 0 or col0 < 0 or row0 + size > n_rows or col0 + size > n_cols:
        raise ValueError(
            f"export_heatmap: window {window} outside a {n_rows}x{n_cols} matrix")
    sub = np.maximum(matrix[row0:row0 + size, col0:col0 + size], 0.0)
    peak = float(sub.max())
    if peak <= 0.0:
        pixels = np.full((size, size), 255, dtype=np.uint8)
    else:
        level = np.rint(255.0 * (1.0 - sub / peak))
        pixels = np.clip(level, 0, 255).astype(np.uint8)
    header = f"P5\n{size} {size}\n255\n".encode("ascii")
    atomic_write_bytes(path, header + pixels.tobytes())
