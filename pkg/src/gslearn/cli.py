"""Command-line front end over the dataset loaders, trainer, and sweeps.

Verbs:

* ``train``          one experiment (repeated seeds) into an output directory
* ``eval``           accuracy of a saved checkpoint on a dataset split
* ``sweep-lambda0``  accuracy table over smoothness weights
* ``sweep-labelrate`` accuracy vs label rate, with the no-smoothness baseline
* ``heatmap``        grayscale PGM of a checkpoint's learned adjacency
* ``convert-cache``  parse content/cites text into the binary cache format

Any flag can also be given in a plain ``key=value`` config file (keys are
the flag names without the leading dashes); explicit flags win. Exit status
is 0 only when every requested run finished with finite losses.
"""

import argparse
import sys
from typing import Optional

from .datasets import SplitSpec, load_linqs, make_split, save_cache
from .harness import (DatasetRef, ExperimentSpec, export_heatmap, load_dataset,
                      run_lambda0_sweep, run_robustness_sweep, run_single)
from .losses import LossWeights
from .network import load_checkpoint
from .training import NonFiniteLossError, TrainConfig, evaluate

DEFAULT_SNAPSHOTS = (1, 5, 15, 50)


def _floats(text: str):
    return tuple(float(v) for v in text.split(",") if v.strip())


def _ints(text: str):
    return tuple(int(v) for v in text.split(",") if v.strip())


def _bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


# Coercion for config-file values, keyed by argparse destination.
_CONFIG_TYPES = {
    "content": str, "cites": str, "cache": str, "name": str,
    "row_normalize": _bool, "downsample": int, "downsample_seed": int,
    "split": str, "split_seed": int, "train_per_class": int,
    "train_count": int, "val_count": int, "test_count": int, "rate": float,
    "epochs": int, "lr": float, "seed": int, "snapshots": _ints,
    "lambda0": float, "lambda1": float, "lambda2": float, "lambda3": float,
    "lambda4": float, "alpha": float, "use_gt_loss": _bool, "sum_ce": _bool,
    "clamp_nonneg": _bool, "patience": int, "hidden": int, "dropout": float,
    "weight_decay": float, "repeats": int, "out": str,
    "values": _floats, "rates": _floats, "no_baseline": _bool,
    "checkpoint": str, "which": str, "row0": int, "col0": int, "size": int,
}


def _read_config(path) -> dict:
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if "=" not in stripped:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            key, _, raw = stripped.partition("=")
            dest = key.strip().replace("-", "_")
            if dest not in _CONFIG_TYPES:
                raise ValueError(f"{path}:{lineno}: unknown option {key.strip()!r}")
            values[dest] = _CONFIG_TYPES[dest](raw.strip())
    return values


def _add_dataset_flags(p):
    p.add_argument("--content", help="path to the .content node file")
    p.add_argument("--cites", help="path to the .cites edge file")
    p.add_argument("--cache", help="path to a binary dataset cache")
    p.add_argument("--name", default="dataset", help="dataset display name")
    p.add_argument("--row-normalize", action="store_true",
                   help="rescale nonzero feature rows to sum to 1")
    p.add_argument("--downsample", type=int, metavar="N",
                   help="keep a seeded random subset of N nodes")
    p.add_argument("--downsample-seed", type=int, default=0)


def _add_split_flags(p):
    p.add_argument("--split", choices=("planetoid", "count", "label-rate"),
                   default="planetoid")
    p.add_argument("--split-seed", type=int, default=0)
    p.add_argument("--train-per-class", type=int, default=20)
    p.add_argument("--train-count", type=int)
    p.add_argument("--val-count", type=int)
    p.add_argument("--test-count", type=int)
    p.add_argument("--rate", type=float, help="label rate for label-rate splits")


def _add_train_flags(p):
    p.add_argument("--epochs", type=int, default=200)
    p.add_argument("--lr", type=float, default=0.01)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--snapshots", type=_ints, metavar="E1,E2,...",
                   help="epochs at which to snapshot the learned adjacency")
    p.add_argument("--lambda0", type=float, default=0.01, help="smoothness weight")
    p.add_argument("--lambda1", type=float, default=0.1, help="sparsity weight")
    p.add_argument("--lambda2", type=float, default=0.0, help="antisymmetry weight")
    p.add_argument("--lambda3", type=float, default=0.1, help="row-sum weight")
    p.add_argument("--lambda4", type=float, default=0.001, help="trace weight")
    p.add_argument("--alpha", type=float, default=10.0, help="proximity weight")
    p.add_argument("--use-gt-loss", action="store_true",
                   help="pull the learned adjacency toward the reference graph")
    p.add_argument("--sum-ce", action="store_true",
                   help="sum cross-entropy over labeled nodes instead of averaging")
    p.add_argument("--clamp-nonneg", action="store_true",
                   help="project the raw adjacency to nonnegative entries each step")
    p.add_argument("--patience", type=int,
                   help="early stopping patience on validation accuracy")
    p.add_argument("--hidden", type=int, default=16)
    p.add_argument("--dropout", type=float, default=0.5)
    p.add_argument("--weight-decay", type=float, default=5e-4)


def _dataset_ref(args) -> DatasetRef:
    return DatasetRef(name=args.name, content_path=args.content,
                      cites_path=args.cites, cache_path=args.cache,
                      row_normalize=args.row_normalize,
                      downsample_to=args.downsample,
                      downsample_seed=args.downsample_seed)


def _split_spec(args) -> SplitSpec:
    return SplitSpec(kind=args.split, seed=args.split_seed,
                     train_per_class=args.train_per_class,
                     train_count=args.train_count, val_count=args.val_count,
                     test_count=args.test_count, rate=args.rate)


def _train_config(args) -> TrainConfig:
    weights = LossWeights(lambda0=args.lambda0, lambda1=args.lambda1,
                          lambda2=args.lambda2, lambda3=args.lambda3,
                          lambda4=args.lambda4, alpha=args.alpha)
    snapshots = args.snapshots
    if snapshots is None:
        snapshots = tuple(e for e in DEFAULT_SNAPSHOTS if e <= args.epochs)
    return TrainConfig(epochs=args.epochs, weights=weights, lr=args.lr,
                       seed=args.seed, snapshot_epochs=snapshots,
                       use_gt_loss=args.use_gt_loss, average_ce=not args.sum_ce,
                       clamp_nonneg=args.clamp_nonneg,
                       early_stop_patience=args.patience, hidden=args.hidden,
                       dropout_rate=args.dropout, weight_decay=args.weight_decay)


def _experiment_spec(args) -> ExperimentSpec:
    return ExperimentSpec(dataset=_dataset_ref(args), split=_split_spec(args),
                          config=_train_config(args), repeats=args.repeats,
                          output_dir=args.out)


def build_parser(defaults: Optional[dict] = None) -> argparse.ArgumentParser:
    """Build the verb parser. `defaults` (from a config file) are installed
    as parser defaults on the top parser and every verb, so explicit flags
    still override them; a verb parses into its own namespace and copies it
    back whole, which is why setting them on the top parser alone is not
    enough."""
    parser = argparse.ArgumentParser(
        prog="gslearn",
        description="Joint graph-structure and classifier learning experiments.")
    parser.add_argument("--config", help="key=value file of defaults; flags override")
    sub = parser.add_subparsers(dest="verb", required=True)

    p_train = sub.add_parser("train", help="run one experiment over repeated seeds")
    for add in (_add_dataset_flags, _add_split_flags, _add_train_flags):
        add(p_train)
    p_train.add_argument("--repeats", type=int, default=1)
    p_train.add_argument("--out", default="runs/train")

    p_eval = sub.add_parser("eval", help="evaluate a checkpoint on a split")
    for add in (_add_dataset_flags, _add_split_flags):
        add(p_eval)
    p_eval.add_argument("--checkpoint")
    p_eval.add_argument("--which", choices=("train", "val", "test"), default="test")

    p_l0 = sub.add_parser("sweep-lambda0", help="accuracy table over smoothness weights")
    for add in (_add_dataset_flags, _add_split_flags, _add_train_flags):
        add(p_l0)
    p_l0.add_argument("--values", type=_floats,
                      metavar="V1,V2,...", help="smoothness weights to sweep")
    p_l0.add_argument("--repeats", type=int, default=5)
    p_l0.add_argument("--out", default="runs/sweep_lambda0")

    p_lr = sub.add_parser("sweep-labelrate", help="accuracy vs label rate")
    for add in (_add_dataset_flags, _add_split_flags, _add_train_flags):
        add(p_lr)
    p_lr.add_argument("--rates", type=_floats, metavar="R1,R2,...")
    p_lr.add_argument("--no-baseline", action="store_true",
                      help="skip the scheme with the smoothness term removed")
    p_lr.add_argument("--repeats", type=int, default=5)
    p_lr.add_argument("--out", default="runs/sweep_labelrate")

    p_hm = sub.add_parser("heatmap", help="export a checkpoint adjacency as PGM")
    p_hm.add_argument("--checkpoint")
    p_hm.add_argument("--row0", type=int, default=0)
    p_hm.add_argument("--col0", type=int, default=0)
    p_hm.add_argument("--size", type=int, default=30)
    p_hm.add_argument("--out")

    p_cc = sub.add_parser("convert-cache", help="parse text data into a binary cache")
    _add_dataset_flags(p_cc)
    p_cc.add_argument("--out")

    if defaults:
        for p in (parser, p_train, p_eval, p_l0, p_lr, p_hm, p_cc):
            p.set_defaults(**defaults)
    return parser


# Flags a verb cannot run without; left optional in argparse so a config
# file may supply them, checked here after parsing.
_REQUIRED = {
    "eval": ("checkpoint",),
    "sweep-lambda0": ("values",),
    "sweep-labelrate": ("rates",),
    "heatmap": ("checkpoint", "out"),
    "convert-cache": ("content", "out"),
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    # Pull --config out first so its values become defaults that flags override.
    probe = argparse.ArgumentParser(add_help=False)
    probe.add_argument("--config")
    config_path = probe.parse_known_args(argv)[0].config
    overrides = None
    if config_path:
        try:
            overrides = _read_config(config_path)
        except (OSError, ValueError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
    args = build_parser(overrides).parse_args(argv)
    missing = [name for name in _REQUIRED.get(args.verb, ())
               if getattr(args, name) is None]
    if missing:
        flags = ", ".join("--" + name.replace("_", "-") for name in missing)
        print(f"error: {args.verb} needs {flags} (flag or config file)",
              file=sys.stderr)
        return 1

    try:
        if args.verb == "train":
            summary = run_single(_experiment_spec(args))
            print(f"{summary['dataset']}: mean accuracy "
                  f"{100.0 * summary['mean_accuracy']:.2f}% "
                  f"+/- {100.0 * summary['std_accuracy']:.2f}% "
                  f"over {summary['repeats']} seed(s) -> {args.out}")
        elif args.verb == "eval":
            ds = load_dataset(_dataset_ref(args))
            if ds.train_idx is None:
                ds = make_split(ds, _split_spec(args))
            model = load_checkpoint(args.checkpoint)
            acc = evaluate(model, ds, args.which)
            print(f"{args.which} accuracy: {100.0 * acc:.2f}%")
        elif args.verb == "sweep-lambda0":
            rows = run_lambda0_sweep(_experiment_spec(args), args.values)
            for row in rows:
                print(f"lambda0={row['lambda0']!r}: "
                      f"{100.0 * row['mean_accuracy']:.2f}% "
                      f"+/- {100.0 * row['std_accuracy']:.2f}%")
        elif args.verb == "sweep-labelrate":
            rows = run_robustness_sweep(_experiment_spec(args), args.rates,
                                        with_baseline_scheme=not args.no_baseline)
            for row in rows:
                line = (f"rate={row['rate']!r} ({row['train_count']} labeled): "
                        f"full {100.0 * row['full_mean']:.2f}%")
                if row["noglr_mean"] is not None:
                    line += f", no-smoothness {100.0 * row['noglr_mean']:.2f}%"
                print(line)
        elif args.verb == "heatmap":
            model = load_checkpoint(args.checkpoint)
            export_heatmap(model.adj.symmetrized,
                           (args.row0, args.col0, args.size), args.out)
            print(f"wrote {args.out}")
        elif args.verb == "convert-cache":
            ds = load_linqs(args.content, args.cites, name=args.name,
                            row_normalize=args.row_normalize)
            save_cache(ds, args.out)
            print(f"cached {ds.n_nodes} nodes, {ds.n_features} features, "
                  f"{ds.n_classes} classes -> {args.out}")
    except NonFiniteLossError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
