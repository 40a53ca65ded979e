"""The two sweeps from the experiment harness, scaled down to the toy
two-community graph so they finish in seconds: accuracy as a function of
the smoothness weight, and accuracy as a function of the label rate with
the smoothness-free baseline alongside.

Artifacts land in demos/output/sweeps/ (per-cell run directories plus
the sweep tables).

Run from the repository root:

    python3 demos/05_parameter_sweeps.py
"""

import pathlib
import sys

from gslearn import (DatasetRef, ExperimentSpec, SplitSpec, TrainConfig,
                     run_lambda0_sweep, run_robustness_sweep)

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent))
from _toy import two_block_dataset

OUT = pathlib.Path(__file__).resolve().parent / "output" / "sweeps"


def main():
    ds = two_block_dataset(n=60, seed=0)

    spec = ExperimentSpec(
        dataset=DatasetRef(name=ds.name),
        split=SplitSpec(kind="count", seed=0, train_count=10, val_count=10,
                        test_count=20),
        config=TrainConfig(epochs=80, snapshot_epochs=()),
        repeats=3,
        output_dir=str(OUT / "lambda0"))

    print("sweeping the smoothness weight (3 seeds per cell)...")
    rows = run_lambda0_sweep(spec, [0.0, 0.01, 0.1, 1.0], ds=ds)
    for r in rows:
        print(f"  weight {r['lambda0']!r:>6}: "
              f"{r['mean_accuracy']:.1%} +/- {r['std_accuracy']:.1%}")
    print(f"table written to {OUT / 'lambda0' / 'sweep_lambda0.txt'}\n")

    print("sweeping the label rate, full objective vs no smoothness...")
    spec = ExperimentSpec(
        dataset=DatasetRef(name=ds.name),
        split=SplitSpec(kind="label-rate", seed=0, val_count=10,
                        test_count=20),
        config=TrainConfig(epochs=80, snapshot_epochs=()),
        repeats=3,
        output_dir=str(OUT / "labelrate"))
    rows = run_robustness_sweep(spec, [0.1, 0.2, 0.4], ds=ds)
    for r in rows:
        print(f"  rate {r['rate']:.2f} ({r['train_count']:2d} labeled): "
              f"full {r['full_mean']:.1%}, "
              f"baseline {r['noglr_mean']:.1%}")
    print(f"table written to {OUT / 'labelrate' / 'sweep_labelrate.csv'}")


if __name__ == "__main__":
    main()
