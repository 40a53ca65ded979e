import dataclasses
import json

import numpy as np
import pytest

from gslearn import (DatasetRef, ExperimentSpec, SplitSpec, TrainConfig,
                     export_heatmap, load_dataset, parse_records_csv,
                     run_lambda0_sweep, run_robustness_sweep, run_single,
                     save_cache)
from gslearn.losses import LossWeights

from _synth import two_block_dataset, write_linqs


def _spec(out, repeats=2, epochs=6, seed=0, **cfg_kw):
    cfg = TrainConfig(epochs=epochs, seed=seed, snapshot_epochs=(1, 5),
                      use_gt_loss=True, **cfg_kw)
    return ExperimentSpec(dataset=DatasetRef(name="two-block"),
                          split=SplitSpec(kind="count", seed=0, train_count=6,
                                          val_count=6, test_count=10),
                          config=cfg, repeats=repeats, output_dir=str(out))


def test_experiment_spec_validation(tmp_path):
    with pytest.raises(ValueError):
        _spec(tmp_path, repeats=0)


def test_load_dataset_from_cache_and_text(tmp_path):
    ds = two_block_dataset(n=20, seed=1)
    cache = tmp_path / "ds.bin"
    save_cache(ds, cache)
    loaded = load_dataset(DatasetRef(name="two-block", cache_path=str(cache)))
    assert np.array_equal(loaded.x, ds.x)

    rows = [("a", [1, 0], "x"), ("b", [0, 1], "y"), ("c", [1, 1], "x")]
    content, cites = write_linqs(tmp_path, rows, [("a", "b")])
    loaded = load_dataset(DatasetRef(name="toy", content_path=str(content),
                                     cites_path=str(cites)))
    assert loaded.n_nodes == 3

    small = load_dataset(DatasetRef(name="toy", content_path=str(content),
                                    cites_path=str(cites), downsample_to=2))
    assert small.n_nodes == 2

    with pytest.raises(ValueError):
        load_dataset(DatasetRef(name="nothing"))

    with pytest.raises(FileNotFoundError, match="missing.bin"):
        load_dataset(DatasetRef(name="gone",
                                cache_path=str(tmp_path / "missing.bin")))


def test_run_single_artifacts(tmp_path):
    out = tmp_path / "exp"
    ds = two_block_dataset()
    summary = run_single(_spec(out, repeats=3), ds=ds)

    csvs = sorted(out.glob("run_seed*.csv"))
    ckpts = sorted(out.glob("run_seed*.ckpt"))
    assert len(csvs) == 3 and len(ckpts) == 3
    assert [p.name for p in csvs] == ["run_seed0.csv", "run_seed1.csv",
                                      "run_seed2.csv"]
    assert (out / "summary.json").exists()
    assert (out / "gt.pgm").exists()
    assert sorted(p.name for p in out.glob("run_seed0_epoch*.pgm")) == [
        "run_seed0_epoch1.pgm", "run_seed0_epoch5.pgm"]
    assert not (out / "FAILED").exists()

    stored = json.loads((out / "summary.json").read_text())
    assert stored["repeats"] == 3 and len(stored["runs"]) == 3
    accs = [r["final_accuracy"] for r in stored["runs"]]
    assert abs(stored["mean_accuracy"] - np.mean(accs)) < 1e-12
    assert abs(stored["std_accuracy"] - np.std(accs)) < 1e-12
    assert stored == summary

    records = parse_records_csv(csvs[0])
    assert len(records) == 6
    assert stored["runs"][0]["final_test_acc"] == records[-1].test_acc


def test_run_single_is_deterministic(tmp_path):
    ds = two_block_dataset()
    run_single(_spec(tmp_path / "a"), ds=ds)
    run_single(_spec(tmp_path / "b"), ds=ds)
    for name in ("run_seed0.csv", "run_seed1.csv", "run_seed0.ckpt",
                 "summary.json", "run_seed0_epoch5.pgm"):
        assert (tmp_path / "a" / name).read_bytes() == \
            (tmp_path / "b" / name).read_bytes(), f"{name} differs"


def test_run_single_failure_marker(tmp_path):
    ds = two_block_dataset()
    bad = dataclasses.replace(ds, x=ds.x.copy())
    bad.x[0, 0] = np.nan
    out = tmp_path / "boom"
    with pytest.raises(Exception):
        run_single(_spec(out), ds=bad)
    marker = out / "FAILED"
    assert marker.exists()
    assert "glr" in marker.read_text()


def test_lambda0_sweep_cells_and_zero_equivalence(tmp_path):
    ds = two_block_dataset()
    out = tmp_path / "sweep"
    rows = run_lambda0_sweep(_spec(out, repeats=1), [0.1, 0.0], ds=ds)
    assert [r["lambda0"] for r in rows] == [0.1, 0.0]
    assert (out / "lambda0_0.1" / "summary.json").exists()
    assert (out / "sweep_lambda0.csv").exists()
    assert (out / "sweep_lambda0.txt").exists()

    # the zero cell must bit-match an explicitly GLR-free run
    solo = tmp_path / "noglr"
    run_single(_spec(solo, repeats=1,
                     weights=LossWeights(lambda0=0.0)), ds=ds)
    sweep_csv = (out / "lambda0_0.0" / "run_seed0.csv").read_bytes()
    solo_csv = (solo / "run_seed0.csv").read_bytes()
    assert sweep_csv == solo_csv

    header = (out / "sweep_lambda0.csv").read_text().splitlines()[0]
    assert header == "lambda0,mean_accuracy,std_accuracy"
    with pytest.raises(ValueError):
        run_lambda0_sweep(_spec(tmp_path / "empty"), [], ds=ds)


def test_robustness_sweep(tmp_path):
    ds = two_block_dataset(n=60, seed=2)
    out = tmp_path / "robust"
    spec = ExperimentSpec(
        dataset=DatasetRef(name="two-block"),
        split=SplitSpec(kind="label-rate", seed=3, val_count=6, test_count=20),
        config=TrainConfig(epochs=5, seed=0, snapshot_epochs=(),
                           use_gt_loss=True),
        repeats=1, output_dir=str(out))
    rows = run_robustness_sweep(spec, [0.1, 0.2], ds=ds)
    assert len(rows) == 2
    assert rows[0]["train_count"] == 6 and rows[1]["train_count"] == 12
    assert (out / "rate_0.1" / "full" / "summary.json").exists()
    assert (out / "rate_0.1" / "noglr" / "summary.json").exists()
    assert rows[0]["noglr_mean"] is not None

    lines = (out / "sweep_labelrate.csv").read_text().splitlines()
    assert lines[0] == "rate,train_count,full_mean,full_std,noglr_mean,noglr_std"
    assert len(lines) == 3

    skipped = run_robustness_sweep(
        dataclasses.replace(spec, output_dir=str(tmp_path / "nobase")),
        [0.1], with_baseline_scheme=False, ds=ds)
    assert skipped[0]["noglr_mean"] is None

    with pytest.raises(ValueError):
        run_robustness_sweep(spec, [1.5], ds=ds)
    with pytest.raises(ValueError):
        run_robustness_sweep(spec, [], ds=ds)


def test_heatmap_binary_matrix_is_two_level(tmp_path):
    gt = two_block_dataset().gt
    path = tmp_path / "gt.pgm"
    export_heatmap(gt.binary, (0, 0, 30), path)
    raw = path.read_bytes()
    header = b"P5\n30 30\n255\n"
    assert raw.startswith(header)
    pixels = np.frombuffer(raw[len(header):], dtype=np.uint8)
    assert pixels.size == 900
    assert set(np.unique(pixels)) == {0, 255}
    # edges print black on white
    assert (pixels == 0).sum() == int(gt.binary[:30, :30].sum())


def test_heatmap_all_zero_window_is_white(tmp_path):
    path = tmp_path / "zero.pgm"
    export_heatmap(np.zeros((40, 40)), (5, 5, 8), path)
    raw = path.read_bytes()
    pixels = np.frombuffer(raw[len(b"P5\n8 8\n255\n"):], dtype=np.uint8)
    assert np.all(pixels == 255)


def test_heatmap_clips_negative_entries(tmp_path):
    m = np.array([[1.0, -3.0], [0.5, 0.0]])
    path = tmp_path / "clip.pgm"
    export_heatmap(m, (0, 0, 2), path)
    pixels = np.frombuffer(path.read_bytes()[len(b"P5\n2 2\n255\n"):],
                           dtype=np.uint8)
    assert pixels[0] == 0          # the max
    assert pixels[1] == 255        # negative clips to white
    assert pixels[2] == 128        # half of max
    assert pixels[3] == 255


def test_heatmap_rejects_bad_window(tmp_path):
    m = np.zeros((10, 10))
    for window in ((0, 0, 11), (-1, 0, 5), (8, 8, 5), (0, 0, 0)):
        with pytest.raises(ValueError):
            export_heatmap(m, window, tmp_path / "bad.pgm")
