import json
from pathlib import Path

import numpy as np
import pytest

from graphsel.cli import main


@pytest.fixture(scope="module")
def dataset(tmp_path_factory):
    out = tmp_path_factory.mktemp("data") / "sbm"
    rc = main(["gen-sbm", "--blocks", "2", "--per-block", "40",
               "--p-in", "0.2", "--p-out", "0.02", "--feat-dim", "4",
               "--feat-shift", "1.5", "--seed", "1", "--out", str(out)])
    assert rc == 0
    return out


def data_flags(d, with_labels=True):
    flags = ["--graph", str(d / "graph.txt"), "--features", str(d / "features.csv")]
    if with_labels:
        flags += ["--labels", str(d / "labels.txt"), "--splits", str(d)]
    return flags


def test_gen_sbm_outputs(dataset):
    for name in ("graph.txt", "features.csv", "labels.txt",
                 "train.txt", "val.txt", "test.txt"):
        assert (dataset / name).exists()


def test_select_smoke_triangle(tmp_path):
    g = tmp_path / "tri.txt"
    g.write_text("0 1\n1 2\n0 2\n")
    f = tmp_path / "x.csv"
    f.write_text("1.0,0.0\n0.0,1.0\n1.0,1.0\n")
    out = tmp_path / "rep.json"
    rc = main(["select", "--graph", str(g), "--features", str(f),
               "--budget", "1", "--out", str(out)])
    assert rc == 0
    rep = json.loads(out.read_text())
    assert len(rep["seeds"]) == 1
    assert rep["schema_version"] == "1"


def test_select_missing_features_exits_2(tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["select", "--graph", "g.txt", "--budget", "1", "--out", "o.json"])
    assert exc.value.code == 2


def test_select_missing_graph_file_exits_3(tmp_path):
    rc = main(["select", "--graph", str(tmp_path / "nope.txt"),
               "--features", str(tmp_path / "nope.csv"),
               "--budget", "1", "--out", str(tmp_path / "o.json")])
    assert rc == 3


def test_select_bad_budget_exits_2(dataset, tmp_path):
    rc = main(["select", *data_flags(dataset), "--budget", "100000",
               "--out", str(tmp_path / "o.json")])
    assert rc == 2


def test_select_rerun_byte_identical(dataset, tmp_path):
    args = ["select", *data_flags(dataset), "--budget", "4",
            "--theta", "0.05", "--radius", "0.1"]
    out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
    assert main(args + ["--out", str(out1)]) == 0
    assert main(args + ["--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_select_report_fields(dataset, tmp_path):
    out = tmp_path / "rep.json"
    rc = main(["select", *data_flags(dataset), "--budget", "3",
               "--theta", "0.05", "--mode", "naive", "--out", str(out)])
    assert rc == 0
    rep = json.loads(out.read_text())
    assert rep["method"] == "grain-ball"
    assert len(rep["per_round"]) == 3
    assert rep["config"]["theta"] == 0.05
    assert rep["d_max"] > 0 and rep["exact_dmax"] is True
    assert Path(str(out) + ".timing.json").exists()


def test_select_small_budget_mode_flagged(dataset, tmp_path):
    out = tmp_path / "rep.json"
    rc = main(["select", *data_flags(dataset), "--budget", "2",
               "--theta", "0", "--out", str(out)])
    assert rc == 0
    rep = json.loads(out.read_text())
    assert any("small-budget" in w for w in rep["warnings"])


def test_seeds_in_train_pool(dataset, tmp_path):
    out = tmp_path / "rep.json"
    main(["select", *data_flags(dataset), "--budget", "5",
          "--theta", "0.05", "--out", str(out)])
    seeds = json.loads(out.read_text())["seeds"]
    train = {int(l) for l in (dataset / "train.txt").read_text().split()}
    assert set(seeds) <= train


@pytest.mark.parametrize("method", ["random", "degree", "kcenter"])
def test_baseline_methods(dataset, tmp_path, method):
    out = tmp_path / f"{method}.json"
    rc = main(["baseline", *data_flags(dataset), "--method", method,
               "--budget", "4", "--seed", "7", "--out", str(out)])
    assert rc == 0
    rep = json.loads(out.read_text())
    assert rep["method"] == method
    assert len(rep["seeds"]) == 4


def test_eval_report(dataset, tmp_path):
    rep_path = tmp_path / "sel.json"
    main(["select", *data_flags(dataset), "--budget", "6",
          "--theta", "0.05", "--out", str(rep_path)])
    out = tmp_path / "eval.json"
    rc = main(["eval", *data_flags(dataset), "--report", str(rep_path),
               "--out", str(out)])
    assert rc == 0
    res = json.loads(out.read_text())
    assert 0.0 <= res["accuracy"] <= 1.0
    assert res["budget"] == 6
    assert res["seed_histogram"]


def test_eval_budget_sweep_with_figure(dataset, tmp_path):
    rep_path = tmp_path / "sel.json"
    main(["select", *data_flags(dataset), "--budget", "8",
          "--theta", "0.05", "--out", str(rep_path)])
    out = tmp_path / "sweep.json"
    fig = tmp_path / "sweep.png"
    rc = main(["eval", *data_flags(dataset), "--report", str(rep_path),
               "--budgets", "2,4,8", "--out", str(out), "--figure", str(fig)])
    assert rc == 0
    res = json.loads(out.read_text())
    assert len(res["sweep"]["rows"]) == 3
    assert fig.exists() and fig.stat().st_size > 0


def test_bench_grid(dataset, tmp_path):
    out = tmp_path / "bench.csv"
    rc = main(["bench", *data_flags(dataset), "--methods", "grain-ball,random",
               "--budgets", "2,4", "--trials", "2", "--theta", "0.05",
               "--out", str(out)])
    assert rc == 0
    rows = out.read_text().strip().splitlines()
    assert len(rows) == 5  # header + 2 methods x 2 budgets
    assert out.with_suffix(".md").exists()
    assert out.with_suffix(".png").stat().st_size > 0
    # aggregates match per-run trials count
    assert all(row.split(",")[4] == "2" for row in rows[1:])


def test_bench_threads_match_serial(dataset, tmp_path):
    args = ["bench", *data_flags(dataset), "--methods", "grain-ball,degree",
            "--budgets", "3", "--trials", "2", "--theta", "0.05"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--threads", "4", "--out", str(b)]) == 0

    def strip_times(p):
        return [",".join(line.split(",")[:4]) for line in p.read_text().splitlines()]

    assert strip_times(a) == strip_times(b)
