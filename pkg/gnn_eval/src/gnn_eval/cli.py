"""gnn-eval: train the reference 2-layer GCN on the seeds of a selection
report and summarize test accuracy over repeated trials.

The harness reads only the language-agnostic report and dataset file formats;
it has no code dependency on the selection tool.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .data import (Dataset, DatasetError, PLANETOID_NAMES, load_custom,
                   load_planetoid)
from .model import GcnConfig, normalized_adjacency, train_gcn_trial

SCHEMA_VERSION = "1"

NONDETERMINISM_NOTES = [
    "torch CPU kernels may vary across library versions",
    "per-trial seeds fix initialization and dropout masks",
]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gnn-eval",
                                description="GCN evaluation of a selection report")
    p.add_argument("--report", required=True, help="selection report JSON")
    p.add_argument("--dataset", required=True,
                   choices=[*PLANETOID_NAMES, "custom"])
    p.add_argument("--data-dir", default="data",
                   help="directory with planetoid files (named datasets)")
    p.add_argument("--graph", help="edge list (custom dataset)")
    p.add_argument("--features", help="feature matrix (custom dataset)")
    p.add_argument("--labels", help="labels file (custom dataset)")
    p.add_argument("--splits", help="splits directory (custom dataset)")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0, help="base trial seed")
    p.add_argument("--epochs", type=int, default=200)
    p.add_argument("--hidden", type=int, default=128)
    p.add_argument("--dropout", type=float, default=0.85)
    p.add_argument("--l2", type=float, default=5e-4)
    p.add_argument("--lr", type=float, default=0.01)
    p.add_argument("--out", required=True)
    return p


def load_dataset(args) -> Dataset:
    if args.dataset == "custom":
        needed = ("graph", "features", "labels", "splits")
        missing = [f"--{k}" for k in needed if getattr(args, k) is None]
        if missing:
            raise DatasetError(f"custom dataset needs {' '.join(missing)}")
        return load_custom(args.graph, args.features, args.labels, args.splits)
    return load_planetoid(args.dataset, args.data_dir)


def run_eval(args) -> dict:
    ds = load_dataset(args)

    report_path = Path(args.report)
    if not report_path.exists():
        raise DatasetError(f"selection report {report_path} not found")
    with report_path.open("r", encoding="utf-8") as fh:
        report = json.load(fh)
    seeds = [int(s) for s in report["seeds"]]
    if not seeds:
        raise DatasetError("report contains no seeds")

    bad = [s for s in seeds if not 0 <= s < ds.num_nodes or ds.labels[s] < 0]
    if bad:
        raise DatasetError(f"report seeds invalid or unlabeled for this dataset: {bad[:5]}")

    config = GcnConfig(hidden_size=args.hidden, dropout=args.dropout,
                       l2=args.l2, epochs=args.epochs, learning_rate=args.lr)
    adj_norm = normalized_adjacency(ds.adj)
    trials = []
    for t in range(args.trials):
        res = train_gcn_trial(adj_norm, ds.features, ds.labels, seeds,
                              ds.val_ids, ds.test_ids, config,
                              seed=args.seed + t)
        trials.append(res)

    accs = [r.test_accuracy for r in trials]
    return {
        "schema_version": SCHEMA_VERSION,
        "method": report.get("method"),
        "budget": len(seeds),
        "dataset": ds.name,
        "accuracy": float(np.mean(accs)),
        "mean_accuracy": float(np.mean(accs)),
        "std_accuracy": float(np.std(accs)),
        "trials": [{"seed": r.seed, "test_accuracy": r.test_accuracy,
                    "best_val_accuracy": r.best_val_accuracy} for r in trials],
        "config": {
            "hidden_size": config.hidden_size, "dropout": config.dropout,
            "l2": config.l2, "epochs": config.epochs,
            "layers": config.layers, "learning_rate": config.learning_rate,
            "learning_rate_note": "free parameter; reference implementation default",
        },
        "nondeterminism": NONDETERMINISM_NOTES,
    }


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        summary = run_eval(args)
    except DatasetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"{summary['dataset']}: {summary['mean_accuracy']:.4f} "
          f"+- {summary['std_accuracy']:.4f} over {args.trials} trials -> {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
