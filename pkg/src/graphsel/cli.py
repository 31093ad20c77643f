"""Command-line surface: dataset generation, selection, baselines, probe
evaluation and benchmark grids.

Exit codes: 0 success, 2 configuration error, 3 data error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import baselines as bl
from . import io as gio
from . import report as rp
from .diversity import (BallIndex, DiversityError, FeatureMetric,
                        build_ball_index, compute_dmax)
from .graph import GraphError, generate_sbm
from .influence import InfluenceError, build_influence
from .probe import EvalConfig, ProbeError, coreset_sweep, evaluate, train_probe
from .propagation import (PropagationConfig, PropagationError, propagate,
                          propagation_operator)
from .rng import substream
from .selection import ObjectiveConfig, SelectionError, prune_candidates, select

CONFIG_ERRORS = (PropagationError, SelectionError, InfluenceError,
                 DiversityError, bl.BaselineError, ProbeError)
DATA_ERRORS = (GraphError, gio.ParseError, FileNotFoundError, IsADirectoryError)

SMALL_BUDGET_PRUNE_FLOOR = 1e-4


def _add_data_flags(p: argparse.ArgumentParser, need_labels: bool = False):
    p.add_argument("--graph", required=True, help="edge list file")
    p.add_argument("--features", required=True, help="feature matrix (.csv or .bin)")
    p.add_argument("--labels", required=need_labels, help="labels file (node<TAB>class)")
    p.add_argument("--splits", required=need_labels,
                   help="directory with train.txt/val.txt/test.txt")


def _add_propagation_flags(p: argparse.ArgumentParser):
    p.add_argument("--kernel", default="rw",
                   choices=["rw", "sym", "ppr", "tri", "s2gc", "gbp"])
    p.add_argument("--k", type=int, default=2, help="propagation steps")
    p.add_argument("--alpha", type=float, default=None,
                   help="teleport weight for ppr/s2gc (default 0.1)")
    p.add_argument("--gbp-weights", default=None,
                   help="comma-separated theta_0..theta_k for the gbp kernel")


def _add_objective_flags(p: argparse.ArgumentParser):
    p.add_argument("--budget", type=int, required=True)
    p.add_argument("--theta", type=float, default=0.25,
                   help="activation threshold; 0 switches to small-budget mode")
    p.add_argument("--diversity", default="ball", choices=["ball", "nn"])
    p.add_argument("--radius", type=float, default=0.05)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--mode", default="lazy", choices=["lazy", "naive"])
    p.add_argument("--prune-degree", type=float, default=None,
                   help="keep only this top fraction of the pool by degree")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graphsel",
        description="Diversified influence maximization for graph data selection")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-sbm", help="generate a stochastic block model dataset")
    p.add_argument("--blocks", type=int, default=2)
    p.add_argument("--per-block", type=int, default=200)
    p.add_argument("--p-in", type=float, default=0.05)
    p.add_argument("--p-out", type=float, default=0.005)
    p.add_argument("--feat-dim", type=int, default=8)
    p.add_argument("--feat-shift", type=float, default=1.0)
    p.add_argument("--train-frac", type=float, default=0.6)
    p.add_argument("--val-frac", type=float, default=0.2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_gen_sbm)

    p = sub.add_parser("select", help="greedy diversified-influence selection")
    _add_data_flags(p)
    _add_propagation_flags(p)
    _add_objective_flags(p)
    p.add_argument("--out", required=True, help="report JSON path")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("baseline", help="random / degree / k-center selection")
    _add_data_flags(p)
    _add_propagation_flags(p)
    p.add_argument("--method", required=True, choices=["random", "degree", "kcenter"])
    p.add_argument("--budget", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("eval", help="score a selection report with the linear probe")
    _add_data_flags(p, need_labels=True)
    _add_propagation_flags(p)
    p.add_argument("--report", required=True, help="selection report (seed source)")
    p.add_argument("--budgets", default=None,
                   help="comma-separated budget prefixes to sweep")
    p.add_argument("--l2", type=float, default=5e-4)
    p.add_argument("--out", required=True)
    p.add_argument("--figure", default=None, help="optional sweep figure (PNG)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench", help="method x budget accuracy grid")
    _add_data_flags(p, need_labels=True)
    _add_propagation_flags(p)
    p.add_argument("--methods", default="grain-ball,random",
                   help="comma list from grain-ball,grain-nn,random,degree,kcenter")
    p.add_argument("--budgets", required=True, help="comma-separated budgets")
    p.add_argument("--trials", type=int, default=3, help="rng seeds per cell")
    p.add_argument("--theta", type=float, default=0.25)
    p.add_argument("--radius", type=float, default=0.05)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--l2", type=float, default=5e-4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=cmd_bench)
    return parser


def _parse_budget_list(text: str):
    try:
        budgets = [int(b) for b in text.split(",") if b.strip()]
    except ValueError:
        raise SelectionError(f"bad budget list {text!r}")
    if not budgets or any(b <= 0 for b in budgets):
        raise SelectionError(f"budgets must be positive: {text!r}")
    return budgets


def _propagation_config(args) -> PropagationConfig:
    gbp = None
    if args.gbp_weights:
        gbp = tuple(float(x) for x in args.gbp_weights.split(","))
    alpha = args.alpha
    if args.kernel in ("ppr", "s2gc") and alpha is None:
        alpha = 0.1
    return PropagationConfig(kernel=args.kernel, steps=args.k,
                             alpha=alpha, gbp_weights=gbp)


def _load_dataset(args, need_labels: bool = False):
    graph, id_map = gio.load_edge_list(args.graph)
    if id_map is not None:
        map_path = Path(args.out).with_suffix(".idmap.json") if getattr(args, "out", None) \
            else Path(args.graph).with_suffix(".idmap.json")
        with map_path.open("w", encoding="utf-8") as fh:
            json.dump({str(k): v for k, v in id_map.items()}, fh, sort_keys=True)
        print(f"note: sparse node ids remapped; map written to {map_path}", file=sys.stderr)
    feats = gio.load_features(args.features)
    if feats.shape[0] != graph.num_nodes:
        raise GraphError(
            f"feature rows ({feats.shape[0]}) != graph nodes ({graph.num_nodes})")
    labels = splits = None
    if args.labels:
        labels = gio.load_labels(args.labels, graph.num_nodes)
    if args.splits:
        d = Path(args.splits)
        splits = {name: gio.load_split(d / f"{name}.txt", graph.num_nodes)
                  for name in ("train", "val", "test")}
    if need_labels and (labels is None or splits is None):
        raise SelectionError("this command needs --labels and --splits")
    return graph, feats, labels, splits


def cmd_gen_sbm(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    graph, feats, labels = generate_sbm(
        args.blocks, args.per_block, args.p_in, args.p_out,
        args.feat_dim, args.feat_shift, rng=substream(args.seed, "graph-gen"))
    n = graph.num_nodes
    rng = substream(args.seed, "split-gen")
    order = rng.permutation(n)
    n_train = int(args.train_frac * n)
    n_val = int(args.val_frac * n)
    gio.save_edge_list(out / "graph.txt", graph)
    gio.save_features(out / "features.csv", feats)
    gio.save_labels(out / "labels.txt", labels)
    gio.save_split(out / "train.txt", np.sort(order[:n_train]))
    gio.save_split(out / "val.txt", np.sort(order[n_train:n_train + n_val]))
    gio.save_split(out / "test.txt", np.sort(order[n_train + n_val:]))
    print(f"wrote SBM dataset ({n} nodes) to {out}")
    return 0


def _selection_pipeline(graph, feats, splits, args, theta, prop_cfg):
    """Shared propagate -> influence -> diversity -> greedy path."""
    propagated = propagate(graph, feats, prop_cfg)
    operator = propagation_operator(graph, prop_cfg)
    prune_floor = theta if theta > 0 else SMALL_BUDGET_PRUNE_FLOOR
    influence = build_influence(operator, theta, prune_floor=prune_floor,
                                allow_lossy=theta == 0)

    metric = FeatureMetric(propagated.unit_rows)
    compute_dmax(metric)
    ball_index = None
    if args.diversity == "ball" and args.gamma > 0:
        ball_index = build_ball_index(metric, args.radius)

    pool = splits["train"] if splits is not None else np.arange(graph.num_nodes)
    if args.prune_degree is not None:
        pool = prune_candidates(graph, pool, args.prune_degree)
    config = ObjectiveConfig(budget=args.budget, gamma=args.gamma,
                             diversity_kind=args.diversity, candidate_pool=pool,
                             prune_top_degree_fraction=args.prune_degree)
    state = select(influence, metric, config, mode=args.mode, ball_index=ball_index)
    if theta == 0:
        state.warnings.append(
            f"small-budget mode: theta=0 with lossy prune floor {prune_floor}")
    return state, metric, propagated


def cmd_select(args) -> int:
    graph, feats, labels, splits = _load_dataset(args)
    prop_cfg = _propagation_config(args)
    state, metric, _ = _selection_pipeline(graph, feats, splits, args,
                                           args.theta, prop_cfg)
    echo = {
        "kernel": args.kernel, "k": args.k, "alpha": args.alpha,
        "gbp_weights": args.gbp_weights, "theta": args.theta,
        "diversity": args.diversity, "radius": args.radius,
        "gamma": args.gamma, "mode": args.mode,
        "prune_degree": args.prune_degree, "budget": args.budget,
        "seed": args.seed, "graph": str(args.graph),
        "features": str(args.features),
    }
    report = rp.build_report(state, echo, metric.d_max, metric.exact_dmax,
                             method=f"grain-{args.diversity}")
    rp.dump_report(report, args.out)
    rp.dump_timings(state.round_wall_ms, args.out)
    print(f"selected {len(state.seeds)} seeds -> {args.out}")
    return 0


def cmd_baseline(args) -> int:
    graph, feats, labels, splits = _load_dataset(args)
    pool = splits["train"] if splits is not None else np.arange(graph.num_nodes)
    cfg = bl.BaselineConfig(method=args.method, budget=args.budget,
                            rng_seed=args.seed, pool=pool)
    if args.method == "random":
        seeds = bl.select_random(cfg, graph.num_nodes,
                                 rng=substream(args.seed, "random-baseline"))
    elif args.method == "degree":
        seeds = bl.select_degree(cfg, graph)
    else:
        propagated = propagate(graph, feats, _propagation_config(args))
        metric = FeatureMetric(propagated.unit_rows)
        compute_dmax(metric)
        seeds = bl.select_kcenter(cfg, graph, metric)
    echo = {"method": args.method, "budget": args.budget, "seed": args.seed,
            "kernel": args.kernel, "k": args.k,
            "graph": str(args.graph), "features": str(args.features)}
    rp.dump_report(rp.baseline_report(seeds, echo, method=args.method), args.out)
    print(f"{args.method} baseline selected {len(seeds)} seeds -> {args.out}")
    return 0


def cmd_eval(args) -> int:
    graph, feats, labels, splits = _load_dataset(args, need_labels=True)
    report = rp.load_report(args.report)
    seeds = report["seeds"]
    propagated = propagate(graph, feats, _propagation_config(args))
    eval_cfg = EvalConfig(l2_penalty=args.l2)
    test_ids = splits["test"]

    out = {
        "schema_version": rp.SCHEMA_VERSION,
        "method": report.get("method"),
        "report": str(args.report),
        "config": {"kernel": args.kernel, "k": args.k, "l2": args.l2},
    }
    if args.budgets:
        budgets = _parse_budget_list(args.budgets)
        if max(budgets) > len(seeds):
            raise SelectionError(
                f"budget {max(budgets)} exceeds the {len(seeds)} seeds in the report")
        acc_by_budget = {}
        for b in sorted(budgets):
            model = train_probe(propagated, labels, seeds[:b], eval_cfg)
            acc_by_budget[b] = evaluate(model, propagated, labels, test_ids,
                                        seeds[:b])["accuracy"]
        full_model = train_probe(propagated, labels, list(splits["train"]), eval_cfg)
        full_acc = evaluate(full_model, propagated, labels, test_ids)["accuracy"]
        sweep = coreset_sweep(acc_by_budget, full_acc, pool_size=splits["train"].size)
        out["sweep"] = sweep
        if args.figure:
            from .plots import plot_coreset_sweep
            plot_coreset_sweep(sweep, args.figure)
            out["figure"] = str(args.figure)
    else:
        model = train_probe(propagated, labels, seeds, eval_cfg)
        out.update(evaluate(model, propagated, labels, test_ids, seeds))
        out["budget"] = len(seeds)

    rp.dump_report(out, args.out)
    print(f"evaluation written to {args.out}")
    return 0


BENCH_METHODS = ("grain-ball", "grain-nn", "random", "degree", "kcenter")


def _bench_cell(method, budget, trial_seed, graph, feats, propagated, influence,
                metric, ball_index, splits, labels, eval_cfg, gamma):
    pool = splits["train"]
    if method.startswith("grain-"):
        kind = method.split("-", 1)[1]
        cfg = ObjectiveConfig(budget=budget, gamma=gamma, diversity_kind=kind,
                              candidate_pool=pool)
        state = select(influence, metric, cfg, mode="lazy",
                       ball_index=ball_index if kind == "ball" else None)
        seeds = state.seeds
    else:
        cfg = bl.BaselineConfig(method=method, budget=budget,
                                rng_seed=trial_seed, pool=pool)
        if method == "random":
            seeds = bl.select_random(cfg, graph.num_nodes,
                                     rng=substream(trial_seed, "random-baseline"))
        elif method == "degree":
            seeds = bl.select_degree(cfg, graph)
        else:
            seeds = bl.select_kcenter(cfg, graph, metric)
    model = train_probe(propagated, labels, seeds, eval_cfg)
    return evaluate(model, propagated, labels, splits["test"], seeds)["accuracy"]


def cmd_bench(args) -> int:
    graph, feats, labels, splits = _load_dataset(args, need_labels=True)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    for m in methods:
        if m not in BENCH_METHODS:
            raise SelectionError(f"unknown bench method {m!r}")
    budgets = _parse_budget_list(args.budgets)
    prop_cfg = _propagation_config(args)
    propagated = propagate(graph, feats, prop_cfg)
    operator = propagation_operator(graph, prop_cfg)
    influence = build_influence(operator, args.theta,
                                prune_floor=args.theta if args.theta > 0
                                else SMALL_BUDGET_PRUNE_FLOOR,
                                allow_lossy=args.theta == 0)
    metric = FeatureMetric(propagated.unit_rows)
    compute_dmax(metric)
    ball_index = build_ball_index(metric, args.radius) \
        if any(m == "grain-ball" for m in methods) else None
    eval_cfg = EvalConfig(l2_penalty=args.l2)

    cells = [(m, b, args.seed + t) for m in methods for b in budgets
             for t in range(args.trials)]

    def run(cell):
        m, b, s = cell
        import time
        t0 = time.perf_counter()
        acc = _bench_cell(m, b, s, graph, feats, propagated, influence, metric,
                          ball_index, splits, labels, eval_cfg, args.gamma)
        return cell, acc, (time.perf_counter() - t0) * 1000.0

    if args.threads > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool_exec:
            results = list(pool_exec.map(run, cells))
    else:
        results = [run(c) for c in cells]

    table = []
    for m in methods:
        for b in budgets:
            accs = [acc for (cm, cb, _), acc, _ in results if cm == m and cb == b]
            times = [t for (cm, cb, _), _, t in results if cm == m and cb == b]
            table.append({
                "method": m, "budget": b,
                "mean_accuracy": float(np.mean(accs)),
                "std_accuracy": float(np.std(accs)),
                "trials": len(accs),
                "mean_wall_ms": float(np.mean(times)),
            })

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(table[0].keys()))
        writer.writeheader()
        writer.writerows(table)

    md = out.with_suffix(".md")
    with md.open("w", encoding="utf-8") as fh:
        fh.write("| method | budget | accuracy | wall ms |\n")
        fh.write("|---|---|---|---|\n")
        for row in table:
            fh.write(f"| {row['method']} | {row['budget']} | "
                     f"{row['mean_accuracy']:.4f} +- {row['std_accuracy']:.4f} | "
                     f"{row['mean_wall_ms']:.1f} |\n")

    from .plots import plot_accuracy_vs_budget
    fig_path = plot_accuracy_vs_budget(table, out.with_suffix(".png"))
    print(f"bench grid -> {out}, {md}, {fig_path}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CONFIG_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DATA_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
