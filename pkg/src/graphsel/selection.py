"""Greedy maximization of the diversified-influence objective

    F(S) = |sigma(S)| / sigma_hat + gamma * D(S) / d_hat

with a naive evaluator (every candidate re-scored each round) and a lazy
priority-queue evaluator that reuses stale upper bounds, sound because every
term of F is submodular.  Both modes return the identical seed sequence under
the tie rule: gains are quantized to 1e-12 and ties break toward the smallest
node id.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass, field

import numpy as np

from .diversity import BallIndex, DiversityState, FeatureMetric
from .graph import SparseGraph
from .influence import ActivatedSet, InfluenceModel, activated_set, \
    extend_activated, marginal_activation


class SelectionError(ValueError):
    pass


GAIN_QUANTUM = 1e-12


def _quantize(gain: float) -> int:
    return int(round(gain / GAIN_QUANTUM))


@dataclass(frozen=True)
class ObjectiveConfig:
    budget: int
    gamma: float = 1.0
    diversity_kind: str = "ball"   # "ball" or "nn"
    sigma_hat: float | None = None  # defaults to N
    d_hat: float | None = None      # defaults to N (ball) or N * d_max (nn)
    candidate_pool: np.ndarray | None = None  # defaults to all nodes
    prune_top_degree_fraction: float | None = None

    def __post_init__(self):
        if self.budget < 0:
            raise SelectionError("budget must be >= 0")
        if self.gamma < 0:
            raise SelectionError("gamma must be >= 0")
        if self.diversity_kind not in ("ball", "nn"):
            raise SelectionError(f"unknown diversity kind {self.diversity_kind!r}")
        if self.prune_top_degree_fraction is not None and not (
                0 < self.prune_top_degree_fraction <= 1):
            raise SelectionError("prune fraction must lie in (0, 1]")


@dataclass
class RoundRecord:
    node: int
    gain: float
    sigma_size: int
    diversity_value: float
    evaluations: int


@dataclass
class SelectionState:
    seeds: list
    activated: ActivatedSet
    diversity: DiversityState | None
    objective_value: float
    per_round: list          # list[RoundRecord]
    round_wall_ms: list      # timings, kept apart from the deterministic record
    warnings: list
    method: str = "dim-greedy"


def prune_candidates(graph: SparseGraph, pool, fraction: float) -> np.ndarray:
    """Keep the top ceil(fraction * |pool|) pool nodes by degree, ties by id."""
    if not 0 < fraction <= 1:
        raise SelectionError("prune fraction must lie in (0, 1]")
    pool = np.asarray(sorted(set(int(p) for p in pool)), dtype=np.int64)
    keep = int(np.ceil(fraction * pool.size))
    deg = graph.structural_degrees()[pool]
    order = np.lexsort((pool, -deg))
    kept = pool[order[:keep]]
    kept.sort()
    return kept


def _make_diversity_state(metric: FeatureMetric | None, config: ObjectiveConfig,
                          ball_index: BallIndex | None, warnings: list):
    if config.gamma == 0 or metric is None:
        return None
    if config.diversity_kind == "nn" and metric.d_max == 0:
        warnings.append("d_max is 0 (all propagated rows identical); "
                        "nn diversity dropped, running influence-only")
        return None
    return DiversityState(metric, kind=config.diversity_kind, ball_index=ball_index)


def _normalizers(n: int, metric, config: ObjectiveConfig):
    sigma_hat = config.sigma_hat if config.sigma_hat is not None else float(n)
    if config.d_hat is not None:
        d_hat = config.d_hat
    elif config.diversity_kind == "nn":
        d_hat = float(n) * (metric.d_max if metric is not None else 1.0)
    else:
        d_hat = float(n)
    if sigma_hat <= 0:
        raise SelectionError("sigma_hat must be positive")
    if d_hat <= 0:
        d_hat = 1.0  # degenerate geometry; diversity term is zero anyway
    return sigma_hat, d_hat


def select(influence: InfluenceModel, metric: FeatureMetric | None,
           config: ObjectiveConfig, mode: str = "lazy",
           ball_index: BallIndex | None = None) -> SelectionState:
    """Run Algorithm-style greedy selection for config.budget rounds.

    Returns the full per-round trajectory.  ``mode`` is "lazy" (default) or
    "naive"; both produce identical output and the naive path doubles as the
    correctness oracle for the lazy one.
    """
    if mode not in ("naive", "lazy"):
        raise SelectionError(f"unknown mode {mode!r}")
    n = influence.num_nodes
    pool = config.candidate_pool
    pool = np.arange(n) if pool is None else np.asarray(sorted(set(int(p) for p in pool)))
    if pool.size and (pool[0] < 0 or pool[-1] >= n):
        raise SelectionError("candidate pool node id out of range")
    if config.budget > pool.size:
        raise SelectionError(f"budget {config.budget} exceeds pool size {pool.size}")

    warnings: list = []
    div_state = _make_diversity_state(metric, config, ball_index, warnings)
    sigma_hat, d_hat = _normalizers(n, metric, config)

    current = activated_set(influence, [])
    seeds: list = []
    per_round: list = []
    wall_ms: list = []
    objective = 0.0

    def evaluate(v: int):
        delta = marginal_activation(influence, current, v)
        gain = delta.size / sigma_hat
        if div_state is not None:
            gain += config.gamma * div_state.gain(delta) / d_hat
        return gain, delta

    remaining = {int(v) for v in pool}

    if mode == "lazy":
        # heap entries: (-quantized bound, node id); bounds_round tracks when
        # each node's bound was last refreshed
        heap: list = []
        bound_round: dict = {}

    for round_no in range(config.budget):
        t0 = time.perf_counter()
        evaluations = 0
        best_node, best_gain, best_delta = -1, None, None

        if mode == "naive":
            for v in sorted(remaining):
                gain, delta = evaluate(v)
                evaluations += 1
                q = _quantize(gain)
                if best_gain is None or q > best_gain:
                    best_node, best_gain, best_delta = v, q, delta
        else:
            if round_no == 0:
                for v in sorted(remaining):
                    gain, delta = evaluate(v)
                    evaluations += 1
                    q = _quantize(gain)
                    heapq.heappush(heap, (-q, v))
                    bound_round[v] = (0, q, delta)
            while True:
                neg_q, v = heapq.heappop(heap)
                if v not in remaining:
                    continue
                last_round, last_q, delta = bound_round[v]
                if last_round == round_no:
                    if -neg_q != last_q:
                        continue  # superseded duplicate entry
                    best_node, best_gain, best_delta = v, last_q, delta
                    break
                gain, delta = evaluate(v)
                evaluations += 1
                q = _quantize(gain)
                bound_round[v] = (round_no, q, delta)
                heapq.heappush(heap, (-q, v))

        # re-verify the stored gain at commit time
        realized, delta = evaluate(best_node)
        if _quantize(realized) != best_gain:
            raise SelectionError(
                f"stale gain surfaced for node {best_node}: "
                f"{best_gain * GAIN_QUANTUM} vs realized {realized}")

        current = extend_activated(current, best_node, delta)
        if div_state is not None:
            div_state.commit(delta)
        objective += realized
        seeds.append(best_node)
        remaining.discard(best_node)
        per_round.append(RoundRecord(
            node=best_node, gain=realized, sigma_size=current.size,
            diversity_value=div_state.value if div_state is not None else 0.0,
            evaluations=evaluations))
        wall_ms.append((time.perf_counter() - t0) * 1000.0)

    return SelectionState(seeds=seeds, activated=current, diversity=div_state,
                          objective_value=objective, per_round=per_round,
                          round_wall_ms=wall_ms, warnings=warnings)


def objective_value(influence: InfluenceModel, metric: FeatureMetric | None,
                    config: ObjectiveConfig, seeds,
                    ball_index: BallIndex | None = None) -> float:
    """From-scratch F(S); the oracle counterpart of the incremental tracker."""
    from .diversity import ball_diversity_value, nn_diversity_value

    n = influence.num_nodes
    sigma = activated_set(influence, seeds)
    sigma_hat, d_hat = _normalizers(n, metric, config)
    value = sigma.size / sigma_hat
    if config.gamma > 0 and metric is not None:
        if config.diversity_kind == "nn":
            if metric.d_max > 0:
                value += config.gamma * nn_diversity_value(metric, sigma.node_ids()) / d_hat
        else:
            value += config.gamma * ball_diversity_value(ball_index, sigma.node_ids()) / d_hat
    return value
