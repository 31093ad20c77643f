"""Model-free selection baselines: random, maximum degree, k-center greedy.

All three are deterministic given (seed, config) and return an ordered list of
exactly ``budget`` pool nodes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .diversity import FeatureMetric
from .graph import SparseGraph


class BaselineError(ValueError):
    pass


@dataclass(frozen=True)
class BaselineConfig:
    method: str            # "random" | "degree" | "kcenter"
    budget: int
    rng_seed: int = 0
    pool: np.ndarray | None = None

    def __post_init__(self):
        if self.method not in ("random", "degree", "kcenter"):
            raise BaselineError(f"unknown baseline {self.method!r}")
        if self.budget < 0:
            raise BaselineError("budget must be >= 0")


def _pool_array(config: BaselineConfig, n: int) -> np.ndarray:
    pool = config.pool
    pool = np.arange(n) if pool is None else np.asarray(sorted(set(int(p) for p in pool)))
    if config.budget > pool.size:
        raise BaselineError(f"budget {config.budget} exceeds pool size {pool.size}")
    return pool


def select_random(config: BaselineConfig, num_nodes: int,
                  rng: np.random.Generator | None = None) -> list:
    """Uniform sample without replacement from the pool."""
    pool = _pool_array(config, num_nodes)
    if rng is None:
        rng = np.random.default_rng(config.rng_seed)
    picked = rng.choice(pool, size=config.budget, replace=False)
    return [int(v) for v in picked]


def select_degree(config: BaselineConfig, graph: SparseGraph) -> list:
    """Top-budget pool nodes by degree, ties broken by smaller id."""
    pool = _pool_array(config, graph.num_nodes)
    deg = graph.structural_degrees()[pool]
    order = np.lexsort((pool, -deg))
    return [int(v) for v in pool[order[:config.budget]]]


def select_kcenter(config: BaselineConfig, graph: SparseGraph,
                   metric: FeatureMetric) -> list:
    """Greedy 2-approximate k-center over the propagated feature metric.

    The first center is the max-degree pool node (deterministic anchor);
    thereafter the farthest-from-nearest-center pool node, ties by id.
    """
    pool = _pool_array(config, graph.num_nodes)
    if config.budget == 0:
        return []
    deg = graph.structural_degrees()[pool]
    anchor = int(pool[np.lexsort((pool, -deg))[0]])
    centers = [anchor]
    nearest = metric.distances_from(anchor)[pool]
    chosen = pool == anchor
    while len(centers) < config.budget:
        masked = np.where(chosen, -np.inf, nearest)
        best = float(masked.max())
        # ties by smallest node id; pool is sorted so first hit wins
        idx = int(np.nonzero(masked == best)[0][0])
        v = int(pool[idx])
        centers.append(v)
        chosen[idx] = True
        np.minimum(nearest, metric.distances_from(v)[pool], out=nearest)
    return centers


def covering_radius(metric: FeatureMetric, centers, over=None) -> float:
    """max over nodes of distance to the nearest center (oracle helper)."""
    if not len(centers):
        return float("inf")
    n = metric.num_nodes
    over = np.arange(n) if over is None else np.asarray(over)
    best = np.full(over.size, np.inf)
    for c in centers:
        np.minimum(best, metric.distances_from(int(c))[over], out=best)
    return float(best.max())
