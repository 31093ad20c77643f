"""Normalized feature-influence scores and activation queries.

For the linear propagation kernels the influence of node u on node v after k
steps is just |P_k[v, u]| normalized by the row sum of |P_k[v, :]|.  A node v
is activated by a seed set S when max_{u in S} score(v, u) strictly exceeds
the threshold theta.  Scores below ``prune_floor`` are dropped from storage;
with prune_floor <= theta this can never change an activation decision.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp


class InfluenceError(ValueError):
    pass


@dataclass(frozen=True)
class InfluenceModel:
    """Column-wise sparse store of normalized influence scores.

    ``by_source`` is a CSC matrix whose column u lists the nodes v that u
    influences with score >= prune_floor.  Immutable after build; activation
    and marginal queries are read-only.
    """

    num_nodes: int
    by_source: sp.csc_matrix
    theta: float
    prune_floor: float
    zero_rows: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64))

    def influence_column(self, u: int):
        """(targets, scores) for source node u."""
        col = self.by_source
        lo, hi = col.indptr[u], col.indptr[u + 1]
        return col.indices[lo:hi], col.data[lo:hi]

    def activation_targets(self, u: int) -> np.ndarray:
        """Nodes whose influence score from u strictly exceeds theta."""
        targets, scores = self.influence_column(u)
        return targets[scores > self.theta]


@dataclass(frozen=True)
class ActivatedSet:
    """Value type holding sigma(S) as a bitset plus the seeds that produced it."""

    members: np.ndarray        # bool array of length N
    source_seeds: frozenset

    @property
    def size(self) -> int:
        return int(self.members.sum())

    def node_ids(self) -> np.ndarray:
        return np.nonzero(self.members)[0]


def build_influence(operator: sp.spmatrix, theta: float,
                    prune_floor: float | None = None,
                    allow_lossy: bool = False) -> InfluenceModel:
    """Row-normalize |P_k| into influence scores and store them column-wise.

    Rows of a row-stochastic operator pass through unchanged.  All-zero rows
    (nodes that receive no influence) are recorded, not fatal.

    prune_floor <= theta keeps pruning lossless for activation decisions;
    a larger floor (the theta=0 small-budget storage bound) must be opted
    into with ``allow_lossy``.
    """
    if not 0.0 <= theta < 1.0:
        raise InfluenceError(f"theta={theta} outside [0, 1)")
    if prune_floor is None:
        prune_floor = theta
    if prune_floor > theta and not allow_lossy:
        raise InfluenceError("prune_floor must not exceed theta")

    p = sp.csr_matrix(abs(operator), dtype=np.float64)
    n = p.shape[0]
    row_sums = np.asarray(p.sum(axis=1)).ravel()
    zero_rows = np.nonzero(row_sums == 0)[0]
    scale = np.where(row_sums > 0, row_sums, 1.0)
    # rows of a row-stochastic operator pass through exactly: dividing by a
    # sum that is 1 up to rounding would perturb scores at the ulp level and
    # flip strict comparisons against theta
    scale = np.where(np.abs(scale - 1.0) < 1e-9, 1.0, scale)
    normalized = sp.diags(1.0 / scale) @ p
    normalized = normalized.tocsr()
    if prune_floor > 0:
        normalized.data[normalized.data < prune_floor] = 0.0
        normalized.eliminate_zeros()
    cols = normalized.tocsc()
    cols.sort_indices()
    return InfluenceModel(num_nodes=n, by_source=cols, theta=theta,
                          prune_floor=prune_floor, zero_rows=zero_rows)


def activated_set(model: InfluenceModel, seeds) -> ActivatedSet:
    """sigma(S) = {v : max_{u in S} score(v, u) > theta} united with S itself.

    Seeds are always members: a labeled node trivially takes part in training
    regardless of its self-influence score.
    """
    seeds = frozenset(int(s) for s in seeds)
    members = np.zeros(model.num_nodes, dtype=bool)
    for u in seeds:
        if not 0 <= u < model.num_nodes:
            raise InfluenceError(f"seed {u} out of range")
        members[model.activation_targets(u)] = True
        members[u] = True
    return ActivatedSet(members=members, source_seeds=seeds)


def marginal_activation(model: InfluenceModel, current: ActivatedSet,
                        candidate: int) -> np.ndarray:
    """Nodes newly activated by adding ``candidate``: sigma(S + v) \\ sigma(S).

    Reads only the candidate's stored influence column; ``current`` is not
    mutated.  Returns a sorted id array.
    """
    candidate = int(candidate)
    if candidate in current.source_seeds:
        raise InfluenceError(f"candidate {candidate} already a seed")
    fresh = model.activation_targets(candidate)
    fresh = fresh[~current.members[fresh]]
    if not current.members[candidate] and candidate not in fresh:
        fresh = np.append(fresh, candidate)
        fresh.sort()
    return fresh


def extend_activated(current: ActivatedSet, candidate: int,
                     delta: np.ndarray) -> ActivatedSet:
    """New ActivatedSet for S + {candidate} given its marginal activation."""
    members = current.members.copy()
    members[delta] = True
    members[candidate] = True
    return ActivatedSet(members=members,
                        source_seeds=current.source_seeds | {int(candidate)})
