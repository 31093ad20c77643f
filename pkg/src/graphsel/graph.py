"""CSR graph storage, transition matrices and synthetic graph generation.

All downstream machinery (propagation kernels, influence scores) operates on
the self-looped adjacency ``A_tilde = A + I``; self-loops are therefore added
unconditionally at construction time and raw-adjacency mode is not offered.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
import scipy.sparse as sp


class GraphError(ValueError):
    """Malformed graph input (bad ids, bad weights, bad parameters)."""


class TransitionKind(str, Enum):
    RANDOM_WALK = "rw"       # D_tilde^-1 A_tilde, row-stochastic
    SYMMETRIC = "sym"        # D_tilde^-1/2 A_tilde D_tilde^-1/2
    TRIANGLE = "tri"         # D_T^-1 A_T, triangle-induced


@dataclass(frozen=True)
class SparseGraph:
    """Immutable graph in CSR form, self-loops included.

    ``adj`` always holds the self-looped adjacency A_tilde = A + I with sorted,
    duplicate-free column indices.  Instances are safe to share across threads;
    nothing mutates them after construction.
    """

    num_nodes: int
    adj: sp.csr_matrix
    directed: bool = False

    def __post_init__(self):
        a = self.adj
        if a.shape != (self.num_nodes, self.num_nodes):
            raise GraphError(f"adjacency shape {a.shape} != ({self.num_nodes}, {self.num_nodes})")
        if a.nnz and a.data.min() < 0:
            raise GraphError("negative edge weight")

    @property
    def degrees(self) -> np.ndarray:
        """Weighted degrees of A_tilde (row sums, self-loop included)."""
        return np.asarray(self.adj.sum(axis=1)).ravel()

    def structural_degrees(self) -> np.ndarray:
        """Neighbor counts excluding the self-loop; used by pruning and the
        degree baseline."""
        return self.adj.getnnz(axis=1).astype(np.int64) - 1

    def adjacency_without_loops(self) -> sp.csr_matrix:
        """A = A_tilde - I, the raw adjacency (used for triangle counting)."""
        a = self.adj - sp.identity(self.num_nodes, format="csr")
        a.eliminate_zeros()
        return a


def from_edges(num_nodes: int, rows, cols, weights=None, symmetrize: bool = True) -> SparseGraph:
    """Build a SparseGraph from parallel arc arrays.

    Duplicate (u, v) arcs are collapsed by weight summation.  With
    ``symmetrize`` the arc matrix M is replaced by M + M^T (input self-edges
    counted once), so weight(u, v) == weight(v, u) afterwards.  Unit
    self-loops are then added: adj = A + I.
    """
    rows = np.asarray(rows, dtype=np.int64).ravel()
    cols = np.asarray(cols, dtype=np.int64).ravel()
    if rows.size and (rows.min() < 0 or cols.min() < 0):
        raise GraphError("negative node id")
    if rows.size and max(rows.max(initial=0), cols.max(initial=0)) >= num_nodes:
        raise GraphError(f"node id out of range (num_nodes={num_nodes})")
    if weights is None:
        weights = np.ones(rows.size)
    weights = np.asarray(weights, dtype=np.float64).ravel()
    if weights.size and weights.min() < 0:
        raise GraphError("negative edge weight")

    m = sp.coo_matrix((weights, (rows, cols)), shape=(num_nodes, num_nodes)).tocsr()
    m.sum_duplicates()
    if symmetrize:
        a = m + m.T - sp.diags(m.diagonal())
    else:
        a = m
    adj = (a + sp.identity(num_nodes, format="csr")).tocsr()
    adj.sum_duplicates()
    adj.sort_indices()
    adj.eliminate_zeros()
    return SparseGraph(num_nodes=num_nodes, adj=adj, directed=not symmetrize)


def build_transition(graph: SparseGraph, kind: TransitionKind | str) -> sp.csr_matrix:
    """Transition matrix of the requested kind over A_tilde.

    T_rw = D^-1 A_tilde is row-stochastic by construction (the self-loop
    guarantees positive degree).  T_sym = D^-1/2 A_tilde D^-1/2.  The triangle
    kind delegates to :func:`build_triangle_transition`.
    """
    kind = TransitionKind(kind)
    if kind is TransitionKind.TRIANGLE:
        return build_triangle_transition(graph)
    deg = graph.degrees
    if kind is TransitionKind.RANDOM_WALK:
        t = sp.diags(1.0 / deg) @ graph.adj
    else:
        half = sp.diags(1.0 / np.sqrt(deg))
        t = half @ graph.adj @ half
    t = t.tocsr()
    t.sort_indices()
    return t


def triangle_adjacency(graph: SparseGraph) -> sp.csr_matrix:
    """A_T: each edge weighted by the number of triangles it belongs to,
    plus unit self-loops.  Edges in no triangle vanish; the self-loop keeps
    every row nonempty so D_T^-1 A_T stays row-stochastic."""
    a = graph.adjacency_without_loops()
    a_bin = a.copy()
    a_bin.data = np.ones_like(a_bin.data)
    # (A A)[u,v] restricted to edges (u,v) counts common neighbors of u and v,
    # i.e. the triangles through that edge.
    tri = (a_bin @ a_bin).multiply(a_bin)
    tri = tri.tocsr()
    tri.eliminate_zeros()
    a_t = (tri + sp.identity(graph.num_nodes, format="csr")).tocsr()
    a_t.sort_indices()
    return a_t


def build_triangle_transition(graph: SparseGraph) -> sp.csr_matrix:
    """Row-stochastic triangle-induced transition D_T^-1 A_T."""
    if graph.directed:
        raise GraphError("triangle transition requires an undirected graph")
    a_t = triangle_adjacency(graph)
    deg = np.asarray(a_t.sum(axis=1)).ravel()
    t = (sp.diags(1.0 / deg) @ a_t).tocsr()
    t.sort_indices()
    return t


def generate_sbm(blocks: int, per_block: int, p_in: float, p_out: float,
                 feat_dim: int, feat_shift: float, rng_seed: int = 0,
                 rng: np.random.Generator | None = None):
    """Stochastic block model with Gaussian block features.

    Nodes 0..per_block-1 belong to block 0 and so on.  Block-c features are
    drawn from N(0, I) shifted by ``feat_shift`` along coordinate c (mod
    feat_dim).  Returns (SparseGraph, features, labels); deterministic for a
    given seed or generator.
    """
    if per_block <= 0:
        raise GraphError("per_block must be positive")
    if blocks <= 0:
        raise GraphError("blocks must be positive")
    if not (0.0 <= p_out <= p_in <= 1.0):
        raise GraphError("need 0 <= p_out <= p_in <= 1")
    if feat_dim <= 0:
        raise GraphError("feat_dim must be positive")
    if rng is None:
        rng = np.random.default_rng(rng_seed)

    n = blocks * per_block
    labels = np.repeat(np.arange(blocks), per_block)
    # Sample the upper triangle only, then symmetrize through from_edges.
    rows, cols = [], []
    for u in range(n):
        p = np.where(labels[u + 1:] == labels[u], p_in, p_out)
        hit = np.nonzero(rng.random(n - u - 1) < p)[0]
        rows.append(np.full(hit.size, u))
        cols.append(hit + u + 1)
    rows = np.concatenate(rows) if rows else np.empty(0, dtype=np.int64)
    cols = np.concatenate(cols) if cols else np.empty(0, dtype=np.int64)
    graph = from_edges(n, rows, cols, symmetrize=True)

    feats = rng.standard_normal((n, feat_dim))
    for c in range(blocks):
        feats[labels == c, c % feat_dim] += feat_shift
    return graph, feats, labels
