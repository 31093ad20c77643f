"""Feature-space distance, d_max estimation and the two submodular diversity
functions (nearest-activated-node and r-ball coverage), with incremental
marginal-gain evaluation.

The distance everywhere is the half-normalized form

    d(u, v) = 0.5 * || x_u / ||x_u||  -  x_v / ||x_v|| ||

which is bounded by 1, so ball radii transfer across datasets.  Zero-norm
feature rows normalize to the zero vector: their mutual distance is 0 and
their distance to any unit row is 0.5.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class DiversityError(ValueError):
    pass


_DMAX_SLACK = 1e-9  # float tolerance for the "no distance exceeds d_max" assert


@dataclass
class FeatureMetric:
    """Pairwise half-normalized distance over propagated feature rows.

    ``d_max`` is the maximum pairwise distance, exact for N <= exact_limit and
    sampled otherwise (flagged by ``exact_dmax``).  Every distance computed
    through this object is checked against d_max on the fly.
    """

    unit_rows: np.ndarray
    row_norms: np.ndarray = field(init=False)
    d_max: float | None = field(init=False, default=None)
    exact_dmax: bool = field(init=False, default=True)

    def __post_init__(self):
        self.unit_rows = np.asarray(self.unit_rows, dtype=np.float64)
        # 1 for unit rows, 0 for zero rows; needed in the squared-distance form.
        self.row_norms = np.linalg.norm(self.unit_rows, axis=1) ** 2

    @property
    def num_nodes(self) -> int:
        return self.unit_rows.shape[0]

    def distances_from(self, u: int) -> np.ndarray:
        """Distances from node u to every node, length N."""
        diff2 = (self.row_norms + self.row_norms[u]
                 - 2.0 * (self.unit_rows @ self.unit_rows[u]))
        d = 0.5 * np.sqrt(np.maximum(diff2, 0.0))
        d[u] = 0.0
        self._check(d)
        return d

    def distance(self, u: int, v: int) -> float:
        if u == v:
            return 0.0
        d = 0.5 * float(np.linalg.norm(self.unit_rows[u] - self.unit_rows[v]))
        self._check(d)
        return d

    def _check(self, d):
        if self.d_max is None or not np.isfinite(self.d_max):
            return
        biggest = float(np.max(d))
        if biggest > self.d_max + _DMAX_SLACK:
            raise DiversityError(
                f"observed distance {biggest} exceeds d_max={self.d_max}")


def distance(metric: FeatureMetric, u: int, v: int) -> float:
    return metric.distance(u, v)


def compute_dmax(metric: FeatureMetric, exact_limit: int = 20000,
                 rng_seed: int = 0, num_samples: int = 1_000_000) -> float:
    """Fill in metric.d_max.

    Exact O(N^2) scan for N <= exact_limit; otherwise the max over sampled
    pairs plus all rows against the best sampled row, flagged inexact.  The
    sampled estimate is always <= the true maximum.
    """
    n = metric.num_nodes
    u = metric.unit_rows
    sq = metric.row_norms
    # disable the on-the-fly check while bootstrapping
    metric.d_max = np.inf
    best = 0.0
    if n <= exact_limit:
        best_node = 0
        block = max(1, 20_000_000 // max(n, 1))
        for lo in range(0, n, block):
            hi = min(n, lo + block)
            diff2 = sq[lo:hi, None] + sq[None, :] - 2.0 * (u[lo:hi] @ u.T)
            np.maximum(diff2, 0.0, out=diff2)
            m = float(diff2.max())
            if m > best:
                best = m
                flat = int(np.argmax(diff2))
                best_node = lo + flat // n
        metric.exact_dmax = True
    else:
        rng = np.random.default_rng(rng_seed)
        a = rng.integers(0, n, size=num_samples)
        b = rng.integers(0, n, size=num_samples)
        diff2 = sq[a] + sq[b] - 2.0 * np.einsum("ij,ij->i", u[a], u[b])
        np.maximum(diff2, 0.0, out=diff2)
        best = float(diff2.max())
        anchor = int(a[np.argmax(diff2)])
        diff2 = sq + sq[anchor] - 2.0 * (u @ u[anchor])
        np.maximum(diff2, 0.0, out=diff2)
        best = max(best, float(diff2.max()))
        best_node = anchor
        metric.exact_dmax = False
    d_max = 0.5 * float(np.sqrt(best))
    # guard against rounding between the blocked scan and later queries
    if n and best > 0:
        d_max = max(d_max, float(metric.distances_from(best_node).max()))
    metric.d_max = d_max
    return metric.d_max


@dataclass(frozen=True)
class BallIndex:
    """Per-node r-balls in feature space: balls[u] lists v with d(u,v) <= r."""

    radius: float
    balls: tuple  # tuple of sorted np.ndarray, one per node

    @property
    def num_nodes(self) -> int:
        return len(self.balls)


def build_ball_index(metric: FeatureMetric, radius: float) -> BallIndex:
    """Exact O(N^2) ball construction; rows sorted for reproducibility.

    r = 0 reduces each ball to exact duplicates of the unit row (and the node
    itself, since d(u,u) is exactly 0).
    """
    if radius < 0:
        raise DiversityError("radius must be >= 0")
    n = metric.num_nodes
    balls = []
    for u in range(n):
        d = metric.distances_from(u)
        balls.append(np.nonzero(d <= radius)[0])
    return BallIndex(radius=radius, balls=tuple(balls))


class DiversityState:
    """Incremental tracker of a diversity function over the activated set.

    kind "nn": maintains m[u] = distance from u to its nearest activated node
    (initialized to d_max), value = sum(d_max - m).
    kind "ball": maintains the covered-node bitset, value = popcount.

    Gain queries are pure; ``commit`` mutates.  The activated bitset is kept
    to enforce the disjointness contract of commit.
    """

    def __init__(self, metric: FeatureMetric, kind: str = "ball",
                 ball_index: BallIndex | None = None):
        if kind not in ("nn", "ball"):
            raise DiversityError(f"unknown diversity kind {kind!r}")
        if kind == "ball" and ball_index is None:
            raise DiversityError("ball diversity needs a BallIndex")
        if kind == "nn" and metric.d_max is None:
            raise DiversityError("call compute_dmax before building an nn state")
        self.metric = metric
        self.kind = kind
        self.ball_index = ball_index
        n = metric.num_nodes
        self.activated = np.zeros(n, dtype=bool)
        if kind == "nn":
            self.min_dist = np.full(n, metric.d_max)
            self.covered = None
        else:
            self.min_dist = None
            self.covered = np.zeros(n, dtype=bool)
        self.value = 0.0

    def copy(self) -> "DiversityState":
        other = DiversityState.__new__(DiversityState)
        other.metric = self.metric
        other.kind = self.kind
        other.ball_index = self.ball_index
        other.activated = self.activated.copy()
        other.min_dist = None if self.min_dist is None else self.min_dist.copy()
        other.covered = None if self.covered is None else self.covered.copy()
        other.value = self.value
        return other

    def _check_disjoint(self, delta):
        if delta.size and self.activated[delta].any():
            dup = int(delta[self.activated[delta]][0])
            raise DiversityError(f"node {dup} already activated")

    def gain(self, delta_sigma) -> float:
        """Exact increase of D from activating ``delta_sigma``; no mutation."""
        delta = np.asarray(delta_sigma, dtype=np.int64)
        self._check_disjoint(delta)
        if delta.size == 0:
            return 0.0
        if self.kind == "nn":
            new_min = self._min_over(delta)
            return float(np.maximum(self.min_dist - new_min, 0.0).sum())
        newly = self._ball_union(delta)
        return float(np.count_nonzero(~self.covered[newly]))

    def commit(self, delta_sigma) -> None:
        """Apply the activation permanently; value identities restored."""
        delta = np.asarray(delta_sigma, dtype=np.int64)
        self._check_disjoint(delta)
        if delta.size == 0:
            return
        if self.kind == "nn":
            new_min = self._min_over(delta)
            gained = np.maximum(self.min_dist - new_min, 0.0)
            np.minimum(self.min_dist, new_min, out=self.min_dist)
            self.value += float(gained.sum())
        else:
            newly = self._ball_union(delta)
            fresh = newly[~self.covered[newly]]
            self.covered[fresh] = True
            self.value += float(fresh.size)
        self.activated[delta] = True

    def _min_over(self, delta) -> np.ndarray:
        """min over w in delta of d(., w), length N."""
        out = np.full(self.metric.num_nodes, np.inf)
        for w in delta:
            np.minimum(out, self.metric.distances_from(int(w)), out=out)
        return out

    def _ball_union(self, delta) -> np.ndarray:
        parts = [self.ball_index.balls[int(w)] for w in delta]
        return np.unique(np.concatenate(parts)) if parts else np.empty(0, dtype=np.int64)


def nn_diversity_value(metric: FeatureMetric, activated_ids) -> float:
    """From-scratch D_NN(S) = sum_u (d_max - min_{v in sigma(S)} d(u, v))."""
    ids = np.asarray(list(activated_ids), dtype=np.int64)
    if ids.size == 0:
        return 0.0
    best = np.full(metric.num_nodes, np.inf)
    for v in ids:
        np.minimum(best, metric.distances_from(int(v)), out=best)
    return float((metric.d_max - best).sum())


def ball_diversity_value(index: BallIndex, activated_ids) -> float:
    """From-scratch D_ball(S) = |union of balls around sigma(S)|."""
    ids = list(activated_ids)
    if not ids:
        return 0.0
    covered = np.unique(np.concatenate([index.balls[int(v)] for v in ids]))
    return float(covered.size)
