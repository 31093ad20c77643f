"""Parameter-free K-step feature propagation kernels.

Six linear smoothing recurrences are supported, mirroring the propagation
rules of common decoupled GNNs.  Writing X for the current iterate and X0 for
the input features:

    sym       X <- T_sym X
    rw        X <- T_rw X
    ppr       X <- (1 - alpha) T_rw X + alpha X0
    tri       X <- T_tr X
    s2gc      X^(k) = ((1-alpha) T^k X0 + alpha X0 + (k-1) X^(k-1)) / k
    gbp       X^(k) = theta_k T^k X0 + X^(k-1),   X^(0) = theta_0 X0

All of them are linear in X0, so the same recurrence run on the identity
yields the propagation operator P_k with X^(k) = P_k X0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .graph import SparseGraph, TransitionKind, build_transition

KERNELS = ("sym", "rw", "ppr", "tri", "s2gc", "gbp")

_KERNEL_TRANSITION = {
    "sym": TransitionKind.SYMMETRIC,
    "rw": TransitionKind.RANDOM_WALK,
    "ppr": TransitionKind.RANDOM_WALK,
    "tri": TransitionKind.TRIANGLE,
    "s2gc": TransitionKind.RANDOM_WALK,
    "gbp": TransitionKind.RANDOM_WALK,
}

_NEEDS_ALPHA = ("ppr", "s2gc")


class PropagationError(ValueError):
    pass


@dataclass(frozen=True)
class PropagationConfig:
    kernel: str = "rw"
    steps: int = 2
    alpha: float | None = None
    gbp_weights: tuple = None

    def __post_init__(self):
        if self.kernel not in KERNELS:
            raise PropagationError(f"unknown kernel {self.kernel!r}; choose from {KERNELS}")
        if self.steps < 0:
            raise PropagationError("steps must be >= 0")
        if self.kernel in _NEEDS_ALPHA:
            alpha = 0.1 if self.alpha is None else self.alpha
            if not 0.0 <= alpha <= 1.0:
                raise PropagationError(f"alpha={alpha} outside [0, 1]")
            object.__setattr__(self, "alpha", alpha)
        elif self.kernel == "gbp":
            if self.gbp_weights is None:
                # PPR-style decay; the GBP weighting is a free parameter here.
                a = 0.1
                w = tuple(a * (1 - a) ** j for j in range(self.steps + 1))
                object.__setattr__(self, "gbp_weights", w)
            else:
                w = tuple(float(x) for x in self.gbp_weights)
                if len(w) != self.steps + 1:
                    raise PropagationError(
                        f"gbp_weights needs {self.steps + 1} entries, got {len(w)}")
                object.__setattr__(self, "gbp_weights", w)
        elif self.alpha is not None:
            raise PropagationError(f"kernel {self.kernel!r} takes no alpha")


@dataclass(frozen=True)
class PropagatedFeatures:
    """X^(k) plus unit-normalized rows for distance computations."""

    values: np.ndarray      # N x d
    unit_rows: np.ndarray   # rows scaled to unit L2 norm; zero rows stay zero
    steps_used: int

    @property
    def num_nodes(self) -> int:
        return self.values.shape[0]


def _unit_rows(values: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(values, axis=1, keepdims=True)
    safe = np.where(norms > 0, norms, 1.0)
    return values / safe


def transition_for(graph: SparseGraph, config: PropagationConfig) -> sp.csr_matrix:
    return build_transition(graph, _KERNEL_TRANSITION[config.kernel])


def _run_recurrence(t: sp.csr_matrix, x0, config: PropagationConfig):
    """Shared recurrence driver; x0 may be dense (features) or sparse
    (identity, for the operator)."""
    kernel, k = config.kernel, config.steps
    if k == 0:
        return x0
    x = x0
    if kernel in ("sym", "rw", "tri"):
        for _ in range(k):
            x = t @ x
    elif kernel == "ppr":
        a = config.alpha
        for _ in range(k):
            x = (1 - a) * (t @ x) + a * x0
    elif kernel == "s2gc":
        a = config.alpha
        tk_x0 = x0
        for j in range(1, k + 1):
            tk_x0 = t @ tk_x0
            x = ((1 - a) * tk_x0 + a * x0 + (j - 1) * x) / j
    else:  # gbp
        th = config.gbp_weights
        tk_x0 = x0
        x = th[0] * x0
        for j in range(1, k + 1):
            tk_x0 = t @ tk_x0
            x = th[j] * tk_x0 + x
    return x


def propagate(graph: SparseGraph, features: np.ndarray,
              config: PropagationConfig) -> PropagatedFeatures:
    """Run the configured recurrence for config.steps steps.

    steps == 0 returns the input unchanged (identity, every kernel).
    """
    features = np.asarray(features, dtype=np.float64)
    if features.ndim != 2 or features.shape[0] != graph.num_nodes:
        raise PropagationError(
            f"features shape {features.shape} incompatible with N={graph.num_nodes}")
    if config.steps == 0:
        out = features.copy()
    else:
        t = transition_for(graph, config)
        out = np.asarray(_run_recurrence(t, features, config))
    bad = ~np.isfinite(out)
    if bad.any():
        node = int(np.nonzero(bad.any(axis=1))[0][0])
        raise PropagationError(f"non-finite propagated feature at node {node}")
    return PropagatedFeatures(values=out, unit_rows=_unit_rows(out), steps_used=config.steps)


def propagation_operator(graph: SparseGraph, config: PropagationConfig) -> sp.csr_matrix:
    """Sparse P_k with X^(k) = P_k X^(0) (all kernels are linear in X0)."""
    n = graph.num_nodes
    eye = sp.identity(n, format="csr")
    if config.steps == 0:
        return eye
    t = transition_for(graph, config)
    p = _run_recurrence(t, eye, config)
    p = sp.csr_matrix(p)
    p.sort_indices()
    p.eliminate_zeros()
    return p
