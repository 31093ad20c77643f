"""Linear probe: L2-regularized multinomial logistic regression on propagated
features, the cheap stand-in for a full GNN when scoring selection quality.

The objective is convex; we minimize it with L-BFGS (first-order with line
search) from a deterministic zero start.  The loss and gradient are written
out explicitly so the gradient can be checked against finite differences.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .propagation import PropagatedFeatures


class ProbeError(ValueError):
    pass


@dataclass(frozen=True)
class EvalConfig:
    l2_penalty: float = 5e-4
    max_iterations: int = 500
    tolerance: float = 1e-6

    def __post_init__(self):
        if self.l2_penalty < 0:
            raise ProbeError("l2_penalty must be >= 0")


@dataclass
class ProbeModel:
    weights: np.ndarray     # (d + 1) x C, last row is the unpenalized bias
    classes: np.ndarray     # class ids, sorted
    iterations: int
    converged: bool
    objective_trace: list = field(default_factory=list)

    def decision_values(self, x: np.ndarray) -> np.ndarray:
        return x @ self.weights[:-1] + self.weights[-1]

    def predict(self, x: np.ndarray) -> np.ndarray:
        scores = self.decision_values(x)
        return self.classes[np.argmax(scores, axis=1)]


def _softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def probe_loss_grad(w_flat: np.ndarray, x: np.ndarray, y_onehot: np.ndarray,
                    l2: float):
    """Mean cross-entropy + (l2/2)*||W||^2 (bias unpenalized) and gradient."""
    n, d = x.shape
    c = y_onehot.shape[1]
    w = w_flat.reshape(d + 1, c)
    probs = _softmax(x @ w[:-1] + w[-1])
    eps = 1e-300
    loss = -np.sum(y_onehot * np.log(probs + eps)) / n
    loss += 0.5 * l2 * np.sum(w[:-1] ** 2)
    diff = (probs - y_onehot) / n
    grad = np.empty_like(w)
    grad[:-1] = x.T @ diff + l2 * w[:-1]
    grad[-1] = diff.sum(axis=0)
    return loss, grad.ravel()


def train_probe(features: PropagatedFeatures | np.ndarray, labels: np.ndarray,
                seeds, config: EvalConfig = EvalConfig()) -> ProbeModel:
    """Fit the probe on the rows of X^(k) indexed by ``seeds``.

    Deterministic: zero initialization, order-free objective.  A single-class
    seed set yields a constant classifier (warning via the returned model's
    classes array of length 1).
    """
    x_all = features.values if isinstance(features, PropagatedFeatures) else np.asarray(features)
    seeds = [int(s) for s in seeds]
    if not seeds:
        raise ProbeError("empty seed set")
    y = np.asarray(labels)[seeds]
    if (y < 0).any():
        raise ProbeError("seed without a label")
    classes = np.unique(y)
    x = x_all[seeds]
    n, d = x.shape
    c = classes.size
    if c == 1:
        w = np.zeros((d + 1, 1))
        return ProbeModel(weights=w, classes=classes, iterations=0, converged=True)

    y_onehot = (y[:, None] == classes[None, :]).astype(np.float64)
    trace: list = []

    def fun(w_flat):
        loss, grad = probe_loss_grad(w_flat, x, y_onehot, config.l2_penalty)
        return loss, grad

    def cb(w_flat):
        trace.append(probe_loss_grad(w_flat, x, y_onehot, config.l2_penalty)[0])

    w0 = np.zeros((d + 1) * c)
    res = minimize(fun, w0, jac=True, method="L-BFGS-B", callback=cb,
                   options={"maxiter": config.max_iterations,
                            "gtol": config.tolerance, "ftol": 0.0})
    return ProbeModel(weights=res.x.reshape(d + 1, c), classes=classes,
                      iterations=res.nit, converged=bool(res.success),
                      objective_trace=trace)


def evaluate(model: ProbeModel, features, labels: np.ndarray, test_ids,
             seeds=None) -> dict:
    """Micro accuracy on the test nodes, plus per-class accuracy and the
    class histogram of the seed set."""
    x_all = features.values if isinstance(features, PropagatedFeatures) else np.asarray(features)
    test_ids = np.asarray(list(test_ids), dtype=np.int64)
    if test_ids.size == 0:
        raise ProbeError("empty test set")
    labels = np.asarray(labels)
    y_true = labels[test_ids]
    y_pred = model.predict(x_all[test_ids])
    correct = y_pred == y_true
    per_class = {}
    for c in np.unique(y_true):
        mask = y_true == c
        per_class[int(c)] = float(correct[mask].mean())
    seed_hist = {}
    if seeds is not None:
        vals, counts = np.unique(labels[[int(s) for s in seeds]], return_counts=True)
        seed_hist = {int(v): int(k) for v, k in zip(vals, counts)}
    return {
        "accuracy": float(correct.mean()),
        "per_class": per_class,
        "seed_histogram": seed_hist,
        "num_test": int(test_ids.size),
    }


def coreset_sweep(results_by_budget: dict, full_pool_accuracy: float,
                  pool_size: int, gaps=tuple(g / 100 for g in range(1, 8))) -> dict:
    """Accuracy gap vs the full-pool probe per budget, plus the minimum label
    rate reaching each gap.  Gaps are reported, never asserted monotone."""
    budgets = sorted(results_by_budget)
    rows = []
    for b in budgets:
        acc = results_by_budget[b]
        rows.append({"budget": b, "label_rate": b / pool_size,
                     "accuracy": acc, "gap": full_pool_accuracy - acc})
    min_rate = {}
    for g in gaps:
        hit = [r for r in rows if r["gap"] <= g + 1e-12]
        min_rate[f"{g:.2f}"] = min((r["label_rate"] for r in hit), default=None)
    return {"full_pool_accuracy": full_pool_accuracy, "rows": rows,
            "min_label_rate_for_gap": min_rate}
