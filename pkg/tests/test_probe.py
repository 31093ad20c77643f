import numpy as np
import pytest

from graphsel.probe import (EvalConfig, ProbeError, coreset_sweep, evaluate,
                            probe_loss_grad, train_probe)

from oracles import random_features


def separable_instance(n_per=20, seed=0):
    rng = np.random.default_rng(seed)
    x = np.vstack([rng.normal(0, 0.3, (n_per, 2)) + [3, 0],
                   rng.normal(0, 0.3, (n_per, 2)) + [-3, 0]])
    y = np.array([0] * n_per + [1] * n_per)
    return x, y


def test_separable_training_accuracy_one():
    x, y = separable_instance()
    model = train_probe(x, y, list(range(len(y))), EvalConfig(l2_penalty=0.0))
    rep = evaluate(model, x, y, range(len(y)))
    assert rep["accuracy"] == 1.0


def test_zero_features_predicts_majority():
    x = np.zeros((30, 4))
    y = np.array([0] * 20 + [1] * 10)
    model = train_probe(x, y, list(range(30)))
    rep = evaluate(model, x, y, range(30))
    assert rep["accuracy"] == pytest.approx(20 / 30)


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(1)
    for trial in range(10):
        n, d, c = int(rng.integers(4, 12)), int(rng.integers(2, 5)), int(rng.integers(2, 4))
        x = rng.standard_normal((n, d))
        y = rng.integers(0, c, n)
        onehot = (y[:, None] == np.arange(c)[None, :]).astype(float)
        w = rng.standard_normal((d + 1) * c) * 0.5
        l2 = 0.05
        _, grad = probe_loss_grad(w, x, onehot, l2)
        fd = np.empty_like(w)
        h = 1e-6
        for i in range(w.size):
            wp, wm = w.copy(), w.copy()
            wp[i] += h
            wm[i] -= h
            fd[i] = (probe_loss_grad(wp, x, onehot, l2)[0]
                     - probe_loss_grad(wm, x, onehot, l2)[0]) / (2 * h)
        rel = np.abs(grad - fd) / np.maximum(np.abs(fd), 1.0)
        assert rel.max() <= 1e-5


def test_objective_trace_nonincreasing():
    x, y = separable_instance(seed=3)
    x = x + np.random.default_rng(4).normal(0, 1.0, x.shape)
    model = train_probe(x, y, list(range(len(y))), EvalConfig(l2_penalty=1e-3))
    trace = model.objective_trace
    for a, b in zip(trace, trace[1:]):
        assert b <= a + 1e-12


def test_seed_order_irrelevant():
    x, y = separable_instance(seed=5)
    seeds = list(range(len(y)))
    m1 = train_probe(x, y, seeds)
    m2 = train_probe(x, y, seeds[::-1])
    assert np.abs(m1.weights - m2.weights).max() < 1e-12


def test_single_class_seed_set_constant():
    x, y = separable_instance()
    model = train_probe(x, y, [0, 1, 2])
    assert model.classes.tolist() == [0]
    assert (model.predict(x) == 0).all()


def test_perfect_classifier_accuracy_one():
    x, y = separable_instance(seed=6)
    model = train_probe(x, y, list(range(len(y))), EvalConfig(l2_penalty=0.0))
    assert evaluate(model, x, y, range(len(y)))["accuracy"] == 1.0


def test_random_labels_near_chance():
    rng = np.random.default_rng(7)
    c = 4
    accs = []
    for trial in range(30):
        x = rng.standard_normal((60, 3))
        y = rng.integers(0, c, 60)
        model = train_probe(x, y, list(range(40)), EvalConfig(l2_penalty=1.0))
        accs.append(evaluate(model, x, y, range(40, 60))["accuracy"])
    # binomial 3-sigma band around 1/c over 30*20 test predictions
    n_pred = 30 * 20
    sigma = np.sqrt((1 / c) * (1 - 1 / c) / n_pred)
    assert abs(np.mean(accs) - 1 / c) < 3 * sigma + 0.05


def test_empty_test_set_rejected():
    x, y = separable_instance()
    model = train_probe(x, y, [0, 25])
    with pytest.raises(ProbeError):
        evaluate(model, x, y, [])


def test_unlabeled_seed_rejected():
    x = random_features(10, 2, 0)
    y = np.full(10, -1)
    y[0] = 0
    with pytest.raises(ProbeError):
        train_probe(x, y, [0, 1])


def test_coreset_sweep_full_pool_gap_zero():
    sweep = coreset_sweep({100: 0.8, 50: 0.75}, full_pool_accuracy=0.8,
                          pool_size=100)
    by_budget = {r["budget"]: r for r in sweep["rows"]}
    assert by_budget[100]["gap"] == pytest.approx(0.0)
    assert sweep["min_label_rate_for_gap"]["0.01"] == pytest.approx(1.0)
    assert sweep["min_label_rate_for_gap"]["0.05"] == pytest.approx(0.5)
