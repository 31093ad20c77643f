import numpy as np
import pytest

from graphsel.graph import from_edges
from graphsel.propagation import (PropagationConfig, PropagationError,
                                  propagate, propagation_operator)

from oracles import random_features, random_graph

ALL_KERNELS = ["sym", "rw", "ppr", "tri", "s2gc", "gbp"]
ROW_STOCHASTIC = ["rw", "ppr", "tri"]


def path_graph():
    return from_edges(3, [0, 1], [1, 2])


def cfg_for(kernel, steps, **kw):
    if kernel in ("ppr", "s2gc") and "alpha" not in kw:
        kw["alpha"] = 0.1
    return PropagationConfig(kernel=kernel, steps=steps, **kw)


@pytest.mark.parametrize("kernel", ALL_KERNELS)
def test_zero_steps_is_identity(kernel):
    g = random_graph(12, 0.3, 0)
    x = random_features(12, 4, 0)
    out = propagate(g, x, cfg_for(kernel, 0))
    assert (out.values == x).all()


def test_rw_one_step_path_graph():
    g = path_graph()
    x = np.eye(3)
    out = propagate(g, x, cfg_for("rw", 1))
    assert out.values[1] == pytest.approx([1 / 3, 1 / 3, 1 / 3])
    assert out.values[0] == pytest.approx([0.5, 0.5, 0.0])


def test_ppr_alpha_one_is_identity():
    g = random_graph(10, 0.4, 1)
    x = random_features(10, 3, 1)
    for k in (1, 2, 5):
        out = propagate(g, x, cfg_for("ppr", k, alpha=1.0))
        assert np.abs(out.values - x).max() < 1e-12


def test_rw_operator_one_step_is_transition():
    from graphsel.graph import build_transition
    g = random_graph(15, 0.3, 2)
    p1 = propagation_operator(g, cfg_for("rw", 1))
    t = build_transition(g, "rw")
    assert abs(p1 - t).max() < 1e-15


def test_s2gc_k1_alpha0_is_transition():
    from graphsel.graph import build_transition
    g = random_graph(15, 0.3, 3)
    p1 = propagation_operator(g, cfg_for("s2gc", 1, alpha=0.0))
    t = build_transition(g, "rw")
    assert abs(p1 - t).max() < 1e-12


def test_gbp_delta_weights_is_identity():
    g = random_graph(10, 0.3, 4)
    p = propagation_operator(g, PropagationConfig("gbp", 3, gbp_weights=(1, 0, 0, 0)))
    assert abs(p - np.eye(10)).max() == 0


@pytest.mark.parametrize("kernel", ALL_KERNELS)
def test_operator_consistency(kernel):
    rng = np.random.default_rng(5)
    for trial in range(50):
        n = int(rng.integers(5, 60))
        g = random_graph(n, 0.2, 100 + trial)
        x = random_features(n, 5, trial)
        k = int(rng.integers(1, 4))
        cfg = cfg_for(kernel, k)
        direct = propagate(g, x, cfg).values
        via_op = propagation_operator(g, cfg) @ x
        assert np.abs(direct - via_op).max() < 1e-7


@pytest.mark.parametrize("kernel", ROW_STOCHASTIC)
def test_constant_features_preserved(kernel):
    for seed in range(10):
        g = random_graph(25, 0.25, seed)
        x = np.ones((25, 3))
        out = propagate(g, x, cfg_for(kernel, 3))
        assert np.abs(out.values - 1.0).max() < 1e-7


@pytest.mark.parametrize("kernel", ALL_KERNELS)
def test_linearity(kernel):
    g = random_graph(20, 0.3, 6)
    x = random_features(20, 4, 10)
    y = random_features(20, 4, 11)
    a, b = 1.7, -0.4
    cfg = cfg_for(kernel, 2)
    lhs = propagate(g, a * x + b * y, cfg).values
    rhs = a * propagate(g, x, cfg).values + b * propagate(g, y, cfg).values
    assert np.abs(lhs - rhs).max() < 1e-7


def test_unit_rows_normalized():
    g = random_graph(30, 0.2, 7)
    x = random_features(30, 6, 12)
    out = propagate(g, x, cfg_for("rw", 2))
    norms = np.linalg.norm(out.unit_rows, axis=1)
    nonzero = norms > 0
    assert np.abs(norms[nonzero] - 1).max() < 1e-9


def test_dimension_mismatch_rejected():
    g = path_graph()
    with pytest.raises(PropagationError):
        propagate(g, np.zeros((5, 2)), cfg_for("rw", 1))


def test_gbp_weight_length_checked():
    with pytest.raises(PropagationError):
        PropagationConfig("gbp", 2, gbp_weights=(1.0, 0.5))


def test_alpha_rejected_for_plain_kernels():
    with pytest.raises(PropagationError):
        PropagationConfig("rw", 2, alpha=0.5)
