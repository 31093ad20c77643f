import numpy as np
import pytest

from graphsel.diversity import (BallIndex, DiversityError, DiversityState,
                                FeatureMetric, ball_diversity_value,
                                build_ball_index, compute_dmax,
                                nn_diversity_value)

from oracles import (ball_diversity_from_scratch, metric_for,
                     nn_diversity_from_scratch, random_features)


def unit(rows):
    rows = np.asarray(rows, dtype=np.float64)
    norms = np.linalg.norm(rows, axis=1, keepdims=True)
    return rows / np.where(norms > 0, norms, 1.0)


def test_distance_basic_cases():
    m = metric_for(unit([[1, 0], [0, 1], [-1, 0], [1, 0]]))
    assert m.distance(0, 0) == 0.0
    assert m.distance(0, 3) == pytest.approx(0.0)
    assert m.distance(0, 2) == pytest.approx(1.0)          # antipodal
    assert m.distance(0, 1) == pytest.approx(0.5 * np.sqrt(2))


def test_zero_rows():
    m = metric_for(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 0.0]]))
    assert m.distance(0, 2) == 0.0
    assert m.distance(0, 1) == pytest.approx(0.5)


def test_dmax_degenerate():
    m = metric_for(unit([[1, 1]] * 5))
    assert m.d_max == 0.0
    state = DiversityState(m, kind="nn")
    state.commit([0, 2])
    assert state.value == 0.0


def test_dmax_two_clusters():
    rows = unit([[1, 0]] * 3 + [[0, 1]] * 3)
    m = metric_for(rows)
    assert m.d_max == pytest.approx(0.5 * np.sqrt(2))
    assert m.exact_dmax


def test_dmax_sampled_lower_bound():
    rows = random_features(500, 8, 0)
    rows = rows / np.linalg.norm(rows, axis=1, keepdims=True)
    exact = FeatureMetric(rows)
    compute_dmax(exact)
    sampled = FeatureMetric(rows)
    compute_dmax(sampled, exact_limit=10, num_samples=2000)
    assert not sampled.exact_dmax
    assert sampled.d_max <= exact.d_max + 1e-12


def test_dmax_dominates_all_queries():
    rows = random_features(60, 5, 1)
    m = metric_for(rows / np.linalg.norm(rows, axis=1, keepdims=True))
    for u in range(60):
        assert m.distances_from(u).max() <= m.d_max + 1e-9


def test_ball_membership_symmetric_and_reflexive():
    rows = unit(random_features(40, 4, 2))
    m = metric_for(rows)
    index = build_ball_index(m, 0.3)
    member = np.zeros((40, 40), dtype=bool)
    for u, ball in enumerate(index.balls):
        member[u, ball] = True
        assert u in ball
    assert (member == member.T).all()


def test_r_zero_ball_is_duplicates_only():
    rows = unit([[1, 0], [0, 1], [1, 0], [1, 1]])
    m = metric_for(rows)
    index = build_ball_index(m, 0.0)
    assert index.balls[0].tolist() == [0, 2]
    assert index.balls[1].tolist() == [1]
    assert index.balls[3].tolist() == [3]


def test_nn_gain_empty_delta():
    m = metric_for(unit(random_features(10, 3, 3)))
    state = DiversityState(m, kind="nn")
    assert state.gain([]) == 0.0


def test_nn_first_activation_gain():
    rows = unit(random_features(15, 4, 4))
    m = metric_for(rows)
    state = DiversityState(m, kind="nn")
    w = 7
    expected = sum(m.d_max - m.distance(u, w) for u in range(15))
    assert state.gain([w]) == pytest.approx(expected, abs=1e-9)


def test_nn_gain_matches_from_scratch():
    rng = np.random.default_rng(5)
    rows = unit(random_features(30, 4, 5))
    m = metric_for(rows)
    state = DiversityState(m, kind="nn")
    active = []
    for _ in range(6):
        fresh = [int(v) for v in rng.choice(30, size=3, replace=False)
                 if v not in active]
        if not fresh:
            continue
        before = nn_diversity_from_scratch(rows, m.d_max, active)
        after = nn_diversity_from_scratch(rows, m.d_max, active + fresh)
        assert state.gain(fresh) == pytest.approx(after - before, abs=1e-9)
        state.commit(fresh)
        active += fresh
        assert state.value == pytest.approx(after, abs=1e-9)
        assert state.value == pytest.approx(
            nn_diversity_value(m, active), abs=1e-9)


def test_ball_gain_matches_from_scratch():
    rng = np.random.default_rng(6)
    rows = unit(random_features(30, 3, 6))
    m = metric_for(rows)
    r = 0.4
    index = build_ball_index(m, r)
    state = DiversityState(m, kind="ball", ball_index=index)
    active = []
    for _ in range(6):
        fresh = [int(v) for v in rng.choice(30, size=3, replace=False)
                 if v not in active]
        if not fresh:
            continue
        before = ball_diversity_from_scratch(rows, r, active)
        after = ball_diversity_from_scratch(rows, r, active + fresh)
        assert state.gain(fresh) == after - before
        state.commit(fresh)
        active += fresh
        assert state.value == after
        assert state.value == ball_diversity_value(index, active)


def test_ball_gain_fully_covered_delta():
    rows = unit([[1, 0]] * 6)
    m = metric_for(rows)
    index = build_ball_index(m, 0.1)
    state = DiversityState(m, kind="ball", ball_index=index)
    state.commit([0])
    assert state.gain([1, 2]) == 0.0


def test_commit_overlap_rejected():
    m = metric_for(unit(random_features(10, 3, 7)))
    state = DiversityState(m, kind="nn")
    state.commit([1, 2])
    with pytest.raises(DiversityError):
        state.commit([2, 3])
    with pytest.raises(DiversityError):
        state.gain([1])


def _random_sigma_triples(rng, n):
    size_t = int(rng.integers(1, min(6, n - 1)))
    t_set = rng.choice(n, size=size_t + 1, replace=False).tolist()
    v = t_set.pop()
    s_set = t_set[:int(rng.integers(0, len(t_set) + 1))]
    return s_set, t_set, v


@pytest.mark.parametrize("kind", ["nn", "ball"])
def test_theorems_2_3_monotone_submodular(kind):
    rng = np.random.default_rng(8)
    violations = 0
    for trial in range(1000):
        n = int(rng.integers(5, 50))
        rows = unit(random_features(n, 3, 900 + trial))
        m = metric_for(rows)
        if kind == "ball":
            index = build_ball_index(m, float(rng.uniform(0.05, 0.6)))

            def value(ids):
                return ball_diversity_value(index, ids)
        else:
            def value(ids):
                return nn_diversity_value(m, ids)

        s_set, t_set, v = _random_sigma_triples(rng, n)
        f_s, f_t = value(s_set), value(t_set)
        f_sv, f_tv = value(s_set + [v]), value(t_set + [v])
        if f_t < f_s - 1e-9:
            violations += 1
        if (f_sv - f_s) < (f_tv - f_t) - 1e-9:
            violations += 1
    assert violations == 0


def test_value_bounds():
    rng = np.random.default_rng(9)
    for trial in range(20):
        n = 25
        rows = unit(random_features(n, 3, 950 + trial))
        m = metric_for(rows)
        index = build_ball_index(m, 0.3)
        ids = rng.choice(n, size=8, replace=False).tolist()
        assert nn_diversity_value(m, ids) <= n * m.d_max + 1e-9
        assert ball_diversity_value(index, ids) <= n
