import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import noisy_dataset
from edsvm.baselines import TrainedModel, extract_slacks, fit_csvm, fit_linexsvm, fit_lssvm
from edsvm.elite import (TARGET_PRESETS, AggregationRule, EliteGuide, aggregate_targets,
                         build_elite_set, make_guide, self_guide)
from edsvm.kernels import KernelSpec
from edsvm.simulation import draw_centers, sample_dataset


def _fake(variant, alpha, beta0, X, y):
    """Model with prescribed alpha and a constant decision function beta0 (linear kernel, X = 0)."""
    return TrainedModel(np.asarray(alpha, float), beta0, KernelSpec.linear(), X, y, variant,
                        {"C": 1.0})


@pytest.fixture
def zeros_data():
    n = 8
    return np.zeros((n, 1)), np.array([1.0, -1.0] * 4)


def test_union_examples(zeros_data):
    X, y = zeros_data
    a = np.zeros(8)
    a[[2, 5]] = 1.0
    assert list(build_elite_set([_fake("CSVM", a, 0.0, X, y)])) == [2, 5]
    b1, b2 = np.zeros(8), np.zeros(8)
    b1[[1, 3]] = 1.0
    b2[[3, 7]] = 1.0
    got = build_elite_set([_fake("CSVM", b1, 0.0, X, y), _fake("LSSVM", b2, 0.0, X, y)])
    assert list(got) == [1, 3, 7]


def test_union_rejects_mismatched_data(zeros_data):
    X, y = zeros_data
    a = np.ones(8)
    with pytest.raises(ValueError):
        build_elite_set([_fake("CSVM", a, 0.0, X, y), _fake("LSSVM", a, 0.0, X + 1.0, y)])


def _slack_models(zeros_data, slacks):
    """One model per slack value; every point of model k has slack slacks[k] (y = +1)."""
    X, _ = zeros_data
    y = np.ones(8)
    names = ("CSVM", "LINEXSVM", "LSSVM")
    return [_fake(nm, np.ones(8), 1.0 - s, X, y) for nm, s in zip(names, slacks)]


def test_aggregation_examples(zeros_data):
    models = _slack_models(zeros_data, (0.2, 0.6, 0.4))
    elite = np.array([0, 4])
    assert np.allclose(aggregate_targets(models, elite, AggregationRule("min")), 0.2)
    assert np.allclose(aggregate_targets(models, elite, AggregationRule("max")), 0.6)
    models = _slack_models(zeros_data, (0.9, 0.3, 0.5))
    assert np.allclose(aggregate_targets(models, elite, TARGET_PRESETS["mean"]), 0.4)
    assert np.allclose(aggregate_targets(models, elite, TARGET_PRESETS["linex"]), 0.3)


def test_aggregation_errors(zeros_data):
    models = _slack_models(zeros_data, (0.2, 0.6))
    with pytest.raises(KeyError):
        aggregate_targets(models, [0], AggregationRule("single", ("LSSVM",)))
    with pytest.raises(ValueError):
        aggregate_targets(models, [], AggregationRule("min"))
    with pytest.raises(ValueError):
        AggregationRule("median")


@pytest.fixture(scope="module")
def mixture_benchmarks():
    d = sample_dataset(draw_centers(3), 7)
    k = KernelSpec.rbf(1.0)
    return d, [fit_csvm(d, 1.0, k), fit_linexsvm(d, 1.0, -2.0, k), fit_lssvm(d, 1.0, k)]


def test_elite_set_smaller_than_n_on_mixture(mixture_benchmarks):
    d, models = mixture_benchmarks
    elite = build_elite_set(models)
    assert 0 < elite.size < d.n


def test_min_mean_max_ordering_and_permutation(mixture_benchmarks):
    _, models = mixture_benchmarks
    elite = build_elite_set(models)
    lo, mid, hi = (aggregate_targets(models, elite, AggregationRule(k)) for k in ("min", "mean", "max"))
    assert np.all(lo <= mid + 1e-15) and np.all(mid <= hi + 1e-15)
    rev = models[::-1]
    for k, v in (("min", lo), ("mean", mid), ("max", hi)):
        assert np.allclose(aggregate_targets(rev, elite, AggregationRule(k)), v, atol=1e-15)


def test_union_monotone(mixture_benchmarks):
    _, models = mixture_benchmarks
    for k in range(1, len(models)):
        assert set(build_elite_set(models[:k])) <= set(build_elite_set(models[:k + 1]))


def test_make_guide_and_json_round_trip(mixture_benchmarks):
    d, models = mixture_benchmarks
    g = make_guide(models, TARGET_PRESETS["max"])
    g2 = EliteGuide.from_dict(json.loads(json.dumps(g.to_dict())))
    assert np.array_equal(g.elite, g2.elite) and np.array_equal(g.targets, g2.targets)
    assert g.source == g2.source == ("CSVM", "LINEXSVM", "LSSVM")
    mask, xs = g.dense_targets(d.n)
    assert mask.sum() == g.m and np.all(xs[~mask] == 0)


def test_self_guide_matches_slacks(mixture_benchmarks):
    _, models = mixture_benchmarks
    g = self_guide(models[0])
    assert np.array_equal(g.targets, extract_slacks(models[0])[g.elite])


def test_guide_validation():
    with pytest.raises(ValueError):
        EliteGuide([1, 1], [0.1, 0.2])
    with pytest.raises(ValueError):
        EliteGuide([0], [-0.1])
    with pytest.raises(ValueError):
        EliteGuide([0, 1], [0.1])
    with pytest.raises(ValueError):
        EliteGuide([4], [0.1]).check(3)


def test_guide_sorted_on_construction():
    g = EliteGuide([5, 1, 3], [0.5, 0.1, 0.3])
    assert list(g.elite) == [1, 3, 5] and list(g.targets) == [0.1, 0.3, 0.5]


@given(st.lists(st.integers(0, 29), unique=True, max_size=30), st.integers(0, 2**31 - 1))
def test_restrict_reindexes(elite, seed):
    r = np.random.default_rng(seed)
    g = EliteGuide(elite, r.random(len(elite)))
    idx = np.sort(r.choice(30, size=15, replace=False))
    sub = g.restrict(idx)
    pos = {int(j): k for k, j in enumerate(idx)}
    want = {pos[int(i)]: t for i, t in zip(g.elite, g.targets) if int(i) in pos}
    assert dict(zip(sub.elite.tolist(), sub.targets.tolist())) == want
