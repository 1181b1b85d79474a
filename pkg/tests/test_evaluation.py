import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from sklearn.metrics import average_precision_score

from conftest import noisy_dataset
from edsvm.evaluation import (ExperimentConfig, GridSpec, average_precision, candidates,
                              compute_metrics, grid_search, make_folds, roc_auc, run_experiment,
                              stratified_kfold, stratified_split, tie_key)
from edsvm.kernels import Dataset


def brute_auc(s, y):
    pos, neg = s[y > 0], s[y < 0]
    wins = sum((p > q) + 0.5 * (p == q) for p in pos for q in neg)
    return wins / (len(pos) * len(neg))


def test_metric_examples():
    y = np.array([1.0, -1.0, 1.0, -1.0])
    m = compute_metrics(np.array([2.0, -1.0, 3.0, -4.0]), y)
    assert (m.accuracy, m.roc_auc, m.pr_auc) == (1.0, 1.0, 1.0)
    m = compute_metrics(-y, y)
    assert m.accuracy == 0.0 and m.roc_auc == 0.0
    assert roc_auc(np.array([0.9, 0.8, 0.3, 0.1]), y) == 0.75


def test_undefined_precision_flag():
    m = compute_metrics(np.array([-1.0, -2.0, -3.0]), np.array([1.0, -1.0, -1.0]))
    assert m.precision_undefined and m.precision == 0.0 and m.f1 == 0.0


def test_metrics_bounds_and_f1(rng):
    for _ in range(20):
        s = rng.normal(size=30)
        y = np.where(rng.random(30) < 0.5, 1.0, -1.0)
        y[:2] = [1.0, -1.0]
        m = compute_metrics(s, y)
        for v in m.as_dict().values():
            assert 0.0 <= float(v) <= 1.0
        if m.precision + m.sensitivity > 0:
            hm = 2 * m.precision * m.sensitivity / (m.precision + m.sensitivity)
            assert m.f1 == pytest.approx(hm)


def test_auc_single_class_rejected():
    with pytest.raises(ValueError):
        roc_auc(np.array([0.1, 0.2]), np.array([1.0, 1.0]))


@given(st.integers(2, 120), st.integers(0, 2**31 - 1), st.booleans())
def test_auc_brute_force_and_ap_oracle(n, seed, coarse):
    r = np.random.default_rng(seed)
    s = r.integers(0, 5, n).astype(float) if coarse else r.normal(size=n)
    y = np.where(r.random(n) < 0.5, 1.0, -1.0)
    y[0], y[-1] = 1.0, -1.0
    assert roc_auc(s, y) == brute_auc(s, y)
    if not coarse:
        assert average_precision(s, y) == pytest.approx(average_precision_score(y > 0, s), abs=1e-12)


@given(st.integers(0, 2**31 - 1))
def test_metrics_permutation_invariant(seed):
    r = np.random.default_rng(seed)
    s = r.integers(-3, 4, 40).astype(float)
    y = np.where(r.random(40) < 0.4, 1.0, -1.0)
    y[:2] = [1.0, -1.0]
    p = r.permutation(40)
    assert compute_metrics(s, y) == compute_metrics(s[p], y[p])


def test_kfold_examples():
    y = np.array([1] * 10 + [-1] * 10)
    f = stratified_kfold(y, 5, 3)
    for j in range(5):
        assert np.sum((f == j) & (y > 0)) == 2 and np.sum((f == j) & (y < 0)) == 2
    assert np.array_equal(f, stratified_kfold(y, 5, 3))
    y = np.array([1] * 225 + [-1] * 81)
    f = stratified_kfold(y, 5, 0)
    for j in range(5):
        sel = f == j
        assert abs(np.sum(y[sel] > 0) - sel.sum() * 225 / 306) <= 1.0
    with pytest.raises(ValueError):
        stratified_kfold(np.array([1, 1, 1, -1]), 2, 0)


@given(st.integers(2, 7), st.integers(0, 2**31 - 1))
def test_kfold_sizes_balanced_per_class(k, seed):
    r = np.random.default_rng(seed)
    y = np.where(r.random(60) < 0.3, 1, -1)
    if min(np.sum(y > 0), np.sum(y < 0)) < k:
        return
    f = stratified_kfold(y, k, seed)
    for c in (1, -1):
        counts = np.bincount(f[y == c], minlength=k)
        assert counts.max() - counts.min() <= 1


def test_stratified_split_counts():
    y = np.array([1] * 100 + [-1] * 100)
    tr, te = stratified_split(y, 0.3, [0, 1])
    assert te.size == 60 and np.sum(y[te] > 0) == 30
    assert np.intersect1d(tr, te).size == 0 and tr.size + te.size == 200


def test_grid_defaults():
    g = GridSpec()
    assert g.C_values[0] == 0.125 and g.C_values[-1] == 32.0 and len(g.C_values) == 9
    assert g.omega_values == tuple(round(0.1 * i, 1) for i in range(1, 10))
    assert g.a_values == tuple(float(-i) for i in range(1, 9))
    assert g.gamma_values[0] == 2.0 ** -7 and g.gamma_values[-1] == 8.0
    with pytest.raises(ValueError):
        GridSpec.from_dict({"Cs": [1.0]})
    with pytest.raises(ValueError):
        GridSpec(folds=1)


def test_candidates_and_ties():
    g = GridSpec(C_values=(1.0, 2.0), omega_values=(0.3, 0.7))
    cands = candidates("CEDSVM", g, "linear")
    assert len(cands) == 4
    best = min(cands, key=tie_key)
    assert best == {"C": 1.0, "omega": 0.7}
    assert candidates("CSVM", g, "rbf", fixed={"gamma": 0.5})[0]["gamma"] == 0.5


@pytest.fixture(scope="module")
def small_data():
    return noisy_dataset(np.random.default_rng(5), 60)


def test_grid_single_point(small_data):
    g = GridSpec(C_values=(0.5,), gamma_values=(1.0,))
    assert grid_search(small_data, "CSVM", g).best == {"C": 0.5, "gamma": 1.0}


def test_grid_prefers_perfect_point():
    # inner band positive, outer shell negative: not linearly separable
    X = np.r_[np.linspace(-0.5, 0.5, 10), np.linspace(2, 3, 5), -np.linspace(2, 3, 5)][:, None]
    y = np.r_[np.ones(10), -np.ones(10)]
    d = Dataset(X, y)
    # a tiny gamma flattens the RBF kernel and loses the band; gamma = 1 separates it
    g = GridSpec(C_values=(1.0,), gamma_values=(1.0, 1e-9))
    res = grid_search(d, "CSVM", g)
    assert res.best["gamma"] == 1.0
    errs = {r["hyper"]["gamma"]: r["cv_error"] for r in res.table}
    assert errs[1.0] == 0.0


def test_grid_deterministic(small_data):
    g = GridSpec(C_values=(0.25, 1.0, 4.0), gamma_values=(0.25, 1.0))
    a = grid_search(small_data, "CSVM", g)
    b = grid_search(small_data, "CSVM", g)
    assert a.best == b.best and a.table == b.table


def test_folds_standardize_on_training_part(small_data):
    folds = make_folds(small_data, 5, 0, True)
    for f in folds:
        assert np.allclose(f.train.features.mean(axis=0), 0, atol=1e-12)


def _tiny_cfg(**kw):
    grid = GridSpec(C_values=(0.5, 2.0), omega_values=(0.5, 1.0), a_values=(-1.0,),
                    gamma_values=(1.0,), folds=3)
    return ExperimentConfig(grid=grid, **kw)


def test_experiment_split_mode_rows(small_data):
    rep = run_experiment(small_data, _tiny_cfg(targets=("min", "max"), replicates=2))
    rows = rep.rows()
    assert rows[:3] == [("-", "CSVM"), ("-", "LINEXSVM"), ("-", "LSSVM")]
    assert ("min", "CEDSVM") in rows and ("max", "LSEDSVM") in rows
    assert all(r["count"] == 2 for r in rep.summary())
    assert "± " in rep.format_table()


def test_experiment_omega_one_matches_baseline(small_data):
    grid = GridSpec(C_values=(0.5, 2.0), omega_values=(1.0,), a_values=(-1.0,),
                    gamma_values=(1.0,), folds=3)
    cfg = ExperimentConfig(models=("CSVM", "CEDSVM", "LSSVM", "LSEDSVM"), grid=grid)
    rep = run_experiment(small_data, cfg)
    by = {(r["block"], r["model"]): r["metrics"] for r in rep.runs}
    assert by[("max", "CEDSVM")] == by[("-", "CSVM")]
    assert by[("max", "LSEDSVM")] == pytest.approx(by[("-", "LSSVM")], abs=1e-6)


def test_experiment_cv_mode_and_uci_block(small_data):
    cfg = _tiny_cfg(mode="cv", kernel="linear", standardize=True, targets=("uci",))
    rep = run_experiment(small_data, cfg)
    blocks = {r["block"] for r in rep.runs if r["model"] in ("CEDSVM", "LSEDSVM")}
    assert blocks == {"uci"}
    assert all(r["count"] == 3 for r in rep.summary())


def test_experiment_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(mode="nested")
    with pytest.raises(ValueError):
        ExperimentConfig(targets=("median",))
    with pytest.raises(ValueError):
        ExperimentConfig(models=("SVR",))
