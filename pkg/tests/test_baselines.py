import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from sklearn.svm import SVC

from conftest import noisy_dataset, two_point
from edsvm.baselines import (TrainedModel, extract_slacks, fit_csvm, fit_linexsvm, fit_lssvm,
                             linex_loss, margin_deviations, support_indices)
from edsvm.kernels import Dataset, KernelSpec


def test_two_point_csvm_analytic():
    m = fit_csvm(two_point(), 10.0, KernelSpec.linear())
    assert np.allclose(m.alpha, [0.5, 0.5], atol=1e-9)
    assert abs(m.beta0) <= 1e-12
    assert np.all(m.predict(two_point().features) == two_point().labels)
    assert set(support_indices(m)) == {0, 1}


def test_interior_point_is_not_a_support_vector():
    d = Dataset([[1.0, 0.0], [-1.0, 0.0], [5.0, 0.0]], [1, -1, 1])
    m = fit_csvm(d, 10.0, KernelSpec.linear())
    assert m.alpha[2] <= 1e-8
    assert list(support_indices(m)) == [0, 1]


@pytest.mark.parametrize("kernel", [KernelSpec.linear(), KernelSpec.rbf(0.5)])
def test_csvm_matches_sklearn(rng, kernel):
    d = noisy_dataset(rng, 40)
    C = 2.0
    m = fit_csvm(d, C, kernel, tol=1e-10)
    ref = SVC(C=C, kernel=kernel.kind, gamma=kernel.gamma if kernel.kind == "rbf" else "scale",
              tol=1e-10).fit(d.features, d.labels)
    Q = rng.normal(size=(30, 2))
    assert np.max(np.abs(m.decision_function(Q) - ref.decision_function(Q))) <= 1e-5


def test_csvm_complementary_slackness(rng):
    d = noisy_dataset(rng, 30)
    C = 1.0
    m = fit_csvm(d, C, KernelSpec.rbf(1.0), tol=1e-9)
    free = (m.alpha > 1e-6) & (m.alpha < C - 1e-6)
    assert free.any()
    assert np.max(np.abs(margin_deviations(m)[free])) <= 1e-4


def test_lssvm_matches_cvxpy_primal(rng):
    cp = pytest.importorskip("cvxpy")
    d = noisy_dataset(rng, 25)
    C = 1.5
    w, b, xi = cp.Variable(2), cp.Variable(), cp.Variable(d.n)
    cons = [cp.multiply(d.labels, d.features @ w + b) >= 1 - xi, xi >= 0]
    cp.Problem(cp.Minimize(0.5 * cp.sum_squares(w) + C * cp.sum_squares(xi)), cons).solve()
    m = fit_lssvm(d, C, KernelSpec.linear(), tol=1e-10)
    Q = rng.normal(size=(20, 2))
    assert np.max(np.abs(m.decision_function(Q) - (Q @ w.value + b.value))) <= 1e-4


def test_csvm_invariant_to_row_order(rng):
    d = noisy_dataset(rng, 25)
    perm = rng.permutation(d.n)
    a = fit_csvm(d, 1.0, KernelSpec.rbf(0.5), tol=1e-10)
    b = fit_csvm(d.subset(perm), 1.0, KernelSpec.rbf(0.5), tol=1e-10)
    Q = rng.normal(size=(20, 2))
    assert np.max(np.abs(a.decision_function(Q) - b.decision_function(Q))) <= 1e-6


def test_linex_loss_examples():
    assert linex_loss(1.0, -1.0) == 0.0
    assert linex_loss(0.0, -1.0) == pytest.approx(math.exp(-1.0), abs=1e-15)
    assert linex_loss(0.0, -1.0) == pytest.approx(0.3679, abs=1e-4)


@given(st.floats(-3, 3), st.floats(-8, 8).filter(lambda a: abs(a) > 1e-3))
def test_linex_loss_nonnegative(z, a):
    assert linex_loss(z, a) >= 0.0


def test_linex_gradient_small_and_objective_consistent(rng):
    d = noisy_dataset(rng, 30)
    m = fit_linexsvm(d, 1.0, -2.0, KernelSpec.rbf(1.0))
    assert m.info["converged"] and m.info["grad_norm"] <= 1e-8
    assert m.predict(d.features).mean() != 0


def test_linex_rejects_zero_a(rng):
    with pytest.raises(ValueError):
        fit_linexsvm(noisy_dataset(rng, 10), 1.0, 0.0, KernelSpec.linear())


def test_linex_support_proxy_empty_when_all_margins_large():
    X = np.array([[0.0], [1.0]])
    hyper = {"C": 1.0, "a": -1.0}
    m = TrainedModel(np.zeros(2), 5.0, KernelSpec.linear(), X, np.ones(2), "LINEXSVM", hyper)
    assert support_indices(m).size == 0
    m = TrainedModel(np.zeros(2), 0.5, KernelSpec.linear(), X, np.ones(2), "LINEXSVM", hyper)
    assert list(support_indices(m)) == [0, 1]


def test_extract_slacks_examples():
    X = np.array([[1.2], [0.5], [-0.3]])
    y = np.ones(3)
    # alpha = 0 makes f the constant beta0
    for fval, want in ((1.2, 0.0), (0.5, 0.5), (-0.3, 1.3)):
        m = TrainedModel(np.zeros(3), fval, KernelSpec.linear(), X, y, "CSVM", {"C": 1.0})
        assert extract_slacks(m)[0] == pytest.approx(want, abs=1e-15)


def test_slacks_agree_with_kkt_reconstruction(rng):
    d = noisy_dataset(rng, 30)
    C = 1.0
    m = fit_csvm(d, C, KernelSpec.rbf(1.0), tol=1e-9)
    xi = extract_slacks(m)
    # at the optimum alpha < C forces xi = 0 and xi > 0 forces alpha = C
    assert np.all(xi[m.alpha < C - 1e-6] <= 1e-5)
    assert np.all(m.alpha[xi > 1e-5] >= C - 1e-6)


def test_margin_slack_identity_on_fitted_pair(rng):
    d = noisy_dataset(rng, 40)
    f1 = fit_csvm(d, 1.0, KernelSpec.rbf(1.0))
    f2 = fit_lssvm(d, 0.5, KernelSpec.poly(2))
    lhs = (f1.decision_function(d.features) - f2.decision_function(d.features)) ** 2
    rhs = (margin_deviations(f1) - margin_deviations(f2)) ** 2
    assert np.max(np.abs(lhs - rhs)) <= 1e-12
