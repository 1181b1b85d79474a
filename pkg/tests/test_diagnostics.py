import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import noisy_dataset, two_point
from edsvm.baselines import TrainedModel, extract_slacks, fit_csvm, fit_lssvm
from edsvm.diagnostics import (KEEP, USEFUL, benchmark_quality, radii_report, rkhs_norm_sq,
                               usefulness_ratio)
from edsvm.elite import AggregationRule, EliteGuide, make_guide, self_guide
from edsvm.kernels import KernelSpec, compute_gram
from edsvm.simulation import draw_centers, sample_dataset


@pytest.fixture(scope="module")
def ref_fit():
    d = noisy_dataset(np.random.default_rng(7), 40)
    return fit_csvm(d, 1.0, KernelSpec.rbf(1.0))


def test_benchmark_quality_examples(ref_fit):
    assert benchmark_quality(ref_fit, self_guide(ref_fit)) == 0.0
    xi = extract_slacks(ref_fit)
    g = EliteGuide([3, 9], [xi[3] + 0.1, max(xi[9] - 0.3, 0.0) if xi[9] >= 0.3 else xi[9] + 0.3])
    assert benchmark_quality(ref_fit, g) == pytest.approx(0.05, abs=1e-15)
    with pytest.raises(ValueError):
        benchmark_quality(ref_fit, EliteGuide.empty())


def test_min_aggregation_with_reference_is_zero_where_reference_is_min(ref_fit):
    d = sample_dataset(draw_centers(1), 1)
    ref = fit_csvm(d, 1.0, KernelSpec.rbf(1.0))
    worse = fit_lssvm(d, 0.01, KernelSpec.rbf(1.0))
    g = make_guide([ref, worse], AggregationRule("min"))
    xi_ref = extract_slacks(ref)[g.elite]
    at_min = xi_ref <= extract_slacks(worse)[g.elite]
    assert at_min.any()
    assert np.all(g.targets[at_min] == xi_ref[at_min])


def test_rkhs_norm_examples(rng):
    d = two_point()
    m = fit_csvm(d, 10.0, KernelSpec.linear(), tol=1e-12)
    assert rkhs_norm_sq(m) == pytest.approx(1.0, abs=1e-9)
    zero = TrainedModel(np.zeros(2), 0.3, KernelSpec.linear(), d.features, d.labels, "CSVM", {"C": 1})
    assert rkhs_norm_sq(zero) == 0.0
    X = rng.normal(size=(7, 3))
    y = np.where(rng.random(7) < 0.5, 1.0, -1.0)
    a = rng.random(7)
    k = KernelSpec.poly(2)
    m = TrainedModel(a, 0.0, k, X, y, "CSVM", {"C": 1.0})
    K = compute_gram(k, X)
    direct = sum(a[i] * a[j] * y[i] * y[j] * K[i, j] for i in range(7) for j in range(7))
    assert rkhs_norm_sq(m) == pytest.approx(direct, rel=1e-12)


def test_ratio_edge_cases():
    assert usefulness_ratio(3, 0.5, 10, 0.0) == np.inf
    assert usefulness_ratio(3, 0.0, 10, 0.0) == 0.0
    assert usefulness_ratio(2, 0.5, 10, 0.2) == pytest.approx(0.5)


@given(st.floats(0.05, 0.95), st.floats(0.1, 10.0))
def test_difference_identity(omega, C):
    d = noisy_dataset(np.random.default_rng(11), 30)
    ref = fit_csvm(d, 1.0, KernelSpec.rbf(1.0))
    g = EliteGuide([0, 4, 7, 12], [0.0, 0.3, 1.2, 0.5])
    r = radii_report(ref, g, C, omega)
    lhs = r.lambda_n_sq - r.lambda_svm_sq
    rhs = -2 * C * r.n * (1 - omega) * r.hinge_risk_ref + 2 * C * r.m * (1 - omega) * r.e_m_star
    assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-12)
    lhs = r.gamma_ls - r.gamma_ls_svm
    rhs = -2 * C * r.n * (1 - omega) * r.ls_risk_ref + 2 * C * r.m * (1 - omega) * r.e_m_star_ls
    assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-12)
    assert (r.ratio < 1) == (r.m * r.e_m_star < r.n * r.hinge_risk_ref)


def test_perfect_benchmark_and_omega_one(ref_fit):
    g = self_guide(ref_fit)
    r = radii_report(ref_fit, g, 1.0, 0.4)
    assert r.e_m_star == 0.0 and r.lambda_n_sq <= r.lambda_svm_sq
    assert r.recommendation == USEFUL
    r1 = radii_report(ref_fit, g, 1.0, 1.0)
    assert r1.lambda_n_sq == r1.lambda_svm_sq


def test_corrupted_benchmark():
    d = sample_dataset(draw_centers(5), 5)
    ref = fit_csvm(d, 1.0, KernelSpec.rbf(1.0))
    g = self_guide(ref)
    bad = EliteGuide(g.elite, g.targets + 1.0)
    r = radii_report(ref, bad, 1.0, 0.5)
    assert r.ratio > 1 and r.lambda_n_sq > r.lambda_svm_sq
    assert r.recommendation == KEEP


def test_report_dict_handles_infinity():
    d = two_point()
    m = fit_csvm(d, 10.0, KernelSpec.linear())
    r = radii_report(m, EliteGuide([0], [0.5]), 1.0, 0.5)
    assert r.ratio == np.inf and r.to_dict()["ratio"] == "inf"
