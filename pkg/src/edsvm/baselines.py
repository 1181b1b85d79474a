"""Benchmark models: C-SVM, LS-SVM (squared slack) and LINEX-SVM."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .kernels import Dataset, KernelSpec, compute_gram, decision_values
from .qp import DualQP, SolverError, recover_intercept, solve_smo

log = logging.getLogger(__name__)

VARIANTS = ("CSVM", "LSSVM", "LINEXSVM", "CEDSVM", "LSEDSVM")
DUAL_VARIANTS = ("CSVM", "LSSVM", "CEDSVM", "LSEDSVM")


@dataclass
class TrainedModel:
    alpha: np.ndarray
    beta0: float
    kernel: KernelSpec
    train_features: np.ndarray
    train_labels: np.ndarray
    variant: str
    hyper: dict = field(default_factory=dict)
    guide: object = None
    info: dict = field(default_factory=dict)

    def decision_function(self, X) -> np.ndarray:
        return decision_values(self, X)

    def predict(self, X) -> np.ndarray:
        return np.where(self.decision_function(X) >= 0, 1.0, -1.0)

    @property
    def n(self) -> int:
        return len(self.alpha)


def _gram(data: Dataset, kernel: KernelSpec, gram):
    if gram is None:
        return compute_gram(kernel, data.features)
    if gram.shape != (data.n, data.n):
        raise ValueError("cached Gram matrix does not match the dataset")
    return gram


def fit_dual(data: Dataset, kernel: KernelSpec, qp: DualQP, variant: str, hyper: dict,
             guide=None, tol: float = 1e-6, max_iter: int = 10_000_000) -> TrainedModel:
    """Solve a prepared dual and wrap the result as a TrainedModel."""
    sol = solve_smo(qp, tol=tol, max_iter=max_iter)
    if not sol.converged:
        raise SolverError(f"{variant} dual did not converge (violation {sol.kkt_residual:.3g})")
    beta0 = recover_intercept(qp, sol.alpha, gap_tol=2.0 * tol)
    info = {"dual_objective": sol.objective, "kkt_residual": sol.kkt_residual,
            "iterations": sol.iterations}
    return TrainedModel(sol.alpha, beta0, kernel, data.features, data.labels, variant,
                        dict(hyper), guide, info)


def csvm_dual(data: Dataset, C: float, K: np.ndarray) -> DualQP:
    y = data.labels
    n = data.n
    return DualQP(np.outer(y, y) * K, np.zeros(n), np.ones(n), 0.0, y,
                  np.zeros(n), np.full(n, float(C)))


def fit_csvm(data: Dataset, C: float, kernel: KernelSpec, gram=None, tol: float = 1e-6,
             max_iter: int = 10_000_000) -> TrainedModel:
    """Standard hinge-loss soft-margin SVM via its box-constrained dual."""
    if not C > 0:
        raise ValueError("C must be positive")
    data.check_trainable()
    K = _gram(data, kernel, gram)
    return fit_dual(data, kernel, csvm_dual(data, C, K), "CSVM", {"C": float(C)},
                    tol=tol, max_iter=max_iter)


def fit_lssvm(data: Dataset, C: float, kernel: KernelSpec, gram=None, tol: float = 1e-6,
              max_iter: int = 10_000_000) -> TrainedModel:
    """Squared-slack SVM (xi >= 0 kept as inequality); the omega = 1 case of LS-EDSVM."""
    if not C > 0:
        raise ValueError("C must be positive")
    data.check_trainable()
    K = _gram(data, kernel, gram)
    y = data.labels
    n = data.n
    qp = DualQP(np.outer(y, y) * K, np.full(n, 1.0 / (2.0 * C)), np.ones(n), 0.0, y,
                np.zeros(n), np.full(n, np.inf))
    return fit_dual(data, kernel, qp, "LSSVM", {"C": float(C)}, tol=tol, max_iter=max_iter)


def linex_loss(z, a: float):
    """exp(a(1 - z)) - a(1 - z) - 1."""
    v = a * (1.0 - np.asarray(z, dtype=float))
    return np.expm1(v) - v


_EXP_CAP = 700.0


def _linex_terms(u, a):
    v = a * (1.0 - u)
    if np.max(v) > _EXP_CAP:
        return None
    e = np.exp(v)
    loss = (e - 1.0) - v
    dphi = a * (1.0 - e)        # d/du
    d2phi = a * a * e
    return loss, dphi, d2phi


def fit_linexsvm(data: Dataset, C: float, a: float, kernel: KernelSpec, gram=None,
                 grad_tol: float = 1e-8, max_iter: int = 100_000,
                 primal_linear: bool = True) -> TrainedModel:
    """Kernel LINEX-SVM fitted in the primal by damped Newton steps.

    Minimises 1/2 c'Kc + C sum_i phi(u_i), u = y*(beta0 + Kc), with backtracking
    (shrink 0.5, sufficient decrease 1e-4). For the linear kernel the (beta0, beta)
    parameterisation is used instead when ``primal_linear`` is set. The returned
    expansion uses alpha_i = -C phi'(u_i), the stationarity form of the coefficients.
    """
    if a == 0:
        raise ValueError("LINEX asymmetry a must be nonzero")
    if not C > 0:
        raise ValueError("C must be positive")
    data.check_trainable()
    X, y = data.features, data.labels
    n = data.n
    if kernel.kind == "linear" and primal_linear:
        design, reg = X, None
    else:
        K = _gram(data, kernel, gram)
        design, reg = K, K
    p = design.shape[1]

    def scores(theta):
        return design @ theta[:p] + theta[p]

    def objective(theta):
        t = _linex_terms(y * scores(theta), a)
        if t is None:
            return np.inf, None
        w = theta[:p]
        pen = 0.5 * (w @ w if reg is None else w @ (reg @ w))
        return pen + C * t[0].sum(), t

    theta = np.zeros(p + 1)
    f, terms = objective(theta)
    converged = False
    it = 0
    gnorm = np.inf
    for it in range(1, max_iter + 1):
        _, dphi, d2phi = terms
        g_u = C * y * dphi                 # d(loss)/d(score)
        w = theta[:p]
        if reg is None:
            grad = np.concatenate([w + design.T @ g_u, [g_u.sum()]])
            gnorm = np.max(np.abs(grad))
            if gnorm <= grad_tol:
                converged = True
                break
            Hs = design.T * (C * d2phi)
            Hmat = np.empty((p + 1, p + 1))
            Hmat[:p, :p] = np.eye(p) + Hs @ design
            Hmat[:p, p] = Hmat[p, :p] = Hs.sum(1)
            Hmat[p, p] = C * d2phi.sum()
            step = np.linalg.solve(Hmat, -grad)
        else:
            r = w + g_u
            grad = np.concatenate([reg @ r, [g_u.sum()]])
            gnorm = np.max(np.abs(grad))
            if gnorm <= grad_tol:
                converged = True
                break
            cw = C * d2phi
            M = np.empty((p + 1, p + 1))
            M[:p, :p] = np.eye(p) + cw[:, None] * reg
            M[:p, p] = cw
            M[p, :p] = cw @ reg
            M[p, p] = cw.sum()
            step = np.linalg.solve(M, -np.concatenate([r, [g_u.sum()]]))
        slope = grad @ step
        if slope >= 0:
            step, slope = -grad, -(grad @ grad)
        lr = 1.0
        while True:
            cand = theta + lr * step
            f_new, t_new = objective(cand)
            # the rounding slack lets full Newton steps finish the last digits
            if f_new <= f + 1e-4 * lr * slope + 8 * np.finfo(float).eps * abs(f):
                break
            lr *= 0.5
            if lr < 1e-20:
                break
        if lr < 1e-20 or f_new >= f and np.max(np.abs(lr * step)) < 1e-15 * (1 + np.max(np.abs(theta))):
            # no representable decrease left
            converged = gnorm <= 1e-6 * (1.0 + C * n)
            break
        theta, f, terms = cand, f_new, t_new
    if terms is None:
        raise SolverError("LINEX exponent overflow at an accepted point")
    if not converged:
        log.warning("LINEX fit stopped with gradient norm %.3g after %d iterations", gnorm, it)
    u = y * scores(theta)
    alpha = -C * _linex_terms(u, a)[1]
    beta0 = float(theta[p])
    info = {"objective": float(f), "grad_norm": float(gnorm), "iterations": it,
            "converged": bool(converged)}
    return TrainedModel(alpha, beta0, kernel, X, y, "LINEXSVM",
                        {"C": float(C), "a": float(a)}, None, info)


def margin_deviations(model: TrainedModel) -> np.ndarray:
    """Signed deviations 1 - y_i f(x_i) on the model's own training data."""
    f = decision_values(model, model.train_features)
    return 1.0 - model.train_labels * f


def extract_slacks(model: TrainedModel) -> np.ndarray:
    """Hinge slacks max(0, 1 - y_i f(x_i)) on the model's own training data."""
    return np.maximum(0.0, margin_deviations(model))


def support_indices(model: TrainedModel, eps: float = 1e-8) -> np.ndarray:
    """Dual variants: alpha_i > eps. LINEX-SVM: margin-active points y f <= 1 + eps."""
    if model.variant == "LINEXSVM":
        f = decision_values(model, model.train_features)
        return np.flatnonzero(model.train_labels * f <= 1.0 + eps)
    return np.flatnonzero(np.asarray(model.alpha) > eps)


BASELINE_FITTERS = {"CSVM": fit_csvm, "LSSVM": fit_lssvm, "LINEXSVM": fit_linexsvm}
