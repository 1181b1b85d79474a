"""Elite-driven SVMs: dual construction, fitting, primal objectives and serialization."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .baselines import TrainedModel, _gram, fit_csvm, fit_dual, extract_slacks
from .elite import EliteGuide
from .kernels import Dataset, KernelSpec, compute_gram
from .qp import DualQP, recover_intercept

EDSVM_VARIANTS = ("CEDSVM", "LSEDSVM")


@dataclass(frozen=True)
class EDSVMConfig:
    C: float
    omega: float
    guide: EliteGuide = field(default_factory=EliteGuide.empty)
    variant: str = "CEDSVM"
    kernel: KernelSpec = field(default_factory=KernelSpec.linear)

    def __post_init__(self):
        if self.variant not in EDSVM_VARIANTS:
            raise ValueError(f"unknown EDSVM variant {self.variant!r}")
        if not self.C > 0:
            raise ValueError("C must be positive")
        if not 0.0 < self.omega <= 1.0:
            raise ValueError(f"omega must lie in (0, 1], got {self.omega}")

    @property
    def hyper(self) -> dict:
        return {"C": float(self.C), "omega": float(self.omega)}


def _check_variant(cfg, variant):
    if cfg.variant != variant:
        raise ValueError(f"config is for {cfg.variant}, not {variant}")


def build_cedsvm_dual(data: Dataset, cfg: EDSVMConfig, gram=None) -> DualQP:
    """C-EDSVM dual with the exact treatment of xi >= 0 on elite points.

    Elite points get d = 1/(2C(1-w)), R = 1 - xi* + w/(2(1-w)), no upper bound, and
    below tau = Cw - 2C(1-w)xi* (where the elite slack hits zero) the quadratic is
    continued by its tangent line. Non-elite points are plain hinge with box [0, Cw].
    """
    _check_variant(cfg, "CEDSVM")
    C, w = float(cfg.C), float(cfg.omega)
    if not 0.0 < w < 1.0:
        raise ValueError("the C-EDSVM dual needs omega in (0, 1)")
    n = data.n
    mask, xs = cfg.guide.dense_targets(n)
    m = int(mask.sum())
    K = _gram(data, cfg.kernel, gram)
    y = data.labels
    shift = w / (2.0 * (1.0 - w))
    d = np.where(mask, 1.0 / (2.0 * C * (1.0 - w)), 0.0)
    R = np.where(mask, 1.0 - xs + shift, 1.0)
    upper = np.where(mask, np.inf, C * w)
    tau = np.where(mask, C * w - 2.0 * C * (1.0 - w) * xs, -np.inf)
    D = -m * C * w * w / (4.0 * (1.0 - w)) + C * w * xs[mask].sum()
    return DualQP(np.outer(y, y) * K, d, R, float(D), y, np.zeros(n), upper, tau)


def build_lsedsvm_dual(data: Dataset, cfg: EDSVMConfig, gram=None) -> DualQP:
    """LS-EDSVM dual; every alpha is unbounded above."""
    _check_variant(cfg, "LSEDSVM")
    C, w = float(cfg.C), float(cfg.omega)
    n = data.n
    mask, xs = cfg.guide.dense_targets(n)
    K = _gram(data, cfg.kernel, gram)
    y = data.labels
    d = np.where(mask, 1.0 / (2.0 * C), 1.0 / (2.0 * C * w))
    R = np.where(mask, 1.0 - (1.0 - w) * xs, 1.0)
    D = C * w * (1.0 - w) * np.sum(xs[mask] ** 2)
    return DualQP(np.outer(y, y) * K, d, R, float(D), y, np.zeros(n), np.full(n, np.inf))


def build_dual(data: Dataset, cfg: EDSVMConfig, gram=None) -> DualQP:
    if cfg.variant == "CEDSVM":
        return build_cedsvm_dual(data, cfg, gram)
    return build_lsedsvm_dual(data, cfg, gram)


def fit_edsvm(data: Dataset, cfg: EDSVMConfig, gram=None, tol: float = 1e-6,
              max_iter: int = 10_000_000) -> TrainedModel:
    """Fit C-EDSVM or LS-EDSVM. C-EDSVM at omega = 1 is the plain C-SVM."""
    data.check_trainable()
    cfg.guide.check(data.n)
    if cfg.variant == "CEDSVM" and cfg.omega == 1.0:
        base = fit_csvm(data, cfg.C, cfg.kernel, gram=gram, tol=tol, max_iter=max_iter)
        return TrainedModel(base.alpha, base.beta0, cfg.kernel, data.features, data.labels,
                            "CEDSVM", cfg.hyper, cfg.guide, base.info)
    qp = build_dual(data, cfg, gram)
    return fit_dual(data, cfg.kernel, qp, cfg.variant, cfg.hyper, cfg.guide, tol, max_iter)


def predict(model: TrainedModel, X) -> np.ndarray:
    return model.predict(X)


def _elite_slack(u, xs, w, variant):
    if variant == "CEDSVM":
        xbar = xs - w / (2.0 * (1.0 - w))
    else:
        xbar = (1.0 - w) * xs
    return np.maximum(np.maximum(0.0, 1.0 - u), xbar)


def slack_solution(model: TrainedModel) -> np.ndarray:
    """Optimal primal slacks xi_i given the fitted decision function."""
    y = model.train_labels
    u = y * model.decision_function(model.train_features)
    xi = np.maximum(0.0, 1.0 - u)
    if model.variant in EDSVM_VARIANTS and model.guide is not None and model.guide.m:
        w = model.hyper["omega"]
        if w < 1.0:
            e = model.guide.elite
            xi[e] = _elite_slack(u[e], model.guide.targets, w, model.variant)
    return xi


def rkhs_norm(model: TrainedModel, gram=None) -> float:
    coef = np.asarray(model.alpha) * model.train_labels
    K = compute_gram(model.kernel, model.train_features) if gram is None else gram
    return float(max(coef @ K @ coef, 0.0))


def primal_objective(model: TrainedModel, gram=None) -> float:
    """1/2 ||h||_K^2 + C * (variant slack penalty) at the optimal slacks."""
    C = model.hyper["C"]
    xi = slack_solution(model)
    v = model.variant
    if v == "CSVM":
        pen = xi.sum()
    elif v == "LSSVM":
        pen = np.sum(xi ** 2)
    elif v in EDSVM_VARIANTS:
        w = model.hyper["omega"]
        mask = np.zeros(model.n, dtype=bool)
        xs = np.zeros(model.n)
        if model.guide is not None and model.guide.m:
            mask, xs = model.guide.dense_targets(model.n)
        dev = (1.0 - w) * np.sum((xi[mask] - xs[mask]) ** 2)
        if v == "CEDSVM":
            pen = w * xi.sum() + dev
        else:
            pen = w * np.sum(xi ** 2) + dev
    else:
        raise ValueError(f"no dual primal pair for variant {v}")
    return 0.5 * rkhs_norm(model, gram) + C * float(pen)


def duality_gap(model: TrainedModel, gram=None) -> float:
    """Relative gap (P - D) / (1 + |P|) using the stored dual objective."""
    P = primal_objective(model, gram)
    return (P - model.info["dual_objective"]) / (1.0 + abs(P))


def elite_deviation(model: TrainedModel) -> float:
    """Sum over the elite set of (xi_i(f) - xi_i*)^2 with hinge slacks of f."""
    g = model.guide
    if g is None or g.m == 0:
        return 0.0
    return float(np.sum((extract_slacks(model)[g.elite] - g.targets) ** 2))


def model_to_dict(model: TrainedModel) -> dict:
    return {
        "variant": model.variant,
        "kernel": model.kernel.to_dict(),
        "hyper": {k: float(v) for k, v in sorted(model.hyper.items())},
        "beta0": float(model.beta0),
        "alpha": [float(a) for a in model.alpha],
        "train_features": [[float(v) for v in row] for row in model.train_features],
        "train_labels": [int(v) for v in model.train_labels],
        "guide": None if model.guide is None else model.guide.to_dict(),
    }


def model_from_dict(d: dict) -> TrainedModel:
    guide = None if d.get("guide") is None else EliteGuide.from_dict(d["guide"])
    X = np.array(d["train_features"], dtype=float)
    y = np.array(d["train_labels"], dtype=float)
    alpha = np.array(d["alpha"], dtype=float)
    if alpha.shape != y.shape or X.shape[0] != y.shape[0]:
        raise ValueError("model file has inconsistent array lengths")
    return TrainedModel(alpha, float(d["beta0"]), KernelSpec.from_dict(d["kernel"]), X, y,
                        d["variant"], dict(d["hyper"]), guide, {})


__all__ = ["EDSVMConfig", "build_cedsvm_dual", "build_lsedsvm_dual", "build_dual", "fit_edsvm",
           "predict", "recover_intercept", "slack_solution", "primal_objective", "duality_gap",
           "rkhs_norm", "elite_deviation", "model_to_dict", "model_from_dict"]
