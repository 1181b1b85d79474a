"""Datasets, kernel specifications, Gram matrices and kernel expansions."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class DataError(ValueError):
    """Raised for malformed feature matrices or label vectors."""


@dataclass(frozen=True)
class Dataset:
    """Feature matrix with labels in {-1, +1}."""

    features: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        X = np.array(self.features, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        y = np.asarray(self.labels, dtype=float).ravel()
        if X.ndim != 2:
            raise DataError("features must be a 2-D matrix")
        if X.shape[0] != y.shape[0]:
            raise DataError(f"{X.shape[0]} feature rows but {y.shape[0]} labels")
        if not np.all(np.isfinite(X)):
            raise DataError("features contain non-finite entries")
        if not np.all((y == 1.0) | (y == -1.0)):
            raise DataError("labels must be exactly -1 or +1")
        X.setflags(write=False)
        y = y.copy()
        y.setflags(write=False)
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def p(self) -> int:
        return self.features.shape[1]

    def subset(self, idx) -> "Dataset":
        idx = np.asarray(idx)
        return Dataset(self.features[idx], self.labels[idx])

    def check_trainable(self) -> None:
        if self.n < 2:
            raise DataError("need at least two training points")
        if not (np.any(self.labels > 0) and np.any(self.labels < 0)):
            raise DataError("both classes must be present for training")


@dataclass(frozen=True)
class KernelSpec:
    """One of ``linear``, ``poly`` (degree, coef0) or ``rbf`` (gamma)."""

    kind: str = "linear"
    gamma: float = 1.0
    degree: int = 3
    coef0: float = 1.0

    def __post_init__(self):
        if self.kind not in ("linear", "poly", "rbf"):
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if self.kind == "rbf" and not self.gamma > 0:
            raise ValueError("RBF gamma must be positive")
        if self.kind == "poly" and (int(self.degree) != self.degree or self.degree < 1):
            raise ValueError("polynomial degree must be a positive integer")

    @classmethod
    def linear(cls) -> "KernelSpec":
        return cls("linear")

    @classmethod
    def rbf(cls, gamma: float) -> "KernelSpec":
        return cls("rbf", gamma=float(gamma))

    @classmethod
    def poly(cls, degree: int, coef0: float = 1.0) -> "KernelSpec":
        return cls("poly", degree=int(degree), coef0=float(coef0))

    def to_dict(self) -> dict:
        if self.kind == "linear":
            return {"kind": "linear"}
        if self.kind == "rbf":
            return {"kind": "rbf", "gamma": self.gamma}
        return {"kind": "poly", "degree": self.degree, "coef0": self.coef0}

    @classmethod
    def from_dict(cls, d: dict) -> "KernelSpec":
        kind = d["kind"]
        if kind == "rbf":
            return cls.rbf(d["gamma"])
        if kind == "poly":
            return cls.poly(d["degree"], d.get("coef0", 1.0))
        return cls.linear()


def compute_gram(kernel: KernelSpec, A, B=None) -> np.ndarray:
    """Kernel matrix with entry (i, j) = K(a_i, b_j)."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    same = B is None
    B = A if same else np.atleast_2d(np.asarray(B, dtype=float))
    if A.shape[1] != B.shape[1]:
        raise DataError(f"column mismatch: {A.shape[1]} vs {B.shape[1]}")
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(B))):
        raise DataError("non-finite kernel input")
    G = A @ B.T
    if kernel.kind == "linear":
        K = G
    elif kernel.kind == "poly":
        K = (G + kernel.coef0) ** kernel.degree
    else:
        sq = (A * A).sum(1)[:, None] + (B * B).sum(1)[None, :] - 2.0 * G
        np.maximum(sq, 0.0, out=sq)
        if same:
            np.fill_diagonal(sq, 0.0)
        K = np.exp(-kernel.gamma * sq)
    if same:
        K = 0.5 * (K + K.T)
    return K


def decision_values(model, X) -> np.ndarray:
    """f(x) = beta0 + sum_j alpha_j y_j K(x_j, x) over the stored training points."""
    if getattr(model, "alpha", None) is None:
        raise ValueError("model is not fitted")
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Xtr = model.train_features
    if X.shape[1] != Xtr.shape[1]:
        raise DataError(f"expected {Xtr.shape[1]} features, got {X.shape[1]}")
    coef = np.asarray(model.alpha) * np.asarray(model.train_labels)
    nz = coef != 0.0
    if not np.any(nz):
        return np.full(X.shape[0], float(model.beta0))
    K = compute_gram(model.kernel, Xtr[nz], X)
    return model.beta0 + coef[nz] @ K


@dataclass
class Standardizer:
    """Z-score transform fitted on training-fold statistics."""

    mean: np.ndarray = field(default_factory=lambda: np.zeros(0))
    scale: np.ndarray = field(default_factory=lambda: np.ones(0))

    @classmethod
    def fit(cls, X) -> "Standardizer":
        X = np.asarray(X, dtype=float)
        sd = X.std(axis=0)
        sd[sd == 0] = 1.0
        return cls(X.mean(axis=0), sd)

    def transform(self, X) -> np.ndarray:
        return (np.asarray(X, dtype=float) - self.mean) / self.scale
