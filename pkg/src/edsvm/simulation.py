"""Two-class Gaussian mixture benchmark with its Bayes rule."""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.special import logsumexp

from .evaluation import ExperimentReport, run_experiment
from .kernels import Dataset

POS_MEAN = (1.0, 0.0)
NEG_MEAN = (0.0, 1.0)


@dataclass(frozen=True)
class MixtureSpec:
    """Fixed cluster centres per class; each cluster is N(centre, scale * I)."""

    centers_pos: np.ndarray
    centers_neg: np.ndarray
    per_center: int = 10
    cluster_cov_scale: float = 0.2
    seed: object = None

    def __post_init__(self):
        P = np.atleast_2d(np.asarray(self.centers_pos, dtype=float))
        Q = np.atleast_2d(np.asarray(self.centers_neg, dtype=float))
        if P.shape[1] != Q.shape[1]:
            raise ValueError("positive and negative centres differ in dimension")
        if self.per_center < 1 or not self.cluster_cov_scale > 0:
            raise ValueError("need per_center >= 1 and a positive cluster variance")
        object.__setattr__(self, "centers_pos", P)
        object.__setattr__(self, "centers_neg", Q)

    def to_dict(self) -> dict:
        return {"centers_pos": self.centers_pos.tolist(), "centers_neg": self.centers_neg.tolist(),
                "per_center": self.per_center, "cluster_cov_scale": self.cluster_cov_scale,
                "seed": list(self.seed) if isinstance(self.seed, (list, tuple)) else self.seed}


def draw_centers(seed, n_centers: int = 10, per_center: int = 10) -> MixtureSpec:
    """p_i ~ N((1,0), I) and q_i ~ N((0,1), I), held fixed afterwards."""
    rng = np.random.default_rng(seed)
    P = rng.normal(size=(n_centers, 2)) + np.asarray(POS_MEAN)
    Q = rng.normal(size=(n_centers, 2)) + np.asarray(NEG_MEAN)
    return MixtureSpec(P, Q, per_center, 0.2, tuple(np.atleast_1d(seed).tolist()) if seed is not None else None)


def sample_dataset(spec: MixtureSpec, seed) -> Dataset:
    """per_center points around every centre: positives first, then negatives."""
    rng = np.random.default_rng(seed)
    sd = np.sqrt(spec.cluster_cov_scale)
    k = spec.per_center
    parts = []
    for C in (spec.centers_pos, spec.centers_neg):
        means = np.repeat(C, k, axis=0)
        parts.append(means + sd * rng.normal(size=means.shape))
    X = np.vstack(parts)
    y = np.concatenate([np.ones(k * len(spec.centers_pos)), -np.ones(k * len(spec.centers_neg))])
    return Dataset(X, y)


def bayes_score(spec: MixtureSpec, z) -> np.ndarray:
    """Log-likelihood ratio of the two equal-prior mixtures at z (positive means +1)."""
    Z = np.atleast_2d(np.asarray(z, dtype=float))
    s = 0.5 / spec.cluster_cov_scale

    def loglik(C):
        d2 = ((Z[:, None, :] - C[None, :, :]) ** 2).sum(-1)
        return logsumexp(-s * d2, axis=1) - np.log(len(C))

    out = loglik(spec.centers_pos) - loglik(spec.centers_neg)
    return out if np.ndim(z) > 1 else out[0]


def bayes_rule(spec: MixtureSpec, z) -> np.ndarray:
    return np.where(bayes_score(spec, np.atleast_2d(z)) >= 0, 1.0, -1.0)


def sample_population(spec: MixtureSpec, size: int, rng) -> tuple[np.ndarray, np.ndarray]:
    """i.i.d. draws: fair class label, uniform cluster, Gaussian noise."""
    y = np.where(rng.random(size) < 0.5, 1.0, -1.0)
    ip = rng.integers(len(spec.centers_pos), size=size)
    iq = rng.integers(len(spec.centers_neg), size=size)
    means = np.where((y > 0)[:, None], spec.centers_pos[ip], spec.centers_neg[iq])
    return means + np.sqrt(spec.cluster_cov_scale) * rng.normal(size=means.shape), y


def bayes_accuracy(spec: MixtureSpec, mc_samples: int = 100_000, seed=0,
                   return_se: bool = False):
    """Monte Carlo estimate of the Bayes rule's accuracy."""
    if mc_samples < 10_000:
        raise ValueError("use at least 10^4 Monte Carlo samples")
    X, y = sample_population(spec, mc_samples, np.random.default_rng(seed))
    hit = bayes_rule(spec, X) == y
    acc = float(hit.mean())
    if return_se:
        return acc, float(np.sqrt(acc * (1 - acc) / mc_samples))
    return acc


def boundary_grid(X, scorers: dict, size: int = 200, pad: float = 1.0):
    """Lattice over the padded bounding box of X with one score column per scorer.

    Returns (names, rows) where rows is a (size*size, 2 + len(scorers)) array.
    """
    X = np.asarray(X, dtype=float)
    lo = X.min(axis=0) - pad
    hi = X.max(axis=0) + pad
    g1 = np.linspace(lo[0], hi[0], size)
    g2 = np.linspace(lo[1], hi[1], size)
    A, B = np.meshgrid(g1, g2)
    Z = np.column_stack([A.ravel(), B.ravel()])
    cols = [Z]
    names = ["x1", "x2"]
    for name, fn in scorers.items():
        names.append(name)
        cols.append(np.asarray(fn(Z), dtype=float)[:, None])
    return names, np.hstack(cols)


def replicate_seeds(seed: int, replicate: int) -> tuple[list, list]:
    """Seeds for the centre draw and the sample of one replicate."""
    return [seed, replicate, 0], [seed, replicate, 1]


def run_simulation(cfg, replicates: int, seed: int = 0, bayes_mc: int = 100_000, sink=None):
    """Fresh centres and a fresh 200-point sample per replicate, then the split protocol.

    Returns (report, bayes) where bayes lists the Monte Carlo Bayes accuracy per replicate.
    ``sink`` collects (run record, model) pairs as in run_experiment.
    """
    cfg = replace(cfg, mode="split", replicates=1, seed=seed)
    report = ExperimentReport(cfg.to_dict())
    bayes = []
    for r in range(replicates):
        cs, ds = replicate_seeds(seed, r)
        spec = draw_centers(cs)
        data = sample_dataset(spec, ds)
        report.runs.extend(run_experiment(data, cfg, first_replicate=r, sink=sink).runs)
        bayes.append(bayes_accuracy(spec, bayes_mc, seed=[seed, r, 2]))
    return report, bayes
