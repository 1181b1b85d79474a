"""Elite sets and benchmark target slacks."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .baselines import TrainedModel, extract_slacks, support_indices


@dataclass(frozen=True)
class EliteGuide:
    """Elite indices (original dataset order) with their target slacks xi*."""

    elite: np.ndarray
    targets: np.ndarray
    source: tuple = ()

    def __post_init__(self):
        idx = np.asarray(self.elite, dtype=np.int64).ravel()
        tgt = np.asarray(self.targets, dtype=float).ravel()
        if idx.shape != tgt.shape:
            raise ValueError("elite indices and targets differ in length")
        if idx.size and (idx.min() < 0 or len(np.unique(idx)) != idx.size):
            raise ValueError("elite indices must be unique and nonnegative")
        if not np.all(np.isfinite(tgt)) or np.any(tgt < 0):
            raise ValueError("target slacks must be finite and nonnegative")
        order = np.argsort(idx, kind="stable")
        object.__setattr__(self, "elite", idx[order])
        object.__setattr__(self, "targets", tgt[order])
        object.__setattr__(self, "source", tuple(self.source))

    @property
    def m(self) -> int:
        return int(self.elite.size)

    @classmethod
    def empty(cls) -> "EliteGuide":
        return cls(np.zeros(0, dtype=np.int64), np.zeros(0))

    def check(self, n: int) -> None:
        if self.m > n or (self.m and self.elite.max() >= n):
            raise ValueError(f"elite index out of range for n={n}")

    def dense_targets(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        """(mask, targets) as length-n vectors."""
        self.check(n)
        mask = np.zeros(n, dtype=bool)
        tgt = np.zeros(n)
        mask[self.elite] = True
        tgt[self.elite] = self.targets
        return mask, tgt

    def restrict(self, idx) -> "EliteGuide":
        """Guide re-indexed to positions within ``data.subset(idx)``."""
        idx = np.asarray(idx)
        pos = {int(j): k for k, j in enumerate(idx)}
        keep = [(pos[int(e)], t) for e, t in zip(self.elite, self.targets) if int(e) in pos]
        if not keep:
            return EliteGuide(np.zeros(0, dtype=np.int64), np.zeros(0), self.source)
        e, t = zip(*keep)
        return EliteGuide(np.array(e), np.array(t), self.source)

    def to_dict(self) -> dict:
        return {"elite": [int(i) for i in self.elite],
                "targets": [float(t) for t in self.targets],
                "source": list(self.source)}

    @classmethod
    def from_dict(cls, d: dict) -> "EliteGuide":
        return cls(np.array(d["elite"], dtype=np.int64), np.array(d["targets"], dtype=float),
                   tuple(d.get("source", ())))


@dataclass(frozen=True)
class AggregationRule:
    """``min``, ``mean``, ``max``, ``single`` (one model id) or ``meanof`` (model ids)."""

    kind: str
    models: tuple = ()

    def __post_init__(self):
        if self.kind not in ("min", "mean", "max", "single", "meanof"):
            raise ValueError(f"unknown aggregation {self.kind!r}")
        if self.kind == "single" and len(self.models) != 1:
            raise ValueError("single aggregation takes exactly one model id")
        if self.kind == "meanof" and not self.models:
            raise ValueError("meanof needs at least one model id")


# target-slack presets: rule applied to the {CSVM, LINEXSVM, LSSVM} benchmark set
TARGET_PRESETS = {
    "min": AggregationRule("min"),
    "mean": AggregationRule("meanof", ("LINEXSVM", "LSSVM")),
    "max": AggregationRule("max"),
    "linex": AggregationRule("single", ("LINEXSVM",)),
    "uci-cedsvm": AggregationRule("meanof", ("LINEXSVM", "LSSVM")),
    "uci-lsedsvm": AggregationRule("meanof", ("CSVM", "LINEXSVM")),
}


def _same_data(models):
    X0, y0 = models[0].train_features, models[0].train_labels
    for mdl in models[1:]:
        if (mdl.train_features.shape != X0.shape or not np.array_equal(mdl.train_features, X0)
                or not np.array_equal(mdl.train_labels, y0)):
            raise ValueError("benchmark models were fitted on different datasets")


def build_elite_set(models, eps: float = 1e-8) -> np.ndarray:
    """Union of the models' support indices, sorted ascending."""
    models = list(models)
    if not models:
        return np.zeros(0, dtype=np.int64)
    _same_data(models)
    idx = [support_indices(mdl, eps) for mdl in models]
    return np.unique(np.concatenate(idx)).astype(np.int64)


def aggregate_targets(models, elite, rule: AggregationRule) -> np.ndarray:
    """Per elite index, combine the benchmark slacks with ``rule``."""
    models = list(models)
    elite = np.asarray(elite, dtype=np.int64)
    if elite.size == 0:
        raise ValueError("elite set is empty")
    by_id = {mdl.variant: mdl for mdl in models}
    if rule.kind in ("single", "meanof"):
        missing = [mid for mid in rule.models if mid not in by_id]
        if missing:
            raise KeyError(f"aggregation references missing model(s) {missing}")
        chosen = [by_id[mid] for mid in rule.models]
    else:
        chosen = models
    S = np.vstack([extract_slacks(mdl)[elite] for mdl in chosen])
    if rule.kind == "min":
        return S.min(axis=0)
    if rule.kind == "max":
        return S.max(axis=0)
    return S.mean(axis=0)


def make_guide(models, rule: AggregationRule, eps: float = 1e-8) -> EliteGuide:
    elite = build_elite_set(models, eps)
    if elite.size == 0:
        return EliteGuide.empty()
    targets = aggregate_targets(models, elite, rule)
    return EliteGuide(elite, targets, tuple(mdl.variant for mdl in models))


def self_guide(model: TrainedModel, eps: float = 1e-8) -> EliteGuide:
    """Guide whose targets are the model's own slacks on its support vectors."""
    elite = support_indices(model, eps)
    return EliteGuide(elite, extract_slacks(model)[elite], (model.variant,))
