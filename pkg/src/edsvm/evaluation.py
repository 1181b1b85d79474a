"""Metrics, stratified cross-validation, grid search and experiment protocols."""
from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .baselines import fit_csvm, fit_linexsvm, fit_lssvm
from .elite import TARGET_PRESETS, make_guide
from .kernels import Dataset, KernelSpec, Standardizer, compute_gram
from .models import EDSVMConfig, fit_edsvm
from .qp import SolverError

log = logging.getLogger(__name__)

METRIC_NAMES = ("accuracy", "sensitivity", "specificity", "precision", "f1", "roc_auc", "pr_auc")
MODEL_ORDER = ("CSVM", "LINEXSVM", "LSSVM", "CEDSVM", "LSEDSVM")
# a block name may pair different target rules for the two EDSVM variants
TARGET_BLOCKS = {"uci": ("uci-cedsvm", "uci-lsedsvm")}


# ---------------------------------------------------------------- metrics

@dataclass(frozen=True)
class Metrics:
    accuracy: float
    sensitivity: float
    specificity: float
    precision: float
    f1: float
    roc_auc: float
    pr_auc: float
    precision_undefined: bool = False

    def as_dict(self) -> dict:
        return asdict(self)


def roc_auc(scores, labels) -> float:
    """P(score_pos > score_neg) + 1/2 P(tie), computed over tie groups."""
    s = np.asarray(scores, dtype=float)
    pos = np.asarray(labels) > 0
    P = int(pos.sum())
    N = s.size - P
    if P == 0 or N == 0:
        raise ValueError("ROC-AUC needs both classes")
    _, inv = np.unique(s, return_inverse=True)
    npos = np.bincount(inv, weights=pos, minlength=inv.max() + 1).astype(np.int64)
    nneg = np.bincount(inv, weights=~pos, minlength=inv.max() + 1).astype(np.int64)
    below = np.concatenate([[0], np.cumsum(nneg)[:-1]])
    # twice the pair count, kept in integers so the only rounding is the final division
    twice = int(np.sum(npos * (2 * below + nneg)))
    return (twice / 2) / (P * N)


def average_precision(scores, labels) -> float:
    """Step-wise area under the precision-recall curve (tied scores form one step)."""
    s = np.asarray(scores, dtype=float)
    pos = np.asarray(labels) > 0
    P = int(pos.sum())
    if P == 0:
        raise ValueError("average precision needs at least one positive")
    order = np.argsort(-s, kind="mergesort")
    s, pos = s[order], pos[order]
    last = np.r_[np.flatnonzero(np.diff(s) != 0), s.size - 1]
    tp = np.cumsum(pos)[last]
    k = last + 1
    prec = tp / k
    rec = tp / P
    return float(np.sum(np.diff(np.r_[0.0, rec]) * prec))


def compute_metrics(scores, labels, threshold: float = 0.0) -> Metrics:
    s = np.asarray(scores, dtype=float).ravel()
    y = np.asarray(labels, dtype=float).ravel()
    if s.shape != y.shape:
        raise ValueError("scores and labels differ in length")
    pred = np.where(s - threshold >= 0, 1.0, -1.0)
    tp = int(np.sum((pred > 0) & (y > 0)))
    tn = int(np.sum((pred < 0) & (y < 0)))
    fp = int(np.sum((pred > 0) & (y < 0)))
    fn = int(np.sum((pred < 0) & (y > 0)))
    sens = tp / (tp + fn) if tp + fn else 0.0
    spec = tn / (tn + fp) if tn + fp else 0.0
    undefined = tp + fp == 0
    prec = 0.0 if undefined else tp / (tp + fp)
    f1 = 2 * prec * sens / (prec + sens) if prec + sens > 0 else 0.0
    return Metrics((tp + tn) / y.size, sens, spec, prec, f1, roc_auc(s, y),
                   average_precision(s, y), undefined)


# ---------------------------------------------------------------- splitting

def stratified_kfold(labels, k: int, seed) -> np.ndarray:
    """Fold id per sample: per-class round robin after a seeded shuffle."""
    y = np.asarray(labels)
    if k < 2:
        raise ValueError("need at least two folds")
    rng = np.random.default_rng(seed)
    folds = np.empty(y.size, dtype=np.int64)
    offset = 0
    for c in np.unique(y):
        idx = np.flatnonzero(y == c)
        if idx.size < k:
            raise ValueError(f"class {c} has {idx.size} members, fewer than k={k}")
        idx = rng.permutation(idx)
        folds[idx] = (offset + np.arange(idx.size)) % k
        offset += idx.size
    return folds


def stratified_split(labels, test_fraction: float, seed) -> tuple[np.ndarray, np.ndarray]:
    """Per-class random train/test split with round(frac * class size) test points."""
    y = np.asarray(labels)
    rng = np.random.default_rng(seed)
    train, test = [], []
    for c in np.unique(y):
        idx = rng.permutation(np.flatnonzero(y == c))
        n_test = int(round(test_fraction * idx.size))
        test.append(idx[:n_test])
        train.append(idx[n_test:])
    return np.sort(np.concatenate(train)), np.sort(np.concatenate(test))


@dataclass
class Fold:
    train_idx: np.ndarray
    test_idx: np.ndarray
    train: Dataset
    test: Dataset
    grams: dict = field(default_factory=dict)

    def gram(self, kernel: KernelSpec) -> np.ndarray:
        if kernel not in self.grams:
            self.grams[kernel] = compute_gram(kernel, self.train.features)
        return self.grams[kernel]


def make_fold(data: Dataset, train_idx, test_idx, standardize: bool) -> Fold:
    tr, te = data.subset(train_idx), data.subset(test_idx)
    if standardize:
        st = Standardizer.fit(tr.features)
        tr = Dataset(st.transform(tr.features), tr.labels)
        te = Dataset(st.transform(te.features), te.labels)
    return Fold(np.asarray(train_idx), np.asarray(test_idx), tr, te)


def make_folds(data: Dataset, k: int, seed, standardize: bool) -> list[Fold]:
    ids = stratified_kfold(data.labels, k, seed)
    return [make_fold(data, np.flatnonzero(ids != j), np.flatnonzero(ids == j), standardize)
            for j in range(k)]


# ---------------------------------------------------------------- grids

def _pow2(lo, hi):
    return tuple(float(2.0 ** e) for e in range(lo, hi + 1))


@dataclass(frozen=True)
class GridSpec:
    C_values: tuple = _pow2(-3, 5)
    omega_values: tuple = tuple(round(0.1 * i, 1) for i in range(1, 10))
    a_values: tuple = tuple(float(-i) for i in range(1, 9))
    gamma_values: tuple = _pow2(-7, 3)
    folds: int = 5
    seed: int = 0

    def __post_init__(self):
        for f in ("C_values", "omega_values", "a_values", "gamma_values"):
            v = tuple(float(x) for x in getattr(self, f))
            if not v:
                raise ValueError(f"grid {f} is empty")
            object.__setattr__(self, f, v)
        if self.folds < 2:
            raise ValueError("need at least two folds")

    @classmethod
    def from_dict(cls, d: dict) -> "GridSpec":
        known = {f.name for f in fields(cls)}
        bad = set(d) - known
        if bad:
            raise ValueError(f"unknown grid keys {sorted(bad)}")
        return cls(**d)

    def to_dict(self) -> dict:
        return {k: list(v) if isinstance(v, tuple) else v for k, v in asdict(self).items()}


def candidates(family: str, grid: GridSpec, kernel_kind: str, fixed: dict | None = None):
    """Hyperparameter dicts for one model family; ``fixed`` pins some of them."""
    fixed = dict(fixed or {})
    axes = {"C": grid.C_values}
    if family in ("CEDSVM", "LSEDSVM"):
        axes["omega"] = grid.omega_values
    if family == "LINEXSVM":
        axes["a"] = grid.a_values
    if kernel_kind == "rbf":
        axes["gamma"] = grid.gamma_values
    for k, v in fixed.items():
        axes[k] = (v,)
    keys = list(axes)
    mesh = np.meshgrid(*[np.asarray(axes[k], dtype=float) for k in keys], indexing="ij")
    return [{k: float(m.flat[i]) for k, m in zip(keys, mesh)} for i in range(mesh[0].size)]


def tie_key(h: dict):
    """Preference among equally good points: smaller C, larger omega, smaller gamma, smaller |a|."""
    return (h["C"], -h.get("omega", 0.0), h.get("gamma", 0.0), abs(h.get("a", 0.0)))


def kernel_for(kind: str, h: dict, degree: int = 3, coef0: float = 1.0) -> KernelSpec:
    if kind == "rbf":
        return KernelSpec.rbf(h["gamma"])
    if kind == "poly":
        return KernelSpec.poly(degree, coef0)
    return KernelSpec.linear()


def fit_family(family: str, data: Dataset, h: dict, kernel: KernelSpec, guide=None, gram=None,
               tol: float = 1e-6):
    """Fit one model family; ``tol`` is the dual solver tolerance (unused by LINEX)."""
    if family == "CSVM":
        return fit_csvm(data, h["C"], kernel, gram=gram, tol=tol)
    if family == "LSSVM":
        return fit_lssvm(data, h["C"], kernel, gram=gram, tol=tol)
    if family == "LINEXSVM":
        return fit_linexsvm(data, h["C"], h["a"], kernel, gram=gram)
    if family in ("CEDSVM", "LSEDSVM"):
        return fit_edsvm(data, EDSVMConfig(h["C"], h["omega"], guide, family, kernel), gram=gram,
                         tol=tol)
    raise ValueError(f"unknown model family {family!r}")


@dataclass
class GridResult:
    family: str
    best: dict
    table: list

    def to_dict(self) -> dict:
        return {"family": self.family, "best": self.best, "table": self.table}


def grid_search(data: Dataset, family: str, grid: GridSpec, kernel_kind: str = "rbf",
                folds: list | None = None, guide_fn=None, fixed: dict | None = None,
                standardize: bool = False, tol: float = 1e-3) -> GridResult:
    """Pick the point with the smallest pooled CV misclassification rate.

    ``guide_fn(fold_index, fold)`` supplies the elite guide for EDSVM families.
    Points whose fit fails are kept in the table with error = inf and a flag.
    ``tol`` is the dual solver tolerance used while scanning the grid.
    """
    if folds is None:
        folds = make_folds(data, grid.folds, grid.seed, standardize)
    n_total = sum(f.test_idx.size for f in folds)
    guides = [guide_fn(j, f) for j, f in enumerate(folds)] if guide_fn is not None else None
    table = []
    for h in candidates(family, grid, kernel_kind, fixed):
        kern = kernel_for(kernel_kind, h)
        wrong = 0
        failed = False
        for j, f in enumerate(folds):
            g = guides[j] if guides is not None else None
            try:
                mdl = fit_family(family, f.train, h, kern, g, f.gram(kern), tol)
            except SolverError as exc:
                log.warning("%s fit failed at %s: %s", family, h, exc)
                failed = True
                break
            wrong += int(np.sum(mdl.predict(f.test.features) != f.test.labels))
        err = np.inf if failed else wrong / n_total
        table.append({"hyper": h, "cv_error": err, "failed": failed})
    ok = [r for r in table if not r["failed"]]
    if not ok:
        raise SolverError(f"every {family} grid point failed")
    best = min(ok, key=lambda r: (r["cv_error"], tie_key(r["hyper"])))
    return GridResult(family, dict(best["hyper"]), table)


# ---------------------------------------------------------------- experiments

@dataclass(frozen=True)
class ExperimentConfig:
    """``split``: repeated stratified train/test splits tuned by inner CV.
    ``cv``: k-fold CV whose folds are both the tuning folds and the reported folds."""

    mode: str = "split"
    models: tuple = MODEL_ORDER
    targets: tuple = ("max",)
    kernel: str = "rbf"
    standardize: bool = False
    test_fraction: float = 0.3
    replicates: int = 1
    seed: int = 0
    share_linex_gamma: bool = True
    elite_eps: float = 1e-8
    tune_tol: float = 1e-3
    fit_tol: float = 1e-6
    grid: GridSpec = field(default_factory=GridSpec)

    def __post_init__(self):
        if self.mode not in ("split", "cv"):
            raise ValueError("mode must be 'split' or 'cv'")
        bad = [m for m in self.models if m not in MODEL_ORDER]
        if bad:
            raise ValueError(f"unknown models {bad}")
        object.__setattr__(self, "models", tuple(m for m in MODEL_ORDER if m in self.models))
        if isinstance(self.targets, str):
            object.__setattr__(self, "targets", (self.targets,))
        for t in self.targets:
            for rule in TARGET_BLOCKS.get(t, (t,)):
                if rule not in TARGET_PRESETS:
                    raise ValueError(f"unknown target rule {t!r}")
        if self.kernel not in ("linear", "rbf", "poly"):
            raise ValueError(f"unknown kernel {self.kernel!r}")
        if not 0.0 < self.test_fraction < 1.0 or self.replicates < 1:
            raise ValueError("need 0 < test_fraction < 1 and replicates >= 1")
        if isinstance(self.grid, dict):
            object.__setattr__(self, "grid", GridSpec.from_dict(self.grid))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["models"] = list(self.models)
        d["targets"] = list(self.targets)
        d["grid"] = self.grid.to_dict()
        return d


@dataclass
class ExperimentReport:
    config: dict
    runs: list = field(default_factory=list)

    def rows(self) -> list:
        """(block, model) pairs in first-seen order."""
        seen = []
        for r in self.runs:
            key = (r["block"], r["model"])
            if key not in seen:
                seen.append(key)
        return seen

    def summary(self) -> list:
        out = []
        for block, model in self.rows():
            ms = [r["metrics"] for r in self.runs if r["block"] == block and r["model"] == model]
            row = {"block": block, "model": model, "count": len(ms)}
            for name in METRIC_NAMES:
                v = np.array([m[name] for m in ms])
                row[name] = {"mean": float(v.mean()),
                             "sd": float(v.std(ddof=1)) if v.size > 1 else 0.0}
            out.append(row)
        return out

    def extend(self, other: "ExperimentReport", replicate_offset: int) -> None:
        for r in other.runs:
            r = dict(r)
            r["replicate"] += replicate_offset
            self.runs.append(r)

    def to_dict(self) -> dict:
        return {"config": self.config, "pr_auc_method": "average precision (step-wise)",
                "summary": self.summary(), "runs": self.runs}

    def format_table(self, percent: bool = False) -> str:
        cols = ("accuracy", "roc_auc", "f1", "pr_auc", "sensitivity", "specificity", "precision")
        head = ["targets", "model"] + [c for c in cols]
        lines = []
        scale = 100.0 if percent else 1.0
        for row in self.summary():
            cells = [row["block"], row["model"]]
            for c in cols:
                m, s = row[c]["mean"] * scale, row[c]["sd"] * scale
                cells.append(f"{m:.2f} ± {s:.2f}" if percent else f"{m:.3f} ± {s:.3f}")
            lines.append(cells)
        widths = [max(len(str(x)) for x in col) for col in zip(head, *lines)]
        fmt = lambda cells: "  ".join(str(c).ljust(w) for c, w in zip(cells, widths)).rstrip()
        out = [fmt(head), fmt(["-" * w for w in widths])]
        out += [fmt(c) for c in lines]
        return "\n".join(out) + "\n"


def _benchmarks_for(fold: Fold, best: dict, kernels: dict, cache: dict, key, tol):
    """C-SVM, LINEX-SVM and LS-SVM refitted on the fold's training part (memoised)."""
    if key not in cache:
        cache[key] = [fit_family(fam, fold.train, best[fam], kernels[fam], None,
                                 fold.gram(kernels[fam]), tol)
                      for fam in ("CSVM", "LINEXSVM", "LSSVM")]
    return cache[key]


def _run_once(tune_folds: list, eval_folds: list, cfg: ExperimentConfig, replicate: int,
              sink: list | None = None) -> list:
    """Tune on ``tune_folds``; evaluate either on the held-out split or on every fold."""
    grid = cfg.grid
    kind = cfg.kernel
    runs = []
    wanted_edsvm = [m for m in cfg.models if m in ("CEDSVM", "LSEDSVM")]
    bench = set(cfg.models) | ({"CSVM", "LINEXSVM", "LSSVM"} if wanted_edsvm else set())
    best, kernels = {}, {}
    for fam in ("CSVM", "LSSVM", "LINEXSVM"):
        if fam not in bench:
            continue
        fixed = None
        if fam == "LINEXSVM" and kind == "rbf" and cfg.share_linex_gamma and "CSVM" in best:
            fixed = {"gamma": best["CSVM"]["gamma"]}
        best[fam] = grid_search(None, fam, grid, kind, folds=tune_folds, fixed=fixed,
                                tol=cfg.tune_tol).best
        kernels[fam] = kernel_for(kind, best[fam])

    def evaluate(fam, h, kern, guide_of):
        for j, f in enumerate(eval_folds):
            mdl = fit_family(fam, f.train, h, kern, guide_of(j, f), f.gram(kern), cfg.fit_tol)
            runs.append({"replicate": replicate, "fold": j, "model": fam, "hyper": h,
                         "metrics": compute_metrics(mdl.decision_function(f.test.features),
                                                    f.test.labels).as_dict()})
            if sink is not None:
                sink.append((runs[-1], mdl))

    for fam in ("CSVM", "LINEXSVM", "LSSVM"):
        if fam in cfg.models:
            evaluate(fam, best[fam], kernels[fam], lambda j, f: None)
    for r in runs:
        r["block"] = "-"
    if not wanted_edsvm:
        return runs
    cache = {}
    for block in cfg.targets:
        rules = TARGET_BLOCKS.get(block, (block, block))
        for fam, rule_name in zip(("CEDSVM", "LSEDSVM"), rules):
            if fam not in wanted_edsvm:
                continue
            rule = TARGET_PRESETS[rule_name]
            # the EDSVM shares the kernel of its own baseline
            base = "CSVM" if fam == "CEDSVM" else "LSSVM"
            kern = kernels[base]
            fixed = {"gamma": best[base]["gamma"]} if kind == "rbf" else None

            def guide_of(j, f, rule=rule):
                models = _benchmarks_for(f, best, kernels, cache, id(f), cfg.fit_tol)
                return make_guide(models, rule, cfg.elite_eps)

            h = grid_search(None, fam, grid, kind, folds=tune_folds, guide_fn=guide_of,
                            fixed=fixed, tol=cfg.tune_tol).best
            start = len(runs)
            evaluate(fam, h, kern, guide_of)
            for r in runs[start:]:
                r["block"] = block
    return runs


def run_experiment(data: Dataset, cfg: ExperimentConfig, first_replicate: int = 0,
                   sink: list | None = None) -> ExperimentReport:
    """Fit benchmarks and EDSVMs under the configured protocol and collect metrics.

    Split-mode replicate r draws its split from the seed (cfg.seed, r); pass
    ``first_replicate`` when one dataset per replicate is generated externally.
    If ``sink`` is a list, (run record, fitted model) pairs are appended to it.
    """
    report = ExperimentReport(cfg.to_dict())
    if cfg.mode == "cv":
        folds = make_folds(data, cfg.grid.folds, cfg.seed, cfg.standardize)
        report.runs.extend(_run_once(folds, folds, cfg, 0, sink))
        return report
    for r in range(first_replicate, first_replicate + cfg.replicates):
        tr, te = stratified_split(data.labels, cfg.test_fraction, [cfg.seed, r])
        outer = make_fold(data, tr, te, cfg.standardize)
        inner = make_folds(data.subset(tr), cfg.grid.folds, [cfg.seed, r, 1], cfg.standardize)
        report.runs.extend(_run_once(inner, [outer], cfg, r, sink))
    return report
