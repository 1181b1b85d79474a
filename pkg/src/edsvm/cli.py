"""Command-line interface: simulate, fit, predict, cv, diagnose.

Exit codes: 0 success, 2 configuration or input error, 3 solver failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

import jsonschema
import numpy as np
import yaml

from . import schemas
from .baselines import fit_csvm, fit_linexsvm, fit_lssvm
from .calibration import check_calibration
from .dataio import read_csv, write_csv, write_json, write_text
from .diagnostics import radii_report
from .elite import TARGET_PRESETS, EliteGuide, make_guide, self_guide
from .evaluation import (MODEL_ORDER, TARGET_BLOCKS, ExperimentConfig, GridSpec, grid_search,
                         run_experiment)
from .kernels import DataError, Dataset, KernelSpec, Standardizer
from .models import EDSVMConfig, fit_edsvm, model_from_dict, model_to_dict
from .qp import SolverError
from .simulation import (bayes_score, boundary_grid, draw_centers, replicate_seeds,
                         run_simulation, sample_dataset)

log = logging.getLogger("edsvm")

EXIT_CONFIG = 2
EXIT_SOLVER = 3
SIM_BLOCKS = ("min", "mean", "max", "linex")


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------- configuration

def load_config(path) -> dict:
    if path is None:
        return {}
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {p}")
    text = p.read_text(encoding="utf-8")
    try:
        cfg = json.loads(text) if p.suffix.lower() == ".json" else yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot parse {p}: {exc}") from None
    return {} if cfg is None else cfg


def merge_config(args) -> dict:
    """File values overridden by explicit flags, then validated against the schema."""
    cfg = load_config(args.config)
    if not isinstance(cfg, dict):
        raise ConfigError("config file must hold a mapping")
    flags = {"seed": args.seed, "out": args.out, "C": args.C, "omega": args.omega,
             "gamma": args.gamma, "a": args.a, "data": args.data, "model_file": args.model_file,
             "guide_file": args.guide_file}
    for k, v in flags.items():
        if v is not None:
            cfg[k] = v
    if args.kernel is not None:
        cfg["kernel"] = args.kernel
    if args.model is not None:
        models = [m.strip().upper() for m in args.model.split(",")]
        cfg["models"] = models
        cfg["model"] = models[0]
    if args.targets is not None:
        cfg["targets"] = args.targets
    if args.map01:
        cfg["map01"] = True
    if args.standardize is not None:
        cfg["standardize"] = args.standardize
    try:
        schemas.validate(cfg, schemas.CONFIG)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"invalid configuration at {where}: {exc.message}") from None
    return cfg


def kernel_from(cfg: dict, default: str = "rbf") -> KernelSpec:
    k = cfg.get("kernel", default)
    if isinstance(k, dict):
        k = dict(k)
        if "gamma" in cfg and k["kind"] == "rbf":
            k["gamma"] = cfg["gamma"]
        return KernelSpec.from_dict(k)
    if k == "rbf":
        return KernelSpec.rbf(cfg.get("gamma", 1.0))
    if k == "poly":
        return KernelSpec.poly(3)
    return KernelSpec.linear()


def grid_from(cfg: dict) -> GridSpec:
    g = dict(cfg.get("grid", {}))
    g.setdefault("seed", cfg.get("seed", 0))
    # explicit scalar hyperparameters pin the corresponding grid axis
    for key, axis in (("C", "C_values"), ("omega", "omega_values"), ("a", "a_values"),
                      ("gamma", "gamma_values")):
        if key in cfg:
            g[axis] = [cfg[key]]
    return GridSpec.from_dict(g)


def targets_from(cfg: dict, default) -> tuple:
    t = cfg.get("targets", default)
    t = (t,) if isinstance(t, str) else tuple(t)
    if "self" in t:
        raise ConfigError("targets 'self' is only meaningful for diagnose")
    return t


def out_dir(cfg: dict) -> Path:
    p = Path(cfg.get("out", "."))
    p.mkdir(parents=True, exist_ok=True)
    return p


def load_data(cfg: dict) -> tuple[Dataset, list]:
    if "data" not in cfg:
        raise ConfigError("a data CSV is required (--data or 'data' in the config)")
    return read_csv(cfg["data"], map01=cfg.get("map01", False))


def experiment_config(cfg: dict, mode: str, kernel_kind: str, standardize: bool,
                      targets) -> ExperimentConfig:
    models = tuple(cfg.get("models", MODEL_ORDER))
    extra = {k: cfg[k] for k in ("elite_eps", "tune_tol", "fit_tol", "replicates",
                                 "test_fraction") if k in cfg}
    return ExperimentConfig(mode=mode, models=models, targets=targets, kernel=kernel_kind,
                            standardize=standardize, seed=cfg.get("seed", 0),
                            grid=grid_from(cfg), **extra)


# ---------------------------------------------------------------- benchmarks and guides

def fit_benchmarks(data: Dataset, cfg: dict, kernel: KernelSpec, tol: float):
    C = cfg.get("C", 1.0)
    a = cfg.get("a", -1.0)
    return [fit_csvm(data, C, kernel, tol=tol), fit_linexsvm(data, C, a, kernel),
            fit_lssvm(data, C, kernel, tol=tol)]


def guide_for(data: Dataset, cfg: dict, kernel: KernelSpec, variant: str, tol: float):
    if "guide_file" in cfg:
        d = json.loads(Path(cfg["guide_file"]).read_text(encoding="utf-8"))
        schemas.validate(d, schemas.GUIDE)
        return EliteGuide.from_dict(d)
    block = cfg.get("targets", "max")
    if not isinstance(block, str):
        block = block[0]
    rules = TARGET_BLOCKS.get(block, (block, block))
    rule = rules[0] if variant == "CEDSVM" else rules[1]
    if rule == "self":
        raise ConfigError("targets 'self' is only meaningful for diagnose")
    eps = cfg.get("elite_eps", 1e-8)
    return make_guide(fit_benchmarks(data, cfg, kernel, tol), TARGET_PRESETS[rule], eps)


# ---------------------------------------------------------------- commands

def cmd_fit(cfg: dict) -> None:
    data, names = load_data(cfg)
    family = cfg.get("model", "CEDSVM")
    kernel = kernel_from(cfg, "linear")
    tol = cfg.get("fit_tol", 1e-6)
    st = None
    if cfg.get("standardize", False):
        st = Standardizer.fit(data.features)
        data = Dataset(st.transform(data.features), data.labels)
    C = cfg.get("C", 1.0)
    if family == "CSVM":
        model = fit_csvm(data, C, kernel, tol=tol)
    elif family == "LSSVM":
        model = fit_lssvm(data, C, kernel, tol=tol)
    elif family == "LINEXSVM":
        model = fit_linexsvm(data, C, cfg.get("a", -1.0), kernel)
    else:
        guide = guide_for(data, cfg, kernel, family, tol)
        model = fit_edsvm(data, EDSVMConfig(C, cfg.get("omega", 0.5), guide, family, kernel),
                          tol=tol)
    if family == "LINEXSVM":
        model.hyper["a"] = float(cfg.get("a", -1.0))
    d = model_to_dict(model)
    d["format"] = "edsvm-model-1"
    d["feature_names"] = list(names)
    d["standardizer"] = None if st is None else {"mean": st.mean.tolist(),
                                                 "scale": st.scale.tolist()}
    schemas.validate(d, schemas.MODEL)
    out = out_dir(cfg)
    write_json(out / "model.json", d)
    if model.guide is not None:
        write_json(out / "guide.json", model.guide.to_dict())


def load_model(path):
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"model file not found: {p}")
    d = json.loads(p.read_text(encoding="utf-8"))
    try:
        schemas.validate(d, schemas.MODEL)
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"invalid model file: {exc.message}") from None
    st = d.get("standardizer")
    st = None if st is None else Standardizer(np.array(st["mean"]), np.array(st["scale"]))
    return model_from_dict(d), st


def cmd_predict(cfg: dict) -> None:
    if "model_file" not in cfg:
        raise ConfigError("predict needs --model-file")
    model, st = load_model(cfg["model_file"])
    if "data" not in cfg:
        raise ConfigError("predict needs --data")
    loaded, _ = read_csv(cfg["data"], map01=cfg.get("map01", False), require_label=False)
    X = loaded.features if isinstance(loaded, Dataset) else loaded
    if st is not None:
        X = st.transform(X)
    f = model.decision_function(X)
    pred = np.where(f >= 0, 1, -1)
    rows = [[repr(float(v)), str(int(p))] for v, p in zip(f, pred)]
    write_csv(out_dir(cfg) / "scores.csv", ["score", "prediction"], rows)


def _write_report(out: Path, stem: str, report, extra: dict | None = None, percent=False):
    d = report.to_dict()
    if extra:
        d.update(extra)
    schemas.validate(json.loads(json.dumps(d, default=float)), schemas.REPORT)
    write_json(out / f"{stem}.json", d)
    write_text(out / f"{stem}.txt", report.format_table(percent=percent))


def cmd_cv(cfg: dict) -> None:
    data, _ = load_data(cfg)
    kind = kernel_from(cfg, "linear").kind
    ecfg = experiment_config(cfg, "cv", kind, cfg.get("standardize", True),
                             targets_from(cfg, ("uci",)))
    report = run_experiment(data, ecfg)
    _write_report(out_dir(cfg), "cv_report", report, percent=True)


def cmd_simulate(cfg: dict) -> None:
    seed = cfg.get("seed", 0)
    reps = cfg.get("replicates", 1)
    ecfg = experiment_config(cfg, "split", kernel_from(cfg, "rbf").kind,
                             cfg.get("standardize", False), targets_from(cfg, SIM_BLOCKS))
    sink = []
    report, bayes = run_simulation(ecfg, reps, seed, cfg.get("bayes_mc", 100_000), sink)
    out = out_dir(cfg)
    cs, ds = replicate_seeds(seed, 0)
    spec = draw_centers(cs)
    data = sample_dataset(spec, ds)
    write_csv(out / "dataset.csv", ["x1", "x2", "label"],
              [[x[0], x[1], str(int(v))] for x, v in zip(data.features, data.labels)])
    size = cfg.get("grid_size", 200)
    names, grid = boundary_grid(data.features, {"score": lambda Z: bayes_score(spec, Z)}, size)
    write_csv(out / "grid_bayes.csv", names, grid)
    for run, mdl in sink:
        if run["replicate"] != 0:
            continue
        tag = run["model"] if run["block"] == "-" else f"{run['model']}_{run['block']}"
        names, grid = boundary_grid(data.features, {"score": mdl.decision_function}, size)
        write_csv(out / f"grid_{tag}.csv", names, grid)
    write_json(out / "spec.json", spec.to_dict())
    _write_report(out, "metrics", report,
                  {"bayes_accuracy": bayes, "bayes_accuracy_mean": float(np.mean(bayes))})


def cmd_diagnose(cfg: dict) -> None:
    data, _ = load_data(cfg)
    kernel = kernel_from(cfg, "linear")
    tol = cfg.get("fit_tol", 1e-6)
    if cfg.get("standardize", False):
        data = Dataset(Standardizer.fit(data.features).transform(data.features), data.labels)
    variant = cfg.get("model", "CEDSVM")
    if variant not in ("CEDSVM", "LSEDSVM"):
        raise ConfigError("diagnose needs --model CEDSVM or LSEDSVM")
    if "C" in cfg:
        ref_hyper = {"C": float(cfg["C"])}
    else:
        # empirical comparator: cross-validated C-SVM over the C grid
        g = grid_search(data, "CSVM", grid_from(cfg), kernel.kind,
                        fixed={"gamma": kernel.gamma} if kernel.kind == "rbf" else None)
        ref_hyper = g.best
    C = ref_hyper["C"]
    reference = fit_csvm(data, C, kernel, tol=tol)
    reference_ls = fit_lssvm(data, C, kernel, tol=tol)
    block = cfg.get("targets", "self")
    block = block if isinstance(block, str) else block[0]
    if block == "self":
        guide = self_guide(reference, cfg.get("elite_eps", 1e-8))
    else:
        guide = guide_for(data, dict(cfg, C=C), kernel, variant, tol)
    omega = cfg.get("omega", 0.5)
    rep = radii_report(reference, guide, C, omega, variant, reference_ls)
    calib = check_calibration(guide, omega, variant) if omega < 1 else None
    d = {"report": rep.to_dict(),
         "calibration": {} if calib is None else calib.to_dict(),
         "reference": {"model": "CSVM", "hyper": ref_hyper, "kernel": kernel.to_dict(),
                       "targets": block, "m": guide.m, "n": data.n},
         "recommendation": rep.recommendation}
    schemas.validate(json.loads(json.dumps(d)), schemas.DIAGNOSTICS)
    write_json(out_dir(cfg) / "diagnostics.json", d)


COMMANDS = {"simulate": cmd_simulate, "fit": cmd_fit, "predict": cmd_predict, "cv": cmd_cv,
            "diagnose": cmd_diagnose}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="edsvm", description="Elite-driven SVM experiments")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", help="YAML or JSON run configuration")
    p.add_argument("--seed", type=int)
    p.add_argument("--omega", type=float)
    p.add_argument("--C", type=float)
    p.add_argument("--a", type=float, help="LINEX asymmetry")
    p.add_argument("--kernel", choices=["linear", "rbf", "poly"])
    p.add_argument("--gamma", type=float)
    p.add_argument("--model", help="model family, or a comma list for cv/simulate")
    p.add_argument("--targets", choices=sorted(set(TARGET_PRESETS) | {"uci", "self"}))
    p.add_argument("--out", help="output directory")
    p.add_argument("--data", help="CSV with header and a 'label' column")
    p.add_argument("--model-file", dest="model_file")
    p.add_argument("--guide-file", dest="guide_file")
    p.add_argument("--map01", action="store_true", help="map 0/1 labels to -1/+1")
    p.add_argument("--standardize", dest="standardize", action="store_true", default=None)
    p.add_argument("--no-standardize", dest="standardize", action="store_false")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = merge_config(args)
        COMMANDS[args.command](cfg)
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (ConfigError, DataError, ValueError, KeyError, jsonschema.ValidationError,
            FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return 0


if __name__ == "__main__":
    sys.exit(main())
