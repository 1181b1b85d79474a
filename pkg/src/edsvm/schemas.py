"""JSON schemas for the run configuration and every JSON file the CLI writes."""
from __future__ import annotations

import jsonschema

_num = {"type": "number"}
_nums = {"type": "array", "items": _num, "minItems": 1}
_str_or_num = {"anyOf": [{"type": "number"}, {"type": "string", "enum": ["inf", "-inf", "nan"]}]}
_targets = {"type": "string",
            "enum": ["min", "mean", "max", "linex", "uci-cedsvm", "uci-lsedsvm", "uci", "self"]}
_family = {"type": "string", "enum": ["CSVM", "LSSVM", "LINEXSVM", "CEDSVM", "LSEDSVM"]}

KERNEL = {
    "type": "object",
    "properties": {"kind": {"enum": ["linear", "rbf", "poly"]}, "gamma": _num,
                   "degree": {"type": "integer", "minimum": 1}, "coef0": _num},
    "required": ["kind"],
    "additionalProperties": False,
}

GRID = {
    "type": "object",
    "properties": {"C_values": _nums, "omega_values": _nums, "a_values": _nums,
                   "gamma_values": _nums, "folds": {"type": "integer", "minimum": 2},
                   "seed": {"type": "integer"}},
    "additionalProperties": False,
}

CONFIG = {
    "type": "object",
    "properties": {
        "data": {"type": "string"},
        "map01": {"type": "boolean"},
        "seed": {"type": "integer"},
        "out": {"type": "string"},
        "model": _family,
        "models": {"type": "array", "items": _family, "minItems": 1},
        "model_file": {"type": "string"},
        "guide_file": {"type": "string"},
        "kernel": {"anyOf": [{"enum": ["linear", "rbf", "poly"]}, KERNEL]},
        "C": {"type": "number", "exclusiveMinimum": 0},
        "omega": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
        "a": {"type": "number"},
        "gamma": {"type": "number", "exclusiveMinimum": 0},
        "targets": {"anyOf": [_targets, {"type": "array", "items": _targets, "minItems": 1}]},
        "elite_eps": {"type": "number", "exclusiveMinimum": 0},
        "standardize": {"type": "boolean"},
        "replicates": {"type": "integer", "minimum": 1},
        "test_fraction": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "bayes_mc": {"type": "integer", "minimum": 10000},
        "grid_size": {"type": "integer", "minimum": 2},
        "tune_tol": {"type": "number", "exclusiveMinimum": 0},
        "fit_tol": {"type": "number", "exclusiveMinimum": 0},
        "grid": GRID,
    },
    "additionalProperties": False,
}

GUIDE = {
    "type": "object",
    "properties": {"elite": {"type": "array", "items": {"type": "integer", "minimum": 0}},
                   "targets": {"type": "array", "items": {"type": "number", "minimum": 0}},
                   "source": {"type": "array", "items": {"type": "string"}}},
    "required": ["elite", "targets", "source"],
    "additionalProperties": False,
}

MODEL = {
    "type": "object",
    "properties": {
        "format": {"const": "edsvm-model-1"},
        "variant": _family,
        "kernel": KERNEL,
        "hyper": {"type": "object", "additionalProperties": _num},
        "beta0": _num,
        "alpha": {"type": "array", "items": _num},
        "train_features": {"type": "array", "items": {"type": "array", "items": _num}},
        "train_labels": {"type": "array", "items": {"enum": [-1, 1]}},
        "feature_names": {"type": "array", "items": {"type": "string"}},
        "standardizer": {"anyOf": [{"type": "null"}, {
            "type": "object", "properties": {"mean": _nums, "scale": _nums},
            "required": ["mean", "scale"], "additionalProperties": False}]},
        "guide": {"anyOf": [{"type": "null"}, GUIDE]},
    },
    "required": ["format", "variant", "kernel", "hyper", "beta0", "alpha", "train_features",
                 "train_labels", "guide"],
    "additionalProperties": False,
}

_metric_summary = {"type": "object", "properties": {"mean": _num, "sd": _num},
                   "required": ["mean", "sd"]}

REPORT = {
    "type": "object",
    "properties": {
        "config": {"type": "object"},
        "pr_auc_method": {"type": "string"},
        "summary": {"type": "array", "items": {
            "type": "object",
            "properties": {"block": {"type": "string"}, "model": _family,
                           "count": {"type": "integer"},
                           **{m: _metric_summary for m in ("accuracy", "sensitivity", "specificity",
                                                           "precision", "f1", "roc_auc", "pr_auc")}},
            "required": ["block", "model", "count", "accuracy", "roc_auc", "pr_auc"]}},
        "runs": {"type": "array"},
        "bayes_accuracy": {"type": "array", "items": _num},
        "bayes_accuracy_mean": _num,
    },
    "required": ["config", "summary", "runs"],
}

DIAGNOSTICS = {
    "type": "object",
    "properties": {
        "report": {
            "type": "object",
            "properties": {k: _str_or_num for k in (
                "e_m_star", "e_m_star_ls", "lambda_n_sq", "lambda_svm_sq", "gamma_ls",
                "gamma_ls_svm", "ratio", "ratio_ls", "hinge_risk_ref", "ls_risk_ref")},
            "required": ["e_m_star", "lambda_n_sq", "lambda_svm_sq", "gamma_ls", "gamma_ls_svm",
                         "ratio", "hinge_risk_ref", "ls_risk_ref", "recommendation"],
        },
        "calibration": {"type": "object"},
        "reference": {"type": "object"},
        "recommendation": {"type": "string"},
    },
    "required": ["report", "calibration", "reference", "recommendation"],
}


def validate(instance, schema) -> None:
    jsonschema.validate(instance, schema)
