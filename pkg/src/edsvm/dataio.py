"""CSV and JSON helpers with deterministic formatting."""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .kernels import DataError, Dataset

LABEL = "label"


def read_csv(path, map01: bool = False, require_label: bool = True):
    """Return (Dataset or features, feature names). Header row and a ``label`` column expected."""
    path = Path(path)
    if not path.is_file():
        raise DataError(f"no such data file: {path}")
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise DataError(f"{path} is empty")
    header = [h.strip() for h in rows[0]]
    body = [r for r in rows[1:] if r and any(c.strip() for c in r)]
    if any(len(r) != len(header) for r in body):
        raise DataError(f"{path}: ragged rows")
    has_label = LABEL in header
    if require_label and not has_label:
        raise DataError(f"{path}: missing '{LABEL}' column")
    try:
        M = np.array([[float(c) for c in r] for r in body], dtype=float).reshape(len(body), len(header))
    except ValueError as exc:
        raise DataError(f"{path}: non-numeric entry ({exc})") from None
    feat_cols = [i for i, h in enumerate(header) if h != LABEL]
    names = [header[i] for i in feat_cols]
    X = M[:, feat_cols]
    if not has_label:
        return X, names
    y = M[:, header.index(LABEL)]
    if map01:
        if not np.all((y == 0) | (y == 1)):
            raise DataError("--map01 given but labels are not all 0 or 1")
        y = np.where(y == 1, 1.0, -1.0)
    elif not np.all((y == 1) | (y == -1)):
        raise DataError("labels must be -1/+1 (use --map01 for 0/1 labels)")
    return Dataset(X, y), names


def fmt(v) -> str:
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return repr(v)


def write_csv(path, header, rows) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([c if isinstance(c, str) else fmt(c) for c in r])


def _plain(obj):
    """Convert numpy scalars/arrays and non-finite floats into JSON-safe values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else fmt(v)
    return obj


def dumps(obj) -> str:
    return json.dumps(_plain(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_json(path, obj) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8", newline="\n")


def write_text(path, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8", newline="\n")
