"""Synthetic benchmark generators and CSV ingestion."""

from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

from ._types import ContractError, Dataset

GENERATORS = ("twonorm", "ringnorm", "waveform")
DIMENSIONS = {"twonorm": 20, "ringnorm": 20, "waveform": 21}


def _balanced_labels(n, rng):
    y = np.zeros(n, dtype=np.int64)
    y[n // 2:] = 1
    return rng.permutation(y)


def make_twonorm(n, seed=0):
    """Two unit-covariance 20-d Gaussians centred at +/- (a, ..., a), a = 2/sqrt(20).

    OMEGA_2 is the class centred at +a.
    """
    rng = np.random.default_rng(seed)
    y = _balanced_labels(n, rng)
    a = 2.0 / math.sqrt(20)
    X = rng.standard_normal((n, 20)) + np.where(y == 1, a, -a)[:, None]
    return Dataset(X, y, "twonorm")


def make_ringnorm(n, seed=0):
    """OMEGA_1 ~ N(0, 4 I); OMEGA_2 ~ N((a, ..., a), I) with a = 1/sqrt(20)."""
    rng = np.random.default_rng(seed)
    y = _balanced_labels(n, rng)
    a = 1.0 / math.sqrt(20)
    z = rng.standard_normal((n, 20))
    X = np.where(y[:, None] == 1, z + a, 2.0 * z)
    return Dataset(X, y, "ringnorm")


def waveform_bases():
    """The three shifted triangular base waves on 21 points."""
    i = np.arange(1, 22)
    h1 = np.maximum(6 - np.abs(i - 11), 0).astype(float)
    h2 = np.maximum(6 - np.abs(i - 15), 0).astype(float)
    h3 = np.maximum(6 - np.abs(i - 7), 0).astype(float)
    return h1, h2, h3


def make_waveform(n, seed=0):
    """Two-class waveform: u*h1 + (1-u)*h2 (OMEGA_1) vs u*h1 + (1-u)*h3 (OMEGA_2).

    ``u ~ U(0, 1)`` per sample and unit Gaussian noise on all 21 features.
    """
    rng = np.random.default_rng(seed)
    y = _balanced_labels(n, rng)
    h1, h2, h3 = waveform_bases()
    u = rng.uniform(size=(n, 1))
    other = np.where(y[:, None] == 1, h3, h2)
    X = u * h1 + (1.0 - u) * other + rng.standard_normal((n, 21))
    return Dataset(X, y, "waveform")


def generate_dataset(name, n, seed=0) -> Dataset:
    name = str(name).lower()
    if n < 2:
        raise ContractError("generated datasets need n >= 2")
    makers = {"twonorm": make_twonorm, "ringnorm": make_ringnorm, "waveform": make_waveform}
    if name not in makers:
        raise ContractError(f"unknown generator {name!r}; choose from {', '.join(GENERATORS)}")
    return makers[name](int(n), seed)


def write_csv(data: Dataset, path, label_column="label", positive_label="1", negative_label="0"):
    """Write ``data`` as comma-separated values with a header row.

    Floats are written with ``repr`` so that re-ingestion is exact.
    """
    names = data.feature_names or tuple(f"x{i}" for i in range(data.dimension))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([*names, label_column])
        for row, lab in zip(data.X, data.y):
            w.writerow([*(repr(float(v)) for v in row), positive_label if lab else negative_label])


def ingest_csv(path, label_column="label", positive_label="1", name=None) -> Dataset:
    """Read a CSV file with a header row and exactly two label values.

    ``label_column`` is a header name or a zero-based column index. Rows
    whose label equals ``positive_label`` become OMEGA_2.
    """
    path = Path(path)
    if not path.exists():
        raise ContractError(f"{path}: no such file")
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ContractError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    if isinstance(label_column, int):
        col = label_column
    elif str(label_column) in header:
        col = header.index(str(label_column))
    elif str(label_column).isdigit():
        col = int(label_column)
    else:
        raise ContractError(f"{path}: missing label column {label_column!r}")
    if not 0 <= col < len(header):
        raise ContractError(f"{path}: label column index {col} out of range")
    feature_cols = [j for j in range(len(header)) if j != col]
    if not feature_cols:
        raise ContractError(f"{path}: no feature columns")
    X, labels = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise ContractError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
        try:
            vals = [float(row[j]) for j in feature_cols]
        except ValueError as exc:
            raise ContractError(f"{path}:{lineno}: non-numeric feature ({exc})") from None
        if not all(math.isfinite(v) for v in vals):
            raise ContractError(f"{path}:{lineno}: non-finite feature value")
        X.append(vals)
        labels.append(row[col].strip())
    if not X:
        raise ContractError(f"{path}: no data rows")
    distinct = sorted(set(labels))
    if len(distinct) > 2:
        raise ContractError(f"{path}: expected two label values, found {len(distinct)}: {distinct[:5]}")
    positive_label = str(positive_label)
    if positive_label not in distinct:
        raise ContractError(f"{path}: positive label {positive_label!r} not present")
    y = np.array([1 if lab == positive_label else 0 for lab in labels], dtype=np.int64)
    return Dataset(np.array(X), y, name or path.stem, tuple(header[j] for j in feature_cols))
