"""Shared vocabulary: class labels, datasets and ensemble outputs."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np


class ContractError(ValueError):
    """Raised when an input violates a documented precondition."""


class ClassLabel(enum.IntEnum):
    """Dichotomous class label, unit-encoded (OMEGA_1 -> 0, OMEGA_2 -> 1)."""

    OMEGA_1 = 0
    OMEGA_2 = 1


def hard_from_soft(soft_score):
    """Threshold a soft score in [0, 1] at 1/2.

    Exact 1/2 maps to ``OMEGA_1``. Accepts scalars or arrays; arrays return
    an integer array of unit-encoded labels.
    """
    arr = np.asarray(soft_score, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
        raise ContractError("soft score must lie in [0, 1]")
    out = (arr > 0.5).astype(np.int64)
    if out.ndim == 0:
        return ClassLabel(int(out))
    return out


def label_to_unit(label) -> float:
    return float(ClassLabel(label).value)


def unit_to_label(value) -> ClassLabel:
    if value not in (0, 1):
        raise ContractError(f"unit value must be 0 or 1, got {value!r}")
    return ClassLabel(int(value))


def as_labels(y) -> np.ndarray:
    """Validate a label vector and return it as an int array of {0, 1}."""
    y = np.asarray(y)
    if y.ndim != 1:
        raise ContractError("labels must be one-dimensional")
    if y.dtype.kind not in "biuf":
        raise ContractError("labels must be unit-encoded (0 for OMEGA_1, 1 for OMEGA_2)")
    if not np.all((y == 0) | (y == 1)):
        raise ContractError("labels must be unit-encoded (0 for OMEGA_1, 1 for OMEGA_2)")
    return y.astype(np.int64)


@dataclass(frozen=True)
class Dataset:
    """Labeled feature matrix with binary labels.

    ``X`` has shape (n_samples, n_features); ``y`` holds unit-encoded labels.
    Arrays are made read-only on construction.
    """

    X: np.ndarray
    y: np.ndarray
    name: str = "dataset"
    feature_names: Optional[tuple] = None

    def __post_init__(self):
        X = np.array(self.X, dtype=float)
        if X.ndim != 2 or X.shape[0] == 0 or X.shape[1] == 0:
            raise ContractError("X must be a non-empty 2-d array")
        if not np.all(np.isfinite(X)):
            raise ContractError("features must be finite")
        y = as_labels(self.y)
        if y.shape[0] != X.shape[0]:
            raise ContractError("X and y have different lengths")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        if self.feature_names is not None:
            names = tuple(str(n) for n in self.feature_names)
            if len(names) != X.shape[1]:
                raise ContractError("feature_names length does not match dimension")
            object.__setattr__(self, "feature_names", names)

    @property
    def n_samples(self) -> int:
        return self.X.shape[0]

    @property
    def dimension(self) -> int:
        return self.X.shape[1]

    def has_both_classes(self) -> bool:
        return bool(np.any(self.y == 0) and np.any(self.y == 1))

    def subset(self, indices, name: Optional[str] = None) -> "Dataset":
        idx = np.asarray(indices, dtype=np.int64)
        return Dataset(self.X[idx], self.y[idx], name or self.name, self.feature_names)

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.name == other.name
            and self.feature_names == other.feature_names
            and np.array_equal(self.X, other.X)
            and np.array_equal(self.y, other.y)
        )

    __hash__ = None


@dataclass(frozen=True)
class ClassifierOutputs:
    """Soft and hard outputs of K ensemble members on n samples.

    ``soft[s, i]`` is member i's support for OMEGA_2 on sample s; ``hard`` is
    always derived from ``soft`` by :func:`hard_from_soft`.
    """

    soft: np.ndarray
    hard: np.ndarray = field(init=False)

    def __post_init__(self):
        soft = np.array(self.soft, dtype=float)
        if soft.ndim != 2 or soft.shape[1] < 1:
            raise ContractError("soft outputs must be an (n_samples, K) matrix with K >= 1")
        hard = hard_from_soft(soft)
        soft.setflags(write=False)
        hard.setflags(write=False)
        object.__setattr__(self, "soft", soft)
        object.__setattr__(self, "hard", hard)

    @property
    def n_members(self) -> int:
        return self.soft.shape[1]

    @property
    def n_samples(self) -> int:
        return self.soft.shape[0]

    @classmethod
    def from_columns(cls, columns: Sequence[np.ndarray]) -> "ClassifierOutputs":
        return cls(np.column_stack([np.asarray(c, dtype=float) for c in columns]))


class ClassifierKind(str, enum.Enum):
    WKNN = "wknn"
    CART = "cart"


@dataclass(frozen=True)
class EnsembleSpec:
    k_splits: int
    classifier_kind: ClassifierKind
    classifier_params: dict
    rng_seed: int = 0

    def __post_init__(self):
        if self.k_splits < 1:
            raise ContractError("k_splits must be positive")
        object.__setattr__(self, "classifier_kind", ClassifierKind(self.classifier_kind))

    def check_dimension(self, dimension: int) -> None:
        if self.k_splits > dimension:
            raise ContractError(
                f"k_splits={self.k_splits} exceeds dataset dimension {dimension}"
            )
