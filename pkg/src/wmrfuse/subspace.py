"""Feature ranking and "fair" partitioning into disjoint subspaces."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted, check_X_y

from ._types import ContractError, Dataset, as_labels

SIGNIFICANCE_FLOOR = 1e-12
SIGNIFICANCE_CAP = 1e12


@dataclass(frozen=True)
class FeatureRanking:
    """Features sorted by decreasing significance."""

    indices: np.ndarray
    significance: np.ndarray

    @property
    def log_significance(self) -> np.ndarray:
        return np.log(self.significance)

    def __len__(self):
        return self.indices.size


@dataclass(frozen=True)
class SubspacePartition:
    groups: tuple
    group_scores: np.ndarray

    @property
    def spread(self) -> float:
        return float(self.group_scores.max() - self.group_scores.min())

    def to_lists(self):
        return [[int(i) for i in g] for g in self.groups]


def anova_f(X, y):
    """One-way ANOVA F statistic of every column of ``X`` against binary ``y``.

    Columns with zero within-class scatter get ``inf`` when the class means
    differ and 0 when they do not.
    """
    X = np.asarray(X, dtype=float)
    y = as_labels(y)
    n = y.size
    groups = [X[y == c] for c in (0, 1)]
    if any(g.shape[0] == 0 for g in groups):
        raise ContractError("feature ranking needs both classes")
    grand = X.mean(axis=0)
    ss_between = sum(g.shape[0] * (g.mean(axis=0) - grand) ** 2 for g in groups)
    ss_within = sum(((g - g.mean(axis=0)) ** 2).sum(axis=0) for g in groups)
    df_within = n - 2
    if df_within < 1:
        raise ContractError("feature ranking needs at least three samples")
    with np.errstate(divide="ignore", invalid="ignore"):
        f = ss_between / (ss_within / df_within)
    f[(ss_between == 0)] = 0.0
    return f


def rank_features(data: Dataset) -> FeatureRanking:
    """Rank features by their class-discrimination F statistic.

    Significances are clipped to ``[1e-12, 1e12]`` so their logs are finite;
    ties are broken by ascending feature index.
    """
    if not data.has_both_classes():
        raise ContractError("feature ranking needs both classes")
    f = np.clip(anova_f(data.X, data.y), SIGNIFICANCE_FLOOR, SIGNIFICANCE_CAP)
    order = np.lexsort((np.arange(f.size), -f))
    return FeatureRanking(order.astype(np.int64), f[order])


def fair_partition(ranking: FeatureRanking, k: int) -> SubspacePartition:
    """Split ranked features into ``k`` disjoint groups of similar log-significance.

    Features are paired best-with-worst (1st with last, 2nd with
    second-to-last, ...); pairs are handed out in order, each to an empty
    group if one remains and otherwise to the group with the smallest
    log-significance sum (lowest index on ties). Unpaired middle features
    follow the same rule. When D - k < floor(D / 2), only D - k pairs are
    formed so that every group receives at least one feature.
    """
    d = len(ranking)
    k = int(k)
    if k < 1:
        raise ContractError("k must be positive")
    if k > d:
        raise ContractError(f"cannot split {d} features into {k} groups")
    idx = ranking.indices
    logs = ranking.log_significance
    n_pairs = min(d // 2, d - k)
    units = [[idx[i], idx[d - 1 - i]] for i in range(n_pairs)]
    units += [[idx[i]] for i in range(n_pairs, d - n_pairs)]
    pos = {int(f): r for r, f in enumerate(idx)}

    groups = [[] for _ in range(k)]
    sums = np.zeros(k)
    for unit in units:
        empty = [g for g in range(k) if not groups[g]]
        target = empty[0] if empty else int(np.argmin(sums))
        groups[target].extend(int(f) for f in unit)
        sums[target] += sum(logs[pos[int(f)]] for f in unit)
    return SubspacePartition(tuple(np.array(sorted(g), dtype=np.int64) for g in groups), sums)


class FairSubspaceSplitter(TransformerMixin, BaseEstimator):
    """Learn a fair feature partition; ``transform`` returns one block per group."""

    def __init__(self, k=5):
        self.k = k

    def fit(self, X, y):
        X, y = check_X_y(X, y, dtype=float)
        self.ranking_ = rank_features(Dataset(X, y))
        self.partition_ = fair_partition(self.ranking_, self.k)
        self.n_features_in_ = X.shape[1]
        return self

    @property
    def groups_(self):
        check_is_fitted(self, "partition_")
        return self.partition_.groups

    def transform(self, X):
        check_is_fitted(self, "partition_")
        X = np.asarray(X, dtype=float)
        return [X[:, g] for g in self.partition_.groups]
