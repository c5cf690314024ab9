"""Experiment protocol: splits, ensembles, rule scoring and wBorda ranking."""

from __future__ import annotations

import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from ._types import ClassifierKind, ContractError, Dataset
from .classifiers import ensemble_outputs, make_classifier
from .combiners import ALL_RULES, RuleKind, apply_rule, fit_member_estimators, fit_rule
from .subspace import fair_partition, rank_features

TOP_POINTS = 10


@dataclass(frozen=True)
class ExperimentPlan:
    dataset_name: str
    train_size: int
    test_size: int
    k_splits: tuple = (5, 7)
    classifier_kind: ClassifierKind = ClassifierKind.WKNN
    classifier_params: dict = field(default_factory=dict)
    rules: tuple = ALL_RULES
    n_realizations: int = 10
    rng_seed: int = 0
    validation_fraction: float = 0.3
    lae_bins: object = "auto"
    validation_source: str = "train"

    def __post_init__(self):
        object.__setattr__(self, "classifier_kind", ClassifierKind(self.classifier_kind))
        object.__setattr__(self, "rules", tuple(RuleKind(r) for r in self.rules))
        object.__setattr__(self, "k_splits", tuple(int(k) for k in self.k_splits))
        if self.train_size < 1 or self.test_size < 1:
            raise ContractError("train and test sizes must be positive")
        if self.validation_source not in ("train", "test"):
            raise ContractError("validation_source must be 'train' or 'test'")
        if not 0.0 < self.validation_fraction < 1.0:
            raise ContractError("validation_fraction must lie strictly between 0 and 1")
        if self.n_realizations < 1:
            raise ContractError("need at least one realization")
        if not self.rules:
            raise ContractError("plan lists no combination rules")
        if len(set(self.rules)) != len(self.rules):
            raise ContractError("plan lists a rule twice")
        if any(k < 1 for k in self.k_splits) or not self.k_splits:
            raise ContractError("k_splits must be positive integers")

    @property
    def validation_size(self) -> int:
        pool = self.train_size if self.validation_source == "train" else self.test_size
        return int(round(self.validation_fraction * pool))


@dataclass(frozen=True)
class CellResult:
    """Averages over realizations for one (dataset, classifier, K, rule) cell.

    Accuracies and improvements are percentages / percentage points.
    ``ensemble_accuracy`` equals ``member_mean_accuracy + mean_improvement``.
    """

    dataset: str
    classifier: str
    k: int
    rule: str
    mean_improvement: float
    improvement_std: float
    ensemble_accuracy: float
    member_mean_accuracy: float
    member_max_accuracy: float
    realizations: int

    def to_dict(self):
        return asdict(self)

    @property
    def column(self):
        return (self.dataset, self.classifier, self.k)


@dataclass(frozen=True)
class RankingTable:
    cells: tuple
    points: dict
    totals: dict

    def sorted_rules(self):
        """Rules ordered by total points, then mean points, then name."""
        return sorted(self.totals, key=lambda r: (-self.totals[r]["sum"], -self.totals[r]["mean"], r))

    def columns(self):
        return sorted({c.column for c in self.cells})


def accuracy(predictions, truth) -> float:
    predictions = np.asarray(predictions)
    truth = np.asarray(truth)
    if predictions.shape != truth.shape or predictions.ndim != 1:
        raise ContractError("predictions and truth must be 1-d arrays of equal length")
    if predictions.size == 0:
        raise ContractError("accuracy of an empty prediction list")
    return 100.0 * np.count_nonzero(predictions == truth) / predictions.size


def realization_rng(seed, index):
    return np.random.default_rng([int(seed), int(index)])


def split_realization(data: Dataset, plan: ExperimentPlan, realization_index: int):
    """Random (member-train, validation, test) split for one realization.

    A permutation seeded by ``(plan.rng_seed, realization_index)`` picks
    ``train_size`` training and ``test_size`` test samples. The validation
    set takes ``round(validation_fraction * pool)`` samples from the
    training slice (``validation_source='train'``, members then train on the
    rest) or from the test slice (``'test'``, those samples are then not
    scored). The three returned parts are always disjoint.
    """
    n_train, n_test = plan.train_size, plan.test_size
    if n_train + n_test > data.n_samples:
        raise ContractError(
            f"{data.name}: {n_train}+{n_test} samples requested, only {data.n_samples} available"
        )
    n_val = plan.validation_size
    pool = n_train if plan.validation_source == "train" else n_test
    if n_val < 1 or n_val >= pool:
        raise ContractError("validation slice must be non-empty and leave samples in its pool")
    perm = realization_rng(plan.rng_seed, realization_index).permutation(data.n_samples)
    train_idx = perm[:n_train]
    test_idx = perm[n_train : n_train + n_test]
    if plan.validation_source == "train":
        fit_idx, val_idx = train_idx[: n_train - n_val], train_idx[n_train - n_val :]
    else:
        fit_idx, val_idx, test_idx = train_idx, test_idx[:n_val], test_idx[n_val:]
    parts = (data.subset(fit_idx), data.subset(val_idx), data.subset(test_idx))
    if not parts[0].has_both_classes():
        raise ContractError(f"{data.name}: member-training slice lacks a class")
    return parts


def train_members(train: Dataset, plan: ExperimentPlan, k: int):
    """Rank features, split them fairly into ``k`` groups and train one member per group."""
    if k > train.dimension:
        raise ContractError(f"k={k} exceeds dataset dimension {train.dimension}")
    partition = fair_partition(rank_features(train), k)
    members = [
        make_classifier(plan.classifier_kind, feature_indices=g, **plan.classifier_params).fit(train.X, train.y)
        for g in partition.groups
    ]
    return partition, members


def run_realization(data: Dataset, plan: ExperimentPlan, k: int, realization_index: int, keep_models=False):
    """Train, fit and score every rule of ``plan`` on one realization."""
    train, val, test = split_realization(data, plan, realization_index)
    partition, members = train_members(train, plan, k)
    val_out = ensemble_outputs(members, val)
    test_out = ensemble_outputs(members, test)
    laes, priors = fit_member_estimators(val_out.soft, val.y, plan.lae_bins)
    member_acc = [accuracy(test_out.hard[:, i], test.y) for i in range(k)]
    rule_acc = {}
    fitted = {}
    for kind in plan.rules:
        rule = fit_rule(kind, val_out.soft, val.y, laes=laes, priors=priors)
        fitted[kind] = rule
        rule_acc[kind.value] = accuracy(apply_rule(rule, test_out).decision, test.y)
    out = {
        "k": k,
        "realization": realization_index,
        "member_accuracy": member_acc,
        "rule_accuracy": rule_acc,
    }
    if keep_models:
        out.update(partition=partition, members=members, laes=laes, priors=priors, rules=fitted)
    return out


def _realization_task(args):
    data, plan, k, r = args
    try:
        return run_realization(data, plan, k, r)
    except Exception as exc:
        raise RuntimeError(f"{data.name}: k={k} realization={r}: {exc}") from exc


def summarize(plan: ExperimentPlan, dataset_name: str, k: int, runs) -> list:
    """Average realization records of one K into one CellResult per rule."""
    runs = sorted(runs, key=lambda r: r["realization"])
    member_mean = [float(np.mean(r["member_accuracy"])) for r in runs]
    member_max = [float(np.max(r["member_accuracy"])) for r in runs]
    mm = float(np.mean(member_mean))
    cells = []
    for kind in plan.rules:
        gains = [r["rule_accuracy"][kind.value] - m for r, m in zip(runs, member_mean)]
        gain = float(np.mean(gains))
        cells.append(
            CellResult(
                dataset=dataset_name,
                classifier=plan.classifier_kind.value,
                k=k,
                rule=kind.value,
                mean_improvement=gain,
                improvement_std=float(np.std(gains, ddof=1)) if len(gains) > 1 else 0.0,
                ensemble_accuracy=mm + gain,
                member_mean_accuracy=mm,
                member_max_accuracy=float(np.mean(member_max)),
                realizations=len(runs),
            )
        )
    return cells


def run_cell(data: Dataset, plan: ExperimentPlan, k: int, jobs: int = 1) -> list:
    """CellResults for every rule of ``plan`` at ensemble size ``k``."""
    tasks = [(data, plan, k, r) for r in range(plan.n_realizations)]
    runs = _map(_realization_task, tasks, jobs)
    return summarize(plan, plan.dataset_name, k, runs)


def run_plan(data: Dataset, plan: ExperimentPlan, jobs: int = 1) -> list:
    """CellResults for every K of ``plan``; realizations may run in parallel."""
    tasks = [(data, plan, k, r) for k in plan.k_splits for r in range(plan.n_realizations)]
    runs = _map(_realization_task, tasks, jobs)
    cells = []
    for k in plan.k_splits:
        cells.extend(summarize(plan, plan.dataset_name, k, [r for r in runs if r["k"] == k]))
    return cells


def _map(fn, tasks, jobs):
    if jobs is None or jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks))


def column_points(improvements: dict) -> dict:
    """wBorda points within one column.

    The best rule gets 10 points, the next distinct value 9, and so on;
    rules with exactly equal improvement share the same points.
    """
    distinct = sorted(set(improvements.values()), reverse=True)
    place = {v: i for i, v in enumerate(distinct)}
    return {rule: TOP_POINTS - place[v] for rule, v in improvements.items()}


def wborda_rank(cells) -> RankingTable:
    """Rank rules by wBorda points summed over (dataset, classifier, K) columns."""
    cells = tuple(sorted(cells, key=lambda c: (c.dataset, c.classifier, c.k, c.rule)))
    by_col = {}
    for c in cells:
        col = by_col.setdefault(c.column, {})
        if c.rule in col:
            raise ContractError(f"rule {c.rule} appears twice in column {c.column}")
        col[c.rule] = c.mean_improvement
    points = {}
    for col, imps in by_col.items():
        for rule, pts in column_points(imps).items():
            points[(rule, *col)] = pts
    totals = {}
    for rule in sorted({c.rule for c in cells}):
        pts = [p for key, p in sorted(points.items()) if key[0] == rule]
        totals[rule] = {
            "sum": int(sum(pts)),
            "mean": float(np.mean(pts)),
            "stdev": float(statistics.stdev(pts)) if len(pts) > 1 else 0.0,
            "columns": len(pts),
        }
    return RankingTable(cells, points, totals)


def _regularized_cov(X):
    X = np.asarray(X, dtype=float)
    d = X.shape[1]
    cov = np.atleast_2d(np.cov(X, rowvar=False)) if X.shape[0] > 1 else np.zeros((d, d))
    lam = 1e-6 * np.trace(cov) / d
    return cov + (lam if lam > 0 else 1e-6) * np.eye(d)


def bhattacharyya_distance(data: Dataset) -> float:
    """Gaussian-assumption Bhattacharyya distance between the two classes."""
    if not data.has_both_classes():
        raise ContractError("Bhattacharyya distance needs both classes")
    X0 = data.X[data.y == 0]
    X1 = data.X[data.y == 1]
    s0 = _regularized_cov(X0)
    s1 = _regularized_cov(X1)
    s = 0.5 * (s0 + s1)
    dm = X1.mean(axis=0) - X0.mean(axis=0)
    term1 = dm @ np.linalg.solve(s, dm) / 8.0
    _, ld = np.linalg.slogdet(s)
    _, ld0 = np.linalg.slogdet(s0)
    _, ld1 = np.linalg.slogdet(s1)
    term2 = 0.5 * (ld - 0.5 * (ld0 + ld1))
    return float(max(term1 + term2, 0.0))
