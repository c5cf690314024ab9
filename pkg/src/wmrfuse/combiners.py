"""Combination rules for dichotomous classifier ensembles.

All rules consume member outputs on the unit scale: soft scores in [0, 1]
(support for OMEGA_2) and hard votes in {0, 1}. Every function is
vectorised over samples: ``soft`` and ``votes`` are (n_samples, K) arrays.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted

from ._types import ClassifierOutputs, ContractError, as_labels, hard_from_soft
from .lae import LocalAccuracyEstimator, prior_competence


class RuleKind(str, enum.Enum):
    WMR_STATIC = "wmr_static"
    WMR_ADAPTIVE = "wmr_adaptive"
    SIMPLE_MAJORITY = "simple_majority"
    MAXIMUM = "maximum"
    SIMPLE_AVERAGE = "simple_average"
    LSE_WEIGHTED_AVERAGE = "lse_weighted_average"
    DCS_LA_NO_PRIORS = "dcs_la_no_priors"
    DCS_LA_WITH_PRIORS = "dcs_la_with_priors"

    @property
    def label(self) -> str:
        return _LABELS[self]


_LABELS = {
    RuleKind.WMR_STATIC: "WMR logodds (static)",
    RuleKind.WMR_ADAPTIVE: "WMR logodds (adaptive)",
    RuleKind.SIMPLE_MAJORITY: "simple majority",
    RuleKind.MAXIMUM: "maximum",
    RuleKind.SIMPLE_AVERAGE: "simple average",
    RuleKind.LSE_WEIGHTED_AVERAGE: "LSE-weighted average",
    RuleKind.DCS_LA_NO_PRIORS: "DCS-LA (no priors)",
    RuleKind.DCS_LA_WITH_PRIORS: "DCS-LA (with priors)",
}

ALL_RULES = tuple(RuleKind)
NEEDS_LAE = {RuleKind.WMR_ADAPTIVE, RuleKind.DCS_LA_NO_PRIORS, RuleKind.DCS_LA_WITH_PRIORS}
NEEDS_PRIORS = {RuleKind.WMR_STATIC, RuleKind.DCS_LA_WITH_PRIORS}


@dataclass(frozen=True)
class FusionResult:
    """Fused outputs for a batch of samples.

    ``score`` is on the rule's native scale and ``decision`` holds
    unit-encoded labels. ``selected_member`` is set by DCS-LA only and
    ``member_weights`` by the WMR rules.
    """

    score: np.ndarray
    decision: np.ndarray
    threshold: np.ndarray
    selected_member: Optional[np.ndarray] = None
    member_weights: Optional[np.ndarray] = None


@dataclass(frozen=True)
class FittedRule:
    kind: RuleKind
    static_weights: Optional[np.ndarray] = None
    lse_weights: Optional[np.ndarray] = None
    lae_handles: Optional[tuple] = None
    priors: Optional[np.ndarray] = None

    def __post_init__(self):
        kind = RuleKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if (self.static_weights is not None) != (kind is RuleKind.WMR_STATIC):
            raise ContractError("static weights belong to WMR_STATIC only")
        if (self.lse_weights is not None) != (kind is RuleKind.LSE_WEIGHTED_AVERAGE):
            raise ContractError("LSE weights belong to LSE_WEIGHTED_AVERAGE only")
        if (self.lae_handles is not None) != (kind in NEEDS_LAE):
            raise ContractError(f"{kind.value} LAE handles mismatch")
        if (self.priors is not None) != (kind in NEEDS_PRIORS):
            raise ContractError(f"{kind.value} priors mismatch")
        if self.static_weights is not None and not np.all(np.isfinite(self.static_weights)):
            raise ContractError("static WMR weights must be finite")


# ---------------------------------------------------------------------------
# Primitives
# ---------------------------------------------------------------------------


def logodds(p):
    """``ln(p / (1 - p))`` for p strictly inside (0, 1)."""
    p = np.asarray(p, dtype=float)
    if np.any(~(p > 0.0)) or np.any(~(p < 1.0)):
        raise ContractError("log-odds need 0 < p < 1; clamp competencies first")
    out = np.log(p) - np.log1p(-p)
    return float(out) if out.ndim == 0 else out


def threshold_decide(score, lo, hi):
    """OMEGA_2 (1) where ``score`` exceeds the half-range threshold of [lo, hi]."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    if np.any(lo > hi):
        raise ContractError("threshold range needs lo <= hi")
    t = 0.5 * (lo + hi)
    out = (np.asarray(score, dtype=float) > t).astype(np.int64)
    return int(out) if out.ndim == 0 else out


def _as_matrix(a, name):
    a = np.asarray(a, dtype=float)
    if a.ndim == 1:
        a = a[None, :]
    if a.ndim != 2 or a.shape[1] < 1:
        raise ContractError(f"{name} must be an (n_samples, K) array")
    return a


def _check_soft(soft):
    soft = _as_matrix(soft, "soft outputs")
    if np.any(~np.isfinite(soft)) or np.any(soft < 0) or np.any(soft > 1):
        raise ContractError("soft outputs must lie in [0, 1]")
    return soft


def _check_votes(votes):
    votes = _as_matrix(votes, "votes")
    if not np.all((votes == 0) | (votes == 1)):
        raise ContractError("votes must be unit-encoded labels")
    return votes


# ---------------------------------------------------------------------------
# Voting rules
# ---------------------------------------------------------------------------


def combine_wmr(weights, votes) -> FusionResult:
    """Weighted majority rule on hard votes.

    ``weights`` is (K,) for a static rule or (n_samples, K) for per-sample
    weights. A member with a negative weight is treated as voting the
    opposite label with weight ``|w|``; weights are then normalised to sum to
    one and the decision threshold is 1/2. All-zero weights give score 1/2,
    hence OMEGA_1.
    """
    votes = _check_votes(votes)
    w = np.asarray(weights, dtype=float)
    if not np.all(np.isfinite(w)):
        raise ContractError("WMR weights must be finite")
    w = np.broadcast_to(w, votes.shape)
    flipped = np.where(w < 0, 1.0 - votes, votes)
    a = np.abs(w)
    total = a.sum(axis=1)
    margin = (a * (2.0 * flipped - 1.0)).sum(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        score = np.where(total > 0, 0.5 + 0.5 * margin / total, 0.5)
    decision = (margin > 0).astype(np.int64)
    return FusionResult(score, decision, np.full(score.shape, 0.5), member_weights=np.array(w))


def fit_wmr_static(priors) -> FittedRule:
    """Static WMR with log-odds weights of the (clamped) prior competencies."""
    priors = np.asarray(priors, dtype=float).ravel()
    if priors.size < 1:
        raise ContractError("need at least one member")
    return FittedRule(RuleKind.WMR_STATIC, static_weights=np.atleast_1d(logodds(priors)), priors=priors)


def fit_wmr_adaptive_weights(lae_handles: Sequence[LocalAccuracyEstimator], soft) -> np.ndarray:
    """Per-sample log-odds weights of each member's local accuracy."""
    soft = _check_soft(soft)
    if soft.shape[1] != len(lae_handles):
        raise ContractError("one local accuracy estimator per member is required")
    acc = np.column_stack([h.local_accuracy(soft[:, i]) for i, h in enumerate(lae_handles)])
    return logodds(acc)


def combine_simple_majority(votes) -> FusionResult:
    votes = _check_votes(votes)
    k = votes.shape[1]
    return combine_wmr(np.full(k, 1.0 / k), votes)


def combine_maximum(soft) -> FusionResult:
    """Class with the largest support over all members (ties -> OMEGA_1).

    Member i supports OMEGA_2 with ``soft_i`` and OMEGA_1 with ``1 - soft_i``.
    """
    soft = _check_soft(soft)
    best2 = soft.max(axis=1)
    best1 = 1.0 - soft.min(axis=1)
    decision = (best2 > best1).astype(np.int64)
    score = np.maximum(best1, best2)
    return FusionResult(score, decision, np.full(score.shape, np.nan))


def combine_simple_average(soft) -> FusionResult:
    soft = _check_soft(soft)
    score = soft.mean(axis=1)
    return FusionResult(score, threshold_decide(score, 0.0, 1.0), np.full(score.shape, 0.5))


def fit_lse_weights(soft, y) -> FittedRule:
    """Least-squares member weights regressing unit-encoded labels on soft outputs.

    No intercept. Solved from the normal equations with a ridge term
    ``1e-8 * trace(X'X) / K`` so collinear members stay solvable.
    """
    X = _check_soft(soft)
    y = as_labels(y).astype(float)
    n, k = X.shape
    if y.size != n:
        raise ContractError("soft outputs and labels differ in length")
    if n < k:
        raise ContractError(f"LSE weights need at least K={k} validation samples, got {n}")
    gram = X.T @ X
    lam = 1e-8 * np.trace(gram) / k
    if lam <= 0:
        lam = 1e-8
    w = np.linalg.solve(gram + lam * np.eye(k), X.T @ y)
    return FittedRule(RuleKind.LSE_WEIGHTED_AVERAGE, lse_weights=w)


def combine_lse(weights, soft) -> FusionResult:
    """Weighted average with the half-range threshold of its attainable range."""
    soft = _check_soft(soft)
    w = np.asarray(weights, dtype=float)
    if w.shape != (soft.shape[1],):
        raise ContractError("one LSE weight per member is required")
    score = soft @ w
    lo = np.minimum(w, 0).sum()
    hi = np.maximum(w, 0).sum()
    decision = threshold_decide(score, lo, hi)
    return FusionResult(score, np.atleast_1d(decision), np.full(score.shape, 0.5 * (lo + hi)))


def combine_dcs_la(lae_handles, soft, votes=None, priors=None) -> FusionResult:
    """Dynamic selection of the member with the highest local accuracy.

    With ``priors`` each local accuracy is multiplied by the member's prior
    competence. Ties go to the lowest member index. The fused score is the
    selected member's soft output.
    """
    soft = _check_soft(soft)
    votes = hard_from_soft(soft) if votes is None else _check_votes(votes).astype(np.int64)
    if len(lae_handles) != soft.shape[1]:
        raise ContractError("one local accuracy estimator per member is required")
    p = np.column_stack([h.local_accuracy(soft[:, i]) for i, h in enumerate(lae_handles)])
    if priors is not None:
        p = p * np.asarray(priors, dtype=float)[None, :]
    sel = np.argmax(p, axis=1)
    rows = np.arange(soft.shape[0])
    return FusionResult(
        soft[rows, sel],
        votes[rows, sel].astype(np.int64),
        np.full(sel.shape, 0.5),
        selected_member=sel,
    )


# ---------------------------------------------------------------------------
# Fitting and applying named rules
# ---------------------------------------------------------------------------


def fit_member_estimators(val_soft, y_val, n_bins="auto"):
    """Local accuracy estimators and prior competencies for every member."""
    val_soft = _check_soft(val_soft)
    y_val = as_labels(y_val)
    correct = hard_from_soft(val_soft) == y_val[:, None]
    laes = tuple(
        LocalAccuracyEstimator(n_bins).fit(val_soft[:, i], correct[:, i])
        for i in range(val_soft.shape[1])
    )
    priors = np.array([prior_competence(correct[:, i]) for i in range(val_soft.shape[1])])
    return laes, priors


def fit_rule(kind, val_soft, y_val, laes=None, priors=None, n_bins="auto") -> FittedRule:
    """Fit one combination rule on validation outputs.

    Pre-computed ``laes``/``priors`` (from :func:`fit_member_estimators`) are
    reused when given, so several rules can share one estimation pass.
    """
    kind = RuleKind(kind)
    if (kind in NEEDS_LAE or kind in NEEDS_PRIORS) and (laes is None or priors is None):
        laes, priors = fit_member_estimators(val_soft, y_val, n_bins)
    if kind is RuleKind.WMR_STATIC:
        return fit_wmr_static(priors)
    if kind is RuleKind.LSE_WEIGHTED_AVERAGE:
        return fit_lse_weights(val_soft, y_val)
    if kind is RuleKind.WMR_ADAPTIVE or kind is RuleKind.DCS_LA_NO_PRIORS:
        return FittedRule(kind, lae_handles=tuple(laes))
    if kind is RuleKind.DCS_LA_WITH_PRIORS:
        return FittedRule(kind, lae_handles=tuple(laes), priors=np.asarray(priors, dtype=float))
    return FittedRule(kind)


def apply_rule(rule: FittedRule, soft, votes=None) -> FusionResult:
    """Fuse member outputs with a fitted rule."""
    if isinstance(soft, ClassifierOutputs):
        soft, votes = soft.soft, soft.hard
    soft = _check_soft(soft)
    votes = hard_from_soft(soft) if votes is None else _check_votes(votes)
    kind = rule.kind
    if kind is RuleKind.WMR_STATIC:
        return combine_wmr(rule.static_weights, votes)
    if kind is RuleKind.WMR_ADAPTIVE:
        return combine_wmr(fit_wmr_adaptive_weights(rule.lae_handles, soft), votes)
    if kind is RuleKind.SIMPLE_MAJORITY:
        return combine_simple_majority(votes)
    if kind is RuleKind.MAXIMUM:
        return combine_maximum(soft)
    if kind is RuleKind.SIMPLE_AVERAGE:
        return combine_simple_average(soft)
    if kind is RuleKind.LSE_WEIGHTED_AVERAGE:
        return combine_lse(rule.lse_weights, soft)
    if kind is RuleKind.DCS_LA_NO_PRIORS:
        return combine_dcs_la(rule.lae_handles, soft, votes)
    return combine_dcs_la(rule.lae_handles, soft, votes, priors=rule.priors)


class DecisionFusion(ClassifierMixin, BaseEstimator):
    """scikit-learn wrapper around one combination rule.

    ``fit`` takes the members' validation soft outputs (n_samples, K) and the
    true labels; ``predict`` fuses new soft outputs.

    Parameters
    ----------
    rule : str or RuleKind
    n_bins : int or 'auto'
        Histogram resolution of the local accuracy estimators.
    """

    def __init__(self, rule="wmr_adaptive", n_bins="auto"):
        self.rule = rule
        self.n_bins = n_bins

    def fit(self, S, y):
        S = check_array(S, dtype=float)
        self.rule_ = fit_rule(self.rule, S, y, n_bins=self.n_bins)
        self.n_features_in_ = S.shape[1]
        self.classes_ = np.array([0, 1])
        return self

    def fuse(self, S) -> FusionResult:
        check_is_fitted(self, "rule_")
        S = check_array(S, dtype=float)
        if S.shape[1] != self.n_features_in_:
            raise ContractError(f"expected {self.n_features_in_} members, got {S.shape[1]}")
        return apply_rule(self.rule_, S)

    def decision_function(self, S):
        return self.fuse(S).score

    def predict(self, S):
        return self.fuse(S).decision
