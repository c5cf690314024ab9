"""Local accuracy estimation from a classifier's own soft output.

A :class:`LocalAccuracyEstimator` bins validation soft scores into
equal-frequency (dynamic-width) bins, measures the error rate per bin and
interpolates those rates with a shape-preserving cubic Hermite spline. The
estimated probability of a correct decision at score ``o`` is one minus the
clamped interpolated error rate.
"""

from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._types import ContractError

FORMAT_TAG = "wmrfuse.lae/1"


# ---------------------------------------------------------------------------
# Monotone piecewise cubic Hermite interpolation (Fritsch-Carlson)
# ---------------------------------------------------------------------------


def pchip_slopes(x, y):
    """Knot derivatives for a monotonicity-preserving cubic Hermite spline.

    Interior slopes start as the mean of the adjacent secants (zero at local
    extrema) and are then rescaled so that on every interval
    ``alpha**2 + beta**2 <= 9``, which keeps each piece monotone.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = x.size
    if n < 2:
        return np.zeros(n)
    h = np.diff(x)
    if np.any(h <= 0):
        raise ContractError("knots must be strictly ascending")
    delta = np.diff(y) / h
    m = np.empty(n)
    m[0] = delta[0]
    m[-1] = delta[-1]
    for k in range(1, n - 1):
        if delta[k - 1] * delta[k] <= 0:
            m[k] = 0.0
        else:
            m[k] = 0.5 * (delta[k - 1] + delta[k])
    for k in range(n - 1):
        if delta[k] == 0:
            m[k] = 0.0
            m[k + 1] = 0.0
            continue
        a = m[k] / delta[k]
        b = m[k + 1] / delta[k]
        r = math.hypot(a, b)
        if r > 3.0:
            tau = 3.0 / r
            m[k] = tau * a * delta[k]
            m[k + 1] = tau * b * delta[k]
    return m


def hermite_eval(x, y, m, xq):
    """Evaluate the cubic Hermite spline ``(x, y, m)`` at ``xq``.

    Queries outside ``[x[0], x[-1]]`` take the value of the nearest knot.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xq = np.asarray(xq, dtype=float)
    if x.size == 1:
        return np.full(xq.shape, y[0])
    xc = np.clip(xq, x[0], x[-1])
    k = np.clip(np.searchsorted(x, xc, side="right") - 1, 0, x.size - 2)
    h = x[k + 1] - x[k]
    t = (xc - x[k]) / h
    t2 = t * t
    t3 = t2 * t
    h00 = 2 * t3 - 3 * t2 + 1
    h10 = t3 - 2 * t2 + t
    h01 = -2 * t3 + 3 * t2
    h11 = t3 - t2
    return h00 * y[k] + h10 * h * m[k] + h01 * y[k + 1] + h11 * h * m[k + 1]


# ---------------------------------------------------------------------------
# Dynamic-width histogram
# ---------------------------------------------------------------------------


def resolve_bin_count(n_records, n_bins="auto"):
    """Number of bins actually used for ``n_records`` validation records."""
    if n_records < 1:
        raise ContractError("at least one validation record is required")
    if n_bins is None or n_bins == "auto":
        m = max(5, int(math.isqrt(n_records)))
        m = min(m, n_records // 5)
    else:
        m = int(n_bins)
        if m < 1:
            raise ContractError("n_bins must be positive")
        m = min(m, n_records // 2)
    return max(1, m)


def equal_frequency_edges(scores, n_bins):
    """Ascending bin edges with roughly ``len(scores) / n_bins`` per bin.

    Edges are taken at sorted positions ``floor(m * N / M)``; tied scores at
    a cut stay together in the upper bin and coinciding edges are merged.
    """
    s = np.sort(np.asarray(scores, dtype=float))
    n = s.size
    cuts = np.unique([s[(m * n) // n_bins] for m in range(1, n_bins)])
    cuts = cuts[cuts > s[0]]
    # a cut equal to the maximum leaves that tie group alone in the closed last bin
    return np.concatenate([[s[0]], cuts, [s[-1]]])


def assign_bins(edges, scores):
    """Bin index of each score for half-open bins ``[b_m, b_m+1)``; last bin closed."""
    n_bins = edges.size - 1
    idx = np.searchsorted(edges, np.asarray(scores, dtype=float), side="right") - 1
    return np.clip(idx, 0, n_bins - 1)


class LocalAccuracyEstimator(BaseEstimator):
    """Estimate P(correct | soft output) for one classifier.

    Parameters
    ----------
    n_bins : int or 'auto'
        Requested number of equal-frequency bins. ``'auto'`` uses
        ``max(5, floor(sqrt(N)))`` capped so every bin holds at least five
        records. An explicit count is reduced until each bin can hold two
        records.

    Attributes
    ----------
    bin_edges_ : ndarray of shape (M + 1,)
    bin_counts_, bin_error_counts_ : ndarray of shape (M,)
    bin_centers_ : ndarray of shape (M,)
        Median score inside each bin; these are the spline knots.
    error_rates_ : ndarray of shape (M,)
    slopes_ : ndarray of shape (M,)
    clamp_eps_ : float
        ``1 / (2 N)``; estimated error rates are clamped to
        ``[clamp_eps_, 1 - clamp_eps_]``.
    """

    def __init__(self, n_bins="auto"):
        self.n_bins = n_bins

    def fit(self, scores, correct):
        scores = np.asarray(scores, dtype=float).ravel()
        correct = np.asarray(correct, dtype=bool).ravel()
        if scores.size != correct.size:
            raise ContractError("scores and correct flags differ in length")
        if scores.size == 0:
            raise ContractError("cannot fit a local accuracy estimator on no records")
        if not np.all(np.isfinite(scores)):
            raise ContractError("scores must be finite")
        order = np.argsort(scores, kind="stable")
        self.scores_ = scores[order]
        self.correct_ = correct[order]
        n = scores.size
        n_bins = resolve_bin_count(n, self.n_bins)
        edges = equal_frequency_edges(self.scores_, n_bins)
        bins = assign_bins(edges, self.scores_)
        m = edges.size - 1
        counts = np.bincount(bins, minlength=m)
        errors = np.bincount(bins, weights=~self.correct_, minlength=m).astype(np.int64)
        centers = np.array([np.median(self.scores_[bins == b]) for b in range(m)])
        self.bin_edges_ = edges
        self.bin_counts_ = counts
        self.bin_error_counts_ = errors
        self.bin_centers_ = centers
        self.error_rates_ = errors / counts
        self.slopes_ = pchip_slopes(centers, self.error_rates_)
        self.clamp_eps_ = 1.0 / (2.0 * n)
        return self

    @property
    def n_records_(self):
        return int(self.scores_.size)

    def raw_error_rate(self, scores):
        """Interpolated error rate before clamping."""
        check_is_fitted(self, "slopes_")
        return hermite_eval(self.bin_centers_, self.error_rates_, self.slopes_, scores)

    def error_probability(self, scores):
        eps = self.clamp_eps_
        return np.clip(self.raw_error_rate(scores), eps, 1.0 - eps)

    def local_accuracy(self, scores):
        """Estimated probability that the classifier is correct at ``scores``."""
        out = 1.0 - self.error_probability(scores)
        return float(out) if np.ndim(out) == 0 else out

    transform = local_accuracy

    def prior(self):
        """Overall validation competence, clamped like the local estimates."""
        return prior_competence(self.correct_)

    def update(self, new_scores, new_correct):
        """New estimator fitted on the stored records plus the new ones."""
        check_is_fitted(self, "slopes_")
        new_scores = np.asarray(new_scores, dtype=float).ravel()
        new_correct = np.asarray(new_correct, dtype=bool).ravel()
        return LocalAccuracyEstimator(self.n_bins).fit(
            np.concatenate([self.scores_, new_scores]),
            np.concatenate([self.correct_, new_correct]),
        )

    def to_dict(self):
        check_is_fitted(self, "slopes_")
        return {
            "format": FORMAT_TAG,
            "n_bins": self.n_bins,
            "clamp_eps": self.clamp_eps_,
            "bin_edges": self.bin_edges_.tolist(),
            "bin_counts": self.bin_counts_.tolist(),
            "bin_error_counts": self.bin_error_counts_.tolist(),
            "bin_centers": self.bin_centers_.tolist(),
            "error_rates": self.error_rates_.tolist(),
            "slopes": self.slopes_.tolist(),
            "scores": self.scores_.tolist(),
            "correct": self.correct_.astype(int).tolist(),
        }

    @classmethod
    def from_dict(cls, record):
        if record.get("format") != FORMAT_TAG:
            raise ContractError(f"not a {FORMAT_TAG} record")
        est = cls(record["n_bins"])
        est.scores_ = np.asarray(record["scores"], dtype=float)
        est.correct_ = np.asarray(record["correct"], dtype=bool)
        est.bin_edges_ = np.asarray(record["bin_edges"], dtype=float)
        est.bin_counts_ = np.asarray(record["bin_counts"], dtype=np.int64)
        est.bin_error_counts_ = np.asarray(record["bin_error_counts"], dtype=np.int64)
        est.bin_centers_ = np.asarray(record["bin_centers"], dtype=float)
        est.error_rates_ = np.asarray(record["error_rates"], dtype=float)
        est.slopes_ = np.asarray(record["slopes"], dtype=float)
        est.clamp_eps_ = float(record["clamp_eps"])
        return est


def fit_lae(scores, correct, n_bins="auto") -> LocalAccuracyEstimator:
    return LocalAccuracyEstimator(n_bins).fit(scores, correct)


def local_accuracy(est: LocalAccuracyEstimator, score):
    return est.local_accuracy(score)


def update_lae(est: LocalAccuracyEstimator, new_scores, new_correct) -> LocalAccuracyEstimator:
    return est.update(new_scores, new_correct)


def prior_competence(correct) -> float:
    """Fraction of correct validation decisions, clamped to ``[1/(2N), 1 - 1/(2N)]``."""
    correct = np.asarray(correct, dtype=bool).ravel()
    if correct.size == 0:
        raise ContractError("prior competence needs at least one record")
    eps = 1.0 / (2.0 * correct.size)
    return float(np.clip(correct.mean(), eps, 1.0 - eps))
