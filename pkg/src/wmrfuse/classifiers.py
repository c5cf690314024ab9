"""Base classifiers for subspace ensembles: weighted k-NN and CART trees.

Both estimators follow the scikit-learn API and expose :meth:`soft_output`,
the support for OMEGA_2 in [0, 1]. A ``feature_indices`` parameter restricts
the estimator to a feature subspace while still accepting full-width input,
so an ensemble can be evaluated on the original data matrix.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial.distance import cdist
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from ._types import ClassifierOutputs, ContractError, Dataset, as_labels, hard_from_soft

DISTANCES = (
    "euclidean",
    "cityblock",
    "minkowski",
    "cosine",
    "correlation",
    "mahalanobis",
    "chebyshev",
    "hamming",
)
WEIGHTINGS = ("constant", "linear", "gaussian")
CRITERIA = ("gini", "twoing", "deviance")

_ALIASES = {"chebychev": "chebyshev", "none": "constant", "city": "cityblock"}


def _canon(name: str) -> str:
    name = str(name).lower()
    return _ALIASES.get(name, name)


class _SubspaceMixin:
    """Projection of full-width input onto ``feature_indices``."""

    def _validate_fit_input(self, X, y):
        X, y = check_X_y(X, y, dtype=float)
        y = as_labels(y)
        self.n_features_in_ = X.shape[1]
        if self.feature_indices is None:
            idx = np.arange(X.shape[1])
        else:
            idx = np.asarray(self.feature_indices, dtype=np.int64)
            if idx.size == 0:
                raise ContractError("empty feature set")
            if idx.min() < 0 or idx.max() >= X.shape[1]:
                raise ContractError("feature index out of range")
        self.feature_indices_ = idx
        self.classes_ = np.array([0, 1])
        return X[:, idx], y

    def _project(self, X):
        check_is_fitted(self, "feature_indices_")
        X = check_array(X, dtype=float)
        if X.shape[1] != self.n_features_in_:
            raise ContractError(
                f"expected {self.n_features_in_} features, got {X.shape[1]}"
            )
        return X[:, self.feature_indices_]

    def predict_proba(self, X):
        soft = self.soft_output(X)
        return np.column_stack([1.0 - soft, soft])

    def predict(self, X):
        return hard_from_soft(self.soft_output(X))


class WeightedKNNClassifier(_SubspaceMixin, ClassifierMixin, BaseEstimator):
    """k-nearest-neighbour classifier with a rank-based weighting profile.

    Parameters
    ----------
    k : int
        Neighbourhood size.
    metric : str
        One of ``DISTANCES``.
    p : float
        Minkowski exponent (only used when ``metric='minkowski'``).
    weighting : str
        ``'constant'`` (plain vote), ``'linear'`` or ``'gaussian'``. The
        linear profile gives the r-th nearest neighbour (r = 0..k-1) weight
        ``(k - r) / k``; the gaussian profile uses ``exp(-(d / s)**2)`` with
        ``s`` half the distance of the k-th neighbour.
    feature_indices : array-like of int, optional
        Subspace to train on; ``None`` uses all features.
    """

    def __init__(self, k=1, metric="euclidean", p=3.0, weighting="constant", feature_indices=None):
        self.k = k
        self.metric = metric
        self.p = p
        self.weighting = weighting
        self.feature_indices = feature_indices

    def fit(self, X, y):
        Xp, y = self._validate_fit_input(X, y)
        metric = _canon(self.metric)
        weighting = _canon(self.weighting)
        if metric not in DISTANCES:
            raise ContractError(f"unknown distance {self.metric!r}")
        if weighting not in WEIGHTINGS:
            raise ContractError(f"unknown weighting {self.weighting!r}")
        if int(self.k) < 1:
            raise ContractError("k must be positive")
        if int(self.k) > Xp.shape[0]:
            raise ContractError(f"k={self.k} exceeds training size {Xp.shape[0]}")
        if metric == "minkowski" and not (np.isfinite(self.p) and self.p > 0):
            raise ContractError("Minkowski exponent must be finite and positive")
        self.metric_ = metric
        self.weighting_ = weighting
        self.X_fit_ = Xp
        self.y_fit_ = y
        self.VI_ = mahalanobis_inverse(Xp) if metric == "mahalanobis" else None
        return self

    def pairwise_distances(self, Xq):
        return pairwise_distances(Xq, self.X_fit_, self.metric_, p=self.p, VI=self.VI_)

    def soft_output(self, X):
        Xq = self._project(X)
        k = int(self.k)
        dist = self.pairwise_distances(Xq)
        order = np.argsort(dist, axis=1, kind="stable")[:, :k]
        d = np.take_along_axis(dist, order, axis=1)
        labels = self.y_fit_[order].astype(float)
        w = neighbour_weights(d, self.weighting_)
        return (w * labels).sum(axis=1) / w.sum(axis=1)


def neighbour_weights(d, weighting):
    """Weights for neighbours sorted by ascending distance, shape (n, k)."""
    d = np.asarray(d, dtype=float)
    n, k = d.shape
    if weighting == "constant":
        return np.ones_like(d)
    if weighting == "linear":
        # integer ranks keep vote sums exact; the 1/k scale cancels in the ratio
        return np.broadcast_to((k - np.arange(k)).astype(float), (n, k)).copy()
    if weighting == "gaussian":
        scale = d[:, -1:] / 2.0
        w = np.ones_like(d)
        ok = scale[:, 0] > 0
        w[ok] = np.exp(-((d[ok] / scale[ok]) ** 2))
        return w
    raise ContractError(f"unknown weighting {weighting!r}")


def mahalanobis_inverse(X):
    """Inverse of the ridge-regularised sample covariance of ``X``."""
    X = np.asarray(X, dtype=float)
    dim = X.shape[1]
    if X.shape[0] > 1:
        cov = np.atleast_2d(np.cov(X, rowvar=False))
    else:
        cov = np.zeros((dim, dim))
    lam = 1e-6 * np.trace(cov) / dim
    if lam <= 0:
        lam = 1e-6
    return np.linalg.inv(cov + lam * np.eye(dim))


def pairwise_distances(XA, XB, metric, p=3.0, VI=None):
    """Distance matrix between the rows of ``XA`` and ``XB``.

    Cosine and correlation distances involving a zero (respectively constant)
    vector are defined as 1.
    """
    XA = np.atleast_2d(np.asarray(XA, dtype=float))
    XB = np.atleast_2d(np.asarray(XB, dtype=float))
    metric = _canon(metric)
    if metric == "minkowski":
        return cdist(XA, XB, "minkowski", p=p)
    if metric == "mahalanobis":
        if VI is None:
            VI = mahalanobis_inverse(XB)
        return cdist(XA, XB, "mahalanobis", VI=VI)
    if metric in ("cosine", "correlation"):
        A, B = XA, XB
        if metric == "correlation":
            A = A - A.mean(axis=1, keepdims=True)
            B = B - B.mean(axis=1, keepdims=True)
        na = np.linalg.norm(A, axis=1)
        nb = np.linalg.norm(B, axis=1)
        denom = np.outer(na, nb)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = 1.0 - (A @ B.T) / denom
        out[denom == 0] = 1.0
        np.clip(out, 0.0, 2.0, out=out)
        return out
    if metric in DISTANCES:
        return cdist(XA, XB, metric)
    raise ContractError(f"unknown distance {metric!r}")


# ---------------------------------------------------------------------------
# CART
# ---------------------------------------------------------------------------


def node_impurity(counts, criterion):
    """Impurity of a node with class counts ``(n0, n1)``.

    Gini returns ``1 - sum p_j^2``; deviance returns ``-2 sum n_j ln(n_j/n)``.
    Twoing has no node impurity and is only defined for splits.
    """
    counts = np.asarray(counts, dtype=float)
    n = counts.sum()
    if criterion == "gini":
        return 1.0 - np.sum((counts / n) ** 2)
    if criterion == "deviance":
        nz = counts[counts > 0]
        return -2.0 * np.sum(nz * np.log(nz / n))
    raise ContractError(f"criterion {criterion!r} has no node impurity")


def split_improvement(left, right, criterion):
    """Criterion improvement of splitting a node into ``left``/``right``.

    ``left`` and ``right`` are class-count arrays of shape (..., 2); the
    computation is vectorised over the leading axes.
    """
    left = np.asarray(left, dtype=float)
    right = np.asarray(right, dtype=float)
    nl = left.sum(axis=-1)
    nr = right.sum(axis=-1)
    parent = left + right
    n = nl + nr
    if criterion == "gini":
        def gini(c, m):
            return 1.0 - np.sum((c / m[..., None]) ** 2, axis=-1)
        return gini(parent, n) - (nl / n) * gini(left, nl) - (nr / n) * gini(right, nr)
    if criterion == "twoing":
        pl = nl / n
        pr = nr / n
        diff = np.abs(left / nl[..., None] - right / nr[..., None]).sum(axis=-1)
        return pl * pr / 4.0 * diff**2
    if criterion == "deviance":
        def dev(c):
            m = c.sum(axis=-1, keepdims=True)
            with np.errstate(divide="ignore", invalid="ignore"):
                t = np.where(c > 0, c * np.log(c / m), 0.0)
            return -2.0 * t.sum(axis=-1)
        return dev(parent) - dev(left) - dev(right)
    raise ContractError(f"unknown split criterion {criterion!r}")


def best_split(Xn, yn, criterion):
    """Exhaustive best split of one node.

    Returns ``(feature, threshold, improvement)`` or ``None`` when no
    candidate exists. Thresholds are midpoints between consecutive distinct
    values; ties go to the lowest feature, then the smallest threshold.
    """
    n = Xn.shape[0]
    best = None
    best_imp = -np.inf
    tot1 = yn.sum()
    for f in range(Xn.shape[1]):
        order = np.argsort(Xn[:, f], kind="stable")
        xs = Xn[order, f]
        ys = yn[order]
        valid = np.nonzero(xs[1:] > xs[:-1])[0]
        if valid.size == 0:
            continue
        c1 = np.cumsum(ys)[valid]
        nl = valid + 1.0
        left = np.column_stack([nl - c1, c1])
        right = np.column_stack([(n - nl) - (tot1 - c1), tot1 - c1])
        imp = split_improvement(left, right, criterion)
        top = imp.max()
        # smallest threshold among candidates equal to the best up to rounding
        j = int(np.argmax(imp >= top - 1e-12 * max(1.0, abs(top))))
        if best is None or imp[j] > best_imp + 1e-12 * max(1.0, abs(best_imp)):
            best_imp = float(imp[j])
            pos = valid[j]
            best = (f, 0.5 * (xs[pos] + xs[pos + 1]), best_imp)
    return best


class CARTClassifier(_SubspaceMixin, ClassifierMixin, BaseEstimator):
    """Binary CART tree with Gini, twoing or deviance splitting.

    Growth stops when a node has fewer than ``min_split`` samples, is pure,
    or no split improves the criterion. No pruning is applied. Samples with
    ``x[feature] <= threshold`` go left.

    ``mode='regression'`` stores the mean unit-encoded label per leaf and
    ``mode='classification'`` the OMEGA_2 fraction; with a shared split
    criterion both produce the same soft output.
    """

    def __init__(self, criterion="gini", min_split=10, mode="classification", feature_indices=None):
        self.criterion = criterion
        self.min_split = min_split
        self.mode = mode
        self.feature_indices = feature_indices

    def fit(self, X, y):
        Xp, y = self._validate_fit_input(X, y)
        criterion = str(self.criterion).lower()
        if criterion not in CRITERIA:
            raise ContractError(f"unknown split criterion {self.criterion!r}")
        if int(self.min_split) < 2:
            raise ContractError("min_split must be at least 2")
        if self.mode not in ("classification", "regression"):
            raise ContractError(f"unknown mode {self.mode!r}")
        self.criterion_ = criterion
        feature, threshold, left, right, counts = [], [], [], [], []

        def new_node(idx):
            feature.append(-1)
            threshold.append(np.nan)
            left.append(-1)
            right.append(-1)
            c1 = int(y[idx].sum())
            counts.append((idx.size - c1, c1))
            return len(feature) - 1

        root = new_node(np.arange(Xp.shape[0]))
        stack = [(root, np.arange(Xp.shape[0]))]
        while stack:
            node, idx = stack.pop()
            n0, n1 = counts[node]
            if idx.size < int(self.min_split) or n0 == 0 or n1 == 0:
                continue
            split = best_split(Xp[idx], y[idx], criterion)
            if split is None or split[2] <= 0:
                continue
            f, thr, _ = split
            go_left = Xp[idx, f] <= thr
            li, ri = idx[go_left], idx[~go_left]
            feature[node] = f
            threshold[node] = thr
            left[node] = new_node(li)
            right[node] = new_node(ri)
            stack.append((right[node], ri))
            stack.append((left[node], li))

        self.tree_feature_ = np.array(feature, dtype=np.int64)
        self.tree_threshold_ = np.array(threshold, dtype=float)
        self.tree_left_ = np.array(left, dtype=np.int64)
        self.tree_right_ = np.array(right, dtype=np.int64)
        self.tree_counts_ = np.array(counts, dtype=np.int64)
        self.tree_value_ = self.tree_counts_[:, 1] / self.tree_counts_.sum(axis=1)
        return self

    @property
    def n_leaves_(self):
        return int(np.sum(self.tree_feature_ < 0))

    def apply(self, X):
        """Leaf index reached by every sample."""
        Xq = self._project(X)
        node = np.zeros(Xq.shape[0], dtype=np.int64)
        active = self.tree_feature_[node] >= 0
        while np.any(active):
            cur = node[active]
            f = self.tree_feature_[cur]
            go_left = Xq[np.nonzero(active)[0], f] <= self.tree_threshold_[cur]
            node[active] = np.where(go_left, self.tree_left_[cur], self.tree_right_[cur])
            active = self.tree_feature_[node] >= 0
        return node

    def soft_output(self, X):
        return self.tree_value_[self.apply(X)]


def make_classifier(kind, feature_indices=None, **params):
    """Build an unfitted base classifier of ``kind`` ('wknn' or 'cart')."""
    kind = str(getattr(kind, "value", kind)).lower()
    if kind == "wknn":
        return WeightedKNNClassifier(feature_indices=feature_indices, **params)
    if kind == "cart":
        return CARTClassifier(feature_indices=feature_indices, **params)
    raise ContractError(f"unknown classifier kind {kind!r}")


def train_wknn(train: Dataset, feature_indices, **params) -> WeightedKNNClassifier:
    return WeightedKNNClassifier(feature_indices=feature_indices, **params).fit(train.X, train.y)


def train_cart(train: Dataset, feature_indices, **params) -> CARTClassifier:
    return CARTClassifier(feature_indices=feature_indices, **params).fit(train.X, train.y)


def predict_soft_hard(model, X):
    """(soft, hard) outputs of a fitted base classifier."""
    soft = model.soft_output(X)
    return soft, hard_from_soft(soft)


def ensemble_outputs(models, X) -> ClassifierOutputs:
    """Stack the soft outputs of fitted members column-wise, in model order."""
    if isinstance(X, Dataset):
        X = X.X
    return ClassifierOutputs.from_columns([m.soft_output(X) for m in models])
