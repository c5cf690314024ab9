"""JSON archives of fitted ensembles, local accuracy estimators and rules."""

from __future__ import annotations

import json

import numpy as np

from ._types import ContractError
from .classifiers import CARTClassifier, WeightedKNNClassifier
from .combiners import FittedRule, RuleKind
from .lae import LocalAccuracyEstimator

FORMAT_TAG = "wmrfuse.archive/1"


def model_to_dict(model):
    params = {k: (v.tolist() if isinstance(v, np.ndarray) else v) for k, v in model.get_params().items()}
    params["feature_indices"] = model.feature_indices_.tolist()
    out = {"n_features_in": int(model.n_features_in_), "params": params}
    if isinstance(model, WeightedKNNClassifier):
        out["kind"] = "wknn"
        out["X_fit"] = model.X_fit_.tolist()
        out["y_fit"] = model.y_fit_.tolist()
        out["VI"] = None if model.VI_ is None else model.VI_.tolist()
    elif isinstance(model, CARTClassifier):
        out["kind"] = "cart"
        out["tree"] = {
            "feature": model.tree_feature_.tolist(),
            "threshold": [None if np.isnan(t) else float(t) for t in model.tree_threshold_],
            "left": model.tree_left_.tolist(),
            "right": model.tree_right_.tolist(),
            "counts": model.tree_counts_.tolist(),
        }
    else:
        raise ContractError(f"cannot archive {type(model).__name__}")
    return out


def model_from_dict(record):
    kind = record["kind"]
    params = dict(record["params"])
    if kind == "wknn":
        m = WeightedKNNClassifier(**params)
        m.metric_ = str(params["metric"]).lower()
        m.weighting_ = str(params["weighting"]).lower()
        m.X_fit_ = np.asarray(record["X_fit"], dtype=float)
        m.y_fit_ = np.asarray(record["y_fit"], dtype=np.int64)
        m.VI_ = None if record["VI"] is None else np.asarray(record["VI"], dtype=float)
    elif kind == "cart":
        m = CARTClassifier(**params)
        t = record["tree"]
        m.criterion_ = str(params["criterion"]).lower()
        m.tree_feature_ = np.asarray(t["feature"], dtype=np.int64)
        m.tree_threshold_ = np.array([np.nan if v is None else v for v in t["threshold"]], dtype=float)
        m.tree_left_ = np.asarray(t["left"], dtype=np.int64)
        m.tree_right_ = np.asarray(t["right"], dtype=np.int64)
        m.tree_counts_ = np.asarray(t["counts"], dtype=np.int64)
        m.tree_value_ = m.tree_counts_[:, 1] / m.tree_counts_.sum(axis=1)
    else:
        raise ContractError(f"unknown archived model kind {kind!r}")
    m.n_features_in_ = int(record["n_features_in"])
    m.feature_indices_ = np.asarray(params["feature_indices"], dtype=np.int64)
    m.classes_ = np.array([0, 1])
    return m


def rule_to_dict(rule: FittedRule):
    out = {"kind": rule.kind.value}
    if rule.static_weights is not None:
        out["static_weights"] = rule.static_weights.tolist()
    if rule.lse_weights is not None:
        out["lse_weights"] = rule.lse_weights.tolist()
    if rule.priors is not None:
        out["priors"] = np.asarray(rule.priors).tolist()
    if rule.lae_handles is not None:
        out["uses_member_lae"] = True
    return out


def rule_from_dict(record, laes):
    kind = RuleKind(record["kind"])
    arr = lambda key: None if key not in record else np.asarray(record[key], dtype=float)  # noqa: E731
    return FittedRule(
        kind,
        static_weights=arr("static_weights"),
        lse_weights=arr("lse_weights"),
        lae_handles=tuple(laes) if record.get("uses_member_lae") else None,
        priors=arr("priors"),
    )


def build_archive(plan_name, dataset, k, realization, partition, members, laes, priors, rules):
    return {
        "format": FORMAT_TAG,
        "plan": plan_name,
        "dataset": dataset,
        "k": int(k),
        "realization": int(realization),
        "partition": partition.to_lists(),
        "members": [model_to_dict(m) for m in members],
        "lae": [e.to_dict() for e in laes],
        "priors": np.asarray(priors).tolist(),
        "rules": [rule_to_dict(r) for r in rules.values()],
    }


def write_archive(record, path):
    with open(path, "w") as fh:
        json.dump(record, fh, sort_keys=True)
        fh.write("\n")


def read_archive(path):
    with open(path) as fh:
        record = json.load(fh)
    if record.get("format") != FORMAT_TAG:
        raise ContractError(f"{path}: not a {FORMAT_TAG} archive")
    return record


def load_laes(record):
    return [LocalAccuracyEstimator.from_dict(r) for r in record["lae"]]


def load_members(record):
    return [model_from_dict(r) for r in record["members"]]


def load_rules(record):
    laes = load_laes(record)
    return {r["kind"]: rule_from_dict(r, laes) for r in record["rules"]}
