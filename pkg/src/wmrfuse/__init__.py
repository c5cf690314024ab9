"""Weighted-majority decision fusion for dichotomous classifier ensembles."""

from ._types import (
    ClassifierKind,
    ClassifierOutputs,
    ClassLabel,
    ContractError,
    Dataset,
    EnsembleSpec,
    hard_from_soft,
    label_to_unit,
    unit_to_label,
)
from .classifiers import CARTClassifier, WeightedKNNClassifier, ensemble_outputs
from .combiners import (
    ALL_RULES,
    DecisionFusion,
    FittedRule,
    FusionResult,
    RuleKind,
    apply_rule,
    fit_member_estimators,
    fit_rule,
    logodds,
)
from .datasets import generate_dataset, ingest_csv, write_csv
from .evaluation import (
    CellResult,
    ExperimentPlan,
    RankingTable,
    accuracy,
    bhattacharyya_distance,
    run_cell,
    run_plan,
    split_realization,
    wborda_rank,
)
from .lae import LocalAccuracyEstimator, fit_lae, prior_competence
from .subspace import FairSubspaceSplitter, fair_partition, rank_features

__version__ = "0.1.0"
