import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import binom

import reference_tables
from wmrfuse import ContractError, Dataset, ExperimentPlan, RuleKind
from wmrfuse.combiners import combine_simple_majority
from wmrfuse.datasets import generate_dataset
from wmrfuse.evaluation import (
    CellResult,
    accuracy,
    bhattacharyya_distance,
    column_points,
    run_cell,
    split_realization,
    wborda_rank,
)


def twonorm_plan(**kw):
    base = dict(dataset_name="twonorm", train_size=400, test_size=7000, k_splits=(5,))
    base.update(kw)
    return ExperimentPlan(**base)


# --- splits -----------------------------------------------------------------------


def test_split_sizes_from_training_pool():
    data = generate_dataset("twonorm", 7400, 1)
    train, val, test = split_realization(data, twonorm_plan(), 0)
    assert (train.n_samples, val.n_samples, test.n_samples) == (280, 120, 7000)


def test_split_sizes_from_test_pool():
    data = generate_dataset("twonorm", 7400, 1)
    train, val, test = split_realization(data, twonorm_plan(validation_source="test"), 0)
    assert (train.n_samples, val.n_samples, test.n_samples) == (400, 2100, 4900)


def _row_keys(d):
    return {row.tobytes() for row in d.X}


@pytest.mark.parametrize("source", ["train", "test"])
def test_split_is_disjoint_and_deterministic(source):
    data = generate_dataset("ringnorm", 1000, 2)
    plan = ExperimentPlan("ringnorm", 300, 700, validation_source=source)
    a = split_realization(data, plan, 3)
    b = split_realization(data, plan, 3)
    for x, y in zip(a, b):
        assert x == y
    keys = [_row_keys(p) for p in a]
    assert sum(len(k) for k in keys) == 1000
    assert len(set().union(*keys)) == 1000
    assert split_realization(data, plan, 4)[0] != a[0]


def test_zero_validation_fraction_rejected():
    with pytest.raises(ContractError):
        twonorm_plan(validation_fraction=0.0)


def test_split_rejects_oversized_plan():
    data = generate_dataset("twonorm", 100, 1)
    with pytest.raises(ContractError):
        split_realization(data, twonorm_plan(), 0)


# --- accuracy -------------------------------------------------------------------------


def test_accuracy_examples():
    t = np.array([0, 1, 1, 0])
    assert accuracy(t, t) == 100.0
    assert accuracy(1 - t, t) == 0.0
    assert accuracy([0, 1, 1, 1], t) == 75.0
    with pytest.raises(ContractError):
        accuracy([0, 1], [0])


# --- cells ------------------------------------------------------------------------------


def _copies(shift, seed):
    rng = np.random.default_rng(seed)
    y = np.tile([0, 1], 600)
    x = rng.normal(size=1200) + shift * (2 * y - 1)
    return Dataset(np.repeat(x[:, None], 5, axis=1), y, "copies")


def _copies_plan(rules):
    return ExperimentPlan(
        "copies", 400, 800, k_splits=(5,), n_realizations=2, classifier_params={"k": 9}, rules=rules,
    )


def test_identical_members_give_zero_improvement():
    # weak members (about 65% accurate): every rule except adaptive WMR
    rules = tuple(r for r in RuleKind if r is not RuleKind.WMR_ADAPTIVE)
    cells = run_cell(_copies(0.4, 5), _copies_plan(rules), 5)
    assert len(cells) == 7
    for c in cells:
        assert c.mean_improvement == 0.0, c.rule


def test_identical_competent_members_adaptive_zero_improvement():
    # adaptive WMR returns the common vote while local accuracy stays above 1/2;
    # below 1/2 its log-odds weights turn negative and the vote is flipped
    cells = run_cell(_copies(2.0, 5), _copies_plan(("wmr_adaptive",)), 5)
    assert cells[0].mean_improvement == 0.0


def test_identical_members_adaptive_flips_below_chance():
    from wmrfuse import fit_lae
    from wmrfuse.combiners import combine_wmr, fit_wmr_adaptive_weights

    scores = np.linspace(0, 1, 200)
    correct = scores > 0.3  # below 0.3 the member is always wrong
    lae = fit_lae(scores, correct, n_bins=10)
    soft = np.repeat(np.array([0.05, 0.45, 0.95])[:, None], 3, axis=1)
    votes = (soft > 0.5).astype(int)
    acc = lae.local_accuracy(soft[:, 0])
    fused = combine_wmr(fit_wmr_adaptive_weights([lae] * 3, soft), votes).decision
    expected = np.where(acc > 0.5, votes[:, 0], 1 - votes[:, 0])
    assert np.array_equal(fused, expected)
    assert fused[0] == 1 and fused[1] == 0 and fused[2] == 1


def test_single_rule_plan_and_bookkeeping():
    data = generate_dataset("twonorm", 1000, 6)
    plan = ExperimentPlan("twonorm", 300, 700, k_splits=(4,), n_realizations=2, rules=("simple_majority",))
    cells = run_cell(data, plan, 4)
    assert len(cells) == 1
    c = cells[0]
    assert c.ensemble_accuracy == c.member_mean_accuracy + c.mean_improvement
    assert c.member_max_accuracy >= c.member_mean_accuracy
    assert c.realizations == 2
    assert run_cell(data, plan, 4) == cells


# --- wBorda -------------------------------------------------------------------------------


def test_distinct_column_gets_ten_down_to_three():
    imps = {f"r{i}": float(10 - i) for i in range(8)}
    assert list(column_points(imps).values()) == [10, 9, 8, 7, 6, 5, 4, 3]


def test_tied_top_share_ten():
    pts = column_points({"a": 5.0, "b": 5.0, "c": 1.0})
    assert pts == {"a": 10, "b": 10, "c": 9}


@pytest.mark.parametrize("table, col", reference_tables.REPRODUCIBLE)
def test_reference_column_points(table, col):
    imps, printed = reference_tables.column(table, col)
    assert column_points(imps) == printed


def test_adaptive_total_over_reference_columns():
    total = sum(sum(t["wmr_adaptive"][0]) for t in reference_tables.TABLES.values())
    assert total == 207


def _cell(ds, k, rule, imp):
    return CellResult(ds, "wknn", k, rule, imp, 0.0, 80.0 + imp, 80.0, 85.0, 1)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.integers(-20, 20), min_size=4, max_size=4), min_size=1, max_size=6))
def test_dominant_rule_gets_max_total(columns):
    rules = ["a", "b", "c", "d"]
    cells = []
    for j, col in enumerate(columns):
        col = list(col)
        col[0] = max(col) + 1  # rule "a" strictly best everywhere
        cells += [_cell(f"ds{j}", 5, r, float(v)) for r, v in zip(rules, col)]
    table = wborda_rank(cells)
    top = table.totals["a"]["sum"]
    assert top == 10 * len(columns)
    assert all(table.totals[r]["sum"] < top for r in rules[1:])
    assert table.sorted_rules()[0] == "a"


def test_ranking_totals_statistics():
    cells = [_cell("x", 5, "a", 2.0), _cell("x", 5, "b", 1.0), _cell("y", 5, "a", 0.0), _cell("y", 5, "b", 1.0)]
    t = wborda_rank(cells)
    assert t.totals["a"] == {"sum": 19, "mean": 9.5, "stdev": pytest.approx(math.sqrt(0.5)), "columns": 2}
    with pytest.raises(ContractError):
        wborda_rank(cells + [_cell("x", 5, "a", 0.5)])


# --- Condorcet --------------------------------------------------------------------------------


def test_condorcet_exact_binomial():
    p = 0.6
    exact = [binom.sf(k // 2, k, p) for k in range(1, 16, 2)]
    assert all(a < b for a, b in zip(exact, exact[1:]))


def test_condorcet_simulated_majority(rng):
    p, trials = 0.6, 20_000
    prev = 0.0
    for k in range(1, 16, 2):
        votes = (rng.uniform(size=(trials, k)) < p).astype(int)
        acc = combine_simple_majority(votes).decision.mean()
        exact = binom.sf(k // 2, k, p)
        se = math.sqrt(exact * (1 - exact) / trials)
        assert abs(acc - exact) < 4 * se
        assert acc > prev - 3 * se
        prev = acc


# --- Bhattacharyya ------------------------------------------------------------------------------


def test_bhattacharyya_closed_form(rng):
    n = 2000
    X = np.concatenate([rng.normal(0, 1, n), rng.normal(2, 1, n)])[:, None]
    y = np.repeat([0, 1], n)
    assert abs(bhattacharyya_distance(Dataset(X, y)) - 0.5) < 0.1


def test_bhattacharyya_same_distribution(rng):
    X = rng.normal(size=(4000, 3))
    y = np.tile([0, 1], 2000)
    assert bhattacharyya_distance(Dataset(X, y)) < 0.01


def test_bhattacharyya_variance_term(rng):
    # equal means, variances 1 and 4: 0.5 * ln((1 + 4) / 2 / sqrt(1 * 4))
    n = 20000
    X = np.concatenate([rng.normal(0, 1, n), rng.normal(0, 2, n)])[:, None]
    y = np.repeat([0, 1], n)
    assert bhattacharyya_distance(Dataset(X, y)) == pytest.approx(0.5 * math.log(1.25), abs=0.01)
