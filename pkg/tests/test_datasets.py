import math

import numpy as np
import pytest
from scipy.stats import norm

from wmrfuse import ContractError, Dataset
from wmrfuse.datasets import generate_dataset, ingest_csv, waveform_bases, write_csv


@pytest.mark.parametrize("name, dim", [("twonorm", 20), ("ringnorm", 20), ("waveform", 21)])
def test_generator_shape_and_balance(name, dim):
    d = generate_dataset(name, 7400, 11)
    assert d.dimension == dim and d.n_samples == 7400
    assert d.has_both_classes()
    assert abs(d.y.mean() - 0.5) < 3 * math.sqrt(0.25 / 7400)


@pytest.mark.parametrize("name", ["twonorm", "ringnorm", "waveform"])
def test_generator_determinism(name):
    assert generate_dataset(name, 300, 4) == generate_dataset(name, 300, 4)
    assert generate_dataset(name, 300, 4) != generate_dataset(name, 300, 5)


def test_unknown_generator():
    with pytest.raises(ContractError):
        generate_dataset("spiral", 100)


def test_twonorm_bayes_rate():
    # the optimal rule sign(sum x) errs with probability Phi(-a * sqrt(20)) = Phi(-2)
    d = generate_dataset("twonorm", 100_000, 3)
    acc = np.mean((d.X.sum(axis=1) > 0).astype(int) == d.y)
    assert abs(acc - norm.cdf(2.0)) < 0.005
    assert 0.97 <= acc <= 0.985


def test_twonorm_class_means():
    d = generate_dataset("twonorm", 40_000, 8)
    a = 2 / math.sqrt(20)
    assert np.allclose(d.X[d.y == 1].mean(axis=0), a, atol=0.03)
    assert np.allclose(d.X[d.y == 0].mean(axis=0), -a, atol=0.03)


def test_ringnorm_class_variances():
    d = generate_dataset("ringnorm", 40_000, 8)
    assert np.allclose(d.X[d.y == 0].var(axis=0), 4.0, rtol=0.05)
    assert np.allclose(d.X[d.y == 1].var(axis=0), 1.0, rtol=0.05)


def test_waveform_bases_and_means():
    h1, h2, h3 = waveform_bases()
    assert h1.max() == 6 and h1.argmax() == 10
    assert h2.argmax() == 14 and h3.argmax() == 6
    d = generate_dataset("waveform", 40_000, 8)
    assert np.allclose(d.X[d.y == 0].mean(axis=0), 0.5 * (h1 + h2), atol=0.08)
    assert np.allclose(d.X[d.y == 1].mean(axis=0), 0.5 * (h1 + h3), atol=0.08)


def test_ingest_small_file(tmp_path):
    p = tmp_path / "two.csv"
    p.write_text("f1,f2,cls\n1.0,2.0,a\n3.0,4.0,b\n")
    d = ingest_csv(p, "cls", "b")
    assert d.n_samples == 2 and d.dimension == 2
    assert d.y.tolist() == [0, 1]
    assert d.feature_names == ("f1", "f2")
    assert np.array_equal(ingest_csv(p, 2, "b").X, d.X)


def test_ingest_rejects_three_labels(tmp_path):
    p = tmp_path / "three.csv"
    p.write_text("x,label\n1,a\n2,b\n3,c\n")
    with pytest.raises(ContractError, match="two label values"):
        ingest_csv(p, "label", "a")


@pytest.mark.parametrize(
    "body, message",
    [
        ("x,label\n1,1\nnan,0\n", "non-finite"),
        ("x,label\n1,1\nabc,0\n", "non-numeric"),
        ("x,label\n1,1\n2\n", "expected 2 fields"),
        ("x,label\n1,1\n2,1\n", "positive label"),
    ],
)
def test_ingest_rejects_bad_rows(tmp_path, body, message):
    p = tmp_path / "bad.csv"
    p.write_text(body)
    with pytest.raises(ContractError, match=message):
        ingest_csv(p, "label", "0" if "positive" in message else "1")


def test_ingest_missing_file_and_column(tmp_path):
    with pytest.raises(ContractError):
        ingest_csv(tmp_path / "nope.csv")
    p = tmp_path / "a.csv"
    p.write_text("x,y\n1,1\n2,0\n")
    with pytest.raises(ContractError):
        ingest_csv(p, "label")


@pytest.mark.parametrize("name", ["twonorm", "waveform"])
def test_csv_round_trip(tmp_path, name):
    d = generate_dataset(name, 250, 2)
    p = tmp_path / "d.csv"
    write_csv(d, p)
    back = ingest_csv(p, name=d.name)
    assert back == Dataset(d.X, d.y, d.name, back.feature_names)
    assert np.array_equal(back.X, d.X)
