"""Experiment configuration files (TOML).

Top-level keys: ``output_dir``, ``seed``, ``jobs`` and a ``[[plan]]`` array.
Each plan names a dataset source (``generator`` or ``csv``), the base
classifier and the protocol. Unknown keys are rejected.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from ._types import ContractError, Dataset
from .combiners import ALL_RULES, RuleKind
from .datasets import GENERATORS, generate_dataset, ingest_csv
from .evaluation import ExperimentPlan


class ConfigError(ContractError):
    pass


TOP_KEYS = {"output_dir", "seed", "jobs", "plan"}
PLAN_KEYS = {
    "name",
    "dataset",
    "train_size",
    "test_size",
    "k_splits",
    "classifier",
    "classifier_params",
    "rules",
    "realizations",
    "seed",
    "validation_fraction",
    "validation_source",
    "lae_bins",
}
GENERATOR_KEYS = {"generator", "n", "seed"}
CSV_KEYS = {"csv", "label_column", "positive_label", "name"}
WKNN_PARAMS = {"k", "metric", "p", "weighting"}
CART_PARAMS = {"criterion", "min_split", "mode"}


@dataclass(frozen=True)
class DatasetSource:
    name: str
    generator: str = None
    n: int = None
    seed: int = 0
    csv: str = None
    label_column: object = "label"
    positive_label: str = "1"

    def load(self) -> Dataset:
        if self.generator is not None:
            return generate_dataset(self.generator, self.n, self.seed)
        return ingest_csv(self.csv, self.label_column, self.positive_label, name=self.name)


@dataclass(frozen=True)
class PlanSpec:
    name: str
    source: DatasetSource
    plan: ExperimentPlan


@dataclass(frozen=True)
class Config:
    output_dir: str
    seed: int
    jobs: int
    plans: tuple


def _reject_unknown(table, allowed, where):
    extra = sorted(set(table) - allowed)
    if extra:
        raise ConfigError(f"{where}: unknown key(s) {', '.join(extra)}")


def _require(table, key, where):
    if key not in table:
        raise ConfigError(f"{where}: missing required key {key!r}")
    return table[key]


def parse_config(doc: dict, base_dir=".", seed_override=None) -> Config:
    _reject_unknown(doc, TOP_KEYS, "config")
    seed = int(doc.get("seed", 0)) if seed_override is None else int(seed_override)
    plans_raw = doc.get("plan")
    if not plans_raw or not isinstance(plans_raw, list):
        raise ConfigError("config: at least one [[plan]] table is required")
    plans = []
    names = set()
    for i, p in enumerate(plans_raw):
        where = f"plan[{i}]"
        _reject_unknown(p, PLAN_KEYS, where)
        name = str(p.get("name", f"plan{i}"))
        if name in names:
            raise ConfigError(f"{where}: duplicate plan name {name!r}")
        names.add(name)
        plan_seed = int(p.get("seed", seed)) if seed_override is None else seed + i
        source = _parse_source(_require(p, "dataset", where), where, base_dir, plan_seed)
        kind = str(p.get("classifier", "wknn")).lower()
        params = dict(p.get("classifier_params", {}))
        allowed = {"wknn": WKNN_PARAMS, "cart": CART_PARAMS}.get(kind)
        if allowed is None:
            raise ConfigError(f"{where}: unknown classifier {kind!r}")
        _reject_unknown(params, allowed, f"{where}.classifier_params")
        rules = p.get("rules", "all")
        if rules == "all":
            rules = [r.value for r in ALL_RULES]
        try:
            rules = tuple(RuleKind(r) for r in rules)
            train_size = int(_require(p, "train_size", where))
            test_size = int(_require(p, "test_size", where))
            plan = ExperimentPlan(
                dataset_name=source.name,
                train_size=train_size,
                test_size=test_size,
                k_splits=tuple(p.get("k_splits", (5, 7))),
                classifier_kind=kind,
                classifier_params=params,
                rules=rules,
                n_realizations=int(p.get("realizations", 10)),
                rng_seed=plan_seed,
                validation_fraction=float(p.get("validation_fraction", 0.3)),
                validation_source=str(p.get("validation_source", "train")),
                lae_bins=p.get("lae_bins", "auto"),
            )
        except ConfigError:
            raise
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"{where}: {exc}") from None
        if source.generator is not None and source.n is None:
            source = DatasetSource(**{**source.__dict__, "n": train_size + test_size})
        plans.append(PlanSpec(name, source, plan))
    jobs = int(doc.get("jobs", 1))
    out = Path(base_dir) / str(doc.get("output_dir", "results"))
    return Config(str(out), seed, jobs, tuple(plans))


def _parse_source(ds, where, base_dir, seed):
    if not isinstance(ds, dict):
        raise ConfigError(f"{where}.dataset must be a table")
    if "generator" in ds:
        _reject_unknown(ds, GENERATOR_KEYS, f"{where}.dataset")
        gen = str(ds["generator"]).lower()
        if gen not in GENERATORS:
            raise ConfigError(f"{where}.dataset: unknown generator {gen!r}")
        n = ds.get("n")
        return DatasetSource(gen, generator=gen, n=None if n is None else int(n), seed=int(ds.get("seed", seed)))
    if "csv" in ds:
        _reject_unknown(ds, CSV_KEYS, f"{where}.dataset")
        path = Path(base_dir) / ds["csv"]
        return DatasetSource(
            str(ds.get("name", path.stem)),
            csv=str(path),
            label_column=ds.get("label_column", "label"),
            positive_label=str(ds.get("positive_label", "1")),
        )
    raise ConfigError(f"{where}.dataset needs a 'generator' or 'csv' key")


def load_config(path, seed_override=None) -> Config:
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return parse_config(doc, base_dir=path.parent, seed_override=seed_override)
