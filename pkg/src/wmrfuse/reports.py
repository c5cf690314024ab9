"""Machine- and human-readable experiment reports."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ._types import ContractError
from .combiners import RuleKind
from .evaluation import CellResult, RankingTable, wborda_rank


def _label(rule):
    try:
        return RuleKind(rule).label
    except ValueError:
        return rule


def cells_to_jsonl(cells) -> str:
    lines = [json.dumps(c.to_dict(), sort_keys=True) for c in sorted(cells, key=_cell_key)]
    return "".join(line + "\n" for line in lines)


def _cell_key(c):
    return (c.dataset, c.classifier, c.k, c.rule)


def read_cells(path) -> list:
    cells = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                cells.append(CellResult(**json.loads(line)))
            except (TypeError, ValueError) as exc:
                raise ContractError(f"{path}:{lineno}: bad cell record ({exc})") from None
    return cells


def ranking_to_dict(table: RankingTable) -> dict:
    return {
        "format": "wmrfuse.ranking/1",
        "order": table.sorted_rules(),
        "totals": {r: table.totals[r] for r in sorted(table.totals)},
        "points": [
            {"rule": rule, "dataset": ds, "classifier": clf, "k": k, "points": pts}
            for (rule, ds, clf, k), pts in sorted(table.points.items())
        ],
    }


def format_summary(table: RankingTable) -> str:
    """Plain-text tables: one improvement/points block per classifier, then totals."""
    out = []
    cols = table.columns()
    improvements = {(c.rule, *c.column): c.mean_improvement for c in table.cells}
    for clf in sorted({c[1] for c in cols}):
        ccols = [c for c in cols if c[1] == clf]
        out.append(f"== {clf} ensembles: wBorda points / mean improvement (points) ==")
        header = f"{'rule':<24}" + "".join(f"{ds[:10] + ' K=' + str(k):>18}" for ds, _, k in ccols)
        out.append(header + f"{'SUM':>6}")
        rules = sorted(
            {c.rule for c in table.cells if c.classifier == clf},
            key=lambda r: (-sum(table.points[(r, *c)] for c in ccols if (r, *c) in table.points), r),
        )
        for rule in rules:
            pts = [table.points.get((rule, *c)) for c in ccols]
            row = f"{_label(rule):<24}"
            for c, p in zip(ccols, pts):
                imp = improvements.get((rule, *c))
                row += "-".rjust(18) if imp is None else f"{imp:12.2f} ({p:2d})".rjust(18)
            row += f"{sum(p for p in pts if p is not None):>6d}"
            out.append(row)
        out.append("")
    out.append("== overall wBorda ranking ==")
    out.append(f"{'rule':<24}{'SUM':>6}{'MEAN':>8}{'STDEV':>8}")
    for rule in table.sorted_rules():
        t = table.totals[rule]
        out.append(f"{_label(rule):<24}{t['sum']:>6d}{t['mean']:>8.2f}{t['stdev']:>8.2f}")
    return "\n".join(out) + "\n"


def write_reports(cells, out_dir) -> RankingTable:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    table = wborda_rank(cells)
    (out_dir / "cells.jsonl").write_text(cells_to_jsonl(cells))
    (out_dir / "ranking.json").write_text(json.dumps(ranking_to_dict(table), indent=2, sort_keys=True) + "\n")
    (out_dir / "summary.txt").write_text(format_summary(table))
    return table


def lae_curve(estimator, n_points: int):
    """``n_points`` (score, local accuracy) pairs over the observed score range."""
    if n_points < 1:
        raise ContractError("n_points must be positive")
    lo, hi = float(estimator.scores_.min()), float(estimator.scores_.max())
    x = np.linspace(lo, hi, n_points) if n_points > 1 else np.array([lo])
    return np.column_stack([x, estimator.local_accuracy(x)])


def write_curve(curve, path):
    with open(path, "w") as fh:
        fh.write("# score\tlocal_accuracy\n")
        for s, a in curve:
            fh.write(f"{float(s)!r}\t{float(a)!r}\n")
