"""Serialization of matrices, indices and simulation results.

Floats are written with 6 decimals; every file is written to a temporary
sibling and renamed into place.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .complexity import ComplexityReport, diversity, ubiquity
from .specialization import RVAMatrix, SpecializationMatrix
from .strategy import BlocResult, SssetReport

DECIMALS = 6
NONE = "NONE"


def atomic_write(path: Path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _num(x) -> str:
    if x is None or (isinstance(x, float) and np.isnan(x)):
        return ""
    return f"{float(x):.{DECIMALS}f}"


def _json_num(x):
    if x is None or np.isnan(x):
        return None
    return round(float(x), DECIMALS)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def rva_csv(rva: RVAMatrix) -> str:
    return _csv(["country", *rva.domains],
                [[c, *(_num(v) for v in row)] for c, row in zip(rva.countries, rva.values)])


def matrix_csv(M: SpecializationMatrix) -> str:
    return _csv(["country", *M.domains],
                [[c, *(int(v) for v in row)] for c, row in zip(M.countries, M.values)])


def indices_dict(report: ComplexityReport) -> dict:
    return {
        "year": int(report.year),
        "variant": report.variant,
        "countries": [
            {"id": c, "diversity": int(r["diversity"]), "gci": _json_num(r["gci"]), "rank": int(r["rank"])}
            for c, r in report.countries.iterrows()
        ],
        "domains": [
            {"id": d, "ubiquity": int(r["ubiquity"]), "etgci": _json_num(r["etgci"]), "rank": int(r["rank"])}
            for d, r in report.domains.iterrows()
        ],
    }


def to_json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def heatmap_order(M: SpecializationMatrix) -> tuple[list[int], list[int]]:
    """Rows by diversity, columns by ubiquity, both descending; ties by label."""
    div, ubi = diversity(M), ubiquity(M)
    rows = sorted(range(len(M.countries)), key=lambda i: (-div[i], M.countries[i]))
    cols = sorted(range(len(M.domains)), key=lambda j: (-ubi[j], M.domains[j]))
    return rows, cols


def heatmap_csv(M: SpecializationMatrix) -> str:
    rows, cols = heatmap_order(M)
    return _csv(["country", *(M.domains[j] for j in cols)],
                [[M.countries[i], *(int(M.values[i, j]) for j in cols)] for i in rows])


def mean_ubiquity(M: SpecializationMatrix) -> np.ndarray:
    div = diversity(M)
    total = M.values @ ubiquity(M)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(div > 0, total / np.maximum(div, 1), np.nan)


def scatter_csv(M: SpecializationMatrix) -> str:
    div, mu = diversity(M), mean_ubiquity(M)
    return _csv(["country", "diversity", "mean_ubiquity"],
                [[c, int(d), _num(m)] for c, d, m in zip(M.countries, div, mu)])


def format_rank_change(change: int) -> str:
    return "=" if change == 0 else f"{change:+d}"


def ssset_csv(report: SssetReport) -> str:
    rows = []
    for e in report.entries:
        if not e.domains:
            rows.append([e.country, NONE, format_rank_change(e.rank_change), "", ""])
        else:
            rows.append([e.country, "|".join(e.domains), format_rank_change(e.rank_change),
                         e.relatedness_rank, e.relatedness_score])
    return _csv(["country", "ssset_domains", "rank_change", "relatedness_rank", "relatedness_score"], rows)


def bloc_json(result: BlocResult) -> str:
    return to_json(result.to_dict())
