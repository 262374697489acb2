"""Synthetic deal and classification files with a planted nested structure."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import IngestError


@dataclass(frozen=True)
class SynthParams:
    seed: int
    countries: int = 8
    domains: int = 10
    firms_per_country: int = 600
    nestedness: float = 1.0
    year: int = 2024

    def __post_init__(self):
        if self.countries < 2 or self.domains < 2:
            raise IngestError("synthetic fixtures need at least 2 countries and 2 domains")
        if self.firms_per_country < 1:
            raise IngestError(f"firms_per_country must be >= 1, got {self.firms_per_country}")
        if not 0.0 <= self.nestedness <= 1.0:
            raise IngestError(f"nestedness must lie in [0, 1], got {self.nestedness}")


def planted_support(countries: int, domains: int) -> np.ndarray:
    """Triangular 0/1 pattern: country k holds the first ``ceil(D (C - k) / C)``
    domains, so country 0 holds all of them and domain 0 is held by everyone."""
    sizes = [max(1, math.ceil(domains * (countries - k) / countries)) for k in range(countries)]
    support = np.zeros((countries, domains), dtype=np.int64)
    for k, n in enumerate(sizes):
        support[k, :n] = 1
    return support


def country_ids(n: int) -> list[str]:
    return [f"C{i + 1:02d}" for i in range(n)]


def domain_ids(n: int) -> list[str]:
    return [f"D{j + 1:02d}" for j in range(n)]


def generate(params: SynthParams) -> dict[str, str]:
    """Return file name -> text for ``deals.csv``, ``classifications.csv`` and
    ``taxonomy.json``.

    Each firm draws its primary domain from its country's planted set with
    probability ``nestedness`` and uniformly from all domains otherwise, and
    raises once in each of ``year - 1`` and ``year``.
    """
    rng = np.random.default_rng(params.seed)
    support = planted_support(params.countries, params.domains)
    cids, dids = country_ids(params.countries), domain_ids(params.domains)

    deals = io.StringIO()
    dw = csv.writer(deals, lineterminator="\n")
    dw.writerow(["firm_id", "country", "year", "amount_usd"])
    cls = io.StringIO()
    cw = csv.writer(cls, lineterminator="\n")
    cw.writerow(["firm_id", "domain_id", "probability"])

    for k, country in enumerate(cids):
        planted = np.flatnonzero(support[k])
        for f in range(params.firms_per_country):
            firm = f"{country}-F{f + 1:05d}"
            if rng.random() < params.nestedness:
                j = int(rng.choice(planted))
            else:
                j = int(rng.integers(params.domains))
            cw.writerow([firm, dids[j], f"{rng.uniform(0.6, 0.99):.3f}"])
            # a low-confidence secondary label exercises the threshold
            other = int(rng.integers(params.domains))
            if other != j:
                cw.writerow([firm, dids[other], f"{rng.uniform(0.05, 0.45):.3f}"])
            for year in (params.year - 1, params.year):
                amount = 1e6 + rng.lognormal(mean=math.log(4e6), sigma=1.0)
                dw.writerow([firm, country, year, f"{amount:.0f}"])

    taxonomy = [{"id": d, "name": f"Synthetic domain {j + 1}"} for j, d in enumerate(dids)]
    return {
        "deals.csv": deals.getvalue(),
        "classifications.csv": cls.getvalue(),
        "taxonomy.json": json.dumps(taxonomy, indent=2) + "\n",
    }
