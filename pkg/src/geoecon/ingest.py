"""Deal-level ingestion: parsing, firm selection, classification thresholding
and aggregation into a country x domain x year investment tensor."""

from __future__ import annotations

import csv
import json
from collections import defaultdict
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Mapping, TextIO

import numpy as np

from .errors import IngestError

DEAL_COLUMNS = ("firm_id", "country", "year", "amount_usd")
CLASSIFICATION_COLUMNS = ("firm_id", "domain_id", "probability")
MAX_DOMAINS_PER_FIRM = 2


@dataclass(frozen=True)
class DealRecord:
    firm_id: str
    country: str
    year: int
    amount_usd: float


@dataclass(frozen=True)
class ClassificationAssignment:
    firm_id: str
    domain_id: str
    probability: float


@dataclass(frozen=True)
class Taxonomy:
    """Ordered list of ``(domain_id, display_name)`` pairs."""

    domains: tuple[tuple[str, str], ...]

    def __post_init__(self):
        if not self.domains:
            raise IngestError("taxonomy is empty")
        ids = [d for d, _ in self.domains]
        if len(set(ids)) != len(ids):
            raise IngestError("taxonomy domain ids are not unique")

    @property
    def ids(self) -> list[str]:
        return [d for d, _ in self.domains]

    def name(self, domain_id: str) -> str:
        return dict(self.domains)[domain_id]

    def position(self, domain_id: str) -> int:
        return self.ids.index(domain_id)

    def id_for(self, name: str) -> str:
        for d, n in self.domains:
            if n == name:
                return d
        raise KeyError(name)


@dataclass(frozen=True)
class FilterParams:
    top_n_firms: int = 3000
    min_raise_usd: float = 1_000_000.0
    min_classified_firms: int = 500
    probability_threshold: float = 0.5
    # full attribution by default; True splits a two-domain firm 50/50
    split_dual_domain: bool = False

    def __post_init__(self):
        if self.top_n_firms < 1:
            raise IngestError(f"top_n_firms must be >= 1, got {self.top_n_firms}")
        if self.min_raise_usd < 0:
            raise IngestError(f"min_raise_usd must be >= 0, got {self.min_raise_usd}")
        if self.min_classified_firms < 1:
            raise IngestError(
                f"min_classified_firms must be >= 1, got {self.min_classified_firms}"
            )
        if not 0.0 <= self.probability_threshold <= 1.0:
            raise IngestError(
                f"probability_threshold must lie in [0, 1], got {self.probability_threshold}"
            )


@dataclass
class InvestmentSlice:
    """One year (or pooled window) of investment, countries x domains in USD."""

    countries: list[str]
    domains: list[str]
    values: np.ndarray
    year: int
    variant: str = "plain"

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (len(self.countries), len(self.domains)):
            raise IngestError(
                f"slice shape {self.values.shape} does not match labels "
                f"({len(self.countries)}, {len(self.domains)})"
            )
        if np.any(self.values < 0) or not np.all(np.isfinite(self.values)):
            raise IngestError("investment values must be finite and non-negative")


@dataclass
class InvestmentTensor:
    """Aggregated investment S[country, domain, year].

    ``raw_values`` keeps every aggregated slice; ``firms`` records which
    selected, classified firms contributed to each (country, year).  Slices
    whose firm count is below ``min_classified_firms`` fail the coverage
    filter: they are zeroed in ``values`` and skipped by :meth:`slice`.
    """

    countries: list[str]
    domains: list[str]
    years: list[int]
    raw_values: np.ndarray
    firms: Mapping[tuple[str, int], frozenset[str]] = field(default_factory=dict)
    min_classified_firms: int = 1

    def __post_init__(self):
        self.raw_values = np.asarray(self.raw_values, dtype=float)
        shape = (len(self.countries), len(self.domains), len(self.years))
        if self.raw_values.shape != shape:
            raise IngestError(f"tensor shape {self.raw_values.shape} != {shape}")
        if np.any(self.raw_values < 0):
            raise IngestError("investment values must be non-negative")

    @classmethod
    def from_array(cls, values, countries=None, domains=None, years=None):
        """Wrap a dense array with every slice treated as covered."""
        values = np.asarray(values, dtype=float)
        if values.ndim == 2:
            values = values[:, :, np.newaxis]
        c, d, y = values.shape
        countries = list(countries) if countries is not None else [f"C{i:02d}" for i in range(c)]
        domains = list(domains) if domains is not None else [f"D{j + 1:02d}" for j in range(d)]
        years = list(years) if years is not None else list(range(2024 - y + 1, 2025))
        return cls(countries, domains, years, values)

    @property
    def coverage(self) -> np.ndarray:
        """Boolean (country, year) mask of slices passing the coverage filter."""
        mask = np.ones((len(self.countries), len(self.years)), dtype=bool)
        if not self.firms:
            return mask
        for i, c in enumerate(self.countries):
            for t, y in enumerate(self.years):
                mask[i, t] = len(self.firms.get((c, y), ())) >= self.min_classified_firms
        return mask

    @property
    def values(self) -> np.ndarray:
        return self.raw_values * self.coverage[:, np.newaxis, :]

    def year_index(self, year: int) -> int:
        try:
            return self.years.index(year)
        except ValueError:
            raise IngestError(f"year {year} not present in tensor") from None

    def slice(self, year: int) -> InvestmentSlice:
        t = self.year_index(year)
        keep = self.coverage[:, t]
        return InvestmentSlice(
            [c for c, k in zip(self.countries, keep) if k],
            list(self.domains),
            self.raw_values[keep, :, t],
            year,
        )


def load_taxonomy(stream: TextIO | None = None) -> Taxonomy:
    """Read ``[{"id": ..., "name": ...}, ...]``; defaults to the shipped 18 domains."""
    if stream is None:
        text = resources.files("geoecon").joinpath("data/taxonomy.json").read_text("utf-8")
    else:
        text = stream.read()
    try:
        entries = json.loads(text)
        return Taxonomy(tuple((str(e["id"]), str(e["name"])) for e in entries))
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise IngestError(f"malformed taxonomy: {exc}") from exc


def _read_rows(stream: TextIO, expected: tuple[str, ...]):
    reader = csv.reader(stream)
    header = next(reader, None)
    if header is None or tuple(h.strip() for h in header) != expected:
        raise IngestError(f"expected header {','.join(expected)}, got {header}")
    for row in reader:
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(expected):
            raise IngestError(
                f"line {reader.line_num}: expected {len(expected)} fields, got {len(row)}"
            )
        yield reader.line_num, [cell.strip() for cell in row]


def parse_deals(stream: TextIO, year_range: tuple[int, int] | None = (2014, 2024)) -> list[DealRecord]:
    """Parse ``firm_id,country,year,amount_usd`` rows, preserving order.

    ``year_range`` is inclusive; pass None to accept any year.
    """
    deals = []
    for line, (firm_id, country, year, amount) in _read_rows(stream, DEAL_COLUMNS):
        if not firm_id:
            raise IngestError(f"empty firm_id at line {line}")
        if not country:
            raise IngestError(f"empty country at line {line}")
        try:
            year_value = int(year)
        except ValueError:
            raise IngestError(f"malformed year {year!r} at line {line}") from None
        try:
            amount_value = float(amount)
        except ValueError:
            raise IngestError(f"malformed amount_usd {amount!r} at line {line}") from None
        if not np.isfinite(amount_value):
            raise IngestError(f"malformed amount_usd {amount!r} at line {line}")
        if amount_value < 0:
            raise IngestError(f"negative amount at line {line}")
        if year_range is not None and not year_range[0] <= year_value <= year_range[1]:
            raise IngestError(
                f"year {year_value} outside {year_range[0]}-{year_range[1]} at line {line}"
            )
        deals.append(DealRecord(firm_id, country, year_value, amount_value))
    return deals


def parse_classifications(stream: TextIO) -> list[ClassificationAssignment]:
    out = []
    for line, (firm_id, domain_id, prob) in _read_rows(stream, CLASSIFICATION_COLUMNS):
        try:
            p = float(prob)
        except ValueError:
            raise IngestError(f"malformed probability {prob!r} at line {line}") from None
        if not 0.0 <= p <= 1.0:
            raise IngestError(f"probability {p} outside [0, 1] at line {line}")
        out.append(ClassificationAssignment(firm_id, domain_id, p))
    return out


def _yearly_raise(deals: Iterable[DealRecord]) -> dict[tuple[str, int], dict[str, float]]:
    totals: dict[tuple[str, int], dict[str, float]] = defaultdict(lambda: defaultdict(float))
    for d in deals:
        totals[d.country, d.year][d.firm_id] += d.amount_usd
    return totals


def select_firms(deals: Iterable[DealRecord], params: FilterParams) -> set[tuple[str, int, str]]:
    """Top-raising firms per (country, year).

    A firm's raise is the sum of its deals in the calendar year.  Firms below
    ``min_raise_usd`` are dropped, the rest ordered by raise descending with
    firm_id as tie-break, and the first ``top_n_firms`` kept.
    """
    selected = set()
    for (country, year), firms in _yearly_raise(deals).items():
        eligible = [(f, r) for f, r in firms.items() if r >= params.min_raise_usd]
        eligible.sort(key=lambda fr: (-fr[1], fr[0]))
        selected.update((country, year, f) for f, _ in eligible[: params.top_n_firms])
    return selected


def threshold_classifications(
    assignments: Iterable[ClassificationAssignment],
    params: FilterParams,
    taxonomy: Taxonomy | None = None,
) -> dict[str, set[str]]:
    taxonomy = taxonomy or load_taxonomy()
    order = {d: i for i, d in enumerate(taxonomy.ids)}
    surviving: dict[str, dict[str, float]] = defaultdict(dict)
    for a in assignments:
        if a.domain_id not in order:
            raise IngestError(f"unknown domain_id {a.domain_id!r}")
        if a.probability < params.probability_threshold:
            continue
        prev = surviving[a.firm_id].get(a.domain_id, -1.0)
        surviving[a.firm_id][a.domain_id] = max(prev, a.probability)
    out = {}
    for firm, probs in surviving.items():
        ranked = sorted(probs, key=lambda d: (-probs[d], order[d]))
        out[firm] = set(ranked[:MAX_DOMAINS_PER_FIRM])
    return out


def aggregate(
    deals: Iterable[DealRecord],
    selected_firms: set[tuple[str, int, str]],
    firm_domains: Mapping[str, set[str]],
    taxonomy: Taxonomy | None,
    params: FilterParams,
) -> InvestmentTensor:
    """Sum selected, classified deals into S[country, domain, year]."""
    taxonomy = taxonomy or load_taxonomy()
    domains = taxonomy.ids
    col = {d: j for j, d in enumerate(domains)}

    cells: dict[tuple[str, int], np.ndarray] = {}
    firms: dict[tuple[str, int], set[str]] = defaultdict(set)
    for d in deals:
        if (d.country, d.year, d.firm_id) not in selected_firms:
            continue
        doms = firm_domains.get(d.firm_id)
        if not doms:
            continue
        share = d.amount_usd / len(doms) if params.split_dual_domain else d.amount_usd
        row = cells.setdefault((d.country, d.year), np.zeros(len(domains)))
        for dom in doms:
            row[col[dom]] += share
        firms[d.country, d.year].add(d.firm_id)

    countries = sorted({c for c, _ in cells})
    years = sorted({y for _, y in cells})
    values = np.zeros((len(countries), len(domains), len(years)))
    ci = {c: i for i, c in enumerate(countries)}
    yi = {y: t for t, y in enumerate(years)}
    for (c, y), row in cells.items():
        values[ci[c], :, yi[y]] = row
    return InvestmentTensor(
        countries,
        list(domains),
        years,
        values,
        {k: frozenset(v) for k, v in firms.items()},
        params.min_classified_firms,
    )


def build_tensor(deals_stream, classifications_stream, taxonomy=None, params=None, year_range=None):
    """Run parse, select, threshold and aggregate in one call."""
    params = params or FilterParams()
    taxonomy = taxonomy or load_taxonomy()
    deals = parse_deals(deals_stream, year_range=year_range)
    assignments = parse_classifications(classifications_stream)
    selected = select_firms(deals, params)
    firm_domains = threshold_classifications(assignments, params, taxonomy)
    return aggregate(deals, selected, firm_domains, taxonomy, params)
