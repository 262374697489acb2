"""Relatedness, single-specialization simulations (SSSET) and bloc rules."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from scipy.stats import rankdata

from .complexity import compute_etgci, compute_gci, rank
from .errors import DegenerateSpectrumError, StrategyError
from .ingest import InvestmentSlice
from .specialization import SpecializationMatrix, binarize, compute_rva

ANY_MEMBER = "any_member"
AT_LEAST_K = "at_least_k"


def cospecialization(M: SpecializationMatrix, exclude: str | None = None) -> np.ndarray:
    """phi[j, k] = number of countries specialized in both j and k (j != k)."""
    X = M.values
    if exclude is not None:
        X = np.delete(X, M.countries.index(exclude), axis=0)
    phi = X.T @ X
    np.fill_diagonal(phi, 0)
    return phi


@dataclass
class RelatednessTable:
    country: str
    phi: np.ndarray
    domains: list[str]
    candidates: pd.DataFrame  # index: domain; columns score, rank

    def score(self, domain: str) -> int:
        return int(self.candidates.loc[domain, "score"])

    def rank_of(self, domain: str) -> int:
        return int(self.candidates.loc[domain, "rank"])


def relatedness(M: SpecializationMatrix, country: str, exclude_self: bool = False) -> RelatednessTable:
    """Score each non-specialized domain by its co-specialization with the
    country's current specializations.

    Ranks follow competition ranking (tied scores share the better rank);
    the table is ordered by rank, then domain label.
    """
    if country not in M.countries:
        raise StrategyError(f"unknown country {country!r}")
    phi = cospecialization(M, exclude=country if exclude_self else None)
    row = M.row(country)
    scores = phi @ row
    open_ = np.flatnonzero(row == 0)
    cand_scores = scores[open_]
    ranks = rankdata(-cand_scores, method="min").astype(np.int64) if len(open_) else np.array([], dtype=np.int64)
    table = pd.DataFrame(
        {"score": cand_scores.astype(np.int64), "rank": ranks},
        index=pd.Index([M.domains[j] for j in open_], name="domain"),
    )
    table = table.reset_index().sort_values(["rank", "domain"]).set_index("domain")
    return RelatednessTable(country, phi, list(M.domains), table)


@dataclass
class Baseline:
    """Scores and ranks of an unmodified matrix, reused across simulations."""

    matrix: SpecializationMatrix
    etgci: np.ndarray
    gci: np.ndarray
    ranks: np.ndarray

    @classmethod
    def of(cls, M: SpecializationMatrix) -> "Baseline":
        if len(M.countries) < 2:
            ones = np.ones(len(M.countries), dtype=np.int64)
            return cls(M, np.full(len(M.domains), np.nan), np.full(len(M.countries), np.nan), ones)
        etgci = compute_etgci(M)
        gci = _quiet_gci(M, etgci)
        return cls(M, etgci, gci, rank(gci, M.countries))


def _quiet_gci(M, etgci):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return compute_gci(M, etgci)


@dataclass
class SimulationOutcome:
    country: str
    candidate_domain: str
    new_gci: float
    baseline_rank: int
    new_rank: int
    rank_change: int
    relatedness_score: int
    relatedness_rank: int
    indeterminate: bool = False


def simulate_addition(
    M: SpecializationMatrix,
    country: str,
    domain: str,
    baseline: Baseline | None = None,
    related: RelatednessTable | None = None,
) -> SimulationOutcome:
    """Toggle one cell from 0 to 1 and recompute every country's GCI rank.

    ``rank_change`` is positive when the country moves up.  A toggle that
    makes the spectrum degenerate is returned with ``indeterminate=True``.
    """
    if country not in M.countries:
        raise StrategyError(f"unknown country {country!r}")
    if domain not in M.domains:
        raise StrategyError(f"unknown domain {domain!r}")
    i, j = M.countries.index(country), M.domains.index(domain)
    if M.values[i, j] == 1:
        raise StrategyError(f"{country} is already specialized in {domain}")
    baseline = baseline or Baseline.of(M)
    related = related or relatedness(M, country)

    X = M.values.copy()
    X[i, j] = 1
    toggled = M.with_values(X)
    base_rank = int(baseline.ranks[i])
    common = dict(
        country=country,
        candidate_domain=domain,
        baseline_rank=base_rank,
        relatedness_score=related.score(domain),
        relatedness_rank=related.rank_of(domain),
    )
    if len(M.countries) < 2:
        return SimulationOutcome(new_gci=float("nan"), new_rank=1, rank_change=0, **common)
    try:
        etgci = compute_etgci(toggled)
    except DegenerateSpectrumError:
        return SimulationOutcome(
            new_gci=float("nan"), new_rank=base_rank, rank_change=0, indeterminate=True, **common
        )
    gci = _quiet_gci(toggled, etgci)
    new_rank = int(rank(gci, M.countries)[i])
    return SimulationOutcome(
        new_gci=float(gci[i]), new_rank=new_rank, rank_change=base_rank - new_rank, **common
    )


@dataclass
class SssetEntry:
    country: str
    baseline_rank: int
    domains: tuple[str, ...]  # empty means no improving single addition
    rank_change: int
    relatedness_rank: int | None
    relatedness_score: int | None


@dataclass
class SssetReport:
    entries: list[SssetEntry]
    outcomes: list[SimulationOutcome] = field(default_factory=list)

    def __getitem__(self, country: str) -> SssetEntry:
        for e in self.entries:
            if e.country == country:
                return e
        raise KeyError(country)


def select_ssset(country: str, baseline_rank: int, outcomes: list[SimulationOutcome]) -> SssetEntry:
    """Largest rank gain first, then best relatedness rank; ties are kept."""
    valid = [o for o in outcomes if not o.indeterminate]
    best = max((o.rank_change for o in valid), default=0)
    if best <= 0:
        return SssetEntry(country, baseline_rank, (), 0, None, None)
    top = [o for o in valid if o.rank_change == best]
    closest = min(o.relatedness_rank for o in top)
    chosen = sorted((o for o in top if o.relatedness_rank == closest), key=lambda o: o.candidate_domain)
    return SssetEntry(
        country,
        baseline_rank,
        tuple(o.candidate_domain for o in chosen),
        best,
        closest,
        chosen[0].relatedness_score,
    )


def find_ssset(M: SpecializationMatrix) -> SssetReport:
    baseline = Baseline.of(M)
    entries, outcomes = [], []
    for i, country in enumerate(M.countries):
        related = relatedness(M, country)
        mine = [
            simulate_addition(M, country, M.domains[j], baseline, related)
            for j in np.flatnonzero(M.values[i] == 0)
        ]
        outcomes.extend(mine)
        entries.append(select_ssset(country, int(baseline.ranks[i]), mine))
    return SssetReport(entries, outcomes)


def parse_rule(text: str) -> tuple[str, int | None]:
    """``"any"`` -> any-member rule, ``"k:N"`` -> at-least-N rule."""
    text = text.strip()
    if text in ("any", ANY_MEMBER):
        return ANY_MEMBER, None
    if text.startswith("k:"):
        try:
            return AT_LEAST_K, int(text[2:])
        except ValueError:
            pass
    raise StrategyError(f"rule must be 'any' or 'k:N', got {text!r}")


def _member_rows(M: SpecializationMatrix, members) -> list[int]:
    members = list(members)
    if not members:
        raise StrategyError("bloc needs at least one member")
    missing = [m for m in members if m not in M.countries]
    if missing:
        raise StrategyError(f"unknown bloc members: {missing}")
    if len(set(members)) != len(members):
        raise StrategyError("bloc members must be distinct")
    return [M.countries.index(m) for m in members]


def bloc_matrix(M: SpecializationMatrix, members, rule: str = ANY_MEMBER, k: int | None = None) -> np.ndarray:
    """Single specialization row for a bloc of countries."""
    rows = M.values[_member_rows(M, members)]
    if rule == ANY_MEMBER:
        return rows.max(axis=0)
    if rule == AT_LEAST_K:
        if k is None or k < 1:
            raise StrategyError(f"at_least_k needs k >= 1, got {k}")
        if k > len(rows):
            raise StrategyError(f"k={k} exceeds the {len(rows)} bloc members")
        return (rows.sum(axis=0) >= k).astype(np.int64)
    raise StrategyError(f"unknown bloc rule {rule!r}")


@dataclass
class BlocResult:
    members: list[str]
    rule: str
    k: int | None
    label: str
    bloc_rank: int
    bloc_gci: float
    bloc_domains: list[str]
    member_baseline_ranks: dict[str, int]
    naive_rank: int | None = None
    naive_gci: float | None = None
    naive_domains: list[str] | None = None

    def to_dict(self) -> dict:
        naive = None
        if self.naive_rank is not None:
            naive = {
                "bloc_rank": self.naive_rank,
                "bloc_gci": round(self.naive_gci, 6),
                "bloc_domains": self.naive_domains,
                "lost_domains": sorted(set(self.bloc_domains) - set(self.naive_domains)),
            }
        return {
            "members": self.members,
            "rule": self.rule if self.k is None else f"{self.rule}:{self.k}",
            "bloc": self.label,
            "bloc_rank": self.bloc_rank,
            "bloc_gci": round(self.bloc_gci, 6),
            "bloc_domains": self.bloc_domains,
            "member_baseline_ranks": self.member_baseline_ranks,
            "naive_sum": naive,
        }


def _merge(M: SpecializationMatrix, rows: list[int], bloc_row, label: str) -> SpecializationMatrix:
    keep = [i for i in range(len(M.countries)) if i not in rows]
    countries = [M.countries[i] for i in keep] + [label]
    values = np.vstack([M.values[keep], np.asarray(bloc_row)[np.newaxis, :]])
    if len(countries) < 2:
        raise StrategyError(
            "bloc experiment needs at least 2 countries after merging members into one row"
        )
    return SpecializationMatrix(countries, list(M.domains), values, M.year, M.variant)


def _rank_in(M: SpecializationMatrix, label: str) -> tuple[int, float]:
    b = Baseline.of(M)
    i = M.countries.index(label)
    return int(b.ranks[i]), float(b.gci[i])


def bloc_experiment(
    M: SpecializationMatrix,
    members,
    rule: str = ANY_MEMBER,
    k: int | None = None,
    investment: InvestmentSlice | None = None,
) -> BlocResult:
    """Replace member rows by one bloc row and rank the bloc.

    When ``investment`` (the slice ``M`` was derived from) is given, the
    naive alternative is also computed: member investment is summed before
    the RVA threshold is applied.
    """
    members = list(members)
    rows = _member_rows(M, members)
    label = "+".join(members)
    row = bloc_matrix(M, members, rule, k)
    merged = _merge(M, rows, row, label)
    bloc_rank, bloc_gci = _rank_in(merged, label)
    base = Baseline.of(M)
    result = BlocResult(
        members,
        rule,
        k,
        label,
        bloc_rank,
        bloc_gci,
        [d for d, v in zip(M.domains, row) if v],
        {m: int(base.ranks[r]) for m, r in zip(members, rows)},
    )
    if investment is not None:
        naive = naive_bloc_matrix(investment, members, label)
        result.naive_rank, result.naive_gci = _rank_in(naive, label)
        result.naive_domains = [d for d, v in zip(naive.domains, naive.row(label)) if v]
    return result


def naive_bloc_matrix(investment: InvestmentSlice, members, label: str | None = None) -> SpecializationMatrix:
    """Specialization matrix after summing member investment into one row."""
    members = list(members)
    missing = [m for m in members if m not in investment.countries]
    if not members or missing:
        raise StrategyError(f"bloc members missing from investment data: {missing or members}")
    label = label or "+".join(members)
    idx = [investment.countries.index(m) for m in members]
    keep = [i for i in range(len(investment.countries)) if i not in idx]
    S = np.vstack([investment.values[keep], investment.values[idx].sum(axis=0, keepdims=True)])
    pooled = InvestmentSlice(
        [investment.countries[i] for i in keep] + [label],
        list(investment.domains),
        S,
        investment.year,
        investment.variant,
    )
    return binarize(compute_rva(pooled))
