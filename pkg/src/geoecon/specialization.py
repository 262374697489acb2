"""Revealed Venture Advantage and the binary specialization matrix."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IngestError, SpecializationError
from .ingest import InvestmentSlice, InvestmentTensor

VARIANTS = ("plain", "rounded", "windowed")
# equal shares can land a few ulps below 1 after division
RVA_TOL = 1e-12


def _check_labels(countries, domains, values):
    if values.shape != (len(countries), len(domains)):
        raise SpecializationError(
            f"values shape {values.shape} does not match labels ({len(countries)}, {len(domains)})"
        )
    if len(set(countries)) != len(countries) or len(set(domains)) != len(domains):
        raise SpecializationError("row and column labels must be unique")


@dataclass
class RVAMatrix:
    countries: list[str]
    domains: list[str]
    values: np.ndarray
    year: int
    variant: str = "plain"

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        _check_labels(self.countries, self.domains, self.values)
        if np.isnan(self.values).any():
            raise SpecializationError("RVA matrix contains NaN")


@dataclass
class SpecializationMatrix:
    """Binary country x domain matrix; ``values[i, j] == 1`` iff country i is
    specialized in domain j."""

    countries: list[str]
    domains: list[str]
    values: np.ndarray
    year: int = 0
    variant: str = "plain"

    def __post_init__(self):
        values = np.asarray(self.values)
        if values.ndim != 2:
            raise SpecializationError("specialization matrix must be 2-D")
        if not np.isin(values, (0, 1)).all():
            raise SpecializationError("specialization entries must be 0 or 1")
        self.values = values.astype(np.int64)
        self.countries = list(self.countries)
        self.domains = list(self.domains)
        _check_labels(self.countries, self.domains, self.values)
        if self.variant not in VARIANTS:
            raise SpecializationError(f"unknown variant {self.variant!r}")

    @classmethod
    def from_array(cls, values, countries=None, domains=None, year=0, variant="plain"):
        values = np.asarray(values)
        n, m = values.shape
        if countries is None:
            countries = [f"C{i:02d}" for i in range(n)]
        if domains is None:
            domains = [f"D{j + 1:02d}" for j in range(m)]
        return cls(list(countries), list(domains), values, year, variant)

    @property
    def shape(self):
        return self.values.shape

    def with_values(self, values) -> "SpecializationMatrix":
        return SpecializationMatrix(self.countries, self.domains, values, self.year, self.variant)

    def row(self, country: str) -> np.ndarray:
        return self.values[self.countries.index(country)]


def _as_slice(data, year) -> InvestmentSlice:
    if isinstance(data, InvestmentSlice):
        if year is not None and year != data.year:
            raise SpecializationError(f"year {year} not present (slice is {data.year})")
        return data
    if isinstance(data, InvestmentTensor):
        if year is None:
            raise SpecializationError("a year is required when passing a full tensor")
        try:
            return data.slice(year)
        except IngestError as exc:
            raise SpecializationError(str(exc)) from None
    raise TypeError(f"expected InvestmentTensor or InvestmentSlice, got {type(data).__name__}")


def compute_rva(data: InvestmentTensor | InvestmentSlice, year: int | None = None) -> RVAMatrix:
    """RVA[i, j] = (S_ij / sum_i S_ij) / (sum_j S_ij / sum_ij S_ij).

    Domains with zero global investment and countries with zero total are
    dropped before the ratio is formed.
    """
    sl = _as_slice(data, year)
    S = sl.values
    if S.size == 0 or S.sum() <= 0:
        raise SpecializationError("no investment data")
    keep_rows = S.sum(axis=1) > 0
    keep_cols = S.sum(axis=0) > 0
    # RVA is scale-free; normalizing keeps tiny inputs out of the subnormal range
    S = S[keep_rows][:, keep_cols] / S.max()

    domain_share = S / S.sum(axis=0, keepdims=True)
    country_share = S.sum(axis=1, keepdims=True) / S.sum()
    rva = domain_share / country_share
    return RVAMatrix(
        [c for c, k in zip(sl.countries, keep_rows) if k],
        [d for d, k in zip(sl.domains, keep_cols) if k],
        rva,
        sl.year,
        sl.variant,
    )


def binarize(rva: RVAMatrix) -> SpecializationMatrix:
    # ">=" is deliberate: an RVA of exactly 1 counts as specialized
    return SpecializationMatrix(
        list(rva.countries),
        list(rva.domains),
        (rva.values >= 1.0 - RVA_TOL).astype(np.int64),
        rva.year,
        rva.variant,
    )


def specialization_matrix(data, year=None) -> SpecializationMatrix:
    return binarize(compute_rva(data, year))


def round_up_variant(data, year: int | None = None, quantum: float = 1e8) -> InvestmentSlice:
    """Round every nonzero cell up to the next multiple of ``quantum``."""
    if not quantum > 0:
        raise SpecializationError(f"quantum must be positive, got {quantum}")
    sl = _as_slice(data, year)
    S = sl.values
    ratio = S / quantum
    # an exact multiple can come back as k + 1 ulp from the division
    nearest = np.round(ratio)
    steps = np.where(np.isclose(ratio, nearest, rtol=1e-12, atol=0.0), nearest, np.ceil(ratio))
    rounded = np.where(S > 0, quantum * steps, 0.0)
    return InvestmentSlice(list(sl.countries), list(sl.domains), rounded, sl.year, "rounded")


def windowed_variant(tensor: InvestmentTensor, year: int, window: int = 2) -> InvestmentSlice:
    """Pool investment over ``year - window + 1 .. year``.

    Coverage is re-evaluated on the union of each country's firms across the
    window, so a country can pass here while failing in a single year.
    """
    if window < 1:
        raise SpecializationError(f"window must be >= 1, got {window}")
    years = list(range(year - window + 1, year + 1))
    for y in years:
        if y not in tensor.years:
            raise SpecializationError(f"year {y} missing from tensor for window ending {year}")
    idx = [tensor.years.index(y) for y in years]
    pooled = tensor.raw_values[:, :, idx].sum(axis=2)

    if tensor.firms:
        keep = np.array([
            len(frozenset().union(*(tensor.firms.get((c, y), frozenset()) for y in years)))
            >= tensor.min_classified_firms
            for c in tensor.countries
        ], dtype=bool)
    else:
        keep = np.ones(len(tensor.countries), dtype=bool)

    variant = "windowed" if window > 1 else "plain"
    return InvestmentSlice(
        [c for c, k in zip(tensor.countries, keep) if k],
        list(tensor.domains),
        pooled[keep],
        year,
        variant,
    )
