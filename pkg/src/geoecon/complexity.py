"""Diversity, ubiquity and the eigenvector complexity indices (ETGCI, GCI)."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import pandas as pd
from scipy.stats import spearmanr

from .errors import ComplexityError, ConvergenceError, DegenerateSpectrumError
from .specialization import SpecializationMatrix

SYMMETRY_TOL = 1e-12
RESIDUAL_TOL = 1e-10
# relative gap below which two eigenvalues are treated as equal
DEGENERACY_TOL = 1e-9
# rounding applied before sign/rank decisions so that mathematically equal
# scores compare equal
SCORE_DECIMALS = 12
CORR_TOL = 1e-12


def _values(M) -> np.ndarray:
    return M.values if isinstance(M, SpecializationMatrix) else np.asarray(M)


def diversity(M) -> np.ndarray:
    """Number of domains each country is specialized in (row sums)."""
    return _values(M).sum(axis=1)


def ubiquity(M) -> np.ndarray:
    """Number of countries specialized in each domain (column sums)."""
    return _values(M).sum(axis=0)


def cooccurrence(M, kind: str = "country") -> np.ndarray:
    """``M M^T`` for ``kind="country"``, ``M^T M`` for ``kind="domain"``."""
    X = _values(M).astype(np.int64)
    if kind == "country":
        return X @ X.T
    if kind == "domain":
        return X.T @ X
    raise ComplexityError(f"kind must be 'country' or 'domain', got {kind!r}")


@dataclass
class EigenResult:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # column k pairs with eigenvalues[k]
    matrix_kind: str | None = None

    def vector(self, k: int) -> np.ndarray:
        return self.eigenvectors[:, k]


def top_eigenpairs(A, k: int = 2, matrix_kind: str | None = None) -> EigenResult:
    """The ``k`` largest eigenpairs of a symmetric matrix, descending.

    Each eigenvector has unit norm and is signed so that its largest-magnitude
    entry (first one on ties) is positive, which makes the output
    deterministic for a given input.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ComplexityError(f"expected a square matrix, got shape {A.shape}")
    if k < 1 or k > A.shape[0]:
        raise ComplexityError(f"k must be in [1, {A.shape[0]}], got {k}")
    asym = np.max(np.abs(A - A.T)) if A.size else 0.0
    if asym > SYMMETRY_TOL:
        raise ComplexityError(f"matrix is not symmetric (max |A - A^T| = {asym:.3e})")

    try:
        w, V = np.linalg.eigh(A)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"symmetric eigensolver did not converge on {A.shape} input: {exc}") from exc

    order = np.argsort(-w, kind="stable")[:k]
    w = w[order]
    V = V[:, order]
    for j in range(k):
        v = V[:, j]
        pivot = np.argmax(np.abs(v))
        if v[pivot] < 0:
            V[:, j] = -v

    residuals = np.max(np.abs(A @ V - V * w), axis=0)
    if np.any(residuals > RESIDUAL_TOL):
        raise ConvergenceError(
            f"eigenpair residuals {residuals} exceed {RESIDUAL_TOL:g} on {A.shape} input"
        )
    return EigenResult(w, V, matrix_kind)


def _trim(X: np.ndarray):
    rows = X.sum(axis=1) > 0
    cols = X.sum(axis=0) > 0
    return X[rows][:, cols], rows, cols


def _is_degenerate(w: np.ndarray, k: int) -> bool:
    scale = max(1.0, abs(w[0]))
    tol = DEGENERACY_TOL * scale
    left = abs(w[k - 1] - w[k]) <= tol
    right = k + 1 < len(w) and abs(w[k] - w[k + 1]) <= tol
    return left or right


def compute_etgci(M) -> np.ndarray:
    """Domain complexity from the second eigenvector of ``M^T M``.

    The eigenvector is signed to be negatively rank-correlated with ubiquity
    and min-max scaled to [0, 1].  Domains with zero ubiquity get NaN.
    """
    X = _values(M)
    Xt, _, cols = _trim(X)
    if Xt.shape[1] < 2 or Xt.shape[0] < 2:
        raise ComplexityError(
            f"need at least 2 countries and 2 domains with specializations, got {Xt.shape}"
        )
    A = cooccurrence(Xt, "domain")
    # the full spectrum is needed to check multiplicity of the second eigenvalue
    eig = top_eigenpairs(A, k=A.shape[0], matrix_kind="domain_cooccurrence")
    if _is_degenerate(eig.eigenvalues, 1):
        raise DegenerateSpectrumError(
            f"degenerate spectrum: second eigenvalue {eig.eigenvalues[1]:.12g} is repeated"
        )
    y = np.round(eig.vector(1), SCORE_DECIMALS) + 0.0
    if np.ptp(y) == 0:
        raise DegenerateSpectrumError("second eigenvector is constant; ETGCI undefined")
    ubiq = Xt.sum(axis=0)
    rho = spearmanr(y, ubiq).statistic if np.ptp(ubiq) > 0 else np.nan
    # correlations that vanish analytically come back as +-1e-17
    if np.isnan(rho) or abs(rho) < CORR_TOL:
        rho = np.corrcoef(y, ubiq)[0, 1] if np.ptp(ubiq) > 0 else 0.0
    if np.isnan(rho) or abs(rho) < CORR_TOL:
        # ubiquity carries no sign information; anchor on the first domain by
        # label with a clearly nonzero component so relabelling cannot flip it
        labels = getattr(M, "domains", None) or [f"{j:09d}" for j in range(X.shape[1])]
        kept = [lab for lab, k in zip(labels, cols) if k]
        anchor = next((k for k in sorted(range(len(kept)), key=kept.__getitem__) if abs(y[k]) > 1e-9), 0)
        rho = -y[anchor]
    if rho > 0:
        y = -y
    span = y.max() - y.min()
    out = np.full(X.shape[1], np.nan)
    out[cols] = (y - y.min()) / span
    return out


def compute_gci(M, etgci) -> np.ndarray:
    """Mean ETGCI over each country's specialized domains.

    Countries without any specialization get NaN (with a warning).
    """
    X = _values(M).astype(float)
    e = np.asarray(etgci, dtype=float)
    if e.shape != (X.shape[1],):
        raise ComplexityError(f"etgci has shape {e.shape}, expected ({X.shape[1]},)")
    div = X.sum(axis=1)
    empty = div == 0
    if empty.any():
        names = np.asarray(M.countries)[empty] if isinstance(M, SpecializationMatrix) else np.flatnonzero(empty)
        warnings.warn(f"countries with no specialization excluded from GCI: {list(names)}", stacklevel=2)
    totals = np.where(X > 0, e[np.newaxis, :], 0.0).sum(axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        gci = np.where(empty, np.nan, totals / np.where(empty, 1, div))
    return gci


def rank(scores, labels) -> np.ndarray:
    """Ordinal ranks, 1 for the highest score; ties go to the smaller label.

    NaN scores are left unranked (rank 0).
    """
    scores = np.round(np.asarray(scores, dtype=float), SCORE_DECIMALS)
    labels = list(labels)
    ranked = [i for i in range(len(labels)) if not np.isnan(scores[i])]
    ranked.sort(key=lambda i: (-scores[i], labels[i]))
    out = np.zeros(len(labels), dtype=np.int64)
    for r, i in enumerate(ranked, start=1):
        out[i] = r
    return out


@dataclass
class ComplexityReport:
    year: int
    variant: str
    countries: pd.DataFrame  # index: country; columns diversity, gci, rank
    domains: pd.DataFrame  # index: domain; columns ubiquity, etgci, rank

    def country_ranking(self) -> list[str]:
        ranked = self.countries[self.countries["rank"] > 0].sort_values("rank")
        return list(ranked.index)

    def domain_ranking(self) -> list[str]:
        ranked = self.domains[self.domains["rank"] > 0].sort_values("rank")
        return list(ranked.index)


def complexity_report(M: SpecializationMatrix) -> ComplexityReport:
    etgci = compute_etgci(M)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        gci = compute_gci(M, etgci)
    countries = pd.DataFrame(
        {"diversity": diversity(M), "gci": gci, "rank": rank(gci, M.countries)},
        index=pd.Index(M.countries, name="country"),
    )
    domains = pd.DataFrame(
        {"ubiquity": ubiquity(M), "etgci": etgci, "rank": rank(etgci, M.domains)},
        index=pd.Index(M.domains, name="domain"),
    )
    return ComplexityReport(M.year, M.variant, countries, domains)
