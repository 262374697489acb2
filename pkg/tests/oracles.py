"""Brute-force reference computations, kept independent of the package code."""

import itertools

import numpy as np
from scipy import linalg
from scipy.optimize import brentq


# --- eigenvalues by root-finding on det(A - lambda I) -----------------------

def count_below(A, lam):
    """Number of eigenvalues of symmetric A below ``lam`` (Sylvester inertia
    of A - lam I via a symmetric indefinite LDL^T factorization)."""
    n = A.shape[0]
    _, d, _ = linalg.ldl(A - lam * np.eye(n))
    neg, i = 0, 0
    while i < n:
        if i + 1 < n and d[i, i + 1] != 0:
            a, b, c = d[i, i], d[i, i + 1], d[i + 1, i + 1]
            det = a * c - b * b
            if det < 0:
                neg += 1
            elif a + c < 0:
                neg += 2
            i += 2
        else:
            neg += d[i, i] < 0
            i += 1
    return int(neg)


def char_det(A, lam):
    return linalg.det(A - lam * np.eye(A.shape[0]))


def kth_largest_eigenvalue(A, k):
    """k-th largest eigenvalue (k = 1 is the largest): bracket by bisection on
    the inertia count, then polish the root of det(A - lambda I)."""
    n = A.shape[0]
    radius = np.max(np.sum(np.abs(A), axis=1)) + 1.0
    lo, hi = -radius, radius
    target = n - k  # eigenvalues strictly below the answer
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        below = count_below(A, mid)
        if below <= target:
            lo = mid
        else:
            hi = mid
        # stop once the bracket isolates a single eigenvalue (root polishing
        # below is then safe) or has collapsed onto a repeated one
        isolated = count_below(A, lo) == target and count_below(A, hi) == target + 1
        if isolated or hi - lo < 1e-13 * max(1.0, radius):
            break
    f_lo, f_hi = char_det(A, lo), char_det(A, hi)
    if f_lo != 0 and f_hi != 0 and np.sign(f_lo) != np.sign(f_hi):
        return brentq(lambda x: char_det(A, x), lo, hi, xtol=1e-15, rtol=1e-15)
    return 0.5 * (lo + hi)


def eigenvector_for(A, lam, iters=4):
    """Inverse iteration with a tiny shift off ``lam``."""
    n = A.shape[0]
    shift = lam + 1e-10 * max(1.0, abs(lam))
    lu = linalg.lu_factor(A - shift * np.eye(n))
    x = np.ones(n) / np.sqrt(n) + np.linspace(0, 1e-3, n)
    for _ in range(iters):
        x = linalg.lu_solve(lu, x)
        x /= np.linalg.norm(x)
    return x


# --- ingest -------------------------------------------------------------------

def tensor_cell_by_rescan(deals, selected, firm_domains, country, domain, year, split=False):
    total = 0.0
    for d in deals:
        if d.country != country or d.year != year:
            continue
        if (d.country, d.year, d.firm_id) not in selected:
            continue
        doms = firm_domains.get(d.firm_id, set())
        if domain in doms:
            total += d.amount_usd / len(doms) if split else d.amount_usd
    return total


def select_by_full_sort(deals, top_n, min_raise):
    totals = {}
    for d in deals:
        key = (d.country, d.year, d.firm_id)
        totals[key] = totals.get(key, 0.0) + d.amount_usd
    out = set()
    slices = sorted({(c, y) for c, y, _ in totals})
    for c, y in slices:
        rows = sorted(
            ((-r, f) for (cc, yy, f), r in totals.items() if cc == c and yy == y and r >= min_raise)
        )
        out.update((c, y, f) for _, f in rows[:top_n])
    return out


# --- specialization / complexity ---------------------------------------------

def rva_by_loops(S):
    S = np.asarray(S, dtype=float)
    n, m = S.shape
    total = S.sum()
    out = np.zeros_like(S)
    for i in range(n):
        for j in range(m):
            col = sum(S[k, j] for k in range(n))
            row = sum(S[i, k] for k in range(m))
            out[i, j] = (S[i, j] / col) / (row / total)
    return out


def pair_counts(X):
    """phi[j, k] by explicit loops over countries and domain pairs."""
    X = np.asarray(X)
    n, m = X.shape
    phi = np.zeros((m, m), dtype=int)
    for j in range(m):
        for k in range(m):
            if j != k:
                phi[j, k] = sum(1 for c in range(n) if X[c, j] and X[c, k])
    return phi


def _ranks_avg(v):
    order = np.argsort(v, kind="stable")
    r = np.empty(len(v))
    r[order] = np.arange(len(v))
    # average ties
    for val in np.unique(v):
        idx = v == val
        r[idx] = r[idx].mean()
    return r


def scores_from_scratch(X, tol=1e-9):
    """(etgci, gci) computed directly, or None when the second eigenvalue is
    repeated."""
    X = np.asarray(X)
    rows = X.sum(1) > 0
    cols = X.sum(0) > 0
    Xt = X[rows][:, cols]
    if Xt.shape[0] < 2 or Xt.shape[1] < 2:
        return None
    A = Xt.T @ Xt
    w, V = linalg.eigh(A.astype(float))
    w, V = w[::-1], V[:, ::-1]
    scale = max(1.0, abs(w[0]))
    if abs(w[0] - w[1]) <= tol * scale or (len(w) > 2 and abs(w[1] - w[2]) <= tol * scale):
        return None
    y = np.round(V[:, 1], 12) + 0.0
    if np.ptp(y) == 0:
        return None
    u = Xt.sum(0)
    rho = 0.0
    if np.ptp(u) > 0:
        rho = np.corrcoef(_ranks_avg(y), _ranks_avg(u.astype(float)))[0, 1]
        if abs(rho) < 1e-12 or np.isnan(rho):
            rho = np.corrcoef(y, u)[0, 1]
    if abs(rho) < 1e-12 or np.isnan(rho):
        # no ubiquity signal: first column (in label order) with a real component is positive
        first = next((k for k in range(len(y)) if abs(y[k]) > 1e-9), 0)
        rho = -y[first]
    if rho > 0:
        y = -y
    e_full = np.full(X.shape[1], np.nan)
    e_full[cols] = (y - y.min()) / (y.max() - y.min())
    gci = np.full(X.shape[0], np.nan)
    for c in range(X.shape[0]):
        held = [e_full[j] for j in range(X.shape[1]) if X[c, j]]
        if held:
            gci[c] = sum(held) / len(held)
    return e_full, gci


def ordinal_ranks(scores, labels):
    s = np.round(scores, 12)
    idx = sorted((i for i in range(len(labels)) if not np.isnan(s[i])), key=lambda i: (-s[i], labels[i]))
    r = np.zeros(len(labels), dtype=int)
    for pos, i in enumerate(idx, 1):
        r[i] = pos
    return r


def ssset_by_enumeration(X, countries, domains):
    """{country: (domains tuple, rank_change, relatedness_rank)} by toggling
    every empty cell and recomputing from scratch."""
    X = np.asarray(X)
    n, m = X.shape
    base = scores_from_scratch(X)
    assert base is not None, "baseline must be non-degenerate"
    base_ranks = ordinal_ranks(base[1], countries)
    phi = pair_counts(X)
    result = {}
    for c in range(n):
        empty = [j for j in range(m) if X[c, j] == 0]
        score = {j: sum(phi[j, k] for k in range(m) if X[c, k]) for j in empty}
        rel_rank = {j: 1 + sum(1 for k in empty if score[k] > score[j]) for j in empty}
        gains = {}
        for j in empty:
            Y = X.copy()
            Y[c, j] = 1
            res = scores_from_scratch(Y)
            if res is None:
                continue
            gains[j] = base_ranks[c] - ordinal_ranks(res[1], countries)[c]
        best = max(gains.values(), default=0)
        if best <= 0:
            result[countries[c]] = ((), 0, None)
            continue
        top = [j for j, v in gains.items() if v == best]
        closest = min(rel_rank[j] for j in top)
        chosen = tuple(sorted(domains[j] for j in top if rel_rank[j] == closest))
        result[countries[c]] = (chosen, best, closest)
    return result


def all_binary_matrices(n, m):
    for bits in itertools.product((0, 1), repeat=n * m):
        yield np.array(bits).reshape(n, m)
