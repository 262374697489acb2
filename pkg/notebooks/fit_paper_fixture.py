# %% [markdown]
# # A 2024 matrix consistent with the reported tables
#
# The country x domain matrix behind the reported 2024 tables is not
# available.  This script searches, by margin-preserving swaps and simulated
# annealing, for a binary matrix with exactly the reported diversities
# and ubiquities, the specializations named in the write-up, and indices as
# close as possible to the reported ETGCI / GCI values.  The result is
# frozen in ``tests/data/paper_consistent_2024.csv``.

# %%
import sys
from pathlib import Path

import numpy as np
import pandas as pd
from scipy.stats import spearmanr

import geoecon as g

ETGCI = {
    "Cloud Computing": (2, 1.000), "Cybersecurity Tools": (3, 0.895), "Medtech": (3, 0.870),
    "Defense Technologies": (3, 0.818), "Autonomous Systems": (5, 0.723),
    "Artificial Intelligence (AI)": (7, 0.668), "Additive Manufacturing & Industry 4.0": (7, 0.637),
    "Nanotechnology & Semiconductors": (5, 0.590), "Biotechnology": (2, 0.566),
    "Space Technologies": (4, 0.426), "Edtech": (5, 0.343), "Quantum Computing": (11, 0.307),
    "Agritech & Foodtech": (8, 0.297), "Blockchain & Digital Currencies": (9, 0.263),
    "Energy & Energy Storage": (10, 0.250), "Mobility & Transportation": (8, 0.196),
    "Telecommunications": (4, 0.171), "Raw Materials & Recycling": (7, 0.000),
}
GCI = {
    "United States": (10, 0.685), "Israel": (10, 0.680), "China": (8, 0.539), "France": (6, 0.505),
    "Japan": (8, 0.495), "Germany": (9, 0.433), "Republic of Korea": (8, 0.381),
    "Singapore": (5, 0.331), "Switzerland": (5, 0.284), "India": (7, 0.280),
    "Netherlands": (5, 0.270), "United Kingdom": (5, 0.233), "Brazil": (5, 0.220),
    "Canada": (4, 0.214), "Australia": (5, 0.203), "Sweden": (3, 0.149),
}
tax = g.load_taxonomy()
domains = tax.ids
dom = {tax.name(d): j for j, d in enumerate(domains)}
countries = list(GCI)
ci = {c: i for i, c in enumerate(countries)}
div = np.array([GCI[c][0] for c in countries])
ubi = np.array([ETGCI[tax.name(d)][0] for d in domains])
e_target = np.array([ETGCI[tax.name(d)][1] for d in domains])
g_target = np.array([GCI[c][1] for c in countries])

# pinned cells: 1 = stated specialization, 0 = stated absence
pinned = {}
for c in countries:
    pinned[ci[c], dom["Cloud Computing"]] = int(c in ("Israel", "United States"))
# the write-up also names China (Cybersecurity) and France (Medtech) as third
# holders, but then Cloud Computing cannot be the top domain: the ETGCI gap
# to Cloud is that country's entry in the country eigenvector, positive as
# soon as its GCI exceeds the Perron-weighted mean ETGCI.  Only the leaders
# are pinned here.
for d in ("Cybersecurity Tools", "Medtech"):
    for c in ("Israel", "United States"):
        pinned[ci[c], dom[d]] = 1
for d in dom:
    pinned[ci["Sweden"], dom[d]] = int(d in ("Energy & Energy Storage", "Mobility & Transportation", "Raw Materials & Recycling"))
for c, d in [("China", "Artificial Intelligence (AI)"), ("China", "Autonomous Systems"),
             ("France", "Artificial Intelligence (AI)"), ("Japan", "Artificial Intelligence (AI)"),
             ("Japan", "Autonomous Systems")]:
    pinned[ci[c], dom[d]] = 1
# a country's SSSET is by definition a domain it is not yet specialized in
for c, d in [("France", "Autonomous Systems"), ("Singapore", "Artificial Intelligence (AI)"),
             ("India", "Artificial Intelligence (AI)"), ("Brazil", "Artificial Intelligence (AI)"),
             ("Brazil", "Additive Manufacturing & Industry 4.0"), ("Republic of Korea", "Defense Technologies"),
             ("Switzerland", "Autonomous Systems"), ("Netherlands", "Cybersecurity Tools"),
             ("Canada", "Cybersecurity Tools"), ("Japan", "Cybersecurity Tools"),
             ("United Kingdom", "Cybersecurity Tools"), ("United Kingdom", "Medtech"),
             ("Australia", "Cybersecurity Tools"), ("Australia", "Medtech"),
             # neither bloc member holds the top domains
             ("France", "Cybersecurity Tools"), ("Germany", "Cybersecurity Tools"),
             ("Germany", "Cloud Computing")]:
    pinned[ci[c], dom[d]] = 0
free = np.ones((len(countries), len(domains)), dtype=bool)
for (i, j) in pinned:
    free[i, j] = False

TARGET_SSSET = {  # country: (domains, rank change, relatedness rank)
    "United States": ((), 0, None), "Israel": ((), 0, None), "China": ((), 0, None),
    "France": (("Autonomous Systems",), 1, 2), "Japan": (("Cybersecurity Tools",), 2, 4),
    "Germany": ((), 0, None), "Republic of Korea": (("Defense Technologies",), 1, 6),
    "Singapore": (("Artificial Intelligence (AI)",), 1, 2), "Switzerland": (("Autonomous Systems",), 2, 7),
    "India": (("Artificial Intelligence (AI)",), 2, 3), "Netherlands": (("Cybersecurity Tools",), 4, 11),
    "United Kingdom": (("Cybersecurity Tools", "Medtech"), 4, 10),
    "Brazil": (("Additive Manufacturing & Industry 4.0", "Artificial Intelligence (AI)"), 4, 3),
    "Canada": (("Cybersecurity Tools",), 6, 13), "Australia": (("Cybersecurity Tools", "Medtech"), 6, 10),
    "Sweden": (("Cybersecurity Tools", "Medtech"), 7, 13),
}


def initial(rng):
    """Random matrix with the reported margins honouring pinned cells."""
    for _ in range(10000):
        X = np.zeros((len(countries), len(domains)), dtype=np.int64)
        for (i, j), v in pinned.items():
            X[i, j] = v
        need_r = div - X.sum(1)
        need_c = ubi - X.sum(0)
        ok = True
        for i in np.argsort(-need_r):
            cols = [j for j in range(len(domains)) if free[i, j] and need_c[j] > 0]
            if len(cols) < need_r[i]:
                ok = False
                break
            w = need_c[cols] + rng.random(len(cols))
            pick = np.array(cols, dtype=int)[np.argsort(-w)[: need_r[i]]]
            X[i, pick] = 1
            need_c[pick] -= 1
        if ok and (need_c == 0).all():
            return X
    raise RuntimeError("no feasible start")


CLOUD, RAW = dom["Cloud Computing"], dom["Raw Materials & Recycling"]
FR, DE, US, IL = ci["France"], ci["Germany"], ci["United States"], ci["Israel"]
AS = dom["Autonomous Systems"]


def fast_scores(X):
    """ETGCI and GCI without the library's validation overhead."""
    keep = X.sum(0) > 0
    Xk = X[:, keep]
    w, V = np.linalg.eigh((Xk.T @ Xk).astype(float))
    if w[-2] - w[-3] < 1e-9 * w[-1] or w[-1] - w[-2] < 1e-9 * w[-1]:
        return None, None
    y = V[:, -2]
    if spearmanr(y, Xk.sum(0)).statistic > 0:
        y = -y
    e = np.full(X.shape[1], np.nan)
    e[keep] = (y - y.min()) / (y.max() - y.min())
    e0 = np.nan_to_num(e)
    return e, (X @ e0) / X.sum(1)


def perron_mean(X, e):
    keep = X.sum(0) > 0
    w, V = np.linalg.eigh((X[:, keep].T @ X[:, keep]).astype(float))
    p = np.abs(V[:, -1])
    return float(p @ e[keep] / p.sum())


LABEL_ORDER = np.argsort(np.argsort(countries))


def ranks_of(gc, labels=LABEL_ORDER):
    order = np.lexsort((labels, -np.round(gc, 12)))
    r = np.empty(len(gc), dtype=int)
    r[order] = np.arange(1, len(gc) + 1)
    return r


def violations(X, e, gc):
    """Count of unmet example constraints (0 means all hold)."""
    v = float(np.argmax(e) != CLOUD) + float(np.argmin(e) != RAW)
    r = ranks_of(gc)
    v += float(np.sum(r[:5] != np.arange(1, 6)))
    mean_u = (X @ X.sum(0)) / X.sum(1)
    v += float(set(np.argsort(mean_u, kind="stable")[:2]) != {US, IL})
    # France: Autonomous Systems is the unique best toggle, +1
    best, picks = 0, []
    for j in np.flatnonzero(X[FR] == 0):
        Y = X.copy()
        Y[FR, j] = 1
        _, g2 = fast_scores(Y)
        if g2 is None:
            continue
        ch = r[FR] - ranks_of(g2)[FR]
        if ch > best:
            best, picks = ch, [j]
        elif ch == best and ch > 0:
            picks.append(j)
    phi = X.T @ X
    np.fill_diagonal(phi, 0)
    score = phi @ X[FR]
    cand = picks if picks else []
    if cand:
        rel = {j: 1 + int(np.sum(score[X[FR] == 0] > score[j])) for j in cand}
        top = min(rel.values())
        cand = sorted(j for j in cand if rel[j] == top)
    v += float(cand != [AS]) + float(best != 1)
    v += float(1 + np.sum(score[X[FR] == 0] > score[AS]) != 2)
    # bloc France+Germany must not beat France's baseline
    Z = np.delete(X, DE, axis=0)
    Z[FR if FR < DE else FR - 1] = np.maximum(X[FR], X[DE])
    _, gz = fast_scores(Z)
    if gz is None or ranks_of(gz, np.delete(LABEL_ORDER, DE))[FR if FR < DE else FR - 1] < r[FR]:
        v += 1.0
    return v


def loss(X, with_ssset=False):
    e, gc = fast_scores(X)
    if e is None:
        return np.inf
    val = violations(X, e, gc)
    # smooth versions of the endpoint and ordering constraints guide the walk
    val += np.max(np.delete(e, CLOUD)) - e[CLOUD] + e[RAW] - np.min(np.delete(e, RAW))
    # Cloud Computing (held by the US and Israel only) tops the domain index
    # once every other country sits on the negative side of the country
    # eigenvector, i.e. has GCI below the Perron-weighted mean ETGCI
    x = X @ (np.nan_to_num(e) - perron_mean(X, e))
    val += 3 * np.sum(np.maximum(0.0, np.delete(x, [US, IL]))) / X.shape[1]
    top = gc[:5]
    val += np.sum(np.maximum(0.0, np.diff(top))) + max(0.0, np.max(gc[5:]) - top[-1])
    val += 0.05 * (np.sum((e - e_target) ** 2) + np.sum((gc - g_target) ** 2))
    if with_ssset:
        M = g.SpecializationMatrix(countries, domains, X)
        rep = g.find_ssset(M)
        for c, (ds, rc, rr) in TARGET_SSSET.items():
            ent = rep[c]
            names = tuple(sorted(tax.name(d) for d in ent.domains))
            val += 0.02 * (names != tuple(sorted(ds))) + 0.01 * abs(ent.rank_change - rc)
            if rr is not None and ent.relatedness_rank is not None:
                val += 0.005 * abs(ent.relatedness_rank - rr)
    return val


def anneal(rng, X, steps, with_ssset, t0=0.02):
    cur = loss(X, with_ssset)
    best, best_X = cur, X.copy()
    n, m = X.shape
    for s in range(steps):
        t = t0 * (1 - s / steps) + 1e-5
        r1, r2 = rng.choice(n, 2, replace=False)
        c1, c2 = rng.choice(m, 2, replace=False)
        if not (X[r1, c1] == 1 and X[r2, c2] == 1 and X[r1, c2] == 0 and X[r2, c1] == 0):
            continue
        if not (free[r1, c1] and free[r2, c2] and free[r1, c2] and free[r2, c1]):
            continue
        Y = X.copy()
        Y[r1, c1] = Y[r2, c2] = 0
        Y[r1, c2] = Y[r2, c1] = 1
        new = loss(Y, with_ssset)
        if new < cur or rng.random() < np.exp(-(new - cur) / t):
            X, cur = Y, new
            if cur < best:
                best, best_X = cur, X.copy()
    return best, best_X


# %%
if __name__ == "__main__":
    seed = int(sys.argv[1]) if len(sys.argv) > 1 else 0
    rng = np.random.default_rng(seed)
    best, X = np.inf, None
    starts = [pd.read_csv(sys.argv[3], index_col=0).to_numpy()] if len(sys.argv) > 3 else []
    for restart in range(int(sys.argv[4]) if len(sys.argv) > 4 else 4):
        start = starts[0] if starts else initial(rng)
        b, Y = anneal(rng, start.copy(), 40000, False, t0=0.3)
        if b < best:
            best, X = b, Y
    best, X = anneal(rng, X, 3000, True, t0=0.005)
    print("loss", best, "violations", violations(X, *fast_scores(X)))
    M = g.SpecializationMatrix(countries, domains, X, year=2024)
    rep = g.complexity_report(M)
    print(rep.countries.assign(target=g_target))
    print(rep.domains.assign(target=e_target, name=[tax.name(d) for d in domains]))
    for ent in g.find_ssset(M).entries:
        print(ent.country, [tax.name(d) for d in ent.domains], ent.rank_change, ent.relatedness_rank, TARGET_SSSET[ent.country])
    out = Path(sys.argv[2]) if len(sys.argv) > 2 else None
    if out:
        pd.DataFrame(X, index=pd.Index(countries, name="country"), columns=domains).to_csv(out)
