# %% [markdown]
# # Single-step strategies and blocs
#
# Runs the strategy tools on the 16 x 18 matrix in
# `tests/data/paper_consistent_2024.csv` (see `fit_paper_fixture.py` for how
# it was built), then shows why summing raw investment across bloc members
# can lose a specialization that one member holds on its own.

# %%
from pathlib import Path

import numpy as np
import pandas as pd

import geoecon as g

root = Path(__file__).resolve().parent.parent
frame = pd.read_csv(root / "tests" / "data" / "paper_consistent_2024.csv", index_col="country")
M = g.SpecializationMatrix(list(frame.index), list(frame.columns), frame.to_numpy(), year=2024)
tax = g.load_taxonomy()
report = g.complexity_report(M)
print(report.countries.sort_values("rank"))

# %% [markdown]
# ## SSSET table
#
# For every country, each missing domain is added in turn and the whole
# index is recomputed. The SSSET is the addition with the largest rank gain,
# with ties broken by relatedness to the country's current portfolio.

# %%
ssset = g.find_ssset(M)
rows = []
for e in ssset.entries:
    rows.append({
        "country": e.country,
        "rank": e.baseline_rank,
        "ssset": ", ".join(tax.name(d) for d in e.domains) or "-",
        "rank change": e.rank_change,
        "relatedness rank": e.relatedness_rank,
    })
print(pd.DataFrame(rows).set_index("country").to_string())

# %% [markdown]
# ## France and Germany as a bloc
#
# Under the default rule the bloc is specialized wherever either member is.
# The union of the two portfolios dilutes France's rare domains with
# Germany's common ones, so the bloc does not outrank France alone.

# %%
bloc = g.bloc_experiment(M, ["France", "Germany"])
print(bloc.to_dict())
# requiring both members keeps only the shared specializations
res = g.bloc_experiment(M, ["France", "Germany"], rule="at_least_k", k=2)
print("at least 2: rank", res.bloc_rank, "domains", res.bloc_domains)

# %% [markdown]
# ## Dilution under naive summation
#
# Three countries, two domains. A puts 80% of its money into X and so has
# RVA 1.6 there. Pooling A with B, which invests almost only in Y, gives an
# X share of 9/50 against a world share of 1/2, so the naive bloc loses X.

# %%
S = np.array([[8.0, 2.0], [1.0, 39.0], [41.0, 9.0]])
sl = g.InvestmentSlice(["A", "B", "C"], ["X", "Y"], S, 2024)
print(g.compute_rva(sl).values)
# two domains are too few for the index itself, so compare the bloc rows
from geoecon.strategy import bloc_matrix, naive_bloc_matrix

print("any member:", bloc_matrix(g.binarize(g.compute_rva(sl)), ["A", "B"]))
naive = naive_bloc_matrix(sl, ["A", "B"])
print("naive sum: ", naive.values[naive.countries.index("A+B")])
