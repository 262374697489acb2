# %% [markdown]
# # From deals to complexity indices
#
# A synthetic deal file goes through the whole pipeline: firm selection,
# domain thresholding, the country x domain investment tensor, RVA, the
# binary specialization matrix, and finally the ETGCI / GCI tables.
#
# Run with `python3 notebooks/01_from_deals_to_indices.py`.

# %%
import io

import numpy as np

import geoecon as g
from geoecon.synth import SynthParams, generate

params = SynthParams(seed=4, countries=6, domains=8, firms_per_country=600, nestedness=0.8)
files = generate(params)
print(files["deals.csv"][:200])

# %% [markdown]
# Each firm raises once per year. The default filters keep the top 3000 firms
# per country-year by calendar-year raise (at least $1M), and the firm's top
# two domains at probability >= 0.5. A country-year then needs at least 500
# classified firms to count.

# %%
taxonomy = g.load_taxonomy(io.StringIO(files["taxonomy.json"]))
tensor = g.build_tensor(
    io.StringIO(files["deals.csv"]),
    io.StringIO(files["classifications.csv"]),
    taxonomy,
    g.FilterParams(),
)
print(tensor.countries, tensor.years, tensor.raw_values.shape)

# %%
rva = g.compute_rva(tensor, params.year)
M = g.binarize(rva)
np.set_printoptions(precision=2, suppress=True)
print(rva.values)
print(M.values)

# %% [markdown]
# RVA compares a country's share of a domain with its share of all
# investment, and M marks the cells at or above 1. Every active country is
# specialized somewhere because its RVAs average to one.

# %%
report = g.complexity_report(M)
print(report.domains.sort_values("rank"))
print(report.countries.sort_values("rank"))

# %% [markdown]
# ## Robustness variants
#
# Rounding every cell up to the next $100M damps small-flow noise. A 2-year
# window pools adjacent years and re-checks coverage on the pooled firms.

# %%
rounded = g.specialization_matrix(g.round_up_variant(tensor, params.year, quantum=1e8))
windowed = g.specialization_matrix(g.windowed_variant(tensor, params.year, window=2))
for name, other in [("rounded", rounded), ("windowed", windowed)]:
    flips = int((other.values != M.values).sum())
    print(f"{name}: {flips} cells differ from the plain matrix")
    print(g.complexity_report(other).country_ranking())
