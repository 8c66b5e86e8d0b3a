# %% [markdown]
# # Fluctuations of the top outlier
#
# For a diagonal spike the limit law of sqrt(N)(lambda_1 - rho) depends on
# the entry law; for a fully delocalized spike it is Gaussian.  A small
# run shows the contrast (the shipped configs run the full-size version).

# %%
import math

import numpy as np
from scipy.special import ndtr

from spikelab.analytic import EntryLaw, fluctuation_target
from spikelab.harness import parse_config, run_experiment
from spikelab.stats import ks_stat

base = {"experiment": "fluct", "field": "real", "N": 300, "reps": 300,
        "entry_law": {"kind": "rademacher", "sigma": 1.0}, "seed": 5}

# %%
diag = run_experiment(parse_config({**base, "deformation": {"kind": "diagonal", "spikes": [[2.0, 1]]}}))
full = run_experiment(parse_config({**base, "deformation": {"kind": "full", "theta": 2.0}}))

# %%
target = fluctuation_target(EntryLaw.rademacher(), 2.0, field="real")
gauss = lambda y: ndtr(y / math.sqrt(1.5))  # noqa: E731
for name, rep in (("diagonal", diag), ("full", full)):
    x = np.array([r["rescaled"] for r in rep.records])
    print(f"{name:8s}: var={x.var(ddof=1):.3f}  KS vs target={ks_stat(x, target.cdf):.3f}  "
          f"KS vs N(0,1.5)={ks_stat(x, gauss):.3f}")

# %%
hist = np.histogram([r["rescaled"] for r in diag.records], bins=15, range=(-3, 3))[0]
for count, left in zip(hist, np.linspace(-3, 3, 16)):
    print(f"{left:+.1f} {'#' * int(count)}")
