# %% [markdown]
# # A central limit theorem for quadratic forms
#
# (Y* B Y - Tr B)/sqrt(N) is asymptotically normal with variance
# (E|y|^4 - 1 - t/2) a1^2 + (t/2) a2.  Rademacher entries with B = I give
# an exactly degenerate case.

# %%
from spikelab.analytic import EntryLaw
from spikelab.quadform import QuadFormSpec, bai_silverstein_ratio, clt_variance, mc_quadform

specs = {
    "identity, gaussian": QuadFormSpec("identity", 400, EntryLaw.gaussian()),
    "identity, rademacher": QuadFormSpec("identity", 400, EntryLaw.rademacher()),
    "identity, complex gaussian": QuadFormSpec("identity", 400, EntryLaw.gaussian(), "complex"),
    "circulant (0, 1/2)": QuadFormSpec("circulant", 400, EntryLaw.gaussian(), coefficients=(0.0, 0.5)),
    "diagonal f(u) = u": QuadFormSpec("diagonal", 400, EntryLaw.gaussian(), symbol_power=1),
}

# %%
for name, spec in specs.items():
    res = mc_quadform(spec, 10000, seed=1, ks_threshold=0.03)
    ks = "skipped" if res.ks_skipped else f"{res.ks_vs_gaussian.statistic:.4f}"
    print(f"{name:27s} predicted {clt_variance(spec).v_sq:.4f}  observed {res.sample_variance:.4f}  KS {ks}")

# %%
for N in (50, 200, 800):
    r = bai_silverstein_ratio(QuadFormSpec("identity", N, EntryLaw.gaussian()), 2000, seed=N)
    print(f"N={N}: E|Y*BY - TrB|^2 / Tr BB* = {r:.3f}")
