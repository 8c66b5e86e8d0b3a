# %% [markdown]
# # No eigenvalues in the gaps, and exact separation
#
# Outside an epsilon-neighbourhood of the limiting support there are no
# eigenvalues, and the number of eigenvalues on each side of a gap is
# exactly the number of spikes mapped there.

# %%
from spikelab.analytic import DeformationSpec, separation_plan, support_set
from spikelab.harness import parse_config, run_experiment

spec = DeformationSpec.diagonal([(3.0, 2), (0.5, 1), (-2.5, 1)])
print("support:", support_set(spec, 1.0, 0.0).components())
plan = separation_plan(2.2, 3.0, spec, 1.0, 1000)
print(f"[2.2, 3.0] -> i_N={plan.i_N}, preimage [{plan.a_prime:.4f}, {plan.b_prime:.4f}]")

# %%
common = {"field": "real", "N": 1000, "reps": 10, "entry_law": {"kind": "gaussian", "sigma": 1.0}}
sep = run_experiment(parse_config({**common, "experiment": "separation",
                                   "deformation": spec.to_dict(), "experiment_params": {"a": 2.2, "b": 3.0}}))
gaps = run_experiment(parse_config({**common, "experiment": "gaps",
                                    "deformation": {"kind": "diagonal", "spikes": [[2.0, 1]]},
                                    "experiment_params": {"epsilon": 0.1}}))
for rep in (sep, gaps):
    for line in rep.summary_lines():
        print(line)
