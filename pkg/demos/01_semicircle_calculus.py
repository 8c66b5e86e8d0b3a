# %% [markdown]
# # Semicircle calculus
#
# The Stieltjes transform of the semicircle law, the outlier map
# rho(theta) = theta + sigma^2/theta, and the limit law of the top
# eigenvalue fluctuations, all in closed form.

# %%
import numpy as np

from spikelab.analytic import (
    DeformationSpec, EntryLaw, L_sigma, fluctuation_target, g_sc, predict_limits, rho,
    semicircle_cdf, support_set,
)

# %% [markdown]
# `g_sc` solves sigma^2 g^2 - z g + 1 = 0 on the branch that decays at infinity.

# %%
z = np.array([1 + 1j, 3.0 + 0.5j, -0.2 + 2j])
g = g_sc(z)
print("g(z)          :", np.round(g, 6))
print("equation error:", np.abs(g**2 - z * g + 1).max())
print("F(1)          :", semicircle_cdf(1.0))

# %% [markdown]
# A spike theta > sigma pulls an eigenvalue out to rho(theta); 1/g undoes it.

# %%
for theta in (1.5, 2.0, 3.0):
    print(f"theta={theta}: rho={rho(theta):.6f}, 1/g(rho)={1 / g_sc(rho(theta)):.12f}")

spec = DeformationSpec.diagonal([(3.0, 2), (0.5, 1), (-2.5, 1)])
print(predict_limits(spec, 1.0, 1000).as_dict())
print(support_set(spec, 1.0, 0.1).components())

# %% [markdown]
# The first-order correction L(z) to E[tr_N G(z)], and the non-Gaussian
# limit law of sqrt(N)(lambda_1 - rho) for Rademacher entries.

# %%
print("L(1+i):", L_sigma(1 + 1j, DeformationSpec.diagonal([(2.0, 1)]), EntryLaw.gaussian()))
target = fluctuation_target(EntryLaw.rademacher(), 2.0, field="real")
x = np.linspace(-3, 3, 13)
print("target variance:", target.variance)
print("target pdf     :", np.round(target.pdf(x), 4))
