# %% [markdown]
# # CHSH on the grid, and what the audits see
#
# Singlet pairs are realised by counting: at relative angle theta with
# cos(theta) = 1 - 2m/p, m of p pairs agree.  Only grid angles exist.

# %%
from fractions import Fraction as F

from invset import bell

for k in (4, 8, 12, 16, 20):
    p = 2**k
    r = bell.run_grid_experiment(p, bell.tsirelson_angles(p))
    print(f"p=2^{k:2d} |S|={float(r.abs_S):.8f} gap={bell.TSIRELSON - float(r.abs_S):.2e}")

# %%
# a setting that is off the grid is refused, with the nearest grid angle
try:
    bell.grid_angle(16, F(1, 8))
except bell.OffGridAngle as e:
    print(e)

# %%
print("classical max", max(v.abs_S for v in bell.classical_chsh_values()))

# %% [markdown]
# Hidden variables are addresses.  The two coarsest disk colours pick the
# world's settings; the rest is payload.  The payload distribution is the
# same in all four worlds, but the measure mu vanishes for every setting
# except the world's own.

# %%
lams = bell.enumerate_lambdas(4, 2)
print(bell.check_SI_rho(lams).passed)
print(bell.check_SI_mu(4, 2).to_dict())
print(bell.counterfactual_audit(4, 2).to_dict())

# %%
sample = bell.sample_hidden_variables(4, 2, 100_000, seed=12345)
print(bell.check_SI_rho(sample, mode="chi2").to_dict())
biased = bell.sample_hidden_variables(4, 2, 10_000, seed=3, bias=0.5)
print(bell.check_SI_rho(biased, mode="chi2").to_dict())
