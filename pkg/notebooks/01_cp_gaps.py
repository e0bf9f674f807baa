# %% [markdown]
# # Gaps in C_p
#
# Members of C_p have rational squared amplitude m/p and rational phase n/p
# (in turns).  Multiplication never leaves the family.  Addition does, and
# the cosine of the phase difference decides when.

# %%
from fractions import Fraction as F

from invset import cp

a = cp.make_cp(1, 0, 8)
b = cp.make_cp(1, 1, 8)
print("a*b =", cp.mul(a, b))

# %% [markdown]
# Sum of two unit vectors 45 degrees apart.  |a+b|^2 = 2 + sqrt(2), so no
# grid of any size contains it.

# %%
value, verdict = cp.try_add(a, b)
print(verdict.tag, verdict.exact, verdict.numeric[:20])
print(verdict.proof)

# %% [markdown]
# Only denominators 1, 2, 3, 4, 6 give rational cosines.

# %%
for n in range(1, 13):
    c = cp.niven_classify(F(1, n))
    print(f"n={n:2d} degree={c.degree} rational={c.rational} value={c.value}")

# %%
# a 120 degree gap closes, the result sitting at 60 degrees
print(cp.try_add(cp.make_cp(1, 0, 3), cp.make_cp(1, 1, 3)))

# %%
# sin^2 of the wave-vector step: rational only on the doubled Niven angles
for turn in (F(1, 12), F(1, 8), F(1, 10)):
    amp, value, verdict = cp.momentum_difference(turn, 1)
    print(turn, amp, verdict.tag)
