# %% [markdown]
# # Roots of unity on bit strings
#
# exp(i*pi/p) acts on a length-p string of +/-1 labels as a signed
# permutation.  For p = 4 it sends {a1, a2, a3, a4} to {-a4, a3, a1, a2}.

# %%
from invset.bits import BitString, PhaseOperator, apply_phase, omega_apply, order_of

s = BitString([1, -1, -1, 1])
print(s, "->", omega_apply(s))

# %%
# Omega^2 plays the part of i, and i*i negates the string
i = PhaseOperator(4, 2)
print(i(i(s)) == -s)

# %%
for k in range(7):
    print(f"p={2**k:3d} order={order_of(2**k)}")

# %%
# phases move labels around but never change how many are +1
s = BitString([1, 1, 1, -1, -1, -1, -1, -1])
for n in range(0, 16, 3):
    t = apply_phase(s, n)
    print(n, "".join("+" if v > 0 else "-" for v in t))
