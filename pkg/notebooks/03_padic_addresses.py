# %% [markdown]
# # Fractal addresses as p-adic integers
#
# A point in the nested-disk fractal is named by the disk it enters at each
# level, coarsest first.  Read as base-p digits (least significant first)
# this is a truncated p-adic integer, and sharing a long prefix means being
# p-adically close.

# %%
from invset import padic
from invset.padic import PadicInt

x = PadicInt(4, (1, 3, 0))
y = PadicInt(4, (1, 2, 2))
z = PadicInt(4, (2, 3, 0))
for conv in (padic.STANDARD, padic.UNNORMALIZED):
    print(conv, padic.distance(x, y, conv), padic.distance(x, z, conv))

# %%
print(padic.distance_matrix_csv([x, y, z]))

# %%
# carries run toward deeper levels
a, b = PadicInt.from_int(3, 5, 2), PadicInt.from_int(4, 5, 2)
print((a + b).digits, (a * b).digits)

# %%
addr = padic.padic_to_address(x)
for e in addr.entries:
    print(e)
