# %% [markdown]
# # Contraction onto a fractal
#
# The Lorenz flow shrinks volumes at a constant rate -(sigma + 1 + beta),
# stretches along the attractor and folds between two lobes.

# %%
import numpy as np

from invset import attractor as A

print("divergence", A.divergence())
base = np.array([1.0, 1.0, 20.0])
cloud = np.vstack([base, base + 1e-6 * np.eye(3)])
for t in (0.1, 0.25, 0.5):
    print(t, A.volume_contraction(cloud, t=t))

# %%
traj = A.integrate((1.0, 1.0, 1.0), n=60000)
sym = A.symbolize(traj, 20, 60)
print(sym.symbols)
mirror = A.symbolize(A.integrate((-1.0, -1.0, 1.0), n=60000), 20, 60)
print(mirror.symbols == sym.swapped())

# %%
# halving dt: the lobe sequences agree while the two solutions are close,
# then part ways once their separation reaches the attractor's size
fine = A.integrate((1.0, 1.0, 1.0), dt=5e-4, n=120000)
for t in (10, 20, 30, 40):
    gap = np.abs(traj.states[t * 1000] - fine.states[t * 2000]).max()
    print(t, f"{gap:.2e}", A.symbolize(traj, 0, t).symbols == A.symbolize(fine, 0, t).symbols)

# %%
pts = A.sample_attractor(20000, seed=0)
fit = A.correlation_dimension(pts)
print(fit.to_dict())

# %%
# the one-dimensional analogue: every r > 0 flows to the limit cycle r = 1
for r0 in (0.1, 0.5, 2.0, 10.0):
    print(r0, A.logistic_flow(r0, 10.0))
