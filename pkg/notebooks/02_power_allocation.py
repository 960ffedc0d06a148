# %% [markdown]
# Superposition power split for one channel draw
#
# Users sorted strongest first. The optimal split hands the power axis z in [0, P]
# to whoever has the largest phi_k / (1/h_k + z); alpha_k is that user's share.

# %%
import numpy as np

from fadingcache.caching import caching_weights
from fadingcache.channel import ChannelDraw
from fadingcache.power_alloc import optimal_alloc, weighted_sum_rate

draw = ChannelDraw.from_gains([0.3, 2.0, 1.1, 0.8, 1.6])
P = 10.0
phi = caching_weights(0.1, draw.K, "centralized")
print("order", draw.pi, "h", draw.h_sorted.round(3), "phi", phi.round(3))

alloc = optimal_alloc(phi, draw.h_sorted, P)
print(alloc.describe())

# %% compare against a few thousand random splits
rng = np.random.default_rng(0)
best = weighted_sum_rate(alloc, phi, draw.h_sorted, P)
rand = [weighted_sum_rate(a, phi, draw.h_sorted, P) for a in rng.dirichlet(np.ones(draw.K), 5000)]
print("optimum %.6f  best random %.6f" % (best, max(rand)))

# %% equal weights: everything goes to the strongest user
print(optimal_alloc(np.ones(3), np.array([2.0, 1.0, 0.5]), P).alpha)
