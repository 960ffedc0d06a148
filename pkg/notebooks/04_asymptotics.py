# %% [markdown]
# Closed forms versus simulation
#
# Baseline has an exact mean via E1; selection per user tends to a Lambert-W constant
# as K grows, and the one-bit threshold z* = 1/W(P) - 1/P gets the same slope.

# %%
import math

import numpy as np

from fadingcache import asymptotics as asy
from fadingcache.harness import SimParams, estimate

P, m = 10.0, 0.1
for K in (2, 5, 10, 50):
    e = estimate("baseline", SimParams.from_linear(K, P, m), 20_000)
    print(K, round(asy.baseline_exact(K, P, m).value, 5), round(e.mean, 5), "+-", round(e.stderr, 5))
print("large-K limit", asy.baseline_large_k(P, m).value)

# %% selection slope, decentralized weights
slope = asy.selection_large_k(1, P, m).value
for K in (100, 200, 500):
    e = estimate("selection", SimParams.from_linear(K, P, m, "d"), 5_000)
    print(K, round(e.mean / K, 5), "limit", round(slope, 5))

# %% threshold location and the identity ln(1 + P z*) = W(P)
for P in (1.0, 10.0, 100.0, 1e4):
    z = asy.z_star(P)
    print(P, round(z, 6), math.log1p(P * z) - asy.lambert_w(P))

# %% g(z) peaks at z*
z = np.linspace(0, 5, 50_001)
g = asy.g_function(z, 10.0, m)
print(z[np.argmax(g)], asy.z_star(10.0))
