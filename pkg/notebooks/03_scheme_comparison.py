# %% [markdown]
# Five delivery schemes on the same draws
#
# baseline multicasts at the weakest user's rate, selection serves the best k users,
# superposition layers the codewords, threshold uses one feedback bit, uncoded is TDMA.

# %%
import numpy as np

from fadingcache.harness import SimParams, estimate
from fadingcache.schemes import Scheme, batch_rates

K, P, m = 10, 10.0, 0.1
h = np.random.default_rng(1).exponential(size=(5, K))
for s in Scheme:
    print(f"{s.value:14s}", batch_rates(s, h, P, m, "centralized").round(3))

# %% superposition >= selection >= baseline on every draw
h = np.random.default_rng(2).exponential(size=(20_000, K))
sp, sel, bl = (batch_rates(s, h, P, m, "d") for s in (Scheme.SUPERPOSITION, Scheme.SELECTION, Scheme.BASELINE))
print("chain holds:", bool(np.all(sp >= sel - 1e-9) and np.all(sel >= bl - 1e-9)))

# %% long-term averages (nats per channel use), common random numbers across schemes
params = SimParams(K, 10.0, m, "decentralized")
for s in Scheme:
    e = estimate(s, params, trials=20_000, seed=0)
    print(f"{s.value:14s} {e.mean:8.4f} +- {e.stderr:.4f}")
