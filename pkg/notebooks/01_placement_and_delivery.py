# %% [markdown]
# Coded caching, bit by bit
#
# Three users, three files of 24 bits, each user caches a third of every file.
# We place, build the XOR codewords, and check every user recovers its file.

# %%
import numpy as np

from fadingcache.caching import SystemParams, build_codewords, decode, load, make_library, place

params = SystemParams(K=3, N=3, m=1 / 3, F=24, placement="centralized")
lib = make_library(params.N, params.F, seed=0)
cache = place(params, lib, seed=0)
print(cache.describe())

# %%
batch = build_codewords(cache)
print(batch.describe())
for k in range(params.K):
    got = decode(k, cache, batch)
    print(k, batch.demand[k], np.array_equal(got, lib[batch.demand[k]]))

# %% [markdown]
# Transmitted bits over F should equal the load T(m, K) = (1-m)/(1/K+m) = 1 here.

# %%
print(batch.load, load(params.m, params.K, params.placement))

# %% decentralized placement: each user keeps a random mF bits per file, load close to (1-m)(1-(1-m)^K)/m
params = SystemParams(K=4, N=4, m=0.25, F=4096, placement="decentralized")
lib = make_library(params.N, params.F, seed=1)
cache = place(params, lib, seed=1)
batch = build_codewords(cache)
ok = all(np.array_equal(decode(k, cache, batch), lib[batch.demand[k]]) for k in range(params.K))
print("decoded", ok, "load", batch.load, "expected", load(0.25, 4, "decentralized"))
