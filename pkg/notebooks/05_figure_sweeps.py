# %% [markdown]
# Sweeps behind the two figures
#
# Rate versus K at 10 dB, and rate versus SNR at K = 10, both placements.
# Results go to CSV so any plotting tool can pick them up.

# %%
import argparse

from fadingcache.harness import figure1_spec, figure2_spec, sweep, write_csv

ap = argparse.ArgumentParser()
ap.add_argument("--trials", type=int, default=2_000)
ap.add_argument("--workers", type=int, default=2)
ap.add_argument("--prefix", default="figure")
args, _ = ap.parse_known_args()

results = {}
for n, spec in ((1, figure1_spec(args.trials)), (2, figure2_spec(args.trials))):
    results[n] = sweep(spec, workers=args.workers)
    path = f"{args.prefix}{n}.csv"
    write_csv(results[n], path)
    print("wrote", path, len(results[n]), "rows")

# %% quick look: selection per user levels off with K
for r in results[1]:
    if r.scheme.value == "selection" and r.params.placement.value == "decentralized":
        print(r.params.K, round(r.mean / r.params.K, 4))
