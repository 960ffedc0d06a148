"""Command-line front end: ``python -m fadingcache <subcommand> ...``."""
from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import asymptotics as asy
from .acceptance import SUITES, run_suite
from .caching import (Placement, SystemParams, build_codewords, caching_weights, decode, load,
                      make_library, place)
from .channel import ChannelDraw, db_to_linear
from .errors import DecodeError, DomainError
from .harness import SimParams, SweepSpec, estimate, sweep, write_csv
from .power_alloc import optimal_alloc
from .schemes import ALL_SCHEMES, Scheme, evaluate

LN2 = math.log(2.0)


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _schemes(text: str) -> tuple[Scheme, ...]:
    if text == "all":
        return ALL_SCHEMES
    return tuple(Scheme.parse(s.strip()) for s in text.split(",") if s.strip())


def _placements(text: str) -> tuple[Placement, ...]:
    if text in ("both", "all"):
        return tuple(Placement)
    return tuple(Placement.parse(s) for s in text.split(","))


def _unit(value: float, bits: bool) -> float:
    return value / LN2 if bits else value


def cmd_rate(a) -> int:
    h = _floats(a.h)
    if a.k is not None and a.k != len(h):
        raise DomainError(f"--k {a.k} does not match {len(h)} gains")
    draw = ChannelDraw.from_gains(h)
    P = db_to_linear(a.snr_db)
    placement = Placement.parse(a.placement)
    unit = "bits" if a.bits else "nats"
    print(f"scheme,rate_{unit},detail")
    for s in _schemes(a.scheme):
        out = evaluate(s, draw, P, a.m, placement)
        detail = {k: (v.tolist() if isinstance(v, np.ndarray) else v) for k, v in out.detail.items()}
        print(f"{s.value},{_unit(out.rate, a.bits)!r},{json.dumps(detail, sort_keys=True)}")
    return 0


def cmd_alloc(a) -> int:
    draw = ChannelDraw.from_gains(_floats(a.h))
    phi = caching_weights(a.m, draw.K, a.placement)
    alloc = optimal_alloc(phi, draw.h_sorted, db_to_linear(a.snr_db))
    print("order(strongest first)=" + ",".join(str(u) for u in draw.pi.tolist()))
    print("phi=" + ",".join(f"{p:.12g}" for p in phi))
    print(alloc.describe())
    return 0


def cmd_simulate(a) -> int:
    gamma = tuple(_floats(a.gamma)) if a.gamma else None
    params = SimParams(a.k, a.snr_db, a.m, Placement.parse(a.placement), gamma)
    rows = [estimate(s, params, a.trials, a.seed, a.workers) for s in _schemes(a.scheme)]
    sys.stdout.write(write_csv(rows))
    return 0


def cmd_sweep(a) -> int:
    spec = SweepSpec(a.axis, tuple(_floats(a.values)), K=a.k, snr_db=a.snr_db, m=a.m,
                     placements=_placements(a.placement), schemes=_schemes(a.scheme),
                     trials=a.trials, seed=a.seed)
    rows = sweep(spec, a.workers)
    if a.output:
        write_csv(rows, a.output)
    else:
        sys.stdout.write(write_csv(rows))
    return 0


def cmd_asymptotic(a) -> int:
    P = db_to_linear(a.snr_db)
    print("name,value,validity")
    for row in asy.closed_form_table(a.k, P, a.m, a.placement):
        print(f"{row.name},{row.value!r},{row.validity.value}")
    return 0


def cmd_placement_demo(a) -> int:
    placement = Placement.parse(a.placement)
    params = SystemParams(a.k, a.n or a.k, a.m, a.f, placement, pad_to_divisible=a.pad)
    lib = make_library(params.N, params.F, a.seed)
    cache = place(params, lib, a.seed)
    batch = build_codewords(cache)
    print(cache.describe())
    print(batch.describe())
    ok = True
    for k in range(params.K):
        try:
            good = bool(np.array_equal(decode(k, cache, batch), lib[batch.demand[k]]))
        except DecodeError as exc:
            good = False
            print(f"user={k} decode_error={exc}")
        ok &= good
        print(f"user={k} file={batch.demand[k]} decoded_exact={good}")
    T = load(params.m, params.K, placement)
    print(f"transmitted_bits={batch.total_bits} transmitted_over_F={batch.load!r} T(m,K)={T!r}")
    return 0 if ok else 1


def cmd_accept(a) -> int:
    report = run_suite(a.suite, a.trials, a.seed)
    for c in report["criteria"]:
        print(f"[{c['status'].upper():12s}] {c['suite']}/{c['id']}: {c['title']}")
    print(f"suite={a.suite} status={report['status']}")
    if a.json:
        with open(a.json, "w") as f:
            json.dump(report, f, indent=1, default=float)
    return 1 if report["status"] == "fail" else 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fadingcache", description=__doc__)
    sub = p.add_subparsers(dest="cmd", required=True)

    def common(sp, k_default=10, with_k=True):
        if with_k:
            sp.add_argument("--k", type=int, default=k_default)
        sp.add_argument("--snr-db", type=float, default=10.0)
        sp.add_argument("--m", type=float, default=0.1)
        sp.add_argument("--placement", default="c", help="c|d (sweep also accepts 'both')")

    sp = sub.add_parser("rate", help="per-realization rates for given gains")
    sp.add_argument("--h", required=True, help="comma-separated gains")
    common(sp, k_default=None)
    sp.add_argument("--scheme", default="all")
    sp.add_argument("--bits", action="store_true", help="display bits instead of nats")
    sp.set_defaults(func=cmd_rate)

    sp = sub.add_parser("alloc", help="optimal superposition power split")
    sp.add_argument("--h", required=True)
    common(sp, with_k=False)
    sp.set_defaults(func=cmd_alloc)

    sp = sub.add_parser("simulate", help="Monte Carlo estimate of long-term average rates")
    common(sp)
    sp.add_argument("--scheme", default="all")
    sp.add_argument("--trials", type=int, default=100_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--gamma", default=None, help="comma-separated channel means")
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("sweep", help="CSV sweep over K or SNR")
    sp.add_argument("--axis", required=True, choices=["k", "snr"])
    sp.add_argument("--values", required=True)
    common(sp)
    sp.add_argument("--scheme", default="all")
    sp.add_argument("--trials", type=int, default=100_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--output", default=None)
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("asymptotic", help="closed-form and asymptotic expressions")
    common(sp)
    sp.set_defaults(func=cmd_asymptotic)

    sp = sub.add_parser("placement-demo", help="bit-exact placement, delivery and decoding")
    sp.add_argument("--k", type=int, default=3)
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--m", type=float, default=1 / 3)
    sp.add_argument("--f", type=int, default=24)
    sp.add_argument("--placement", default="c")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--pad", action="store_true", help="zero-pad F to a multiple of C(K,b)")
    sp.set_defaults(func=cmd_placement_demo)

    sp = sub.add_parser("accept", help="run an acceptance suite")
    sp.add_argument("--suite", default="unit", choices=sorted(SUITES) + ["all"])
    sp.add_argument("--trials", type=int, default=None, help="override Monte Carlo trial counts")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--json", default=None, help="write the machine-readable report here")
    sp.set_defaults(func=cmd_accept)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DomainError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
