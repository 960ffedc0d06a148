import math

import numpy as np
import pytest

from fadingcache.asymptotics import lambert_w, z_star
from fadingcache.caching import Placement, caching_weights, effective_weight
from fadingcache.channel import ChannelDraw, sample
from fadingcache.schemes import (Scheme, baseline, batch_rates, evaluate, selection, superposition, threshold,
                                 uncoded)

C, D = Placement.CENTRALIZED, Placement.DECENTRALIZED


def draws(K, n, seed=0):
    rng = np.random.default_rng(seed)
    return [sample(np.ones(K), rng) for _ in range(n)]


def test_baseline_examples():
    K = 4
    d = ChannelDraw.from_gains(np.ones(K))
    assert baseline(d, math.e - 1, 0.1, C).rate == pytest.approx(effective_weight(0.1, K, C))
    for d in draws(5, 50):
        expect = effective_weight(0.2, 5, D) * math.log(1 + 3.0 * d.h.min())
        assert baseline(d, 3.0, 0.2, D).rate == pytest.approx(expect, rel=1e-14)


def test_single_user_schemes_agree():
    d = ChannelDraw.from_gains([0.7])
    phi = caching_weights(0.1, 1, C)
    r = [baseline(d, 5.0, 0.1, C).rate, selection(d, 5.0, phi).rate, superposition(d, 5.0, phi).rate]
    np.testing.assert_allclose(r, phi[0] * math.log1p(0.7 * 5.0), rtol=1e-14)
    assert selection(d, 5.0, phi).detail["k_star"] == 1


def test_selection_equal_gains_serves_everyone():
    d = ChannelDraw.from_gains(np.full(6, 0.8))
    assert selection(d, 10.0, caching_weights(0.1, 6, C)).detail["k_star"] == 6


def test_selection_brute_force():
    for d in draws(7, 200, seed=1):
        phi = caching_weights(0.1, 7, D)
        out = selection(d, 10.0, phi)
        best = max(phi[k] * math.log1p(10.0 * sorted(d.h, reverse=True)[k]) for k in range(7))
        assert out.rate == pytest.approx(best, rel=1e-14)
        served = d.h[out.detail["served"]]
        assert served.min() >= np.delete(d.h, out.detail["served"]).max(initial=-1)


def test_selection_tie_break_largest():
    d = ChannelDraw.from_gains([1.0, 1.0])
    assert selection(d, 1.0, [1.0, 1.0]).detail["k_star"] == 2
    assert selection(d, 1.0, [1.0, 1.0], tie_break="smallest").detail["k_star"] == 1


def test_superposition_equal_weights_strongest_only():
    d = ChannelDraw.from_gains([0.3, 2.0, 1.1])
    out = superposition(d, 10.0, [1.5, 1.5, 1.5])
    assert out.rate == pytest.approx(1.5 * math.log1p(2.0 * 10.0))
    np.testing.assert_allclose(out.detail["alpha"], [1, 0, 0])


@pytest.mark.parametrize("placement", [C, D])
def test_dominance_chain_per_draw(placement):
    rng = np.random.default_rng(2)
    for K in range(2, 9):
        h = rng.exponential(size=(10_000 // 7, K))
        for P in (0.5, 10.0, 1000.0):
            sp = batch_rates(Scheme.SUPERPOSITION, h, P, 0.1, placement)
            sel = batch_rates(Scheme.SELECTION, h, P, 0.1, placement)
            bl = batch_rates(Scheme.BASELINE, h, P, 0.1, placement)
            assert np.all(sp - sel >= -1e-9) and np.all(sel - bl >= -1e-9)


def test_batch_matches_per_draw():
    for K in (1, 3, 6):
        for d in draws(K, 30, seed=K):
            for s in Scheme:
                for pl in (C, D):
                    one = evaluate(s, d, 7.0, 0.2, pl).rate
                    many = batch_rates(s, d.h[None, :], 7.0, 0.2, pl)[0]
                    assert many == pytest.approx(one, rel=1e-12, abs=1e-15), (s, K)


def test_threshold_examples():
    P = 10.0
    z = z_star(P)
    phi = caching_weights(0.1, 4, C)
    low = ChannelDraw.from_gains(np.full(4, 0.5 * z))
    assert threshold(low, P, phi).rate == 0.0
    high = ChannelDraw.from_gains(np.full(4, z + 1.0))
    assert threshold(high, P, phi).rate == pytest.approx(phi[-1] * math.log1p(P * z))
    # ln(1 + P z*) = W(P)
    assert math.log1p(P * z) == pytest.approx(lambert_w(P), rel=1e-13)


def test_threshold_recount():
    P = 10.0
    z = z_star(P)
    for d in draws(9, 200, seed=3):
        phi = caching_weights(0.1, 9, D)
        U = sum(1 for x in d.h if x >= z)
        expect = phi[U - 1] * math.log(1 + P * z) if U else 0.0
        out = threshold(d, P, phi)
        assert out.detail["U"] == U
        assert out.rate == pytest.approx(expect, rel=1e-14)


def test_uncoded_examples():
    assert uncoded(ChannelDraw.from_gains([2.0]), 3.0, 0.2).rate == pytest.approx(math.log(7) / 0.8)
    assert uncoded(ChannelDraw.from_gains([0.4] * 5), 3.0, 0.2).rate == pytest.approx(math.log1p(1.2) / 0.8)
    assert uncoded(ChannelDraw.from_gains([0.4, 0.0]), 3.0, 0.2).rate == 0.0
    for d in draws(4, 50, seed=4):
        terms = [(1 - 0.3) / math.log(1 + 2.0 * x) for x in d.h]
        assert uncoded(d, 2.0, 0.3).rate == pytest.approx(4 / sum(terms), rel=1e-13)


def test_rates_monotone_in_power():
    Ps = np.logspace(-1, 4, 40)
    for d in draws(6, 40, seed=5):
        for s in Scheme:
            r = np.array([evaluate(s, d, P, 0.1, C).rate for P in Ps])
            assert np.all(np.diff(r) >= -1e-12), s
            if s is not Scheme.THRESHOLD:
                assert np.all(np.diff(r) > 0), s


def test_z_star_decreasing_in_power():
    zs = [z_star(P) for P in np.logspace(-3, 6, 200)]
    assert np.all(np.diff(zs) < 0)


def test_asymmetric_gamma_accepted():
    rng = np.random.default_rng(6)
    d = sample([4.0, 1.0, 0.25], rng)
    for s in Scheme:
        assert evaluate(s, d, 10.0, 0.1, C).rate >= 0


def test_selection_deterministic():
    d = draws(8, 1, seed=9)[0]
    phi = caching_weights(0.3, 8, C)
    assert selection(d, 4.0, phi).detail == selection(d, 4.0, phi).detail
