from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import brentq

from fadingcache.acceptance import grid_alloc, random_instance
from fadingcache.errors import DomainError
from fadingcache.power_alloc import (crossing, envelope, feasible, optimal_alloc, solve_lambda,
                                     superposition_value, user_capacity, utility, weighted_sum_rate)


def bisect_lambda(phi, h, P, iters=200):
    """Lambda such that the positive-utility support [max_k phi_k/lam - 1/h_k]_+ has measure P."""
    phi, h = np.asarray(phi, float), np.asarray(h, float)
    support = lambda lam: max(0.0, np.max(phi / lam - 1 / h))  # noqa: E731
    lo, hi = 1e-300, np.max(phi * h)
    for _ in range(iters):
        mid = np.sqrt(lo * hi) if hi / lo > 4 else 0.5 * (lo + hi)
        if support(mid) > P:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_utility_examples():
    assert utility(0, 0.0, 0.0, [2.0], [1.0]) == 2.0
    assert utility(0, 1e12, 0.3, [2.0], [1.0]) == pytest.approx(-0.3, abs=1e-9)
    with pytest.raises(DomainError):
        utility(0, 0.0, 0.0, [1.0], [0.0])


def test_crossing_closed_form_vs_root_find():
    rng = np.random.default_rng(1)
    for _ in range(200):
        phi, h, _ = random_instance(rng, 2)
        z = crossing(0, 1, phi, h)
        diff = lambda t: utility(0, t, 0, phi, h) - utility(1, t, 0, phi, h)  # noqa: E731
        if z > 0:
            assert brentq(diff, 0, z * 10 + 10, xtol=1e-14) == pytest.approx(z, rel=1e-9, abs=1e-12)
        else:
            assert diff(0.0) <= 1e-12  # weaker, heavier user already ahead at z = 0


def test_envelope_equal_weights_single_segment():
    segs = envelope([1.0, 1.0], [2.0, 1.0], 5.0)
    assert len(segs) == 1 and segs[0].user == 0 and segs[0].start == 0 and segs[0].end == 5.0


def test_envelope_single_user_with_lambda():
    phi, h, P = [2.0], [1.0], 3.0
    lam = solve_lambda(phi, h, P)
    segs = envelope(phi, h, P, lam)
    assert segs[0].end == pytest.approx(P)
    # larger lambda shrinks the support to where u >= 0
    segs = envelope(phi, h, P, 1.0)
    assert segs[0].end == pytest.approx(2.0 / 1.0 - 1.0)


def test_envelope_matches_grid_scan():
    rng = np.random.default_rng(2)
    for _ in range(50):
        phi, h, P = random_instance(rng, 3)
        segs = envelope(phi, h, P)
        step = 1e-4 * P
        z = np.arange(0, P, step) + step / 2
        best = np.argmax(phi[:, None] / (1 / h[:, None] + z), axis=0)
        owner = np.full(z.size, -1)
        for s in segs:
            owner[(z >= s.start) & (z < s.end)] = s.user
        bps = np.array([s.start for s in segs[1:]])
        near = np.zeros(z.size, bool) if bps.size == 0 else np.min(np.abs(z[:, None] - bps), axis=1) <= step
        assert np.all(owner[~near] == best[~near])


def test_solve_lambda_examples():
    assert solve_lambda([3.0], [2.0], 5.0) == pytest.approx(3.0 / (5.0 + 0.5))
    assert solve_lambda([1.0, 1.0], [2.0, 1.0], 1.0) == pytest.approx(2 / 3)
    with pytest.raises(DomainError):
        solve_lambda([0.0, 0.0], [1.0, 0.5], 1.0)


def test_lambda_agrees_with_bisection_and_support_measure():
    rng = np.random.default_rng(3)
    for K in range(1, 7):
        for _ in range(20):
            phi, h, P = random_instance(rng, K)
            lam = solve_lambda(phi, h, P)
            assert lam == pytest.approx(bisect_lambda(phi, h, P), rel=1e-9)
            # numerical measure of {z >= 0: max_k u_k(z) >= 0} via root of the envelope
            top = lambda z: np.max(phi / (1 / h + z)) - lam  # noqa: E731
            z0 = brentq(top, 0, 10 * P + 10, xtol=1e-14, rtol=1e-15)
            assert abs(z0 - P) <= 1e-9 * max(1.0, P)


def test_optimal_alloc_trivial_cases():
    np.testing.assert_allclose(optimal_alloc([2.0], [1.5], 3.0).alpha, [1.0])
    a = optimal_alloc([1.0] * 4, [4.0, 3.0, 2.0, 1.0], 10.0)
    np.testing.assert_allclose(a.alpha, [1, 0, 0, 0])


def test_optimal_alloc_matches_grid_oracle():
    rng = np.random.default_rng(4)
    for K in range(2, 6):
        for _ in range(25):
            phi, h, P = random_instance(rng, K)
            a = optimal_alloc(phi, h, P)
            assert np.max(np.abs(a.alpha - grid_alloc(phi, h, P, 1e-5))) <= 2e-5


def test_segments_measure_equals_alpha():
    rng = np.random.default_rng(5)
    for _ in range(100):
        phi, h, P = random_instance(rng, 5)
        a = optimal_alloc(phi, h, P)
        assert a.alpha.sum() == pytest.approx(1.0, abs=1e-12)
        assert a.segments[0].start == 0.0 and a.segments[-1].end == pytest.approx(P)
        for s0, s1 in zip(a.segments, a.segments[1:]):
            assert s0.end == s1.start and s0.user < s1.user


def test_scale_covariance():
    rng = np.random.default_rng(6)
    for _ in range(100):
        phi, h, P = random_instance(rng, 4)
        c = float(rng.uniform(0.1, 10))
        a, b = optimal_alloc(phi, h, P), optimal_alloc(c * phi, h, P)
        np.testing.assert_allclose(a.alpha, b.alpha, atol=1e-12)
        assert b.lam == pytest.approx(c * a.lam)
        assert [s.user for s in a.segments] == [s.user for s in b.segments]


def test_dominated_users_get_nothing():
    rng = np.random.default_rng(7)
    for _ in range(200):
        phi = rng.uniform(0.5, 3, 5)
        h = np.sort(rng.exponential(size=5))[::-1]
        a = optimal_alloc(phi, h, 10.0)
        for k in range(5):
            if any(phi[j] >= phi[k] and (phi[j] > phi[k] or h[j] > h[k]) for j in range(k)):
                assert a.alpha[k] == 0.0


def test_zero_weight_users_excluded():
    a = optimal_alloc([0.0, 2.0, 0.0], [3.0, 2.0, 1.0], 5.0)
    np.testing.assert_allclose(a.alpha, [0, 1, 0])


def test_weighted_sum_rate_examples():
    assert weighted_sum_rate([1.0], [2.0], [0.5], 4.0) == pytest.approx(2.0 * np.log(3.0))
    phi, h = [1.0, 2.0, 3.0], [3.0, 2.0, 0.5]
    assert weighted_sum_rate([0, 0, 1.0], phi, h, 4.0) == pytest.approx(3.0 * np.log1p(0.5 * 4.0))


def test_optimum_beats_simplex_and_vertices():
    rng = np.random.default_rng(8)
    for K in range(2, 6):
        for _ in range(20):
            phi, h, P = random_instance(rng, K)
            a = optimal_alloc(phi, h, P)
            f_star = weighted_sum_rate(a, phi, h, P)
            assert f_star == pytest.approx(superposition_value(phi, h, P), rel=1e-12)
            for alpha in rng.dirichlet(np.ones(K), size=1000):
                assert f_star >= weighted_sum_rate(alpha, phi, h, P) - 1e-12
            for k in range(K):
                assert f_star >= weighted_sum_rate(np.eye(K)[k], phi, h, P) - 1e-12


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2 ** 32 - 1))
def test_local_perturbations_do_not_improve(K, seed):
    rng = np.random.default_rng(seed)
    phi, h, P = random_instance(rng, K)
    a = optimal_alloc(phi, h, P)
    f_star = weighted_sum_rate(a, phi, h, P)
    for _ in range(20):
        d = rng.normal(size=K) * 1e-3
        alpha = np.clip(a.alpha + d, 0, None)
        alpha /= alpha.sum()
        assert weighted_sum_rate(alpha, phi, h, P) <= f_star + 1e-12


# ---------------------------------------------------------------- feasibility


def test_zero_tuple_feasible():
    assert feasible({}, [0.5, 0.5], [2.0, 1.0], 3.0)
    assert feasible({(0,): 0.0, (0, 1): 0.0}, [1.0, 0.0], [2.0, 1.0], 3.0)


def test_boundary_tuple():
    alpha, h, P = np.array([0.3, 0.7]), np.array([2.0, 1.0]), 4.0
    C = user_capacity(alpha, h, P)
    rates = {(0,): C[0], (1,): 0.4 * C[1], (0, 1): 0.6 * C[1]}
    assert feasible(rates, alpha, h, P)
    rates[(0, 1)] += 1e-6
    assert not feasible(rates, alpha, h, P)


def test_vertex_tuples_feasible():
    rng = np.random.default_rng(9)
    for K in range(1, 5):
        h = np.sort(rng.exponential(size=K))[::-1]
        alpha = rng.dirichlet(np.ones(K))
        C = user_capacity(alpha, h, 3.0)
        # each user k may put its whole sum capacity on any subset S with max(S) = k
        per_user = []
        for k in range(K):
            subsets = [tuple(u for u, bit in zip(range(k), bits) if bit) + (k,)
                       for bits in product([0, 1], repeat=k)]
            assert len(subsets) == 2 ** k
            per_user.append(subsets)
        for choice in product(*per_user):
            rates = {S: C[k] for k, S in enumerate(choice)}
            assert feasible(rates, alpha, h, 3.0)


def test_malformed_tuple():
    with pytest.raises(DomainError):
        feasible({(0, 3): 1.0}, [0.5, 0.5], [2.0, 1.0], 1.0)
    with pytest.raises(DomainError):
        feasible({(): 1.0}, [0.5, 0.5], [2.0, 1.0], 1.0)


def test_input_validation():
    with pytest.raises(DomainError):
        optimal_alloc([1.0, 2.0], [1.0, 2.0], 1.0)  # not sorted
    with pytest.raises(DomainError):
        optimal_alloc([-1.0, 2.0], [2.0, 1.0], 1.0)
