"""Weighted sum-rate power allocation over the degraded Gaussian broadcast channel.

Users are indexed from 0 in decreasing channel order (``h_sorted[0]`` is the
strongest). Power level z in [0, P] is handed to the user whose rate utility
phi_k / (1/h_k + z) is largest there. Because 1 / (phi_k / (1/h_k + z)) is
affine in z, the upper envelope of the utilities is the lower envelope of the
lines (1/h_k + z) / phi_k, which a monotone stack builds from pairwise
crossings in O(K log K).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import DomainError

REL_TOL = 1e-12


@dataclass(frozen=True)
class Segment:
    start: float
    end: float
    user: int

    @property
    def length(self) -> float:
        return self.end - self.start


@dataclass(frozen=True)
class PowerAllocation:
    alpha: np.ndarray
    lam: float
    segments: tuple[Segment, ...]

    def describe(self) -> str:
        lines = ["alpha=" + ",".join(f"{a:.12g}" for a in self.alpha), f"lambda={self.lam:.12g}"]
        lines += [f"segment user={s.user} z=[{s.start:.12g},{s.end:.12g}]" for s in self.segments]
        return "\n".join(lines)


def _inputs(phi, h_sorted):
    phi = np.asarray(phi, dtype=float)
    h = np.asarray(h_sorted, dtype=float)
    if phi.shape != h.shape or phi.ndim != 1:
        raise DomainError("phi and h_sorted must be vectors of equal length")
    if np.any(phi < 0):
        raise DomainError("weights must be non-negative")
    if np.any(h < 0) or np.any(np.diff(h) > 0):
        raise DomainError("h_sorted must be non-negative and non-increasing")
    return phi, h


def utility(k: int, z: float, lam: float, phi, h_sorted) -> float:
    """Rate utility phi_k / (1/h_k + z) - lambda of user k at power level z."""
    hk = float(h_sorted[k])
    if hk <= 0:
        raise DomainError(f"utility undefined for zero gain (user {k})")
    if z < 0:
        raise DomainError("power level z must be non-negative")
    return float(phi[k]) / (1.0 / hk + z) - lam


def crossing(j: int, k: int, phi, h_sorted) -> float:
    """Power level where the utilities of users j and k are equal (inf if parallel)."""
    pj, pk = float(phi[j]), float(phi[k])
    if pj == pk:
        return np.inf
    return (pk / h_sorted[j] - pj / h_sorted[k]) / (pj - pk)


def _hull(phi: Sequence[float], a: Sequence[float], users: Sequence[int]):
    """Lower envelope of lines (a_u + z) / phi_u over all real z.

    ``users`` must be sorted by increasing phi with ties resolved beforehand.
    Returns (users on the hull, breakpoints), where hull user n owns
    [bp[n-1], bp[n]] with bp[-1] = -inf and a final bp of +inf.
    """
    hull: list[int] = []
    bps: list[float] = []  # bps[n] = crossing between hull[n] and hull[n+1]
    for u in users:
        while hull:
            v = hull[-1]
            x = (a[u] * phi[v] - a[v] * phi[u]) / (phi[u] - phi[v])
            if len(bps) and x <= bps[-1]:
                hull.pop()
                bps.pop()
                continue
            bps.append(x)
            break
        hull.append(u)
    return hull, bps


def _candidates(phi: np.ndarray, h: np.ndarray) -> list[int]:
    """Users eligible for the envelope, ordered by increasing weight.

    Equal weights keep only the strongest user; zero weights and zero gains drop out.
    """
    keep = [k for k in range(phi.size) if phi[k] > 0 and h[k] > 0]
    keep.sort(key=lambda k: (phi[k], k))
    out: list[int] = []
    for k in keep:
        if out and phi[out[-1]] == phi[k]:
            continue  # same slope, the earlier (stronger) user has the lower line
        out.append(k)
    return out


def envelope(phi, h_sorted, P: float, lam: float | None = None) -> tuple[Segment, ...]:
    """Argmax structure of the utilities on [0, P].

    With ``lam`` given, the domain is further clipped to where the best
    utility is non-negative.
    """
    phi, h = _inputs(phi, h_sorted)
    if not P > 0:
        raise DomainError("P must be positive")
    users = _candidates(phi, h)
    if not users:
        return ()
    a = np.full(phi.size, np.inf)
    a[h > 0] = 1.0 / h[h > 0]
    hi = float(P)
    if lam is not None:
        hi = min(hi, max(0.0, max(phi[k] / lam - a[k] for k in users)))
    hull, bps = _hull(phi.tolist(), a.tolist(), users)
    lows = [-np.inf] + bps
    highs = bps + [np.inf]
    segs = []
    for u, lo, up in zip(hull, lows, highs):
        s, e = max(lo, 0.0), min(up, hi)
        if e > s:
            segs.append(Segment(float(s), float(e), int(u)))
    return tuple(segs)


def solve_lambda(phi, h_sorted, P: float) -> float:
    """Lagrange level max_k phi_k / (P + 1/h_k): the envelope's value at z = P."""
    phi, h = _inputs(phi, h_sorted)
    ok = (phi > 0) & (h > 0)
    if not ok.any():
        raise DomainError("at least one user needs positive weight and gain")
    return float(np.max(phi[ok] / (P + 1.0 / h[ok])))


def optimal_alloc(phi, h_sorted, P: float) -> PowerAllocation:
    phi, h = _inputs(phi, h_sorted)
    lam = solve_lambda(phi, h, P)
    segs = envelope(phi, h, P, lam)
    alpha = np.zeros(phi.size)
    for s in segs:
        alpha[s.user] += s.length / P
    return PowerAllocation(alpha, lam, segs)


def weighted_sum_rate(alloc, phi, h_sorted, P: float) -> float:
    """Sum_k phi_k ln[(1 + h_k S_k P) / (1 + h_k S_{k-1} P)] with S_k the cumulative fractions."""
    alpha = alloc.alpha if isinstance(alloc, PowerAllocation) else np.asarray(alloc, dtype=float)
    phi, h = _inputs(phi, h_sorted)
    S = np.cumsum(alpha)
    prev = np.concatenate(([0.0], S[:-1]))
    return float(np.sum(phi * (np.log1p(h * S * P) - np.log1p(h * prev * P))))


def superposition_value(phi, h_sorted, P: float) -> float:
    """Optimal weighted sum rate, integrated directly over the envelope segments."""
    phi, h = _inputs(phi, h_sorted)
    total = 0.0
    for s in envelope(phi, h, P):
        u = s.user
        total += phi[u] * (np.log1p(h[u] * s.end) - np.log1p(h[u] * s.start))
    return float(total)


def user_capacity(alpha, h_sorted, P: float) -> np.ndarray:
    """Right-hand sides C_k of the per-user capacity constraints."""
    alpha = np.asarray(alpha, dtype=float)
    h = np.asarray(h_sorted, dtype=float)
    S = np.cumsum(alpha)
    prev = np.concatenate(([0.0], S[:-1]))
    return np.log1p(h * S * P) - np.log1p(h * prev * P)


def feasible(rates: Mapping[Sequence[int], float], alpha, h_sorted, P: float, tol: float = REL_TOL) -> bool:
    """Whether a tuple of subset rates lies in the capacity region at power split ``alpha``.

    Subsets hold users in decreasing channel order; the message for subset S
    is charged to its weakest member max(S).
    """
    alpha = np.asarray(alpha, dtype=float)
    K = alpha.size
    if np.any(alpha < -tol) or alpha.sum() > 1 + tol:
        raise DomainError("alpha must lie in the simplex")
    load = np.zeros(K)
    for subset, r in rates.items():
        s = tuple(subset)
        if not s or min(s) < 0 or max(s) >= K or len(set(s)) != len(s):
            raise DomainError(f"malformed subset {s} for K={K}")
        if r < 0:
            raise DomainError(f"negative rate {r} for subset {s}")
        load[max(s)] += r
    cap = user_capacity(alpha, h_sorted, P)
    return bool(np.all(load <= cap + tol * np.maximum(1.0, np.abs(cap))))
