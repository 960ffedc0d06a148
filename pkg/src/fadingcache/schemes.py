"""Per-realization sum content delivery rates of the five delivery schemes.

Each scheme has a per-draw function returning a :class:`SchemeOutcome` and a
vectorized counterpart in :func:`batch_rates` used by the Monte Carlo engine.
Weight vectors ``phi`` are indexed by channel rank (strongest first).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np

from .asymptotics import z_star
from .caching import Placement, effective_weight
from .channel import ChannelDraw, PowerBudget, multicast_rate
from .errors import DomainError
from .power_alloc import _hull, optimal_alloc, weighted_sum_rate


class Scheme(str, Enum):
    BASELINE = "baseline"
    SELECTION = "selection"
    SUPERPOSITION = "superposition"
    THRESHOLD = "threshold"
    UNCODED = "uncoded"

    @classmethod
    def parse(cls, value: "Scheme | str") -> "Scheme":
        try:
            return cls(value)
        except ValueError:
            raise DomainError(f"unknown scheme {value!r}") from None


ALL_SCHEMES = tuple(Scheme)


@dataclass(frozen=True)
class SchemeOutcome:
    scheme: Scheme
    rate: float
    detail: dict[str, Any] = field(default_factory=dict)


def _power(P) -> float:
    return P.P if isinstance(P, PowerBudget) else float(P)


def baseline(draw: ChannelDraw, P, m: float, placement=Placement.CENTRALIZED) -> SchemeOutcome:
    """Coded caching to all K users at the worst user's multicast rate."""
    phi_K = effective_weight(m, draw.K, placement)
    return SchemeOutcome(Scheme.BASELINE, phi_K * multicast_rate(draw, _power(P)))


def _select(values: np.ndarray, tie_break: str) -> int:
    if tie_break == "largest":
        return values.size - 1 - int(np.argmax(values[::-1]))
    if tie_break == "smallest":
        return int(np.argmax(values))
    raise DomainError(f"unknown tie-break rule {tie_break!r}")


def selection(draw: ChannelDraw, P, phi, tie_break: str = "largest") -> SchemeOutcome:
    """Serve the k* strongest users maximizing phi_k ln(1 + h_(k) P)."""
    phi = np.asarray(phi, dtype=float)
    vals = phi * np.log1p(draw.h_sorted * _power(P))
    k = _select(vals, tie_break)
    return SchemeOutcome(Scheme.SELECTION, float(vals[k]),
                         {"k_star": k + 1, "served": draw.pi[: k + 1].tolist()})


def superposition(draw: ChannelDraw, P, phi) -> SchemeOutcome:
    P = _power(P)
    alloc = optimal_alloc(phi, draw.h_sorted, P)
    rate = weighted_sum_rate(alloc, phi, draw.h_sorted, P)
    return SchemeOutcome(Scheme.SUPERPOSITION, rate, {"alpha": alloc.alpha, "lambda": alloc.lam})


def threshold(draw: ChannelDraw, P, phi) -> SchemeOutcome:
    """One-bit feedback: multicast at ln(1 + P z*) to every user with h_k >= z*."""
    P = _power(P)
    z = z_star(P)
    served = np.flatnonzero(draw.h >= z)
    U = served.size
    rate = float(phi[U - 1]) * math.log1p(P * z) if U else 0.0
    return SchemeOutcome(Scheme.THRESHOLD, rate, {"U": U, "served": served.tolist(), "z_star": z})


def uncoded(draw: ChannelDraw, P, m: float) -> SchemeOutcome:
    """Unicast of the uncached (1-m)F bits to each user in turn."""
    rates = np.log1p(_power(P) * draw.h)
    if np.any(rates <= 0):
        return SchemeOutcome(Scheme.UNCODED, 0.0)
    return SchemeOutcome(Scheme.UNCODED, float(draw.K / np.sum((1.0 - m) / rates)))


def evaluate(scheme, draw: ChannelDraw, P, m: float, placement=Placement.CENTRALIZED, phi=None) -> SchemeOutcome:
    scheme = Scheme.parse(scheme)
    if phi is None:
        phi = np.atleast_1d(effective_weight(m, np.arange(1, draw.K + 1), placement))
    if scheme is Scheme.BASELINE:
        return baseline(draw, P, m, placement)
    if scheme is Scheme.SELECTION:
        return selection(draw, P, phi)
    if scheme is Scheme.SUPERPOSITION:
        return superposition(draw, P, phi)
    if scheme is Scheme.THRESHOLD:
        return threshold(draw, P, phi)
    return uncoded(draw, P, m)


# ---------------------------------------------------------------------------
# vectorized evaluation over a batch of draws, shape (trials, K)


def _superposition_rows(phi: np.ndarray, hs: np.ndarray, P: float) -> np.ndarray:
    # equal weights: keep the strongest (lowest rank)
    dedup: list[int] = []
    for k in sorted((k for k in range(phi.size) if phi[k] > 0), key=lambda k: (phi[k], k)):
        if dedup and phi[dedup[-1]] == phi[k]:
            continue
        dedup.append(k)
    phil = phi.tolist()
    out = np.empty(hs.shape[0])
    with np.errstate(divide="ignore"):
        A = 1.0 / hs
    for r in range(hs.shape[0]):
        a = A[r].tolist()
        cand = [k for k in dedup if a[k] != math.inf]
        hull, bps = _hull(phil, a, cand)
        lo, total = 0.0, 0.0
        for u, up in zip(hull, bps + [math.inf]):
            e = min(up, P)
            if e > lo:
                total += phil[u] * math.log1p((e - lo) / (a[u] + lo))
                lo = e
            if lo >= P:
                break
        out[r] = total
    return out


def batch_rates(scheme, h: np.ndarray, P: float, m: float, placement=Placement.CENTRALIZED,
                phi=None) -> np.ndarray:
    """Per-draw rates of ``scheme`` for each row of unsorted gains ``h``."""
    scheme = Scheme.parse(scheme)
    h = np.atleast_2d(np.asarray(h, dtype=float))
    K = h.shape[1]
    if phi is None:
        phi = np.atleast_1d(effective_weight(m, np.arange(1, K + 1), placement))
    phi = np.asarray(phi, dtype=float)
    if scheme is Scheme.BASELINE:
        return effective_weight(m, K, placement) * np.log1p(P * h.min(axis=1))
    if scheme is Scheme.UNCODED:
        r = np.log1p(P * h)
        with np.errstate(divide="ignore"):
            out = K / np.sum((1.0 - m) / r, axis=1)
        return np.where(np.all(r > 0, axis=1), out, 0.0)
    if scheme is Scheme.THRESHOLD:
        z = z_star(P)
        U = np.sum(h >= z, axis=1)
        level = math.log1p(P * z)
        return np.where(U > 0, phi[np.maximum(U, 1) - 1] * level, 0.0)
    hs = -np.sort(-h, axis=1)
    if scheme is Scheme.SELECTION:
        return np.max(phi * np.log1p(P * hs), axis=1)
    return _superposition_rows(phi, hs, P)

