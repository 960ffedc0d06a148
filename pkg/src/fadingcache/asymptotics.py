"""Special functions and closed-form rate expressions for symmetric fading.

The expressions below assume unit-mean i.i.d. gains; passing any other
``gamma`` raises :class:`DomainError`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .caching import Placement, effective_weight
from .errors import DomainError

EULER_GAMMA = 0.577215664901532860606512090082


class Validity(str, Enum):
    EXACT = "exact"
    LARGE_K = "large_K"
    HIGH_SNR = "high_SNR"


@dataclass(frozen=True)
class ClosedForm:
    name: str
    value: float
    validity: Validity
    assumptions: tuple[str, ...] = field(default=("symmetric_gamma_1",))


def _require_symmetric(gamma) -> None:
    if gamma is None:
        return
    g = np.asarray(gamma, dtype=float)
    if not np.all(g == 1.0):
        raise DomainError("closed forms hold only for symmetric unit-mean fading")


def _e1_series(x: float) -> float:
    total, term, n = 0.0, 1.0, 0
    while True:
        n += 1
        term *= -x / n
        inc = term / n
        total += inc
        if abs(inc) < 1e-17 * abs(total) or n > 200:
            break
    return -EULER_GAMMA - math.log(x) - total


def _e1_scaled_cf(x: float) -> float:
    """e^x E1(x) by the modified Lentz continued fraction (x > 1)."""
    tiny = 1e-300
    b = x + 1.0
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 10_000):
        an = -float(i * i)
        b += 2.0
        d = 1.0 / (an * d + b)
        c = b + an / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return h


def exp_integral_e1(x: float) -> float:
    """E1(x) = integral_1^inf e^{-xt}/t dt for x > 0."""
    x = float(x)
    if not x > 0:
        raise DomainError(f"E1 needs x > 0, got {x}")
    if x <= 1.0:
        return _e1_series(x)
    return _e1_scaled_cf(x) * math.exp(-x)


def scaled_e1(x: float) -> float:
    """e^x E1(x), evaluated without overflow for large x."""
    x = float(x)
    if not x > 0:
        raise DomainError(f"E1 needs x > 0, got {x}")
    if x <= 1.0:
        return math.exp(x) * _e1_series(x)
    return _e1_scaled_cf(x)


def lambert_w(x: float) -> float:
    """Principal branch W(x) for x >= 0 by Halley iteration."""
    x = float(x)
    if x < 0 or math.isnan(x):
        raise DomainError(f"lambert_w defined here for x >= 0, got {x}")
    if x == 0.0:
        return 0.0
    w = math.log1p(x) if x < math.e else math.log(x) - math.log(math.log(x))
    for _ in range(100):
        ew = math.exp(w)
        f = w * ew - x
        step = f / (ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0))
        w -= step
        if abs(step) < 1e-14 * (1.0 + abs(w)):
            break
    return w


def mean_log_min_gain(K: int, P: float) -> float:
    """E[ln(1 + P min_k h_k)] for K i.i.d. unit-mean exponential gains."""
    if K < 1 or not P > 0:
        raise DomainError("need K >= 1 and P > 0")
    return scaled_e1(K / P)


def baseline_exact(K: int, P: float, m: float, placement=Placement.CENTRALIZED, gamma=None) -> ClosedForm:
    _require_symmetric(gamma)
    phi = effective_weight(m, K, placement)
    return ClosedForm("baseline_exact", phi * mean_log_min_gain(K, P), Validity.EXACT)


def baseline_large_k(P: float, m: float, gamma=None) -> ClosedForm:
    _require_symmetric(gamma)
    if not 0 <= m < 1:
        raise DomainError("m must lie in [0, 1)")
    return ClosedForm("baseline_large_K", P * m / (1.0 - m), Validity.LARGE_K)


def z_star(P: float) -> float:
    """Gain threshold 1/W(P) - 1/P maximizing e^{-z} ln(1 + Pz)."""
    if not P > 0:
        raise DomainError("P must be positive")
    return 1.0 / lambert_w(P) - 1.0 / P


def threshold_snr(P: float) -> float:
    """Received SNR at the feedback threshold, P z* = P/W(P) - 1."""
    return P / lambert_w(P) - 1.0


def g_function(z, P: float, m: float):
    """(m/(1-m)) e^{-z} ln(1 + P z); accepts scalars or arrays."""
    if not 0 <= m < 1:
        raise DomainError("m must lie in [0, 1)")
    z = np.asarray(z, dtype=float)
    if np.any(z < 0):
        raise DomainError("z must be non-negative")
    out = m / (1.0 - m) * np.exp(-z) * np.log1p(P * z)
    return float(out) if out.ndim == 0 else out


def selection_large_k(K: int, P: float, m: float, gamma=None) -> ClosedForm:
    _require_symmetric(gamma)
    if not 0 <= m < 1:
        raise DomainError("m must lie in [0, 1)")
    w = lambert_w(P)
    value = K * m / (1.0 - m) * math.exp(1.0 / P - 1.0 / w) * w
    return ClosedForm("selection_large_K", value, Validity.LARGE_K)


def high_snr_prelog(K: int, m: float, placement=Placement.CENTRALIZED) -> float:
    """Common pre-log phi_K of baseline and selection as P grows."""
    return effective_weight(m, K, placement)


def closed_form_table(K: int, P: float, m: float, placement=Placement.CENTRALIZED) -> list[ClosedForm]:
    placement = Placement.parse(placement)
    pre = high_snr_prelog(K, m, placement)
    rows = [
        baseline_exact(K, P, m, placement),
        baseline_large_k(P, m),
        ClosedForm("baseline_high_SNR", pre * math.log(P), Validity.HIGH_SNR),
        selection_large_k(K, P, m),
        ClosedForm("selection_high_SNR", pre * math.log(P), Validity.HIGH_SNR),
        ClosedForm("prelog_phi_K", pre, Validity.EXACT),
        ClosedForm("z_star", z_star(P), Validity.EXACT),
        ClosedForm("threshold_snr", threshold_snr(P), Validity.EXACT),
    ]
    return rows
