"""Rayleigh fading model and the multicast rate primitive.

Gains are power gains h_k ~ Exp with mean gamma_k. Rates are in nats.

Random streams: trials are grouped in fixed blocks of ``BLOCK`` draws and each
block owns a Philox stream keyed by ``(seed, block index)``. Trial ``t`` is
always row ``t % BLOCK`` of block ``t // BLOCK``, so any subset of trials can
be regenerated independently and in any order.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import DomainError

BLOCK = 4096


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(p: float) -> float:
    if p <= 0:
        raise DomainError(f"power {p} must be positive")
    return 10.0 * np.log10(p)


@dataclass(frozen=True)
class PowerBudget:
    P: float

    def __post_init__(self):
        if not self.P > 0:
            raise DomainError(f"transmit power P={self.P} must be positive")

    @classmethod
    def from_db(cls, db: float) -> "PowerBudget":
        return cls(db_to_linear(db))

    @property
    def db(self) -> float:
        return linear_to_db(self.P)


@dataclass(frozen=True)
class ChannelDraw:
    h: np.ndarray
    gamma: np.ndarray
    pi: np.ndarray  # h[pi[0]] >= h[pi[1]] >= ...

    @classmethod
    def from_gains(cls, h, gamma=None) -> "ChannelDraw":
        h = np.asarray(h, dtype=float)
        if h.ndim != 1 or h.size == 0:
            raise DomainError("gains must be a non-empty vector")
        if np.any(h < 0):
            raise DomainError("fading gains must be non-negative")
        g = np.ones_like(h) if gamma is None else _check_gamma(gamma)
        if g.size != h.size:
            raise DomainError("gamma and h differ in length")
        pi = np.argsort(-h, kind="stable")
        for a in (h, g, pi):
            a.flags.writeable = False
        return cls(h, g, pi)

    @property
    def K(self) -> int:
        return self.h.size

    @property
    def h_sorted(self) -> np.ndarray:
        return self.h[self.pi]


def _check_gamma(gamma) -> np.ndarray:
    g = np.array(gamma, dtype=float, ndmin=1)
    if np.any(~(g > 0)):
        raise DomainError(f"channel means must be positive, got {g}")
    return g


def block_rng(seed: int, block: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(block),))
    return np.random.Generator(np.random.Philox(ss))


def exponential_gains(u: np.ndarray, gamma: np.ndarray) -> np.ndarray:
    """Inverse-CDF transform of uniforms on [0, 1) to Exp gains with means gamma."""
    return -gamma * np.log1p(-u)


def sample(gamma, rng: np.random.Generator) -> ChannelDraw:
    g = _check_gamma(gamma)
    return ChannelDraw.from_gains(exponential_gains(rng.random(g.size), g), g)


def sample_block(gamma, seed: int, block: int, rows: int = BLOCK) -> np.ndarray:
    """Gains for the first ``rows`` trials of a block, shape (rows, K)."""
    g = _check_gamma(gamma)
    u = block_rng(seed, block).random((BLOCK, g.size))
    return exponential_gains(u[:rows], g)


def sample_trial(gamma, seed: int, trial: int) -> ChannelDraw:
    """The draw that trial ``trial`` of a seeded Monte Carlo run sees."""
    g = _check_gamma(gamma)
    block, row = divmod(int(trial), BLOCK)
    return ChannelDraw.from_gains(sample_block(g, seed, block, row + 1)[row], g)


def iter_blocks(gamma, seed: int, trials: int) -> Iterable[tuple[int, np.ndarray]]:
    n_blocks = -(-int(trials) // BLOCK)
    for b in range(n_blocks):
        rows = min(BLOCK, trials - b * BLOCK)
        yield b, sample_block(gamma, seed, b, rows)


def multicast_rate(draw: ChannelDraw, P: float | PowerBudget, subset: Iterable[int] | None = None) -> float:
    """Common-message rate ln(1 + P min_{j in subset} h_j); all users when subset is None."""
    P = P.P if isinstance(P, PowerBudget) else float(P)
    idx = np.arange(draw.K) if subset is None else np.fromiter(subset, dtype=int)
    if idx.size == 0:
        raise DomainError("multicast rate of an empty subset")
    return float(np.log1p(P * draw.h[idx].min()))
