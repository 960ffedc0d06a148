"""Monte Carlo estimation of long-term average delivery rates and parameter sweeps."""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence, TextIO

import numpy as np

from .caching import Placement, caching_weights
from .channel import BLOCK, db_to_linear, sample_block
from .errors import DomainError
from .schemes import Scheme, batch_rates

CSV_FIELDS = ("scheme", "placement", "K", "P_dB", "m", "trials", "seed", "mean_nats", "stderr_nats")


@dataclass(frozen=True)
class SimParams:
    K: int
    snr_db: float
    m: float
    placement: Placement = Placement.CENTRALIZED
    gamma: tuple[float, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "placement", Placement.parse(self.placement))
        if self.K < 1:
            raise DomainError("K must be >= 1")
        if not 0 <= self.m < 1:
            raise DomainError("m must lie in [0, 1)")
        if self.gamma is not None:
            g = tuple(float(x) for x in self.gamma)
            if len(g) != self.K or min(g) <= 0:
                raise DomainError("gamma needs K positive entries")
            object.__setattr__(self, "gamma", g)

    @classmethod
    def from_linear(cls, K: int, P: float, m: float, placement=Placement.CENTRALIZED, gamma=None) -> "SimParams":
        return cls(K, 10.0 * math.log10(P), m, placement, gamma)

    @property
    def P(self) -> float:
        return db_to_linear(self.snr_db)

    @property
    def gamma_vector(self) -> np.ndarray:
        return np.ones(self.K) if self.gamma is None else np.asarray(self.gamma)


@dataclass(frozen=True)
class RateEstimate:
    scheme: Scheme
    params: SimParams
    trials: int
    mean: float
    stderr: float
    seed: int

    def row(self) -> dict:
        return {
            "scheme": self.scheme.value,
            "placement": self.params.placement.value,
            "K": self.params.K,
            "P_dB": repr(float(self.params.snr_db)),
            "m": repr(float(self.params.m)),
            "trials": self.trials,
            "seed": self.seed,
            "mean_nats": repr(float(self.mean)),
            "stderr_nats": repr(float(self.stderr)),
        }


@dataclass
class _Moments:
    n: int = 0
    mean: float = 0.0
    m2: float = 0.0

    @classmethod
    def of(cls, x: np.ndarray) -> "_Moments":
        mu = float(x.mean())
        return cls(x.size, mu, float(np.sum((x - mu) ** 2)))

    def merge(self, other: "_Moments") -> "_Moments":
        if self.n == 0:
            return other
        n = self.n + other.n
        delta = other.mean - self.mean
        mean = self.mean + delta * other.n / n
        m2 = self.m2 + other.m2 + delta * delta * self.n * other.n / n
        return _Moments(n, mean, m2)


def _block_moments(scheme: Scheme, params: SimParams, phi: np.ndarray, seed: int, trials: int, block: int):
    rows = min(BLOCK, trials - block * BLOCK)
    h = sample_block(params.gamma_vector, seed, block, rows)
    return _Moments.of(batch_rates(scheme, h, params.P, params.m, params.placement, phi))


def estimate(scheme, params: SimParams, trials: int = 100_000, seed: int = 0, workers: int = 1) -> RateEstimate:
    """Sample mean and standard error of the per-draw rate of ``scheme``.

    Blocks of draws are merged in block order, so the result does not depend
    on ``workers``.
    """
    scheme = Scheme.parse(scheme)
    if trials < 1:
        raise DomainError("trials must be >= 1")
    phi = caching_weights(params.m, params.K, params.placement)
    n_blocks = -(-trials // BLOCK)
    job = lambda b: _block_moments(scheme, params, phi, seed, trials, b)  # noqa: E731
    if workers > 1 and n_blocks > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(job, range(n_blocks)))
    else:
        parts = [job(b) for b in range(n_blocks)]
    acc = _Moments()
    for p in parts:
        acc = acc.merge(p)
    stderr = math.sqrt(acc.m2 / (acc.n - 1) / acc.n) if acc.n > 1 else math.nan
    return RateEstimate(scheme, params, trials, acc.mean, stderr, seed)


@dataclass(frozen=True)
class SweepSpec:
    axis: str  # "K" or "P_dB"
    values: tuple
    K: int = 10
    snr_db: float = 10.0
    m: float = 0.1
    placements: tuple[Placement, ...] = (Placement.CENTRALIZED,)
    schemes: tuple[Scheme, ...] = tuple(Scheme)
    trials: int = 100_000
    seed: int = 0
    gamma: tuple[float, ...] | None = None

    def __post_init__(self):
        axis = {"k": "K", "K": "K", "snr": "P_dB", "P_dB": "P_dB", "snr_db": "P_dB"}.get(self.axis)
        if axis is None:
            raise DomainError(f"unknown sweep axis {self.axis!r}")
        object.__setattr__(self, "axis", axis)
        vals = tuple(int(v) if axis == "K" else float(v) for v in self.values)
        if not vals or any(b <= a for a, b in zip(vals, vals[1:])):
            raise DomainError("sweep values must be non-empty and strictly increasing")
        object.__setattr__(self, "values", vals)
        if not self.schemes:
            raise DomainError("sweep needs at least one scheme")
        object.__setattr__(self, "schemes", tuple(Scheme.parse(s) for s in self.schemes))
        object.__setattr__(self, "placements", tuple(Placement.parse(p) for p in self.placements))
        if not self.placements:
            raise DomainError("sweep needs at least one placement")
        if self.trials < 1:
            raise DomainError("trials must be >= 1")
        if self.gamma is not None and axis == "K":
            raise DomainError("a gamma profile is only supported on the SNR axis")

    def points(self) -> Iterable[SimParams]:
        for v in self.values:
            for pl in self.placements:
                if self.axis == "K":
                    yield SimParams(v, self.snr_db, self.m, pl)
                else:
                    yield SimParams(self.K, v, self.m, pl, self.gamma)


def sweep(spec: SweepSpec, workers: int = 1) -> list[RateEstimate]:
    """One estimate per (axis value, placement, scheme), in axis order.

    Every point reuses the master seed, so schemes are compared on common draws.
    """
    return [estimate(s, p, spec.trials, spec.seed, workers) for p in spec.points() for s in spec.schemes]


def write_csv(estimates: Sequence[RateEstimate], out: str | Path | TextIO | None = None) -> str:
    """Render estimates with the fixed CSV schema; also write to ``out`` when given."""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for e in estimates:
        w.writerow(e.row())
    text = buf.getvalue()
    if isinstance(out, (str, Path)):
        try:
            Path(out).write_text(text)
        except OSError as exc:
            raise OSError(f"cannot write sweep CSV to {out}: {exc.strerror or exc}") from exc
    elif out is not None:
        out.write(text)
    return text


def read_csv(path: str | Path) -> list[dict]:
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


def figure1_spec(trials: int = 10_000, seed: int = 0) -> SweepSpec:
    """Sum rate versus K at 10 dB, m = 0.1, both placements."""
    return SweepSpec("K", (2, 5, 10, 20, 50, 100, 200), snr_db=10.0, m=0.1,
                     placements=tuple(Placement), trials=trials, seed=seed)


def figure2_spec(trials: int = 10_000, seed: int = 0) -> SweepSpec:
    """Sum rate versus SNR at K = 10, m = 0.1, both placements."""
    return SweepSpec("P_dB", tuple(range(0, 45, 5)), K=10, m=0.1,
                     placements=tuple(Placement), trials=trials, seed=seed)
