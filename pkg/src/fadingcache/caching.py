"""Coded caching content layer.

Load formulas and effective weights for centralized and decentralized
placement, plus a bit-exact simulator of placement, XOR delivery and
decoding. Users and files are indexed from 0; a user subset is a sorted
tuple of user indices.
"""
from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from typing import Mapping, Sequence

import numpy as np

from .errors import DecodeError, DomainError

Subset = tuple[int, ...]
SubfileKey = tuple[int, Subset]  # (file index, caching user subset)


class Placement(str, Enum):
    CENTRALIZED = "centralized"
    DECENTRALIZED = "decentralized"

    @classmethod
    def parse(cls, value: "Placement | str") -> "Placement":
        if isinstance(value, cls):
            return value
        v = str(value).strip().lower()
        if v in ("c", "centralized"):
            return cls.CENTRALIZED
        if v in ("d", "decentralized"):
            return cls.DECENTRALIZED
        raise DomainError(f"unknown placement {value!r}")


def _check_m(m: float, *, allow_one: bool = True) -> None:
    if not (0.0 <= m <= 1.0) or (not allow_one and m == 1.0):
        raise DomainError(f"normalized cache size m={m} outside its domain")


def load(m: float, K, placement: Placement | str = Placement.CENTRALIZED):
    """Number of file-sized multicast transmissions T(m, K) for K distinct demands.

    ``K`` may be an integer or an integer array; the result has the same shape.
    """
    _check_m(m)
    placement = Placement.parse(placement)
    k = np.asarray(K, dtype=float)
    if np.any(k < 1):
        raise DomainError(f"user count K={K} must be >= 1")
    if placement is Placement.CENTRALIZED:
        out = (1.0 - m) / (1.0 / k + m)
    elif m == 0.0:
        out = k.copy()
    else:
        out = (1.0 - m) * (1.0 - (1.0 - m) ** k) / m
    return float(out) if out.ndim == 0 else out


def effective_weight(m: float, k, placement: Placement | str = Placement.CENTRALIZED):
    """Collapsed priority k / T(m, k) of the k-th strongest user (k counted from 1)."""
    _check_m(m, allow_one=False)
    kk = np.asarray(k, dtype=float)
    out = kk / np.asarray(load(m, kk, placement))
    return float(out) if out.ndim == 0 else out


def caching_weights(m: float, K: int, placement: Placement | str = Placement.CENTRALIZED) -> np.ndarray:
    """Vector (phi_1, ..., phi_K) for users sorted strongest-first."""
    return np.atleast_1d(effective_weight(m, np.arange(1, K + 1), placement))


def collapse_weights(theta: Mapping[Sequence[int], float], K: int, h_order: Sequence[int]) -> np.ndarray:
    """Collapse subset weights into one weight per channel rank.

    ``theta`` maps user subsets (original user ids) to non-negative weights;
    ``h_order[r]`` is the user with the r-th largest gain. Entry r of the
    result is the largest weight among subsets whose weakest member has rank r.
    """
    order = np.asarray(h_order, dtype=int)
    if sorted(order.tolist()) != list(range(K)):
        raise DomainError("h_order must be a permutation of range(K)")
    rank = np.empty(K, dtype=int)
    rank[order] = np.arange(K)
    phi = np.zeros(K)
    for subset, w in theta.items():
        members = tuple(subset)
        if not members:
            continue
        if w < 0:
            raise DomainError(f"negative weight {w} for subset {members}")
        if min(members) < 0 or max(members) >= K:
            raise DomainError(f"subset {members} references a user outside range({K})")
        r = max(rank[u] for u in members)
        phi[r] = max(phi[r], w)
    return phi


def caching_theta(m: float, K: int, placement: Placement | str = Placement.CENTRALIZED) -> dict[Subset, float]:
    """Subset weight profile |S| / T(m, |S|) over all non-empty subsets."""
    w = caching_weights(m, K, placement)
    return {s: float(w[len(s) - 1]) for j in range(1, K + 1) for s in combinations(range(K), j)}


# ---------------------------------------------------------------------------
# bit-exact placement / delivery / decoding


@dataclass(frozen=True)
class SystemParams:
    K: int
    N: int
    m: float
    F: int
    placement: Placement = Placement.CENTRALIZED
    pad_to_divisible: bool = False

    def __post_init__(self):
        object.__setattr__(self, "placement", Placement.parse(self.placement))
        if self.K < 1 or self.N < self.K or self.F < 1:
            raise DomainError(f"need K >= 1, N >= K, F >= 1 (got K={self.K}, N={self.N}, F={self.F})")
        _check_m(self.m)
        if (self.placement is Placement.CENTRALIZED and not self.pad_to_divisible
                and self.F % self.n_subfiles):
            raise DomainError(
                f"F={self.F} not divisible by C({self.K},{self.b})={self.n_subfiles}; "
                "enable pad_to_divisible or choose another F")

    @property
    def b(self) -> int:
        # guard against m*K landing a hair below an integer
        return min(self.K, math.floor(self.m * self.K + 1e-9))

    @property
    def n_subfiles(self) -> int:
        return math.comb(self.K, self.b)

    @property
    def effective_F(self) -> int:
        """File length after zero padding (centralized) or F itself."""
        if self.placement is Placement.DECENTRALIZED:
            return self.F
        c = self.n_subfiles
        return -(-self.F // c) * c


def make_library(N: int, F: int, seed: int = 0) -> np.ndarray:
    """N random files of F bits each, as a (N, F) uint8 array of 0/1."""
    rng = np.random.default_rng(seed)
    return rng.integers(0, 2, size=(N, F), dtype=np.uint8)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class CacheState:
    """Result of a placement.

    ``subfiles[(i, J)]`` is the sub-file of file i cached exactly by the users
    in J and ``positions[(i, J)]`` its bit positions within the (padded) file.
    Only non-empty sub-files are stored.
    """

    params: SystemParams
    subfiles: Mapping[SubfileKey, np.ndarray]
    positions: Mapping[SubfileKey, np.ndarray]
    seed: int | None = None

    @property
    def K(self) -> int:
        return self.params.K

    @property
    def F(self) -> int:
        return self.params.F

    @property
    def padded_F(self) -> int:
        return self.params.effective_F

    def user_cache(self, k: int) -> dict[SubfileKey, np.ndarray]:
        """Cache contents Z_k: every sub-file whose subset contains user k."""
        return {key: bits for key, bits in self.subfiles.items() if k in key[1]}

    def cached_bits(self, k: int) -> int:
        return sum(b.size for b in self.user_cache(k).values())

    def subfile(self, i: int, subset: Subset) -> np.ndarray:
        return self.subfiles.get((i, subset), _EMPTY)

    def describe(self) -> str:
        p = self.params
        lines = [f"placement={p.placement.value} K={p.K} N={p.N} m={p.m} F={p.F} "
                 f"padded_F={self.padded_F} seed={self.seed}"]
        for k in range(p.K):
            lines.append(f"user={k} cached_bits={self.cached_bits(k)}")
        return "\n".join(lines)


_EMPTY = _frozen(np.zeros(0, dtype=np.uint8))


def centralized_place(params: SystemParams, library: np.ndarray) -> CacheState:
    """Split each file into C(K, b) equal sub-files, one per b-subset in lexicographic order."""
    if params.placement is not Placement.CENTRALIZED:
        raise DomainError("centralized_place needs placement=centralized")
    lib = _check_library(params, library)
    Fp = params.effective_F
    if Fp > params.F:
        lib = np.concatenate([lib, np.zeros((params.N, Fp - params.F), dtype=np.uint8)], axis=1)
    subsets = list(combinations(range(params.K), params.b))
    size = Fp // len(subsets)
    subfiles, positions = {}, {}
    for i in range(params.N):
        for n, J in enumerate(subsets):
            pos = np.arange(n * size, (n + 1) * size)
            if size:
                subfiles[(i, J)] = _frozen(lib[i, pos])
                positions[(i, J)] = _frozen(pos)
    return CacheState(params, subfiles, positions)


def decentralized_place(params: SystemParams, library: np.ndarray, seed: int) -> CacheState:
    """Each user caches floor(mF) uniformly chosen distinct bits of every file."""
    if params.placement is not Placement.DECENTRALIZED:
        raise DomainError("decentralized_place needs placement=decentralized")
    lib = _check_library(params, library)
    K, F = params.K, params.F
    per_user = math.floor(params.m * F + 1e-9)
    rng = np.random.default_rng(seed)
    weights = (1 << np.arange(K, dtype=np.int64))[:, None]
    subfiles, positions = {}, {}
    for i in range(params.N):
        member = np.zeros((K, F), dtype=bool)
        for k in range(K):
            member[k, rng.choice(F, size=per_user, replace=False)] = True
        mask = (member * weights).sum(axis=0)
        order = np.argsort(mask, kind="stable")
        uniq, starts = np.unique(mask[order], return_index=True)
        bounds = np.append(starts, F)
        for u, lo, hi in zip(uniq.tolist(), bounds[:-1], bounds[1:]):
            J = tuple(k for k in range(K) if (u >> k) & 1)
            pos = np.sort(order[lo:hi])
            subfiles[(i, J)] = _frozen(lib[i, pos])
            positions[(i, J)] = _frozen(pos)
    return CacheState(params, subfiles, positions, seed=seed)


def place(params: SystemParams, library: np.ndarray, seed: int = 0) -> CacheState:
    if params.placement is Placement.CENTRALIZED:
        return centralized_place(params, library)
    return decentralized_place(params, library, seed)


def _check_library(params: SystemParams, library: np.ndarray) -> np.ndarray:
    lib = np.asarray(library, dtype=np.uint8)
    if lib.shape != (params.N, params.F):
        raise DomainError(f"library shape {lib.shape} != (N, F) = {(params.N, params.F)}")
    return lib


@dataclass(frozen=True)
class Codeword:
    """XOR of the constituents W_{d_j | S minus j}, each zero-padded to the longest.

    ``lengths[n]`` is the unpadded length of the constituent for ``subset[n]``.
    """

    subset: Subset
    payload: np.ndarray
    lengths: tuple[int, ...]
    crc: int

    @property
    def bits(self) -> int:
        return int(self.payload.size)


@dataclass(frozen=True)
class CodewordBatch:
    codewords: tuple[Codeword, ...]
    demand: tuple[int, ...]
    F: int = field(default=0)

    @property
    def total_bits(self) -> int:
        return sum(cw.bits for cw in self.codewords)

    @property
    def load(self) -> float:
        """Transmitted bits normalized by the file size."""
        return self.total_bits / self.F

    @property
    def mean_constituent_bits(self) -> float:
        """Sum over codewords of the average unpadded constituent length."""
        return float(sum(np.mean(cw.lengths) for cw in self.codewords))

    def describe(self) -> str:
        lines = [f"demand={list(self.demand)} codewords={len(self.codewords)} "
                 f"total_bits={self.total_bits} F={self.F}"]
        for cw in self.codewords:
            lines.append(f"subset={list(cw.subset)} bits={cw.bits} lengths={list(cw.lengths)}")
        return "\n".join(lines)


def _crc(payload: np.ndarray) -> int:
    return zlib.crc32(np.packbits(payload).tobytes()) ^ payload.size


def _check_demand(cache: CacheState, demand: Sequence[int] | None) -> tuple[int, ...]:
    K, N = cache.K, cache.params.N
    d = tuple(range(K)) if demand is None else tuple(int(x) for x in demand)
    if len(d) != K:
        raise DomainError(f"demand has {len(d)} entries for K={K} users")
    if any(x < 0 or x >= N for x in d):
        raise DomainError(f"demand {d} references a file outside range({N})")
    if len(set(d)) != K:
        raise DomainError(f"demand {d} is not distinct")
    return d


def build_codewords(cache: CacheState, demand: Sequence[int] | None = None) -> CodewordBatch:
    """XOR codewords for the given distinct demand (default: user k wants file k)."""
    d = _check_demand(cache, demand)
    K = cache.K
    if cache.params.placement is Placement.CENTRALIZED:
        b = cache.params.b
        targets = combinations(range(K), b + 1) if b < K else iter(())
    else:
        targets = (S for s in range(1, K + 1) for S in combinations(range(K), s))
    out = []
    for S in targets:
        parts = [cache.subfile(d[j], tuple(u for u in S if u != j)) for j in S]
        L = max(p.size for p in parts)
        if L == 0:
            continue
        payload = np.zeros(L, dtype=np.uint8)
        for p in parts:
            payload[: p.size] ^= p
        out.append(Codeword(S, _frozen(payload), tuple(p.size for p in parts), _crc(payload)))
    return CodewordBatch(tuple(out), d, cache.F)


def decode(user: int, cache: CacheState, batch: CodewordBatch) -> np.ndarray:
    """Reassemble the F bits of ``user``'s demanded file from its cache and the batch."""
    K = cache.K
    if not 0 <= user < K:
        raise DomainError(f"user {user} outside range({K})")
    d = _check_demand(cache, batch.demand)
    want = d[user]
    out = np.zeros(cache.padded_F, dtype=np.uint8)
    filled = np.zeros(cache.padded_F, dtype=bool)
    for (i, J), bits in cache.subfiles.items():
        if i == want and user in J:
            pos = cache.positions[(i, J)]
            out[pos] = bits
            filled[pos] = True
    for cw in batch.codewords:
        if user not in cw.subset:
            continue
        if cw.crc != _crc(cw.payload) or len(cw.lengths) != len(cw.subset):
            raise DecodeError(f"codeword for subset {cw.subset} failed its checksum")
        acc = cw.payload.copy()
        mine = None
        for j, n in zip(cw.subset, cw.lengths):
            key = (d[j], tuple(u for u in cw.subset if u != j))
            expect = cache.positions[key].size if key in cache.positions else 0
            if n != expect:
                raise DecodeError(f"length header mismatch in subset {cw.subset} for user {j}")
            if j == user:
                mine = key
                continue
            acc[:n] ^= cache.subfile(*key)
        if mine is not None and mine in cache.positions:
            pos = cache.positions[mine]
            if acc[pos.size:].any():
                raise DecodeError(f"non-zero padding after decoding subset {cw.subset}")
            out[pos] = acc[: pos.size]
            filled[pos] = True
    if not filled.all():
        raise DecodeError(f"user {user} is missing {int((~filled).sum())} bits of file {want}")
    return out[: cache.F]
