"""Synthetic correlated library: packet identities, correlation structure and
symbolic entropy bookkeeping.

Packet contents are never generated. A packet is identified by
``(file, version, packet)`` and every length is measured in normalized
entropy units, so a full file has length ``file_entropy`` and a packet has
length ``file_entropy / n_packets``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional, Sequence, Union

import numpy as np


class Version(enum.IntEnum):
    ORIGINAL = 0  # W
    UPDATED = 1  # U


class PacketRef(NamedTuple):
    """Packet ``packet`` of file ``file`` (both 1-based) in a given version."""

    file: int
    version: Version
    packet: int

    def __str__(self) -> str:
        tag = "W" if self.version == Version.ORIGINAL else "U"
        return f"{tag}{self.file}.{self.packet}"


def W(file: int, packet: int) -> PacketRef:
    return PacketRef(file, Version.ORIGINAL, packet)


def U(file: int, packet: int) -> PacketRef:
    return PacketRef(file, Version.UPDATED, packet)


@dataclass(frozen=True)
class DynamicModel:
    """Update process between placement and delivery.

    ``update_prob`` is either a scalar (same for every file) or one value per
    file. ``update_delta`` is H(U_n | W_n) as a fraction of H(W).
    """

    update_prob: Union[float, tuple]
    update_delta: float

    def prob(self, n_files: int) -> np.ndarray:
        p = np.broadcast_to(np.asarray(self.update_prob, dtype=float), (n_files,))
        return np.array(p)


@dataclass(frozen=True)
class LibraryModel:
    n_files: int
    n_packets: int
    file_entropy: float = 1.0
    delta: float = 0.0
    clusters: tuple = ()
    dynamic: Optional[DynamicModel] = None
    _cluster_of: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n_files < 1 or self.n_packets < 1:
            raise ValueError("n_files and n_packets must be positive")
        if self.file_entropy < 0:
            raise ValueError("file_entropy must be nonnegative")
        if not 0.0 <= self.delta < 1.0:
            raise ValueError(f"delta must lie in [0, 1), got {self.delta}")
        clusters = self.clusters or tuple((n,) for n in range(1, self.n_files + 1))
        clusters = tuple(tuple(sorted(c)) for c in clusters)
        cluster_of = {}
        for idx, members in enumerate(clusters):
            for n in members:
                if not 1 <= n <= self.n_files:
                    raise ValueError(f"cluster member {n} outside 1..{self.n_files}")
                if n in cluster_of:
                    raise ValueError(f"file {n} appears in more than one cluster")
                cluster_of[n] = idx
        if len(cluster_of) != self.n_files:
            missing = sorted(set(range(1, self.n_files + 1)) - set(cluster_of))
            raise ValueError(f"files not assigned to any cluster: {missing}")
        if self.dynamic is not None:
            p = self.dynamic.prob(self.n_files)
            if np.any(p < 0) or np.any(p > 1):
                raise ValueError("update probabilities must lie in [0, 1]")
            if not 0.0 <= self.dynamic.update_delta < 1.0:
                raise ValueError("update_delta must lie in [0, 1)")
        object.__setattr__(self, "clusters", clusters)
        object.__setattr__(self, "_cluster_of", cluster_of)

    @classmethod
    def symmetric(cls, n_files, n_packets, delta=0.0, g_delta=1, file_entropy=1.0,
                  dynamic=None):
        """Consecutive clusters of size ``g_delta``; ``g_delta`` must divide N."""
        if g_delta < 1 or n_files % g_delta:
            raise ValueError(f"g_delta={g_delta} must divide n_files={n_files}")
        clusters = tuple(tuple(range(s + 1, s + g_delta + 1))
                         for s in range(0, n_files, g_delta))
        return cls(n_files, n_packets, file_entropy, delta, clusters, dynamic)

    @property
    def packet_entropy(self) -> float:
        return self.file_entropy / self.n_packets

    @property
    def g_delta(self) -> int:
        """Cluster size when all clusters are equal, else the largest one."""
        return max(len(c) for c in self.clusters)

    def cluster_of(self, n: int) -> int:
        return self._cluster_of[n]

    def same_cluster(self, a: int, b: int) -> bool:
        return self._cluster_of[a] == self._cluster_of[b]

    def uncorrelated(self) -> "LibraryModel":
        """Same library with every correlation ignored: singleton clusters
        and no W/U link, so an updated packet is only ever sent in full."""
        return LibraryModel(self.n_files, self.n_packets, self.file_entropy, 0.0)

    @property
    def correlation_aware(self) -> bool:
        return any(len(c) > 1 for c in self.clusters) or self.dynamic is not None

    def validate(self, p: PacketRef) -> None:
        if not (1 <= p.file <= self.n_files and 1 <= p.packet <= self.n_packets):
            raise ValueError(f"packet {p} outside the library")


def delta_correlated(p: PacketRef, q: PacketRef, model: LibraryModel) -> bool:
    if p == q or p.packet != q.packet:
        return False
    if p.file == q.file:
        # cross-version pair of one file; only meaningful in the dynamic setting
        return model.dynamic is not None
    return (p.version == Version.ORIGINAL and q.version == Version.ORIGINAL
            and model.same_cluster(p.file, q.file))


def cond_entropy(target: PacketRef, reference: Optional[PacketRef],
                 model: LibraryModel) -> float:
    """H(target | reference) under the symmetric pairwise model."""
    h = model.packet_entropy
    if reference is None:
        return h
    if reference == target:
        return 0.0
    if not delta_correlated(target, reference, model):
        return h
    if target.file == reference.file:
        return model.dynamic.update_delta * h
    return model.delta * h


def joint_entropy(p: PacketRef, q: PacketRef, model: LibraryModel) -> float:
    h = model.packet_entropy
    if p == q:
        return h
    return h + cond_entropy(p, q, model)


def sample_updates(model: LibraryModel, rng_seed) -> np.ndarray:
    """Independent Bernoulli(pi_n) update flag per file (index 0 is file 1)."""
    if model.dynamic is None:
        raise ValueError("model has no dynamic-update parameters")
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) \
        else np.random.default_rng(rng_seed)
    return rng.random(model.n_files) < model.dynamic.prob(model.n_files)


def ensemble(p: PacketRef, universe: Iterable[PacketRef],
             model: LibraryModel) -> frozenset:
    """``p`` together with its delta-correlated members of ``universe``."""
    return frozenset([p]) | frozenset(q for q in universe if delta_correlated(p, q, model))


def correlated_candidates(p: PacketRef, model: LibraryModel) -> list:
    """Every library packet that is delta-correlated with ``p``."""
    out = []
    if p.version == Version.ORIGINAL:
        out += [W(n, p.packet) for n in model.clusters[model.cluster_of(p.file)]
                if n != p.file]
    if model.dynamic is not None:
        out.append(PacketRef(p.file, Version(1 - p.version), p.packet))
    return out


def correlated_in(p: PacketRef, universe, model: LibraryModel) -> list:
    """Members of the set ``universe`` that are delta-correlated with ``p``."""
    return [q for q in correlated_candidates(p, model) if q in universe]


def all_packets(model: LibraryModel, files: Optional[Sequence[int]] = None,
                version: Version = Version.ORIGINAL) -> list:
    files = range(1, model.n_files + 1) if files is None else files
    return [PacketRef(n, version, b) for n in files for b in range(1, model.n_packets + 1)]
