"""Augmented index-coding conflict graph built from a cache configuration and
a demand realization."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

from .corrlib import LibraryModel, PacketRef, U, W, correlated_in
from .placement import CacheConfig


@dataclass(frozen=True)
class DemandConfig:
    demand: tuple  # d_k, 1-based file indices
    requested: tuple  # Q_k, one sorted tuple of PacketRef per receiver
    update_flags: Optional[tuple] = None

    @property
    def n_receivers(self) -> int:
        return len(self.demand)

    def __getitem__(self, k: int) -> tuple:
        return self.requested[k - 1]

    def all_requested(self) -> frozenset:
        return frozenset(p for q in self.requested for p in q)


def build_demand(model: LibraryModel, cache: CacheConfig, demand: Sequence[int],
                 update_flags=None) -> DemandConfig:
    if len(demand) != cache.n_receivers:
        raise ValueError("demand length differs from the number of receivers")
    flags = None if update_flags is None else tuple(bool(f) for f in update_flags)
    B = model.n_packets
    requested = []
    for k, d in enumerate(demand, start=1):
        if not 1 <= d <= model.n_files:
            raise ValueError(f"demand {d} outside 1..{model.n_files}")
        if flags is not None and flags[d - 1]:
            # updated versions are never cached
            requested.append(tuple(U(d, b) for b in range(1, B + 1)))
        else:
            ck = cache[k]
            requested.append(tuple(W(d, b) for b in range(1, B + 1) if W(d, b) not in ck))
    return DemandConfig(tuple(int(d) for d in demand), tuple(requested), flags)


class Kind(enum.IntEnum):
    ROOT = 0
    VIRTUAL = 1


class Vertex(NamedTuple):
    id: int
    packet: PacketRef  # rho(v)
    receiver: int  # mu(v)
    root: int  # r(v)
    kind: Kind


class ConflictGraph:
    """Vertices, groups and the (implicit) edge relation of H_{C,Q}.

    Adjacency is evaluated on demand from the cache sets instead of being
    materialized; ``edges()`` enumerates it for inspection and tests.
    """

    def __init__(self, vertices, groups, cache: CacheConfig, ensembles, demand=None):
        self.vertices: list = vertices
        self.groups: dict = groups  # root id -> tuple of vertex ids, root first
        self.cache = cache
        self.ensembles: dict = ensembles  # root id -> frozenset of packets
        self.demand = demand
        self.cached_by: dict = cache.cached_by({v.packet for v in vertices})  # eta
        self._labels = [
            frozenset(self.cached_by.get(v.packet, frozenset()) | {v.receiver})
            for v in vertices
        ]

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def roots(self) -> list:
        return list(self.groups)

    def eta(self, vid: int) -> frozenset:
        return self.cached_by.get(self.vertices[vid].packet, frozenset())

    def label(self, vid: int) -> frozenset:
        """Receiver label {mu(v), eta(v)}."""
        return self._labels[vid]

    def locally_cached(self, vid: int) -> bool:
        v = self.vertices[vid]
        return v.packet in self.cache[v.receiver]

    def adjacent(self, a: int, b: int) -> bool:
        if a == b:
            return False
        va, vb = self.vertices[a], self.vertices[b]
        if va.root == vb.root:
            return True
        if va.packet == vb.packet:
            return False
        return (va.packet not in self.cache[vb.receiver]
                or vb.packet not in self.cache[va.receiver])

    def edges(self):
        n = len(self.vertices)
        for a in range(n):
            for b in range(a + 1, n):
                if self.adjacent(a, b):
                    yield a, b

    def is_independent(self, vids) -> bool:
        vids = list(vids)
        return not any(self.adjacent(a, b)
                       for i, a in enumerate(vids) for b in vids[i + 1:])

    def root_subgraph(self) -> "ConflictGraph":
        """Root vertices only: the conventional index-coding conflict graph."""
        vertices = []
        groups = {}
        for r in self.groups:
            v = self.vertices[r]
            nid = len(vertices)
            vertices.append(Vertex(nid, v.packet, v.receiver, nid, Kind.ROOT))
            groups[nid] = (nid,)
        ensembles = {r: frozenset([vertices[r].packet]) for r in groups}
        return ConflictGraph(vertices, groups, self.cache, ensembles, self.demand)

    def to_dot(self, name: str = "H") -> str:
        lines = [f"graph {name} {{"]
        for r, members in self.groups.items():
            lines.append(f"  subgraph cluster_{r} {{")
            lines.append(f'    label="G_{r}";')
            for vid in members:
                v = self.vertices[vid]
                shape = "box" if v.kind == Kind.ROOT else "ellipse"
                lines.append(f'    v{vid} [label="({v.packet}, {v.receiver}, v{v.root})" '
                             f"shape={shape}];")
            lines.append("  }")
        for a, b in self.edges():
            lines.append(f"  v{a} -- v{b};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_augmented_graph(model: LibraryModel, cache: CacheConfig,
                          q: DemandConfig) -> ConflictGraph:
    """One root per (receiver, requested packet), receiver-major and
    packet-minor, each followed by its virtual nodes in sorted packet order."""
    universe = set().union(*cache.per_receiver) | q.all_requested()
    vertices: list = []
    groups: dict = {}
    ensembles: dict = {}
    for k, packets in enumerate(q.requested, start=1):
        ck = cache[k]
        for p in sorted(packets):
            if p in ck:
                raise ValueError(f"receiver {k} requests cached packet {p}")
            rid = len(vertices)
            vertices.append(Vertex(rid, p, k, rid, Kind.ROOT))
            others = sorted(correlated_in(p, universe, model))
            members = [rid]
            for o in others:
                vid = len(vertices)
                vertices.append(Vertex(vid, o, k, rid, Kind.VIRTUAL))
                members.append(vid)
            groups[rid] = tuple(members)
            ensembles[rid] = frozenset([p, *others])
    return ConflictGraph(vertices, groups, cache, ensembles, q)

