"""Greedy group colorings of the augmented conflict graph and an exhaustive
minimum-rate oracle for small graphs."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .corrlib import LibraryModel, cond_entropy
from .delivery import Codeword, assemble_codeword
from .graph import ConflictGraph

ORACLE_LIMIT = 10
_RATE_TOL = 1e-12


@dataclass
class GroupColoring:
    colored: dict = field(default_factory=dict)  # vertex id -> color
    group_color: dict = field(default_factory=dict)  # root id -> color

    @property
    def n_colors(self) -> int:
        return len(set(self.colored.values()))

    def classes(self) -> dict:
        out: dict = {}
        for vid, c in self.colored.items():
            out.setdefault(c, []).append(vid)
        return {c: sorted(v) for c, v in sorted(out.items())}


def check_group_coloring(graph: ConflictGraph, coloring: GroupColoring) -> None:
    """Raise ``AssertionError`` unless exactly one vertex per group is colored,
    each group carries that vertex's color and color classes are independent."""
    per_group: dict = {}
    for vid in coloring.colored:
        per_group.setdefault(graph.vertices[vid].root, []).append(vid)
    if set(per_group) != set(graph.groups):
        raise AssertionError("some group has no colored vertex")
    for r, vids in per_group.items():
        if len(vids) != 1:
            raise AssertionError(f"group {r} has {len(vids)} colored vertices")
        if coloring.group_color.get(r) != coloring.colored[vids[0]]:
            raise AssertionError(f"group {r} color differs from its colored vertex")
    for c, vids in coloring.classes().items():
        if not graph.is_independent(vids):
            raise AssertionError(f"color {c} is not an independent set")


class _State:
    """Alive-vertex bookkeeping shared by both greedy colorings."""

    def __init__(self, graph: ConflictGraph):
        self.g = graph
        self.alive = [True] * len(graph)
        self.roots = list(graph.groups)
        self._next_root = 0
        # (receiver, packet) -> alive vertex ids in id order; the receiver
        # label is a function of this pair
        self.by_rx_packet: dict = {}
        # label -> receiver -> alive locally-cached vertex ids in id order
        self.local: dict = {}
        # label -> receiver -> alive vertex ids in id order
        self.by_label: dict = {}
        # packet -> alive vertex ids in id order
        self.by_packet: dict = {}
        for v in graph.vertices:
            lab = graph.label(v.id)
            self.by_rx_packet.setdefault((v.receiver, v.packet), {})[v.id] = None
            self.by_label.setdefault(lab, {}).setdefault(v.receiver, {})[v.id] = None
            self.by_packet.setdefault(v.packet, {})[v.id] = None
            if graph.locally_cached(v.id):
                self.local.setdefault(lab, {}).setdefault(v.receiver, {})[v.id] = None

    def next_root(self):
        while self._next_root < len(self.roots):
            r = self.roots[self._next_root]
            if self.alive[r]:
                return r
            self._next_root += 1
        return None

    def remove_group(self, r: int) -> None:
        g = self.g
        for vid in g.groups[r]:
            if not self.alive[vid]:
                continue
            self.alive[vid] = False
            v = g.vertices[vid]
            lab = g.label(vid)
            del self.by_rx_packet[(v.receiver, v.packet)][vid]
            del self.by_label[lab][v.receiver][vid]
            del self.by_packet[v.packet][vid]
            if g.locally_cached(vid):
                del self.local[lab][v.receiver][vid]


def _first_per_group(vids, g: ConflictGraph, used_groups: set, skip_root: int) -> list:
    out = []
    for vid in vids:
        r = g.vertices[vid].root
        if r == skip_root or r in used_groups:
            continue
        used_groups.add(r)
        out.append(vid)
    return out


def _grow(state: _State, vt: int, current_root: int) -> list:
    """Greedy independent set seeded at ``vt`` over alive vertices outside the
    current group sharing ``vt``'s receiver label, scanned in id order.

    Same-label vertices at different receivers are never adjacent, so the
    scan decomposes per receiver. Two same-receiver vertices from different
    groups are non-adjacent iff they carry the same packet or both packets
    are cached at that receiver.
    """
    g = state.g
    lab = g.label(vt)
    v0 = g.vertices[vt]
    used = {v0.root}
    members = [vt]
    for k in sorted(lab):
        if k == v0.receiver:
            if g.locally_cached(vt):
                pool = state.local.get(lab, {}).get(k, {})
            else:
                pool = state.by_rx_packet.get((k, v0.packet), {})
            members += _first_per_group(pool, g, used, current_root)
            continue
        pool = state.by_label.get(lab, {}).get(k, {})
        first = None
        for vid in pool:
            if g.vertices[vid].root != current_root:
                first = vid
                break
        if first is None:
            continue
        if g.locally_cached(first):
            members += _first_per_group(state.local[lab][k], g, used, current_root)
        else:
            members += _first_per_group(
                state.by_rx_packet[(k, g.vertices[first].packet)], g, used, current_root)
    return members


def _color_and_remove(state: _State, coloring: GroupColoring, chosen: list,
                      color: int, extend_same_receiver: bool) -> None:
    g = state.g
    served = {}
    for vid in chosen:
        served.setdefault(g.vertices[vid].root, vid)
    if extend_same_receiver:
        # other groups of the same receiver holding a colored packet are
        # served by the same transmission
        for vid in chosen:
            v = g.vertices[vid]
            for other in state.by_rx_packet[(v.receiver, v.packet)]:
                served.setdefault(g.vertices[other].root, other)
    for r, vid in served.items():
        coloring.colored[vid] = color
        coloring.group_color[r] = color
    for r in served:
        state.remove_group(r)


def ggc1(graph: ConflictGraph, model: LibraryModel) -> GroupColoring:
    """Greedy group coloring targeting coded multicast opportunities."""
    state = _State(graph)
    coloring = GroupColoring()
    color = 0
    while (vr := state.next_root()) is not None:
        target = graph.vertices[vr].packet
        order = sorted(
            graph.groups[vr],
            key=lambda v: (-len(graph.label(v)),
                           cond_entropy(target, graph.vertices[v].packet, model), v))
        best = None
        for t, vt in enumerate(order):
            cand = _grow(state, vt, vr)
            if best is None or len(cand) > len(best):
                best = cand
            if len(best) >= len(graph.label(vt)) or t == len(order) - 1:
                break
        _color_and_remove(state, coloring, best, color, extend_same_receiver=True)
        color += 1
    return coloring


def ggc2(graph: ConflictGraph, model: LibraryModel) -> GroupColoring:
    """Correlation-aware naive multicast: each pass sends the packet shared
    by the largest number of uncolored groups."""
    state = _State(graph)
    coloring = GroupColoring()
    h = model.packet_entropy
    color = 0
    while (vr := state.next_root()) is not None:
        best_key, best = None, None
        for v in graph.groups[vr]:
            packet = graph.vertices[v].packet
            cand = [v] + [u for u in state.by_packet[packet]
                          if graph.vertices[u].root != vr]
            # ties on size go to the cheaper transmission + refinement
            cost = (0.0 if all(graph.locally_cached(u) for u in cand) else h)
            cost += sum(cond_entropy(graph.vertices[graph.vertices[u].root].packet,
                                     packet, model) for u in cand)
            key = (-len(cand), cost, v)
            if best_key is None or key < best_key:
                best_key, best = key, cand
        _color_and_remove(state, coloring, best, color, extend_same_receiver=False)
        color += 1
    return coloring


def ggc(graph: ConflictGraph, model: LibraryModel, cache) -> tuple:
    """Run both greedy colorings and keep the shorter codeword."""
    if not graph.groups:
        return GroupColoring(), assemble_codeword(graph, GroupColoring(), cache, model)
    c1 = ggc1(graph, model)
    w1 = assemble_codeword(graph, c1, cache, model)
    c2 = ggc2(graph, model)
    w2 = assemble_codeword(graph, c2, cache, model)
    if w2.total_length < w1.total_length - _RATE_TOL:
        return c2, w2
    return c1, w1


def _independent_partitions(adj, items):
    """Canonical set partitions of ``items`` (restricted growth order) whose
    blocks are independent sets under boolean matrix ``adj``."""
    n = len(items)
    blocks: list = []
    assign = [0] * n

    def rec(i):
        if i == n:
            yield tuple(assign)
            return
        v = items[i]
        for b, block in enumerate(blocks):
            if not any(adj[v][u] for u in block):
                block.append(v)
                assign[i] = b
                yield from rec(i + 1)
                block.pop()
        blocks.append([v])
        assign[i] = len(blocks) - 1
        yield from rec(i + 1)
        blocks.pop()

    yield from rec(0)


def oracle_min_rate(graph: ConflictGraph, model: LibraryModel, cache,
                    limit: int = ORACLE_LIMIT) -> tuple:
    """Exhaustive minimum over every valid group coloring.

    A group coloring only matters through the vertex it extracts from each
    group and the partition of those vertices into independent color classes,
    so both are enumerated directly: one vertex per group, then every
    canonical partition of the chosen vertices into independent sets.
    The first minimizer in enumeration order wins ties.
    """
    if len(graph) > limit:
        raise ValueError(f"graph has {len(graph)} vertices; oracle limit is {limit}")
    if not graph.groups:
        empty = GroupColoring()
        return empty, assemble_codeword(graph, empty, cache, model).total_length
    n = len(graph)
    adj = [[graph.adjacent(a, b) for b in range(n)] for a in range(n)]
    best_rate, best = None, None
    for chosen in itertools.product(*graph.groups.values()):
        for assign in _independent_partitions(adj, chosen):
            coloring = GroupColoring(
                {v: c for v, c in zip(chosen, assign)},
                {graph.vertices[v].root: c for v, c in zip(chosen, assign)})
            r = assemble_codeword(graph, coloring, cache, model).total_length
            if best_rate is None or r < best_rate - _RATE_TOL:
                best_rate, best = r, coloring
    return best, best_rate


def codeword_for(graph, coloring, cache, model) -> Codeword:
    return assemble_codeword(graph, coloring, cache, model)
