"""Codeword assembly from a group coloring, and a symbolic peeling decoder."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

from .corrlib import LibraryModel, PacketRef, cond_entropy
from .placement import CacheConfig

_TOL = 1e-12


class Refinement(NamedTuple):
    receiver: int
    target: PacketRef
    reference: Optional[PacketRef]
    length: float


@dataclass(frozen=True)
class Codeword:
    coded_segment: tuple  # tuple of frozenset[PacketRef], one XOR each
    refinements: tuple  # tuple of Refinement
    total_length: float
    packet_length: float

    def dump(self) -> str:
        lines = []
        for t in self.coded_segment:
            lines.append("XOR " + " ".join(str(p) for p in sorted(t)))
        for r in self.refinements:
            ref = "-" if r.reference is None else str(r.reference)
            lines.append(f"REF {r.receiver} {r.target}<-{ref} {r.length:.12g}")
        return "\n".join(lines) + ("\n" if lines else "")


class UndecodableError(RuntimeError):
    pass


def peel(known: set, transmissions) -> set:
    """Grow ``known`` by every XOR with exactly one unknown constituent."""
    pending = [t for t in transmissions if not t <= known]
    progress = True
    while pending and progress:
        progress = False
        rest = []
        for t in pending:
            unknown = t - known
            if len(unknown) == 1:
                known |= unknown
                progress = True
            elif unknown:
                rest.append(t)
        pending = rest
    return known


def assemble_codeword(graph, coloring, cache: CacheConfig, model: LibraryModel,
                      exclusion: bool = True) -> Codeword:
    """Coded segment from the color classes, then one refinement per
    requested packet the receiver cannot read off directly.

    With ``exclusion`` a colored packet already cached by the receiver of its
    group is left out of the XOR.
    """
    h = model.packet_entropy
    by_color: dict = {}
    for vid, c in coloring.colored.items():
        by_color.setdefault(c, []).append(vid)
    coded = []
    for c in sorted(by_color):
        packets = set()
        for vid in by_color[c]:
            v = graph.vertices[vid]
            if exclusion and v.packet in cache[v.receiver]:
                continue
            packets.add(v.packet)
        if packets:
            coded.append(frozenset(packets))

    roots_of: dict = {}
    for r in graph.groups:
        roots_of.setdefault(graph.vertices[r].receiver, []).append(r)

    refinements = []
    for k in sorted(roots_of):
        known = peel(set(cache[k]), coded)
        for r in roots_of[k]:
            target = graph.vertices[r].packet
            if target in known:
                continue
            options = [(cond_entropy(target, p, model), p)
                       for p in graph.ensembles[r] if p != target and p in known]
            if not options:
                raise UndecodableError(
                    f"receiver {k}: no reference for {target}; coloring is invalid")
            length, ref = min(options)
            if length > 0:
                refinements.append(Refinement(k, target, ref, length))
    total = len(coded) * h + math.fsum(r.length for r in refinements)
    return Codeword(tuple(coded), tuple(refinements), total, h)


def decode_verify(codeword: Codeword, cache: CacheConfig, q, model: LibraryModel) -> bool:
    h = model.packet_entropy
    refs_of: dict = {}
    for r in codeword.refinements:
        refs_of.setdefault(r.receiver, []).append(r)
    for k, wanted in enumerate(q.requested, start=1):
        known = set(cache[k])
        refs = refs_of.get(k, [])
        changed = True
        while changed:
            before = len(known)
            peel(known, codeword.coded_segment)
            for r in refs:
                if r.target in known:
                    continue
                usable = (r.reference is None and r.length >= h - _TOL) or (
                    r.reference in known
                    and r.length >= cond_entropy(r.target, r.reference, model) - _TOL)
                if usable:
                    known.add(r.target)
            # zero-length refinements are never transmitted
            for p in wanted:
                if p not in known and any(
                        cond_entropy(p, o, model) == 0.0 for o in known if o.packet == p.packet):
                    known.add(p)
            changed = len(known) != before
        if not set(wanted) <= known:
            return False
    return True


def rate(codeword: Codeword) -> float:
    return codeword.total_length


def naive_concatenation_rate(q, model: LibraryModel) -> float:
    """Every requested packet sent uncoded, duplicates included."""
    return sum(len(p) for p in q.requested) * model.packet_entropy


def naive_multicast_rate(q, model: LibraryModel) -> float:
    """Each distinct requested packet sent once, uncoded."""
    return len(q.all_requested()) * model.packet_entropy
