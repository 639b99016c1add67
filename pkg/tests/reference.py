"""Slow, literal reference implementations used as test oracles."""
from cacm.corrlib import cond_entropy


def ref_ggc1(g, model):
    """GGC1 straight from the algorithm text: full adjacency checks,
    global id-order scans, explicit J and J_r sets."""
    alive = set(range(len(g)))
    colored, group_color = {}, {}
    color = 0
    while True:
        roots = sorted(r for r in g.groups if r in alive)
        if not roots:
            break
        vr = roots[0]
        target = g.vertices[vr].packet
        order = sorted(g.groups[vr], key=lambda v: (
            -len(g.label(v)), cond_entropy(target, g.vertices[v].packet, model), v))
        best = None
        for t, vt in enumerate(order):
            I = [vt]
            for v in sorted(alive):
                if g.vertices[v].root == vr or v in I or g.label(v) != g.label(vt):
                    continue
                if any(g.adjacent(v, u) for u in I):
                    continue
                I.append(v)
            if best is None or len(I) > len(best):
                best = I
            if len(best) >= len(g.label(vt)) or t == len(order) - 1:
                break
        J = {g.vertices[v].root for v in best}
        for v in best:
            colored[v] = color
            group_color[g.vertices[v].root] = color
        for r in roots:
            if r in J:
                continue
            for v in best:
                if g.vertices[v].receiver != g.vertices[r].receiver:
                    continue
                if g.vertices[v].packet in g.ensembles[r]:
                    w = next(x for x in g.groups[r] if g.vertices[x].packet == g.vertices[v].packet)
                    colored[w] = color
                    group_color[r] = color
                    J.add(r)
                    break
        for r in J:
            alive -= set(g.groups[r])
        color += 1
    return colored, group_color


def conventional_graph_edges(cache, q):
    """Edge set of the plain index-coding conflict graph keyed by
    (receiver, packet) pairs, built without touching ``ConflictGraph``."""
    nodes = [(k, p) for k, packets in enumerate(q.requested, start=1) for p in packets]
    edges = set()
    for i, (k1, p1) in enumerate(nodes):
        for k2, p2 in nodes[i + 1:]:
            if p1 == p2:
                continue
            if p1 not in cache[k2] or p2 not in cache[k1]:
                edges.add(frozenset([(k1, p1), (k2, p2)]))
    return edges


def brute_independent(g, vids):
    vids = list(vids)
    for i, a in enumerate(vids):
        for b in vids[i + 1:]:
            va, vb = g.vertices[a], g.vertices[b]
            if va.root == vb.root:
                return False
            if va.packet != vb.packet and (
                    va.packet not in g.cache[vb.receiver]
                    or vb.packet not in g.cache[va.receiver]):
                return False
    return True


def phi_enumerated(K, N):
    """Mean number of distinct files over all N**K demand vectors."""
    from itertools import product
    from fractions import Fraction
    total = sum(len(set(d)) for d in product(range(N), repeat=K))
    return Fraction(total, N ** K)
