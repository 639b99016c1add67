import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cacm.coloring import GroupColoring, ggc1, ggc2, oracle_min_rate
from cacm.corrlib import DynamicModel, LibraryModel, U, W
from cacm.delivery import (Codeword, Refinement, UndecodableError, assemble_codeword,
                           decode_verify, naive_concatenation_rate, naive_multicast_rate,
                           peel, rate)
from cacm.fixtures import example_one
from cacm.graph import build_augmented_graph, build_demand
from cacm.placement import CacheConfig, Scenario, deterministic_place
from conftest import random_instance
from test_graph import example_one_graph


def motivating():
    m = LibraryModel(2, 2, 1.0, 0.0, (), DynamicModel(1.0, 0.5))
    c = deterministic_place(Scenario.MOTIVATING_EXAMPLE, 1.0)
    q = build_demand(m, c, (1, 2), (True, True))
    return m, c, q, build_augmented_graph(m, c, q)


def vid(g, receiver, packet):
    return next(v.id for v in g.vertices if v.receiver == receiver and v.packet == packet)


def test_motivating_coloring_codeword():
    m, c, q, g = motivating()
    # every group represented by its original-version packet; the two
    # uncached ones share a color
    pick = {vid(g, 1, W(1, 1)): 0, vid(g, 1, W(1, 2)): 1,
            vid(g, 2, W(2, 1)): 1, vid(g, 2, W(2, 2)): 2}
    col = GroupColoring(pick, {g.vertices[v].root: k for v, k in pick.items()})
    cw = assemble_codeword(g, col, c, m)
    assert cw.coded_segment == (frozenset({W(1, 2), W(2, 1)}),)
    assert sum(r.length for r in cw.refinements) == 1.0
    assert cw.total_length == 1.5
    assert decode_verify(cw, c, q, m)


def test_example_one_refinements():
    cw, _ = example_one(0.2)
    by_rx = {}
    for r in cw.refinements:
        by_rx[r.receiver] = by_rx.get(r.receiver, 0.0) + r.length
    assert by_rx[1] == pytest.approx(0.2)  # H(U1 | W1)
    assert by_rx[3] == pytest.approx(0.1)  # half of H(W5 | W6)
    assert 2 not in by_rx


def test_example_one_rate_at_delta_tenth():
    cw, unaware = example_one(0.1)
    assert rate(cw) == pytest.approx(0.65, abs=1e-12)
    assert unaware == 1.75


def test_missing_refinement_fails_decoding():
    m, c, q, g = example_one_graph(0.2)
    cw = assemble_codeword(g, ggc1(g, m), c, m)
    cut = dataclasses.replace(cw, refinements=cw.refinements[1:])
    assert not decode_verify(cut, c, q, m)


def test_short_refinement_fails_decoding():
    m, c, q, g = example_one_graph(0.2)
    cw = assemble_codeword(g, ggc1(g, m), c, m)
    r0 = cw.refinements[0]
    bad = (r0._replace(length=r0.length / 2),) + cw.refinements[1:]
    assert not decode_verify(dataclasses.replace(cw, refinements=bad), c, q, m)


def test_full_length_refinement_without_reference_decodes():
    m = LibraryModel(1, 1)
    c = CacheConfig((frozenset(),))
    q = build_demand(m, c, (1,))
    cw = Codeword((), (Refinement(1, W(1, 1), None, 1.0),), 1.0, 1.0)
    assert decode_verify(cw, c, q, m)


def test_empty_demand_and_empty_codeword():
    m = LibraryModel(2, 2)
    c = deterministic_place(Scenario.TWO_FILE_CROSS, 2.0)
    q = build_demand(m, c, (1, 2))
    g = build_augmented_graph(m, c, q)
    cw = assemble_codeword(g, GroupColoring(), c, m)
    assert rate(cw) == 0.0 and decode_verify(cw, c, q, m)


def test_uncolored_group_is_undecodable():
    m = LibraryModel(2, 1)
    c = CacheConfig((frozenset(), frozenset()))
    q = build_demand(m, c, (1, 2))
    g = build_augmented_graph(m, c, q)
    with pytest.raises(UndecodableError):
        assemble_codeword(g, GroupColoring({0: 0}, {0: 0}), c, m)


def test_peel_chain():
    known = {W(1, 1)}
    tx = [frozenset({W(1, 2), W(1, 3)}), frozenset({W(1, 1), W(1, 2)})]
    assert peel(known, tx) == {W(1, 1), W(1, 2), W(1, 3)}


def test_naive_rates():
    m = LibraryModel(2, 4)
    c = CacheConfig((frozenset({W(1, 1)}), frozenset()))
    q = build_demand(m, c, (1, 1))
    assert naive_concatenation_rate(q, m) == 7 * 0.25
    assert naive_multicast_rate(q, m) == 4 * 0.25


def test_dump_format():
    cw, _ = example_one(0.2)
    text = cw.dump()
    assert "XOR W1.3 W3.1" in text and "REF 1 U1.1<-W1.1 0.05" in text


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_codeword_accounting_and_decoding(seed):
    model, cache, q, g = random_instance(np.random.default_rng(seed))
    h = model.packet_entropy
    allowed = {0.0, model.delta * h, h}
    if model.dynamic is not None:
        allowed.add(model.dynamic.update_delta * h)
    for algo in (ggc1, ggc2):
        col = algo(g, model) if g.groups else GroupColoring()
        cw = assemble_codeword(g, col, cache, model)
        assert cw.total_length == pytest.approx(
            len(cw.coded_segment) * h + sum(r.length for r in cw.refinements), abs=1e-12)
        assert all(r.length > 0 and any(abs(r.length - a) < 1e-12 for a in allowed)
                   for r in cw.refinements)
        assert 0.0 <= cw.total_length <= naive_concatenation_rate(q, model) + 1e-12
        assert decode_verify(cw, cache, q, model)
        plain = assemble_codeword(g, col, cache, model, exclusion=False)
        assert plain.total_length >= cw.total_length - 1e-12


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_oracle_codewords_decode(seed):
    model, cache, q, g = random_instance(np.random.default_rng(seed), K_max=3,
                                         N_choices=(1, 2, 4), B_max=2)
    if len(g) > 9:
        return
    col, r = oracle_min_rate(g, model, cache)
    cw = assemble_codeword(g, col, cache, model)
    assert cw.total_length == r and decode_verify(cw, cache, q, model)
