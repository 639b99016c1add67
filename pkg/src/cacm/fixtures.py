"""Small worked instances with known answers, shared by ``selftest`` and tests."""
from __future__ import annotations

from .coloring import ggc, ggc1
from .corrlib import DynamicModel, LibraryModel, W
from .delivery import Codeword, assemble_codeword, decode_verify
from .graph import build_augmented_graph, build_demand
from .placement import example_one_cache


def example_one_model(delta: float) -> LibraryModel:
    """Six files, B = 4, clusters {1,2} and {5,6}, file 1 updated with the
    same correlation level as the static clusters."""
    return LibraryModel(6, 4, 1.0, delta, ((1, 2), (3,), (4,), (5, 6)),
                        DynamicModel((1.0, 0, 0, 0, 0, 0), delta))


def example_one(delta: float) -> tuple:
    """GGC1 codeword and the root-only (unaware) rate for demand (1, 3, 5)."""
    model = example_one_model(delta)
    cache = example_one_cache()
    flags = (True, False, False, False, False, False)
    q = build_demand(model, cache, (1, 3, 5), flags)
    graph = build_augmented_graph(model, cache, q)
    cw = assemble_codeword(graph, ggc1(graph, model), cache, model)
    if not decode_verify(cw, cache, q, model):
        raise AssertionError("example one codeword does not decode")
    plain = model.uncorrelated()
    g0 = build_augmented_graph(plain, cache, q)
    _, cw0 = ggc(g0, plain, cache)
    if not decode_verify(cw0, cache, q, plain):
        raise AssertionError("unaware example one codeword does not decode")
    return cw, cw0.total_length


EXAMPLE_ONE_SEGMENT = frozenset({frozenset({W(1, 3), W(3, 1)}),
                                 frozenset({W(1, 4), W(3, 2)})})


def coded_segment_set(cw: Codeword) -> frozenset:
    return frozenset(cw.coded_segment)
