import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from cacm.corrlib import DynamicModel, LibraryModel, sample_updates  # noqa: E402
from cacm.graph import build_augmented_graph, build_demand  # noqa: E402
from cacm.placement import CachingDistribution, random_fractional_place  # noqa: E402


def random_instance(rng, K_max=4, N_choices=(2, 4, 6), B_max=6, dynamic=None):
    """A random (model, cache, demand, graph) tuple across the parameter grid."""
    K = int(rng.integers(1, K_max + 1))
    N = int(rng.choice(N_choices))
    B = int(rng.integers(1, B_max + 1))
    G = int(rng.choice([d for d in range(1, N + 1) if N % d == 0]))
    if dynamic is None:
        dynamic = bool(rng.random() < 0.5)
    delta = float(rng.choice([0.0, 0.1, 0.25, 0.5]))
    dyn = DynamicModel(float(rng.random()), float(rng.choice([0.0, 0.3, 0.5]))) if dynamic else None
    model = LibraryModel.symmetric(N, B, delta, 1 if dynamic else G, 1.0, dyn)
    M = float(rng.integers(0, 2 * N + 1)) / 2
    cache = random_fractional_place(model, CachingDistribution.uniform(N), M, K, rng)
    flags = sample_updates(model, rng) if dynamic else None
    q = build_demand(model, cache, rng.integers(1, N + 1, size=K), flags)
    return model, cache, q, build_augmented_graph(model, cache, q)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
