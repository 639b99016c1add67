"""Cache placement: random fractional caching and the fixed two-receiver layouts."""
from __future__ import annotations

import enum
from operator import attrgetter
from dataclasses import dataclass
import numpy as np

from .corrlib import LibraryModel, PacketRef, Version, W, all_packets

_TOL = 1e-9


@dataclass(frozen=True)
class CachingDistribution:
    weights: tuple

    def __post_init__(self):
        w = tuple(float(x) for x in self.weights)
        if any(x < 0 for x in w):
            raise ValueError("caching weights must be nonnegative")
        if abs(sum(w) - 1.0) > _TOL:
            raise ValueError(f"caching weights sum to {sum(w)}, expected 1")
        object.__setattr__(self, "weights", w)

    @classmethod
    def uniform(cls, n_files: int) -> "CachingDistribution":
        return cls((1.0 / n_files,) * n_files)

    def packet_counts(self, memory: float, model: LibraryModel) -> list:
        """Packets cached per file: round(rho_n * M * B / H(W))."""
        if len(self.weights) != model.n_files:
            raise ValueError("caching distribution length differs from N")
        counts = []
        for n, rho in enumerate(self.weights, start=1):
            exact = rho * memory * model.n_packets / model.file_entropy
            if exact > model.n_packets + _TOL:
                raise ValueError(
                    f"file {n}: rho*M = {rho * memory:.6g} exceeds one file "
                    f"(need rho_n <= H(W)/M)")
            counts.append(min(int(round(exact)), model.n_packets))
        return counts


@dataclass(frozen=True)
class CacheConfig:
    per_receiver: tuple  # tuple of frozenset[PacketRef]

    def __post_init__(self):
        object.__setattr__(self, "per_receiver",
                           tuple(frozenset(c) for c in self.per_receiver))
        for k, cache in enumerate(self.per_receiver, start=1):
            if any(map(attrgetter("version"), cache)):  # ORIGINAL == 0
                raise ValueError(f"receiver {k} caches an updated packet")

    @property
    def n_receivers(self) -> int:
        return len(self.per_receiver)

    def __getitem__(self, k: int) -> frozenset:
        """Cache of receiver ``k`` (1-based)."""
        return self.per_receiver[k - 1]

    def cached_by(self, packets=None) -> dict:
        """eta: packet -> receivers caching it, restricted to ``packets``
        when given (cached packets only otherwise)."""
        if packets is None:
            eta: dict = {}
            for k, cache in enumerate(self.per_receiver, start=1):
                for p in cache:
                    eta.setdefault(p, set()).add(k)
            return {p: frozenset(s) for p, s in eta.items()}
        return {p: frozenset(k for k, cache in enumerate(self.per_receiver, start=1)
                             if p in cache) for p in packets}

    def check_capacity(self, memory: float, model: LibraryModel) -> None:
        slots = memory * model.n_packets / model.file_entropy if model.file_entropy else 0
        for k, cache in enumerate(self.per_receiver, start=1):
            if len(cache) > slots + _TOL:
                raise ValueError(f"receiver {k} holds {len(cache)} packets, "
                                 f"capacity is {slots:g}")


def random_fractional_place(model: LibraryModel, dist: CachingDistribution,
                            memory: float, n_receivers: int, rng_seed) -> CacheConfig:
    """Each receiver independently caches a uniform random subset of
    round(rho_n M B) Original packets of every file n."""
    if not 0 <= memory <= model.n_files * model.file_entropy + _TOL:
        raise ValueError(f"memory {memory} outside [0, N*H(W)]")
    counts = dist.packet_counts(memory, model)
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) \
        else np.random.default_rng(rng_seed)
    B = model.n_packets
    caches = []
    for _ in range(n_receivers):
        cache = []
        for n, c in enumerate(counts, start=1):
            if c == B:
                picks = range(B)
            elif c == 0:
                continue
            else:
                picks = rng.choice(B, size=c, replace=False).tolist()
            cache.extend([PacketRef(n, Version.ORIGINAL, b + 1) for b in picks])
        caches.append(frozenset(cache))
    return CacheConfig(tuple(caches))


class Scenario(enum.Enum):
    TWO_FILE_CROSS = "TwoFileCross"
    TWO_FILE_STRAIGHT = "TwoFileStraight"
    MOTIVATING_EXAMPLE = "MotivatingExample"
    EXAMPLE_ONE = "ExampleOne"


def _two_file_model(file_entropy: float) -> LibraryModel:
    return LibraryModel(2, 2, file_entropy)


def deterministic_place(scenario, memory: float, file_entropy: float = 1.0) -> CacheConfig:
    """Fixed packet-level layouts at their memory corner points.

    TwoFileCross:      Z1 = {W1.1, W2.2}, Z2 = {W1.2, W2.1}    at M = H(W)
    TwoFileStraight:   Z1 = {W1.1, W2.1}, Z2 = {W1.2, W2.2}    at M = H(W)
    MotivatingExample: same layout as TwoFileStraight (independent files)
    ExampleOne:        three receivers, six files, B = 4, only at M = 3
    Memory sharing between corners is handled analytically by the harness.
    """
    scenario = Scenario(scenario)
    h = file_entropy
    if scenario is Scenario.EXAMPLE_ONE:
        if abs(memory) < _TOL:
            return CacheConfig((frozenset(),) * 3)
        if abs(memory - 3 * h) > _TOL:
            raise ValueError("ExampleOne is defined only at M = 0 and M = 3 H(W)")
        return example_one_cache()

    if abs(memory) < _TOL:
        return CacheConfig((frozenset(), frozenset()))
    if abs(memory - 2 * h) < _TOL:
        full = frozenset(all_packets(_two_file_model(h)))
        return CacheConfig((full, full))
    if abs(memory - h) > _TOL:
        raise ValueError(f"{scenario.value} is defined only at M in {{0, H, 2H}}, "
                         f"got {memory}")
    if scenario is Scenario.TWO_FILE_CROSS:
        return CacheConfig(({W(1, 1), W(2, 2)}, {W(1, 2), W(2, 1)}))
    return CacheConfig(({W(1, 1), W(2, 1)}, {W(1, 2), W(2, 2)}))


def example_one_cache() -> CacheConfig:
    """Three-receiver layout (N = 6, B = 4, M = 3) for the demand (1, 3, 5)
    with file 1 updated and clusters {1,2}, {5,6}.

    The requested-but-uncached packets are all of U1 at receiver 1,
    {W3.1, W3.2} at receiver 2 and {W5.2, W5.4} at receiver 3; every other
    packet placement is chosen so the correlated references W1.b and W6.b
    line up as the worked example describes.
    """
    c1 = {W(1, 1), W(1, 2), W(3, 1), W(3, 2), W(5, 4), W(6, 2), W(6, 4)}
    c2 = {W(1, 3), W(1, 4), W(3, 3), W(3, 4), W(5, 4)}
    c3 = {W(1, 1), W(1, 2), W(1, 3), W(3, 1), W(5, 1), W(5, 3), W(6, 2), W(6, 4)}
    return CacheConfig((frozenset(c1), frozenset(c2), frozenset(c3)))


def cached_packets(cache: CacheConfig) -> frozenset:
    return frozenset().union(*cache.per_receiver) if cache.per_receiver else frozenset()


