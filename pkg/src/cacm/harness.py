"""Experiment configuration, Monte Carlo drivers and CSV output."""
from __future__ import annotations

import configparser
import enum
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Optional

import numpy as np

from . import bounds
from .coloring import ORACLE_LIMIT, ggc, oracle_min_rate
from .corrlib import DynamicModel, LibraryModel, sample_updates
from .delivery import decode_verify, naive_multicast_rate
from .graph import build_augmented_graph, build_demand
from .placement import (CachingDistribution, Scenario, deterministic_place,
                        random_fractional_place)

CSV_HEADER = "M,scheme,mean_rate,stderr,bound1,bound2,lower_bound"
SCHEMES = ("CA-GGC", "Unaware-GGC", "NaiveMulticast", "Oracle")


class ConfigError(ValueError):
    pass


class DecodeFailure(RuntimeError):
    pass


class ExperimentKind(enum.Enum):
    STATIC = "StaticSymmetric"
    DYNAMIC = "Dynamic"
    TWO_FILE = "TwoFile"
    MOTIVATING = "MotivatingExample"


@dataclass
class ExperimentConfig:
    scenario: ExperimentKind
    K: int = 2
    N: int = 2
    B: int = 64
    delta: float = 0.0
    g_delta: int = 1
    pi: float = 0.0
    file_entropy: float = 1.0
    memory: tuple = (0.0,)
    trials: int = 200
    seed: int = 0
    schemes: tuple = ("CA-GGC", "Unaware-GGC")
    output: Optional[str] = None
    placement: str = "cross"  # two-file layouts only
    demand_mode: str = "average"  # two-file only: average | worst

    def validate(self) -> "ExperimentConfig":
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if self.K < 1 or self.N < 1 or self.B < 1:
            raise ConfigError("K, N and B must be positive")
        top = self.N * self.file_entropy
        for M in self.memory:
            if not -1e-12 <= M <= top + 1e-12:
                raise ConfigError(f"memory point {M} outside [0, {top}]")
        unknown = set(self.schemes) - set(SCHEMES)
        if unknown:
            raise ConfigError(f"unknown schemes: {sorted(unknown)}")
        if self.demand_mode not in ("average", "worst"):
            raise ConfigError("demand_mode must be 'average' or 'worst'")
        if self.placement not in ("cross", "straight"):
            raise ConfigError("placement must be 'cross' or 'straight'")
        if self.scenario is ExperimentKind.STATIC and self.N % self.g_delta:
            raise ConfigError(f"g_delta={self.g_delta} must divide N={self.N}")
        if self.scenario in (ExperimentKind.TWO_FILE, ExperimentKind.MOTIVATING):
            if (self.K, self.N, self.B) != (2, 2, 2):
                raise ConfigError(f"{self.scenario.value} requires K = N = B = 2")
        if "Oracle" in self.schemes and self.scenario is not ExperimentKind.TWO_FILE:
            ens = self.g_delta if self.scenario is ExperimentKind.STATIC else 2
            m = min(self.memory) / top if top else 0.0
            expected = self.K * self.B * (1 - m) * ens
            if expected > ORACLE_LIMIT:
                raise ConfigError(f"Oracle needs graphs of at most {ORACLE_LIMIT} vertices; "
                                  f"expected about {expected:.0f}")
        try:
            self.model()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        return self

    def model(self) -> LibraryModel:
        h = self.file_entropy
        if self.scenario is ExperimentKind.STATIC:
            return LibraryModel.symmetric(self.N, self.B, self.delta, self.g_delta, h)
        if self.scenario is ExperimentKind.TWO_FILE:
            return LibraryModel(2, 2, h, self.delta, ((1, 2),))
        pi = 1.0 if self.scenario is ExperimentKind.MOTIVATING else self.pi
        return LibraryModel(self.N, self.B, h, 0.0, (), DynamicModel(pi, self.delta))


def _parse_list(text, cast):
    return tuple(cast(x.strip()) for x in text.replace(";", ",").split(",") if x.strip())


_FIELDS = {
    "K": int, "N": int, "B": int, "delta": float, "g_delta": int, "pi": float,
    "file_entropy": float, "trials": int, "seed": int, "output": str,
    "placement": str, "demand_mode": str,
}


def parse_config(text: str) -> ExperimentConfig:
    """Flat ``key = value`` lines under a single ``[scenario]`` header."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    if not cp.has_section("scenario"):
        raise ConfigError("config needs a [scenario] section")
    sec = dict(cp["scenario"])
    try:
        kind = ExperimentKind(sec.pop("scenario", sec.pop("kind", "")))
    except ValueError as exc:
        raise ConfigError(f"unknown scenario: {exc}") from exc
    kw = {}
    try:
        for key, value in sec.items():
            if key in _FIELDS:
                kw[key] = _FIELDS[key](value)
            elif key == "memory":
                kw["memory"] = _parse_list(value, float)
            elif key == "schemes":
                kw["schemes"] = _parse_list(value, str)
            else:
                raise ConfigError(f"unknown key {key!r}")
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad value: {exc}") from exc
    return ExperimentConfig(kind, **kw).validate()


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path) as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


# -- rate curves ------------------------------------------------------------

class RateRow(NamedTuple):
    M: float
    scheme: str
    mean_rate: float
    stderr: float
    bound1: Optional[float] = None
    bound2: Optional[float] = None
    lower_bound: Optional[float] = None


@dataclass
class RateCurve:
    rows: list = field(default_factory=list)

    def sorted(self) -> "RateCurve":
        return RateCurve(sorted(self.rows, key=lambda r: (r.M, r.scheme)))

    def get(self, M: float, scheme: str) -> RateRow:
        for r in self.rows:
            if r.scheme == scheme and abs(r.M - M) < 1e-12:
                return r
        raise KeyError((M, scheme))


def summarize(rates) -> tuple:
    """Mean and standard error; ``fsum`` makes both independent of order."""
    n = len(rates)
    mean = math.fsum(rates) / n
    if n < 2:
        return mean, 0.0
    var = math.fsum((r - mean) ** 2 for r in rates) / (n - 1)
    return mean, math.sqrt(var) / math.sqrt(n)


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, trial]))


def _serve(model, cache, q, scheme, dump=None) -> float:
    if scheme == "NaiveMulticast":
        return naive_multicast_rate(q, model)
    use = model.uncorrelated() if scheme == "Unaware-GGC" else model
    graph = build_augmented_graph(use, cache, q)
    if dump is not None:
        with open(dump, "w") as fh:
            fh.write(graph.to_dot())
    if scheme == "Oracle":
        try:
            _, r = oracle_min_rate(graph, use, cache)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        return r
    _, cw = ggc(graph, use, cache)
    if not decode_verify(cw, cache, q, use):
        raise DecodeFailure(f"{scheme}: codeword does not decode")
    return cw.total_length


def _dump_path(dump_dir, M, trial, scheme):
    if dump_dir is None or trial != 0 or scheme == "NaiveMulticast":
        return None
    os.makedirs(dump_dir, exist_ok=True)
    return os.path.join(dump_dir, f"M{M:g}_{scheme}.dot")


def _random_trial(args) -> dict:
    cfg, M, trial, dump_dir = args
    model = cfg.model()
    rng = trial_rng(cfg.seed, trial)
    cache = random_fractional_place(model, CachingDistribution.uniform(cfg.N), M, cfg.K, rng)
    flags = sample_updates(model, rng) if model.dynamic is not None else None
    demand = rng.integers(1, cfg.N + 1, size=cfg.K)
    q = build_demand(model, cache, demand, flags)
    return {s: _serve(model, cache, q, s, _dump_path(dump_dir, M, trial, s))
            for s in cfg.schemes}


def _run_trials(cfg, M, parallel, dump_dir) -> dict:
    jobs = [(cfg, M, t, dump_dir) for t in range(cfg.trials)]
    if parallel and parallel > 1:
        with ProcessPoolExecutor(parallel) as pool:
            results = list(pool.map(_random_trial, jobs, chunksize=max(1, len(jobs) // (4 * parallel))))
    else:
        results = [_random_trial(j) for j in jobs]
    return {s: [r[s] for r in results] for s in cfg.schemes}


def _bound_columns(cfg, M) -> tuple:
    h = cfg.file_entropy
    Mn = M / h
    if cfg.scenario is ExperimentKind.STATIC:
        p = bounds.BoundParams(cfg.K, cfg.N, Mn, cfg.delta, cfg.g_delta)
        return bounds.theorem1_bound(p) * h, bounds.unaware_static_bound(p) * h, None
    if cfg.scenario is ExperimentKind.TWO_FILE:
        return (bounds.two_file_rate(M, cfg.delta, h), bounds.two_file_rate(M, 1.0, h),
                bounds.two_file_lower_bound(M, cfg.delta, h))
    pi = 1.0 if cfg.scenario is ExperimentKind.MOTIVATING else cfg.pi
    p = bounds.BoundParams(cfg.K, cfg.N, Mn, cfg.delta, 1, pi)
    return bounds.theorem2_bound(p) * h, bounds.unaware_dynamic_bound(p) * h, None


def _rows(cfg, M, rates: dict, with_bounds: bool) -> list:
    cols = _bound_columns(cfg, M) if with_bounds else (None, None, None)
    return [RateRow(M, s, *summarize(rates[s]), *cols) for s in cfg.schemes]


def run_static(cfg: ExperimentConfig, parallel: int = 1, dump_dir=None,
               with_bounds: bool = True) -> RateCurve:
    if cfg.scenario is not ExperimentKind.STATIC:
        raise ConfigError("run_static needs a StaticSymmetric config")
    curve = RateCurve()
    for M in cfg.memory:
        curve.rows += _rows(cfg, M, _run_trials(cfg, M, parallel, dump_dir), with_bounds)
    return curve.sorted()


def run_dynamic(cfg: ExperimentConfig, parallel: int = 1, dump_dir=None,
                with_bounds: bool = True) -> RateCurve:
    if cfg.scenario is ExperimentKind.MOTIVATING:
        return _run_motivating(cfg, dump_dir, with_bounds)
    if cfg.scenario is not ExperimentKind.DYNAMIC:
        raise ConfigError("run_dynamic needs a Dynamic config")
    curve = RateCurve()
    for M in cfg.memory:
        curve.rows += _rows(cfg, M, _run_trials(cfg, M, parallel, dump_dir), with_bounds)
    return curve.sorted()


def _run_motivating(cfg, dump_dir, with_bounds) -> RateCurve:
    """Fixed straight placement, demand (1, 2), both files updated."""
    model = cfg.model()
    curve = RateCurve()
    for M in cfg.memory:
        try:
            cache = deterministic_place(Scenario.MOTIVATING_EXAMPLE, M, cfg.file_entropy)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        q = build_demand(model, cache, (1, 2), (True, True))
        rates = {s: [_serve(model, cache, q, s, _dump_path(dump_dir, M, 0, s))]
                 for s in cfg.schemes}
        curve.rows += _rows(cfg, M, rates, with_bounds)
    return curve.sorted()


TWO_FILE_DEMANDS = ((1, 1), (1, 2), (2, 1), (2, 2))


def two_file_corner_rates(cfg: ExperimentConfig, scheme: str, M: float,
                          dump_dir=None) -> list:
    """Rate for each of the four demands at a memory corner."""
    model = cfg.model()
    layout = (Scenario.TWO_FILE_CROSS if cfg.placement == "cross"
              else Scenario.TWO_FILE_STRAIGHT)
    cache = deterministic_place(layout, M, cfg.file_entropy)
    out = []
    for i, d in enumerate(TWO_FILE_DEMANDS):
        q = build_demand(model, cache, d)
        out.append(_serve(model, cache, q, scheme, _dump_path(dump_dir, M, i, scheme)))
    return out


def run_two_file(cfg: ExperimentConfig, dump_dir=None, with_bounds: bool = True) -> RateCurve:
    """Exact corner rates at M in {0, h, 2h}; other memory points by memory
    sharing between the two neighbouring corners, applied per demand."""
    if cfg.scenario is not ExperimentKind.TWO_FILE:
        raise ConfigError("run_two_file needs a TwoFile config")
    h = cfg.file_entropy
    corners = (0.0, h, 2 * h)
    grid = sorted(set(cfg.memory) | set(corners))
    curve = RateCurve()
    for s in cfg.schemes:
        at = {c: two_file_corner_rates(cfg, s, c, dump_dir) for c in corners}
        for M in grid:
            lo = 0.0 if M <= h else h
            theta = (M - lo) / h
            per_demand = [(1 - theta) * a + theta * b
                          for a, b in zip(at[lo], at[lo + h])]
            if cfg.demand_mode == "worst":
                stats = (max(per_demand), 0.0)
            else:
                stats = summarize(per_demand)
            cols = _bound_columns(cfg, M) if with_bounds else (None, None, None)
            curve.rows.append(RateRow(M, s, *stats, *cols))
    return curve.sorted()


def run(cfg: ExperimentConfig, parallel: int = 1, dump_dir=None,
        with_bounds: bool = True) -> RateCurve:
    if cfg.scenario is ExperimentKind.STATIC:
        return run_static(cfg, parallel, dump_dir, with_bounds)
    if cfg.scenario is ExperimentKind.TWO_FILE:
        return run_two_file(cfg, dump_dir, with_bounds)
    return run_dynamic(cfg, parallel, dump_dir, with_bounds)


# -- output -----------------------------------------------------------------

def _fmt(x) -> str:
    return "" if x is None else repr(float(x))


def format_csv(curve: RateCurve) -> str:
    if not curve.rows:
        raise ValueError("cannot write an empty rate curve")
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    for r in curve.sorted().rows:
        buf.write(",".join([_fmt(r.M), r.scheme, _fmt(r.mean_rate), _fmt(r.stderr),
                            _fmt(r.bound1), _fmt(r.bound2), _fmt(r.lower_bound)]) + "\n")
    return buf.getvalue()


def emit_csv(curve: RateCurve, path) -> None:
    text = format_csv(curve)
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc


BOUNDS_HEADER = "M,psi1_static,psi2_static,theorem1,theorem2,naive_phi,two_file_rate,two_file_lower_bound"


def bounds_table(cfg: ExperimentConfig) -> str:
    """Analytic bounds for every memory point of a config, one CSV row each."""
    h = cfg.file_entropy
    pi = 1.0 if cfg.scenario is ExperimentKind.MOTIVATING else cfg.pi
    g = cfg.g_delta if cfg.scenario is ExperimentKind.STATIC else 1
    lines = [BOUNDS_HEADER]
    for M in sorted(cfg.memory):
        p = bounds.BoundParams(cfg.K, cfg.N, M / h, cfg.delta, g, pi)
        vals = [M, bounds.psi1_static(p) * h, bounds.psi2_static(p) * h,
                bounds.theorem1_bound(p) * h, bounds.theorem2_bound(p) * h,
                bounds.phi_naive(cfg.K, cfg.N) * h]
        if cfg.scenario is ExperimentKind.TWO_FILE and M <= 2 * h + 1e-12:
            vals += [bounds.two_file_rate(M, cfg.delta, h),
                     bounds.two_file_lower_bound(M, cfg.delta, h)]
        else:
            vals += [None, None]
        lines.append(",".join(_fmt(v) for v in vals))
    return "\n".join(lines) + "\n"


def with_overrides(cfg: ExperimentConfig, **kw) -> ExperimentConfig:
    kw = {k: v for k, v in kw.items() if v is not None}
    return replace(cfg, **kw).validate() if kw else cfg
