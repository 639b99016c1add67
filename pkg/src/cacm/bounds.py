"""Closed-form rate bounds: the static and dynamic upper bounds, naive
multicast, and the two-file achievable curve and lower bound.

Memory is normalized so that a file has entropy 1 and ``m = M / N``.
Every power uses the convention ``0 ** 0 == 1``, which Python already follows.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

_EPS = 1e-12


@dataclass(frozen=True)
class BoundParams:
    K: int
    N: int
    M: float
    delta: float = 0.0
    g_delta: int = 1
    pi: float = 0.0

    def __post_init__(self):
        if self.K < 1:
            raise ValueError("K must be at least 1")
        if not 1 <= self.g_delta <= self.N:
            raise ValueError(f"g_delta={self.g_delta} outside 1..N")
        if not -_EPS <= self.M <= self.N + _EPS:
            raise ValueError(f"M={self.M} outside [0, N]")
        if not 0.0 <= self.pi <= 1.0:
            raise ValueError("pi must lie in [0, 1]")
        if not 0.0 <= self.delta <= 1.0:
            raise ValueError("delta must lie in [0, 1]")

    @property
    def m(self) -> float:
        return min(max(self.M / self.N, 0.0), 1.0)


def phi_naive(kappa: float, nu: float) -> float:
    """Expected number of distinct files among ``kappa`` uniform requests
    over ``nu`` files. For ``nu < 1`` (fractional libraries from scaling by
    an update probability) the base ``1 - 1/nu`` is clamped at 0."""
    if kappa == 0:
        return 0.0
    if nu <= 0:
        raise ValueError(f"nu must be positive, got {nu}")
    if kappa < 0:
        raise ValueError(f"kappa must be nonnegative, got {kappa}")
    return nu * (1.0 - max(0.0, 1.0 - 1.0 / nu) ** kappa)


# -- helper functions -------------------------------------------------------

def _check_ell(K: int, ell: int) -> None:
    if not 1 <= ell <= K:
        raise ValueError(f"ell={ell} outside 1..{K}")


def p_ell(K: int, m: float, ell: int) -> float:
    _check_ell(K, ell)
    return (1.0 - m) ** (K - ell) * m ** (ell - 1)


def p_hat(K: int, m: float, ell: int) -> float:
    _check_ell(K, ell)
    return math.fsum(math.comb(K - 1, i - 1) * p_ell(K, m, i) for i in range(1, ell))


def x_ell(K: int, ell: int) -> int:
    _check_ell(K, ell)
    return math.comb(K - 1, ell - 1)


def xi(K: int, m: float, ell: int) -> float:
    P, Ph = p_ell(K, m, ell), p_hat(K, m, ell)
    return math.fsum(i * math.comb(ell, i) * Ph ** i * P ** (ell - i)
                     for i in range(1, ell + 1))


@lru_cache(maxsize=None)
def _stirling2(n: int, k: int) -> int:
    if n == k:
        return 1
    if k == 0 or k > n:
        return 0
    return k * _stirling2(n - 1, k) + _stirling2(n - 1, k - 1)


@lru_cache(maxsize=None)
def surjections(t: int, d: int) -> int:
    """Sum of multinomials t!/(t_1!...t_d!) over compositions of t into d
    positive parts, i.e. the number of surjections onto d labels."""
    return math.factorial(d) * _stirling2(t, d)


@lru_cache(maxsize=None)
def alpha(K: int, ell: int, t: int) -> int:
    """Exact integer: (1/d) * C(x-1, d-1) * d! * S(t, d) = C(x-1, d-1) (d-1)! S(t, d)."""
    _check_ell(K, ell)
    if t < 1:
        raise ValueError(f"t={t} must be at least 1")
    x = x_ell(K, ell)
    return sum(math.comb(x - 1, d - 1) * math.factorial(d - 1) * _stirling2(t, d)
               for d in range(1, min(t, x) + 1))


def _psi(K, m, ell, g, top):
    """sum_{t=1}^{top} C(top, t) alpha(t) P^t Phat^{g+1-t}; top is g+1 for
    psi and g for the refinement increment."""
    P, Ph = p_ell(K, m, ell), p_hat(K, m, ell)
    return math.fsum(math.comb(top, t) * alpha(K, ell, t) * P ** t * Ph ** (g + 1 - t)
                     for t in range(1, top + 1))


def psi(K, m, ell, g):
    return _psi(K, m, ell, g, g + 1)


def delta_psi(K, m, ell, g):
    return _psi(K, m, ell, g, g)


def lam(K: int, m: float, ell: int, G: int) -> float:
    """Probability that a given receiver label is associated with a group."""
    return math.fsum(math.comb(G - 1, g) * (1 - m) ** g * m ** (G - 1 - g) * psi(K, m, ell, g)
                     for g in range(G))


def delta_lam(K: int, m: float, ell: int, G: int) -> float:
    return math.fsum(math.comb(G - 1, g) * (1 - m) ** g * m ** (G - 1 - g)
                     * delta_psi(K, m, ell, g) for g in range(1, G))


# -- static library ---------------------------------------------------------

def psi1_static(params: BoundParams) -> float:
    K, G, d, m = params.K, params.g_delta, params.delta, params.m
    return math.fsum(
        math.comb(K, ell) * (1 - m)
        * (lam(K, m, ell, G) + d * xi(K, m, ell) * delta_lam(K, m, ell, G))
        for ell in range(1, K + 1))


def psi2_static(params: BoundParams) -> float:
    K, N, G, d = params.K, params.N, params.g_delta, params.delta
    if N % G:
        raise ValueError(f"g_delta={G} must divide N={N}")
    # (1 - d) * coarse + d * fine, arranged so G = 1 and d = 0 are exact
    coarse = phi_naive(K, N / G)
    return coarse + d * (phi_naive(K, N) - coarse)


def unaware_static_bound(params: BoundParams) -> float:
    """Correlation-unaware reference: both branches with G_delta = 1."""
    p1 = BoundParams(params.K, params.N, params.M, 0.0, 1)
    return min(psi1_static(p1), phi_naive(params.K, params.N))


def theorem1_bound(params: BoundParams) -> float:
    """Smaller of the use-correlation pair (G_delta, delta) and the
    ignore-correlation pair (1, 0)."""
    return min(psi1_static(params), psi2_static(params), unaware_static_bound(params))


# -- dynamic library --------------------------------------------------------

def psi1_dynamic(params: BoundParams) -> float:
    K, m, pi = params.K, params.m, params.pi
    coded = math.fsum(math.comb(K, ell) * (1 - m) * p_ell(K, m, ell)
                      for ell in range(1, K + 1))
    return coded + params.delta * phi_naive(pi * K, pi * params.N)


def unaware_dynamic_bound(params: BoundParams) -> float:
    return phi_naive(params.K, params.N)


def theorem2_bound(params: BoundParams) -> float:
    return min(psi1_dynamic(params), phi_naive(params.K, params.N))


# -- two files, two receivers -----------------------------------------------

def _check_two_file(M, h):
    if not -_EPS <= M <= 2 * h + _EPS:
        raise ValueError(f"M={M} outside [0, {2 * h}]")


def two_file_rate(M: float, delta: float, h: float = 1.0) -> float:
    """Achievable average rate with cross placement and memory sharing."""
    _check_two_file(M, h)
    c = min(0.5, delta)
    if M <= h:
        return (1 + delta / 2) * (h - M) + c * M
    return c * (2 * h - M)


def two_file_lower_bound(M: float, delta: float, h: float = 1.0) -> float:
    _check_two_file(M, h)
    if M < h:
        return (1 + delta / 2) * h - M
    if M < (1 + delta) * h:
        return 0.5 * ((1 + delta) * h - M)
    return 0.0


def two_file_gap_limit(M: float, delta: float, h: float = 1.0) -> float:
    if M <= h:
        return 0.5 * min(delta, 1 - delta) * h
    return 0.5 * (1 - delta) * h


def theorem3_gap_check(delta: float, h: float, grid) -> bool:
    for M in grid:
        gap = two_file_rate(M, delta, h) - two_file_lower_bound(M, delta, h)
        if gap > two_file_gap_limit(M, delta, h) + _EPS:
            return False
    return True


def memory_grid(lo: float, hi: float, step: float) -> list:
    n = int(round((hi - lo) / step))
    return [lo + i * (hi - lo) / n for i in range(n)] + [hi]
