"""Brute-force oracles (exponential cost; used by tests and the validate
command, never by production paths)."""

import math

import numpy as np

from .errors import DomainError


def _normalization_constant(N):
    """A_N = N pi^{2N^2+N+2} / (2^{N^2 - N/2} prod Gamma(2+j) Gamma(3/2+j))."""
    log_a = math.log(N) + (2 * N * N + N + 2) * math.log(math.pi)
    log_a -= (N * N - N / 2.0) * math.log(2.0)
    log_a -= sum(math.lgamma(2.0 + j) + math.lgamma(1.5 + j) for j in range(N))
    return math.exp(log_a)


def brute_force_jpdf(M, tau, N, cutoff=40):
    """Direct evaluation of the defining multi-sum for the joint density of
    (max height, argmax time) of N non-intersecting excursions.

    Sums the Vandermonde-squared lattice expression over |n_i| <= cutoff with
    no orthogonal-polynomial machinery; cost grows exponentially with N, so
    only N in {1, 2} are supported.
    """
    if N not in (1, 2):
        raise DomainError("brute force implemented for N in {1, 2}")
    n = np.arange(-cutoff, cutoff + 1, dtype=float)
    sign = (-1.0) ** (np.abs(n).astype(int) % 2)
    a_n = _normalization_constant(N)
    pref = a_n / (2.0 ** (N + 1) * M ** (N * (2 * N + 1) + 3))
    w_tau = np.exp(-np.pi ** 2 * tau * n ** 2 / (2.0 * M * M))
    w_mtau = np.exp(-np.pi ** 2 * (1.0 - tau) * n ** 2 / (2.0 * M * M))
    if N == 1:
        s1 = float(np.sum(sign * n ** 2 * w_tau))
        s2 = float(np.sum(sign * n ** 2 * w_mtau))
        return pref * s1 * s2
    w1 = np.exp(-np.pi ** 2 * n ** 2 / (2.0 * M * M))
    total = 0.0
    n2sq = n ** 2
    for n1 in n:
        v = n1 * n1
        c = float(np.sum(sign * (n2sq - v) * n2sq * w_tau))
        d = float(np.sum(sign * (n2sq - v) * n2sq * w_mtau))
        total += v * math.exp(-np.pi ** 2 * v / (2.0 * M * M)) * c * d
    return pref * total
