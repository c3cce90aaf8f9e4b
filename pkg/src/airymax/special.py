"""Scalar special functions and reusable quadrature primitives.

Airy Ai and Ai' are evaluated in-repo: a Maclaurin series accumulated in
double-double arithmetic for |x| <= 9 (the series cancels up to ~8 digits
near the switch point, which dd absorbs), and the standard asymptotic
expansions beyond.  Both branches overlap near |x| = 9 to ~1e-13, which the
test suite checks explicitly.
"""

from dataclasses import dataclass, field

import numpy as np

from . import ddouble as dd
from .errors import DomainError, IntegrandEvaluationError, MisconfigurationError, \
    TailRegularizationError, UnsupportedDegreeError

# dd splits of Ai(0) = 3^{-2/3}/Gamma(2/3) and Ai'(0) = -3^{-1/3}/Gamma(1/3)
_AI0 = (0.3550280538878172, 2.05233632436212e-17)
_AIP0 = (-0.2588194037928068, 2.522243111610832e-17)

_SERIES_CUT = 9.0
_SERIES_TERMS = 100

# asymptotic coefficients u_k and d_k = -(6k+1)/(6k-1) u_k
_UK = np.zeros(41)
_UK[0] = 1.0
for _k in range(40):
    _UK[_k + 1] = _UK[_k] * (6 * _k + 1) * (6 * _k + 3) * (6 * _k + 5) / (216.0 * (_k + 1) * (2 * _k + 1))
_DK = -_UK * (6 * np.arange(41) + 1) / (6 * np.arange(41) - 1)


def _maclaurin_dd(x):
    """Ai, Ai' via the entire-series pair f, g in dd arithmetic."""
    x = np.asarray(x, dtype=float)
    x3h, x3l = dd.mul(*dd.mul(*dd.dd(x), *dd.dd(x)), *dd.dd(x))

    fh, fl = dd.dd(np.ones_like(x))          # f = sum a_k x^{3k}
    gh, gl = dd.dd(x)                        # g = sum b_k x^{3k+1}
    fph, fpl = dd.dd(np.zeros_like(x))       # f' (starts at k=1)
    gph, gpl = dd.dd(np.ones_like(x))        # g' = sum b_k (3k+1) x^{3k}

    tfh, tfl = dd.dd(np.ones_like(x))
    tgh, tgl = dd.dd(x)
    tph, tpl = dd.mul_d(*dd.mul(*dd.dd(x), *dd.dd(x)), 0.5)   # f' first term x^2/2
    tqh, tql = dd.dd(np.ones_like(x))

    fph, fpl = dd.add(fph, fpl, tph, tpl)
    for k in range(1, _SERIES_TERMS):
        tfh, tfl = dd.div_d(*dd.mul(tfh, tfl, x3h, x3l), (3 * k) * (3 * k - 1))
        fh, fl = dd.add(fh, fl, tfh, tfl)
        tgh, tgl = dd.div_d(*dd.mul(tgh, tgl, x3h, x3l), (3 * k) * (3 * k + 1))
        gh, gl = dd.add(gh, gl, tgh, tgl)
        if k >= 2:
            tph, tpl = dd.div_d(*dd.mul(tph, tpl, x3h, x3l), 3 * (k - 1) * (3 * k - 1))
            fph, fpl = dd.add(fph, fpl, tph, tpl)
        tqh, tql = dd.div_d(*dd.mul(tqh, tql, x3h, x3l), (3 * k) * (3 * k - 2))
        gph, gpl = dd.add(gph, gpl, tqh, tql)

    c1h, c1l = _AI0
    c2h, c2l = _AIP0
    aih, ail = dd.add(*dd.mul(fh, fl, c1h, c1l), *dd.mul(gh, gl, c2h, c2l))
    aph, apl = dd.add(*dd.mul(fph, fpl, c1h, c1l), *dd.mul(gph, gpl, c2h, c2l))
    return dd.to_float(aih, ail), dd.to_float(aph, apl)


def _asymptotic(x):
    """Ai, Ai' for |x| > _SERIES_CUT via Poincare expansions."""
    x = np.asarray(x, dtype=float)
    ai = np.empty_like(x)
    aip = np.empty_like(x)

    pos = x > 0
    if np.any(pos):
        xp = x[pos]
        xi = (2.0 / 3.0) * xp ** 1.5
        sa = np.zeros_like(xp)
        sb = np.zeros_like(xp)
        term = np.ones_like(xp)
        # xi >= 18 here, so the smallest term ~ e^{-2 xi} <= 2e-16 near k = 2 xi
        for k in range(0, 37):
            sa += (-1.0) ** k * _UK[k] * term
            sb += (-1.0) ** k * _DK[k] * term
            term = term / xi
        pref = np.exp(-xi) / (2.0 * np.sqrt(np.pi))
        ai[pos] = pref * sa / xp ** 0.25
        aip[pos] = -pref * sb * xp ** 0.25
    if np.any(~pos):
        xn = -x[~pos]
        xi = (2.0 / 3.0) * xn ** 1.5
        ph = xi + np.pi / 4.0
        ce = np.zeros_like(xn)
        co = np.zeros_like(xn)
        de = np.zeros_like(xn)
        do = np.zeros_like(xn)
        i2 = 1.0 / (xi * xi)
        terme = np.ones_like(xn)
        for k in range(0, 19):
            ce += (-1.0) ** k * _UK[2 * k] * terme
            de += (-1.0) ** k * _DK[2 * k] * terme
            co += (-1.0) ** k * _UK[2 * k + 1] * terme / xi
            do += (-1.0) ** k * _DK[2 * k + 1] * terme / xi
            terme = terme * i2
        pref = 1.0 / (np.sqrt(np.pi) * xn ** 0.25)
        ai[~pos] = pref * (np.sin(ph) * ce - np.cos(ph) * co)
        aip[~pos] = -(xn ** 0.25 / np.sqrt(np.pi)) * (np.cos(ph) * de + np.sin(ph) * do)
    return ai, aip


def _airy_pair(x):
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise DomainError("airy_ai requires finite input")
    ai = np.empty_like(x)
    aip = np.empty_like(x)
    near = np.abs(x) <= _SERIES_CUT
    if np.any(near):
        a, b = _maclaurin_dd(x[near])
        ai[near] = a
        aip[near] = b
    far = ~near
    if np.any(far):
        big = x[far] > 106.0   # e^{-xi} underflows; value < 1e-322
        a, b = _asymptotic(np.where(big, 106.0, x[far]))
        ai[far] = np.where(big, 0.0, a)
        aip[far] = np.where(big, 0.0, b)
    return ai, aip


def airy_ai(x):
    """Airy function Ai(x) for real x (scalar or array)."""
    scalar = np.isscalar(x) or np.asarray(x).ndim == 0
    a, _ = _airy_pair(np.atleast_1d(x))
    return float(a[0]) if scalar else a.reshape(np.shape(x))


def airy_ai_prime(x):
    """Derivative Ai'(x) for real x (scalar or array)."""
    scalar = np.isscalar(x) or np.asarray(x).ndim == 0
    _, b = _airy_pair(np.atleast_1d(x))
    return float(b[0]) if scalar else b.reshape(np.shape(x))


def airy_both(x):
    """(Ai(x), Ai'(x)) with one evaluation pass."""
    return _airy_pair(x)


HERMITE_DEGREE_CAP = 300


def hermite(k, z):
    """Physicists' Hermite polynomial H_k(z) by the three-term recurrence."""
    if k < 0 or int(k) != k:
        raise DomainError(f"degree must be a nonnegative integer, got {k!r}")
    if k > HERMITE_DEGREE_CAP:
        raise UnsupportedDegreeError(
            f"raw Hermite evaluation capped at degree {HERMITE_DEGREE_CAP} (got {k}); "
            "use hermite_fn for normalized large-degree values")
    z = np.asarray(z, dtype=float)
    hm = np.ones_like(z)
    if k == 0:
        return hm if hm.ndim else float(hm)
    hc = 2.0 * z
    for j in range(1, k):
        hm, hc = hc, 2.0 * z * hc - 2.0 * j * hm
    return hc if hc.ndim else float(hc)


def hermite_fn(k, z):
    """Orthonormal Hermite function H_k(z) e^{-z^2/2} / sqrt(2^k k! sqrt(pi)).

    Stable for large k where the raw polynomial overflows; values are O(1)
    in the oscillatory region.
    """
    if k < 0 or int(k) != k:
        raise DomainError(f"degree must be a nonnegative integer, got {k!r}")
    z = np.asarray(z, dtype=float)
    h0 = np.pi ** -0.25 * np.exp(-0.5 * z * z)
    if k == 0:
        return h0 if h0.ndim else float(h0)
    hc = np.sqrt(2.0) * z * h0
    hm = h0
    for j in range(1, k):
        hm, hc = hc, np.sqrt(2.0 / (j + 1)) * z * hc - np.sqrt(j / (j + 1.0)) * hm
    return hc if hc.ndim else float(hc)


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes/weights pair over a descriptor domain."""

    nodes: np.ndarray
    weights: np.ndarray
    domain: tuple

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        if nodes.shape != weights.shape or nodes.ndim != 1:
            raise MisconfigurationError("nodes and weights must be matching 1-d arrays")
        if np.any(np.diff(nodes) <= 0):
            raise MisconfigurationError("nodes must be strictly increasing")
        if np.any(weights <= 0):
            raise MisconfigurationError("weights must be strictly positive")

    def __len__(self):
        return len(self.nodes)


def gauss_legendre_rule(a, b, n):
    """Single-panel Gauss-Legendre rule on [a, b]."""
    t, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (b - a)
    return QuadratureRule((a + b) / 2.0 + half * t, half * w, (a, b))


def composite_gauss_rule(edges, pts=12):
    """Composite Gauss-Legendre rule over consecutive panels."""
    edges = np.asarray(edges, dtype=float)
    t, w = np.polynomial.legendre.leggauss(pts)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mid[:, None] + half[:, None] * t[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return QuadratureRule(nodes, weights, (edges[0], edges[-1]))


def half_line_rule(n, scale=1.0):
    """Rule for integrals over [0, inf) via the algebraic map x = L(1+t)/(1-t)."""
    t, w = np.polynomial.legendre.leggauss(n)
    x = scale * (1.0 + t) / (1.0 - t)
    wx = w * 2.0 * scale / (1.0 - t) ** 2
    return QuadratureRule(x, wx, (0.0, np.inf))


def oscillatory_rule(zeta_max, freq_offset=12.0, pts=12, phase_per_panel=5.5, max_panel=0.35):
    """Composite rule resolving the phase 4 zeta^3/3 + s zeta up to zeta_max.

    Panels shrink like phase_per_panel / (4 zeta^2 + |freq_offset| + 2) so a
    pts-point Gauss panel spans at most ~one oscillation period.
    """
    edges = [0.0]
    while edges[-1] < zeta_max:
        z = edges[-1]
        dz = min(max_panel, phase_per_panel / (4.0 * z * z + abs(freq_offset) + 2.0))
        edges.append(min(z + dz, zeta_max))
    return composite_gauss_rule(np.array(edges), pts)


def integrate(rule, f):
    """Apply the rule to a callable (vectorized over the node array)."""
    y = np.asarray(f(rule.nodes), dtype=float)
    bad = ~np.isfinite(y)
    if np.any(bad):
        raise IntegrandEvaluationError(rule.nodes[bad][0])
    return float(np.dot(rule.weights, y))


@dataclass(frozen=True)
class RegularizedOscillatoryIntegral:
    """Cubic-damping regularization: multiply by exp(-eps |zeta|^3), eps -> 0+.

    The epsilon sequence must decrease strictly to a positive floor; the
    reported value is a Richardson (Neville-at-zero) extrapolation with an
    error estimate from the last two extrapolants.
    """

    epsilon_sequence: tuple = (1e-2, 5e-3, 2.5e-3)
    zeta_max: float = 23.0
    order: int = field(default=3)

    def __post_init__(self):
        eps = tuple(float(e) for e in self.epsilon_sequence)
        object.__setattr__(self, "epsilon_sequence", eps)
        if len(eps) < 2 or any(e <= 0 for e in eps) or any(b >= a for a, b in zip(eps, eps[1:])):
            raise MisconfigurationError("epsilon_sequence must decrease strictly to a floor > 0")
        if self.order < 1 or self.order >= len(eps) + 1:
            object.__setattr__(self, "order", len(eps) - 1)


def neville_at_zero(eps, vals):
    """Polynomial extrapolation of (eps_j, vals_j) to eps = 0.

    Returns the highest-order extrapolant and |last diagonal correction| as
    the error estimate.
    """
    eps = np.asarray(eps, dtype=float)
    P = [np.asarray(v, dtype=float) for v in vals]
    n = len(P)
    diag = [P[-1]]
    for k in range(1, n):
        for j in range(n - 1, k - 1, -1):
            P[j] = P[j] + (P[j] - P[j - 1]) * eps[j] / (eps[j - k] - eps[j])
        diag.append(P[-1])
    err = np.abs(diag[-1] - diag[-2]) if n > 1 else np.full_like(np.asarray(diag[-1]), np.inf)
    return diag[-1], err


def regularized_oscillatory_integral(f, reg=None, rule=None, rel_tol=1e-6):
    """Evaluate int_0^inf f(z) dz for an oscillatory cubic-phase integrand.

    Returns (value, error_estimate).  Raises TailRegularizationError when the
    extrapolation column does not settle to the requested relative tolerance.
    """
    if reg is None:
        reg = RegularizedOscillatoryIntegral()
    if rule is None:
        rule = oscillatory_rule(reg.zeta_max)
    y = np.asarray(f(rule.nodes), dtype=float)
    bad = ~np.isfinite(y)
    if np.any(bad):
        raise IntegrandEvaluationError(rule.nodes[bad][0])
    z3 = rule.nodes ** 3
    vals = [np.dot(rule.weights, y * np.exp(-e * z3)) for e in reg.epsilon_sequence]
    value, err = neville_at_zero(reg.epsilon_sequence, vals)
    scale = max(abs(float(value)), 1e-300)
    if not np.isfinite(value) or err / scale > 10.0 * max(rel_tol, 1e-12):
        raise TailRegularizationError({"value": float(value), "error": float(err),
                                       "epsilons": reg.epsilon_sequence})
    return float(value), float(err)
