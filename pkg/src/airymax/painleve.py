"""Hastings-McLeod solution of Painleve II and the GOE Tracy-Widom CDF.

The boundary-value problem q'' = 2 q^3 + s q with q ~ Ai(s) on the right and
q ~ sqrt(-s/2) on the left is solved by Newton iteration on a Numerov
discretization (4th order).  Backward marching is useless here (the wanted
solution is a separatrix), hence the global two-point formulation.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.linalg import solve_banded

from .errors import DomainError, RangeError, SolverFailureError
from .special import airy_ai

# zeta'(-1); enters the left-tail constant of the GOE Tracy-Widom law.
# 30-digit value 1/12 - ln(Glaisher), cross-checked against an independent
# series evaluation in the test suite.
ZETA_PRIME_MINUS_ONE = -0.16542114370045092921391966024278


@dataclass(frozen=True)
class PainleveSolution:
    """Grid solution q, q' with interpolants and cumulative integrals.

    integral_q(s)      = int_s^smax q dt   (+ analytic Ai tail beyond smax)
    integral_q2(s)     = int_s^smax q^2 dt
    integral_tq2(s)    = int_s^smax t q(t)^2 dt
    """

    s_grid: np.ndarray
    q: np.ndarray
    q_prime: np.ndarray
    interpolant_degree: int
    achieved_residual: float
    _q_spline: CubicSpline = field(repr=False)
    _qp_spline: CubicSpline = field(repr=False)
    _aq: CubicSpline = field(repr=False)
    _aq2: CubicSpline = field(repr=False)
    _atq2: CubicSpline = field(repr=False)
    _tail_q: float = field(repr=False)

    @property
    def s_min(self):
        return float(self.s_grid[0])

    @property
    def s_max(self):
        return float(self.s_grid[-1])

    def _check(self, s):
        s = np.asarray(s, dtype=float)
        if np.any(s < self.s_min - 1e-12) or np.any(s > self.s_max + 1e-12):
            raise RangeError(f"s outside solved range [{self.s_min}, {self.s_max}]")
        return np.clip(s, self.s_min, self.s_max)

    def q_at(self, s):
        return self._q_spline(self._check(s))

    def q_prime_at(self, s):
        return self._qp_spline(self._check(s))

    def potential(self, s):
        """u(s) = q^2 - q', the supersymmetric Schrodinger potential."""
        s = self._check(s)
        return self._q_spline(s) ** 2 - self._qp_spline(s)

    def potential_prime(self, s):
        """u'(s) = 2 q q' - q'' with q'' taken from the defining equation."""
        s = self._check(s)
        q = self._q_spline(s)
        return 2.0 * q * self._qp_spline(s) - (2.0 * q ** 3 + s * q)

    def integral_q(self, s):
        s = self._check(s)
        return (self._aq(self.s_max) - self._aq(s)) + self._tail_q

    def integral_q2(self, s):
        s = self._check(s)
        return self._aq2(self.s_max) - self._aq2(s)

    def integral_tq2(self, s):
        s = self._check(s)
        return self._atq2(self.s_max) - self._atq2(s)


def _ai_integral_tail(x):
    """int_x^inf Ai(t) dt by the leading asymptotic terms (x >= 8)."""
    xi = (2.0 / 3.0) * x ** 1.5
    return np.exp(-xi) / (2.0 * np.sqrt(np.pi) * x ** 0.75) * (1.0 - 41.0 / (72.0 * xi))


def solve_hastings_mcleod(s_min=-12.0, s_max=12.0, tol=1e-12, step=0.005,
                          max_iter=60):
    """Solve the Hastings-McLeod boundary-value problem on [s_min, s_max].

    Boundary data: q(s_max) = Ai(s_max) and the left asymptote
    q(s_min) = sqrt(-s_min/2) (1 + 1/(8 s_min^3)).
    """
    if not (s_min < -4.0 < 4.0 < s_max):
        raise DomainError("need s_min < -4 and s_max > 4")
    if tol < 1e-12:
        raise DomainError("tol below 1e-12 is not resolvable in double precision")

    n = int(round((s_max - s_min) / step))
    s = s_min + (s_max - s_min) * np.arange(n + 1) / n
    h = s[1] - s[0]

    q_left = np.sqrt(-s_min / 2.0) * (1.0 + 1.0 / (8.0 * s_min ** 3))
    q_right = airy_ai(s_max)

    # initial guess: smooth blend of the two asymptotic branches
    blend = 0.5 * (1.0 + np.tanh(-s / 1.5))
    left = np.sqrt(np.maximum(-s, 1e-12) / 2.0)
    right = airy_ai(np.minimum(s, s_max))
    q = blend * left + (1.0 - blend) * right
    q[0], q[-1] = q_left, q_right

    def rhs(qv, sv):
        return 2.0 * qv ** 3 + sv * qv

    def rhs_q(qv, sv):
        return 6.0 * qv ** 2 + sv

    residual = np.inf
    for _ in range(max_iter):
        F = (q[:-2] - 2.0 * q[1:-1] + q[2:]
             - (h * h / 12.0) * (rhs(q[:-2], s[:-2]) + 10.0 * rhs(q[1:-1], s[1:-1])
                                 + rhs(q[2:], s[2:])))
        lower = 1.0 - (h * h / 12.0) * rhs_q(q[:-2], s[:-2])
        diag = -2.0 - (10.0 * h * h / 12.0) * rhs_q(q[1:-1], s[1:-1])
        upper = 1.0 - (h * h / 12.0) * rhs_q(q[2:], s[2:])
        ab = np.zeros((3, n - 1))
        ab[0, 1:] = upper[:-1]
        ab[1, :] = diag
        ab[2, :-1] = lower[1:]
        delta = solve_banded((1, 1), ab, -F)
        q[1:-1] += delta
        residual = float(np.max(np.abs(F)))
        if residual < 1e-14 and np.max(np.abs(delta)) < tol:
            break
    else:
        raise SolverFailureError(residual)

    if np.any(q <= 0) or np.any(np.diff(q) >= 0):
        raise SolverFailureError(residual, "solution lost positivity/monotonicity")

    qp = np.empty_like(q)
    qp[2:-2] = (q[:-4] - 8.0 * q[1:-3] + 8.0 * q[3:-1] - q[4:]) / (12.0 * h)
    # one-sided 4th-order stencils at the edges
    c = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / 12.0
    qp[0] = np.dot(c, q[:5]) / h
    qp[1] = np.dot(c, q[1:6]) / h
    qp[-1] = -np.dot(c, q[-1:-6:-1]) / h
    qp[-2] = -np.dot(c, q[-2:-7:-1]) / h

    # achieved residual measured with an independent 5-point second derivative
    qpp = (-q[:-4] + 16.0 * q[1:-3] - 30.0 * q[2:-2] + 16.0 * q[3:-1] - q[4:]) / (12.0 * h * h)
    ach = float(np.max(np.abs(qpp - rhs(q[2:-2], s[2:-2]))))

    q_spline = CubicSpline(s, q)
    qp_spline = CubicSpline(s, qp)
    sol = PainleveSolution(
        s_grid=s, q=q, q_prime=qp, interpolant_degree=3, achieved_residual=ach,
        _q_spline=q_spline, _qp_spline=qp_spline,
        _aq=q_spline.antiderivative(),
        _aq2=CubicSpline(s, q * q).antiderivative(),
        _atq2=CubicSpline(s, s * q * q).antiderivative(),
        _tail_q=float(_ai_integral_tail(s_max)),
    )
    return sol


def log_tracy_widom_f1(s, sol):
    """log F1(s) = -(1/2) int_s^inf [(t-s) q^2 + q] dt."""
    s = np.asarray(s, dtype=float)
    if np.any(s > sol.s_max - 2.0):
        raise RangeError(f"s must stay below s_max - 2 = {sol.s_max - 2.0}")
    inner = (sol.integral_tq2(s) - s * sol.integral_q2(s)) + sol.integral_q(s)
    return -0.5 * inner


def tracy_widom_f1(s, sol):
    """GOE Tracy-Widom CDF by the Painleve route."""
    out = np.exp(log_tracy_widom_f1(s, sol))
    return float(out) if np.ndim(s) == 0 else out


def left_tail_log_f1(s):
    """Leading left-tail law of log F1 for s -> -infinity."""
    a = np.abs(np.asarray(s, dtype=float))
    const = np.log(2.0 ** (-11.0 / 48.0)) + 0.5 * ZETA_PRIME_MINUS_ONE
    return -a ** 3 / 24.0 - a ** 1.5 / (3.0 * np.sqrt(2.0)) - np.log(a) / 16.0 + const


def export_table(sol, s_values):
    """(s, q, q', F1) rows for CSV export."""
    s_values = np.asarray(s_values, dtype=float)
    return np.column_stack([
        s_values,
        sol.q_at(s_values),
        sol.q_prime_at(s_values),
        tracy_widom_f1(s_values, sol),
    ])
