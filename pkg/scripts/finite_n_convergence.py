#!/usr/bin/env python3
"""Convergence of the rescaled finite-N maximum law to the GOE edge law,
plus the double-scaling behavior of the recursion coefficients."""

import numpy as np

from airymax import (cdf_max_finite_n, double_scaling_check,
                     solve_hastings_mcleod, tracy_widom_f1)
from airymax.finite_n import f1_scaling_function


def main():
    sol = solve_hastings_mcleod()
    print("sup |F_N(rescaled) - F1| over s in [-4, 2]:")
    for N in (4, 8, 16, 32, 64):
        sup = 0.0
        for s in np.arange(-4.0, 2.001, 0.1):
            M = np.sqrt(2.0 * N) * (1.0 + s / (2.0 ** (7.0 / 3.0) * N ** (2.0 / 3.0)))
            sup = max(sup, abs(cdf_max_finite_n(M, N) - tracy_widom_f1(s, sol)))
        print(f"  N={N:3d}: {sup:.5f}")

    print("\nrecursion-coefficient deviations at M = 15: leading scaling "
          "function and the two-term prediction")
    M = 15.0
    for k in (106, 109, 112, 113, 116):
        rep = double_scaling_check(M, k, sol)
        x = rep.x_even
        f1 = float(f1_scaling_function(x, sol))
        f2 = 0.5 * (-2.0 * x / np.pi ** 2 + (np.pi ** 2 / 2.0) * f1 ** 2)
        two_term = -f1 + f2 / M ** (2.0 / 3.0)
        print(f"  2k={2*k}: x={x:+.3f} measured={rep.deviation_even:+.5f} "
              f"leading={-f1:+.5f} two-term={two_term:+.5f}")


if __name__ == "__main__":
    main()
