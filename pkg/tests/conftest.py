"""Shared oracle helpers for the test suite.

The oracles deliberately avoid the package's own evaluation paths: displaced
states come from the matrix exponential of the tridiagonal ladder generator,
and Laguerre values from exact rational arithmetic, so each check is a genuine
dual route.
"""

from fractions import Fraction

import numpy as np
from scipy.linalg import expm


def ladder_matrix(n_max: int) -> np.ndarray:
    """Annihilation operator on a truncated Fock space."""
    return np.diag(np.sqrt(np.arange(1.0, n_max)), 1)


def displacement_expm(beta: float, n_max: int) -> np.ndarray:
    """exp(beta (a_dag - a)) from the truncated generator.

    Exact displacement matrix elements away from the truncation edge; callers
    must keep the indices of interest well below n_max.
    """
    a = ladder_matrix(n_max)
    return expm(beta * (a.T - a))


def laguerre_exact(n: int, l: int, x: Fraction) -> Fraction:
    """Generalized Laguerre polynomial in exact rational arithmetic."""
    if n == 0:
        return Fraction(1)
    prev = Fraction(1)
    cur = 1 + l - x
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 + l - x) * cur - (k + l) * prev) / (k + 1)
    return cur
