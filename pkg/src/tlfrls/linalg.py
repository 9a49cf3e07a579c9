"""Small dense symmetric matrix utilities.

Matrices are plain ``numpy`` arrays; :func:`sym_matrix` is the checked
constructor. Everything here dispatches to the active kernel backend.
"""

from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import NotPositiveDefinite

__all__ = [
    "Tolerances",
    "DEFAULT_TOL",
    "NotPositiveDefinite",
    "sym_matrix",
    "eigenvalues",
    "min_eigenvalue",
    "max_eigenvalue",
    "numerical_rank",
    "condition_number",
    "solve_spd",
]


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds; all must lie strictly between 0 and 1."""

    eps_rank: float = 1e-9
    eps_div: float = 1e-12
    eps_psd: float = 1e-12

    def __post_init__(self):
        for field in ("eps_rank", "eps_div", "eps_psd"):
            value = getattr(self, field)
            if not 0.0 < value < 1.0:
                raise ValueError(f"{field} must lie in (0, 1), got {value!r}")


DEFAULT_TOL = Tolerances()


def sym_matrix(entries):
    """Return ``entries`` as a float array with exact symmetry enforced."""
    a = np.array(entries, dtype=float)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError(f"expected a non-empty square matrix, got shape {a.shape}")
    return 0.5 * (a + a.T)


def eigenvalues(s):
    """Ascending eigenvalues of symmetric ``s`` (NaN if ``s`` is non-finite)."""
    return _backend.K.eigvalsh(np.asarray(s, dtype=float))


def min_eigenvalue(s):
    return float(eigenvalues(s)[0])


def max_eigenvalue(s):
    return float(eigenvalues(s)[-1])


def numerical_rank(s, tol=DEFAULT_TOL):
    """Number of singular values above ``eps_rank * max(1, sigma_max)``."""
    return _backend.K.numerical_rank(np.asarray(s, dtype=float), tol.eps_rank)


def condition_number(s):
    """``lambda_max / lambda_min``, or ``inf`` when ``s`` is not positive definite.

    Non-finite input also maps to ``inf``.
    """
    w = eigenvalues(s)
    if not np.all(np.isfinite(w)) or w[0] <= 0.0:
        return float("inf")
    return float(w[-1] / w[0])


def solve_spd(a, b, tol=DEFAULT_TOL):
    """Solve ``a x = b`` for symmetric positive definite ``a`` via Cholesky.

    Raises NotPositiveDefinite when ``min_eigenvalue(a) <= eps_psd``.
    """
    return _backend.K.spd_solve(np.asarray(a, dtype=float), np.asarray(b, dtype=float), tol.eps_psd)
