"""Closed-form minimizer of the outer weighted least-squares cost.

Used as a brute-force check on the recursion: after ``k`` updates fed with
``(omega_i, M_i)``, ``i = 1..k``, the recursive estimate must equal

    argmin_t  sum_i lam^(k-i) |omega_i t - M_i|^2 + lam^k (t - t0)^T R0 (t - t0)

which is obtained here by forming the normal equations from scratch and
solving them with a dense LU solve. Nothing is shared with the recursion.
"""

import numpy as np


def batch_minimizer(omegas, m_vecs, lam, r0, theta0):
    """Return the minimizer after ``len(omegas)`` updates."""
    k = len(omegas)
    theta0 = np.asarray(theta0, dtype=float)
    lhs = lam**k * np.asarray(r0, dtype=float)
    rhs = lhs @ theta0
    for i, (om, mv) in enumerate(zip(omegas, m_vecs), start=1):
        w = lam ** (k - i)
        om = np.asarray(om, dtype=float)
        lhs = lhs + w * (om.T @ om)
        rhs = rhs + w * (om.T @ np.asarray(mv, dtype=float))
    return np.linalg.solve(lhs, rhs)


def batch_trajectory(omegas, m_vecs, lam, r0, theta0):
    """Minimizers after 1, 2, ..., len(omegas) updates."""
    return np.array(
        [batch_minimizer(omegas[:k], m_vecs[:k], lam, r0, theta0) for k in range(1, len(omegas) + 1)]
    )
