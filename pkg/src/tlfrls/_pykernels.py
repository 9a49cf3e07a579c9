"""Pure numpy implementations of the per-step kernels.

This module is the reference backend and the fallback used when the compiled
extension ``tlfrls._kernels`` is unavailable. Every function here has a twin
with an identical signature in ``_kernels.pyx``.
"""

import numpy as np

from .errors import NotPositiveDefinite

BRANCH_SKIP = 0
BRANCH_ACCUMULATE = 1
BRANCH_FORGET = 2


def eigvalsh(a):
    """Ascending eigenvalues of a symmetric matrix; all-NaN if any entry is non-finite."""
    a = np.asarray(a, dtype=float)
    if not np.all(np.isfinite(a)):
        return np.full(a.shape[0], np.nan)
    return np.linalg.eigvalsh(a)


def numerical_rank(a, eps_rank):
    w = np.abs(eigvalsh(a))
    if np.isnan(w).any():
        return 0
    return int(np.count_nonzero(w > eps_rank * max(1.0, w.max(initial=0.0))))


def spd_solve(a, b, eps_psd):
    a = np.asarray(a, dtype=float)
    lmin = eigvalsh(a)[0]
    if not lmin > eps_psd:
        raise NotPositiveDefinite(f"min eigenvalue {lmin!r} <= {eps_psd!r}")
    try:
        c = np.linalg.cholesky(a)
    except np.linalg.LinAlgError:
        raise NotPositiveDefinite("Cholesky factorization failed") from None
    y = np.linalg.solve(c, b)
    return np.linalg.solve(c.T, y)


def df_update(omega, m_vec, phi, y_next, mu, eps_rank, eps_div):
    """One directional-forgetting step of the regressor bank.

    Returns ``(omega, m_vec, branch)`` where branch is one of the ``BRANCH_*``
    codes.
    """
    phi2 = float(phi @ phi)
    if phi2 == 0.0:
        return omega.copy(), m_vec.copy(), BRANCH_SKIP
    m2 = 1.0 + phi2
    add = np.outer(phi, phi) / m2
    v = omega @ phi
    q = float(phi @ v)
    if q <= eps_div * phi2 or numerical_rank(omega + add, eps_rank) > numerical_rank(omega, eps_rank):
        new_omega = omega + add
        new_m = m_vec + phi * (y_next / m2)
        branch = BRANCH_ACCUMULATE
    else:
        new_omega = omega - (mu / q) * np.outer(v, v) + add
        new_m = m_vec - v * (mu * float(phi @ m_vec) / q) + phi * (y_next / m2)
        branch = BRANCH_FORGET
    new_omega = 0.5 * (new_omega + new_omega.T)
    return new_omega, new_m, branch


def tlf_sqrt_step(theta, s, r, omega, m_vec, lam, eps_psd):
    """Outer RLS step over (omega, m_vec) carrying the covariance square root ``s``.

    ``P = s s^T``. Returns ``(theta, s, p, r)``.
    """
    n = theta.shape[0]
    eye = np.eye(n)
    p = s @ s.T
    op = omega @ p
    nmat = lam * eye + op @ omega
    nmat = 0.5 * (nmat + nmat.T)
    x = spd_solve(nmat, omega @ theta - m_vec, eps_psd)
    new_theta = theta - op.T @ x
    a = s.T @ omega
    g = lam * eye + a @ a.T
    g = 0.5 * (g + g.T)
    if not eigvalsh(g)[0] > eps_psd:
        raise NotPositiveDefinite("square-root update lost positive definiteness")
    try:
        c = np.linalg.cholesky(g)
    except np.linalg.LinAlgError:
        raise NotPositiveDefinite("square-root update lost positive definiteness") from None
    new_s = np.linalg.solve(c, s.T).T
    new_p = new_s @ new_s.T
    new_p = 0.5 * (new_p + new_p.T)
    new_r = lam * r + omega @ omega
    new_r = 0.5 * (new_r + new_r.T)
    return new_theta, new_s, new_p, new_r


def tlf_direct_step(theta, p, r, omega, m_vec, lam, eps_psd):
    """Outer RLS step using the subtractive covariance update.

    Returns ``(theta, p, r, asymmetry)`` where asymmetry is the max abs
    difference ``|P - P^T|`` measured before re-symmetrization.
    """
    n = theta.shape[0]
    op = omega @ p
    nmat = lam * np.eye(n) + op @ omega
    nmat = 0.5 * (nmat + nmat.T)
    x = spd_solve(nmat, omega @ theta - m_vec, eps_psd)
    new_theta = theta - op.T @ x
    y = spd_solve(nmat, op, eps_psd)
    new_p = (p - op.T @ y) / lam
    asym = float(np.max(np.abs(new_p - new_p.T)))
    new_p = 0.5 * (new_p + new_p.T)
    new_r = lam * r + omega @ omega
    new_r = 0.5 * (new_r + new_r.T)
    return new_theta, new_p, new_r, asym


def ef_rls_step(theta, p, r, phi, y_next, lam):
    """Classical exponentially forgetting RLS. Returns ``(theta, p, r, err)``."""
    # Windup can overflow P; the caller flags that, so numpy need not warn.
    with np.errstate(over="ignore", invalid="ignore"):
        v = p @ phi
        gain = v / (lam + float(phi @ v))
        err = y_next - float(phi @ theta)
        new_theta = theta + gain * err
        new_p = (p - np.outer(gain, v)) / lam
        new_p = 0.5 * (new_p + new_p.T)
        new_r = lam * r + np.outer(phi, phi)
    return new_theta, new_p, new_r, err
