"""Parameter update laws.

``tlf_rls_step``
    exponentially forgetting RLS driven by the augmented pair ``(omega, M)``
    instead of a single regressor (the outer loop of the two-layer scheme).
``ef_rls_step``
    the classical scalar-measurement EF-RLS baseline.
``dcl_step``, ``dfcl_step``
    normalized-gradient concurrent-learning baselines (a data-collection
    memory and a directional-forgetting regressor bank respectively).

States are immutable; each step returns a new state. ``r_mat`` is the
information matrix propagated alongside ``p_mat`` for diagnostics only.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from . import _backend
from .bank import _frozen
from .linalg import DEFAULT_TOL, max_eigenvalue, min_eigenvalue, numerical_rank

__all__ = [
    "EstimatorState",
    "CLMemory",
    "GainConfig",
    "COVARIANCE_FORMS",
    "tlf_rls_step",
    "ef_rls_step",
    "dcl_step",
    "dfcl_step",
    "parameter_error",
    "lyapunov_value",
]

COVARIANCE_FORMS = ("sqrt", "direct")


@dataclass(frozen=True)
class EstimatorState:
    theta_hat: np.ndarray
    p_mat: np.ndarray
    r_mat: np.ndarray
    lam: float
    gamma: float = 1000.0
    # Square-root factor of p_mat (p = s s^T), carried by the "sqrt" covariance form.
    p_sqrt: np.ndarray | None = None
    diverged: bool = False
    # Asymmetry of P before re-symmetrization on the last "direct" step.
    last_asymmetry: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.lam < 1.0:
            raise ValueError(f"lambda must lie in (0, 1), got {self.lam!r}")
        if not self.gamma > 0.0:
            raise ValueError(f"gamma must be positive, got {self.gamma!r}")

    @classmethod
    def initial(cls, n, lam, gamma=1000.0, theta0=None):
        """``P(0) = gamma I``, ``R(0) = I / gamma``, ``theta_hat(0) = theta0`` (zeros by default)."""
        if not gamma > 0.0:
            raise ValueError(f"gamma must be positive, got {gamma!r}")
        theta = np.zeros(n) if theta0 is None else np.asarray(theta0, dtype=float)
        eye = np.eye(n)
        return cls(
            theta_hat=_frozen(theta),
            p_mat=_frozen(gamma * eye),
            r_mat=_frozen(eye / gamma),
            lam=float(lam),
            gamma=float(gamma),
            p_sqrt=_frozen(np.sqrt(gamma) * eye),
        )

    @property
    def n(self):
        return self.theta_hat.shape[0]

    def is_finite(self):
        return bool(np.all(np.isfinite(self.theta_hat)) and np.all(np.isfinite(self.p_mat)))


def tlf_rls_step(est, omega, m_vec, tol=DEFAULT_TOL, form="sqrt"):
    """One outer RLS step over the augmented pair.

    ``theta+ = theta - P omega N^{-1} (omega theta - M)`` with
    ``N = lam I + omega P omega`` and ``P+ = (P - P omega N^{-1} omega P) / lam``.

    ``form="sqrt"`` evaluates the covariance update through the factor
    ``P = S S^T`` (``S+ = S C^{-T}``, ``C C^T = lam I + S^T omega^2 S``), which
    is algebraically identical but avoids the cancellation of the subtractive
    form when ``P`` is huge along unexcited directions. ``form="direct"`` uses
    the subtractive formula and records the pre-symmetrization asymmetry.
    """
    omega = np.asarray(omega, dtype=float)
    m_vec = np.asarray(m_vec, dtype=float)
    if form == "sqrt":
        s = est.p_sqrt
        if s is None:
            s = np.linalg.cholesky(est.p_mat)
        theta, s, p, r = _backend.K.tlf_sqrt_step(
            est.theta_hat, s, est.r_mat, omega, m_vec, est.lam, tol.eps_psd
        )
        asym = 0.0
    elif form == "direct":
        theta, p, r, asym = _backend.K.tlf_direct_step(
            est.theta_hat, est.p_mat, est.r_mat, omega, m_vec, est.lam, tol.eps_psd
        )
        s = None
    else:
        raise ValueError(f"unknown covariance form {form!r}")
    new = replace(
        est,
        theta_hat=_frozen(theta),
        p_mat=_frozen(p),
        r_mat=_frozen(r),
        p_sqrt=None if s is None else _frozen(s),
        last_asymmetry=float(asym),
    )
    if not new.is_finite():
        new = replace(new, diverged=True)
    return new


def ef_rls_step(est, s, p_ceiling=1e12):
    """Classical EF-RLS on one regressor sample.

    The state is flagged ``diverged`` (and stays flagged) once
    ``lambda_max(P)`` exceeds ``p_ceiling``; the recursion itself keeps going.
    """
    theta, p, r, _ = _backend.K.ef_rls_step(
        est.theta_hat, est.p_mat, est.r_mat, s.phi, s.y_next, est.lam
    )
    new = replace(est, theta_hat=_frozen(theta), p_mat=_frozen(p), r_mat=_frozen(r), p_sqrt=None)
    if not est.diverged and not max_eigenvalue(new.p_mat) <= p_ceiling:
        new = replace(new, diverged=True)
    return new


@dataclass(frozen=True)
class GainConfig:
    gain: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.gain < 2.0:
            raise ValueError(f"gain must lie in (0, 2), got {self.gain!r}")


@dataclass(frozen=True)
class CLMemory:
    """Recorded samples ``(phi_j, y_j, m_j^2)`` for the data-collection baseline.

    Admission: a sample is appended while there is room and it raises the
    numerical rank of the memory's information matrix. Otherwise it may
    replace a stored sample, choosing the swap that maximizes the smallest
    eigenvalue, and only if that eigenvalue strictly improves.
    """

    capacity: int
    samples: tuple = field(default=())

    def __post_init__(self):
        if self.capacity < 1:
            raise ValueError("capacity must be positive")

    def __len__(self):
        return len(self.samples)

    def information(self, n):
        info = np.zeros((n, n))
        for phi, _, m2 in self.samples:
            info += np.outer(phi, phi) / m2
        return info

    def admit(self, s, tol=DEFAULT_TOL):
        phi = s.phi
        if not phi.any():
            return self
        n = phi.shape[0]
        m2 = 1.0 + phi @ phi
        entry = (phi, s.y_next, m2)
        info = self.information(n)
        new_term = np.outer(phi, phi) / m2
        if len(self.samples) < self.capacity and numerical_rank(info + new_term, tol) > numerical_rank(info, tol):
            return replace(self, samples=self.samples + (entry,))
        if not self.samples:
            return self
        best, best_j = min_eigenvalue(info), None
        for j, (pj, _, mj2) in enumerate(self.samples):
            cand = min_eigenvalue(info - np.outer(pj, pj) / mj2 + new_term)
            if cand > best:
                best, best_j = cand, j
        if best_j is None:
            return self
        samples = list(self.samples)
        samples[best_j] = entry
        return replace(self, samples=tuple(samples))


def dcl_step(est, s, mem, cfg=GainConfig(), tol=DEFAULT_TOL):
    """Normalized-gradient concurrent-learning step.

    The gradient uses the memory as it stood before this sample arrived; the
    sample is then offered to the memory. Returns ``(state, memory)``.
    """
    theta = est.theta_hat
    phi = s.phi
    m2 = 1.0 + phi @ phi
    grad = phi * (s.y_next - phi @ theta) / m2
    if mem.samples:
        acc = np.zeros_like(theta)
        for pj, yj, mj2 in mem.samples:
            acc += pj * (yj - pj @ theta) / mj2
        grad = grad + acc / max(1, len(mem))
    new = replace(est, theta_hat=_frozen(theta + cfg.gain * grad))
    return new, mem.admit(s, tol)


def dfcl_step(est, omega, m_vec, cfg=GainConfig()):
    """Gradient step on the augmented error, normalized by ``max(1, lambda_max(omega))``."""
    omega = np.asarray(omega, dtype=float)
    scale = max(1.0, max_eigenvalue(omega))
    theta = est.theta_hat - cfg.gain * (omega @ est.theta_hat - np.asarray(m_vec, dtype=float)) / scale
    return replace(est, theta_hat=_frozen(theta))


def parameter_error(est, theta_true):
    return float(np.linalg.norm(est.theta_hat - np.asarray(theta_true, dtype=float)))


def lyapunov_value(est, theta_true):
    """``V = e^T R e`` with ``e = theta_hat - theta_true``."""
    e = est.theta_hat - np.asarray(theta_true, dtype=float)
    return float(e @ est.r_mat @ e)
