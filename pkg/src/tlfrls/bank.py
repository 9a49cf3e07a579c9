"""Augmented regressor matrix and auxiliary vector (the inner forgetting loop).

A :class:`RegressorBank` accumulates normalized outer products
``phi phi^T / m^2`` into ``omega`` and the matching ``phi y / m^2`` terms into
``m_vec``. Three inner-forgetting modes are supported:

``df``
    directional forgetting: once a sample adds no new rank, only the part of
    ``omega`` seen by the incoming regressor is discounted by ``mu``.
``ef``
    exponential forgetting ``omega <- (1 - mu) omega + phi phi^T / m^2``.
``none``
    pure accumulation.

The inner factor ``mu`` follows the convention that ``mu`` near 1 forgets
heavily and ``mu = 0`` does not forget. Banks are immutable; every update
returns a new bank.
"""

from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from . import _backend
from .linalg import DEFAULT_TOL, min_eigenvalue

__all__ = [
    "InnerMode",
    "RegressorSample",
    "RegressorBank",
    "ExcitationReport",
    "normalize",
    "update",
    "update_df",
    "update_ef",
    "update_none",
    "consistency_residual",
    "excitation_report",
]


class InnerMode(str, Enum):
    DF = "df"
    EF = "ef"
    NONE = "none"


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class RegressorSample:
    """Regressor ``phi(k)`` with the output ``y(k+1)`` it predicts."""

    phi: np.ndarray
    y_next: float

    def __post_init__(self):
        phi = _frozen(self.phi).reshape(-1)
        if not (np.all(np.isfinite(phi)) and np.isfinite(self.y_next)):
            raise ValueError("regressor sample must be finite")
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "y_next", float(self.y_next))


@dataclass(frozen=True)
class RegressorBank:
    omega: np.ndarray
    m_vec: np.ndarray
    mode: InnerMode = InnerMode.DF
    mu: float = 0.99
    # Index of the sample whose update first made omega positive definite.
    k_e: int | None = None
    # Number of samples consumed so far.
    step: int = 0

    def __post_init__(self):
        object.__setattr__(self, "mode", InnerMode(self.mode))
        if not 0.0 <= self.mu <= 1.0:
            raise ValueError(f"mu must lie in [0, 1], got {self.mu!r}")

    @classmethod
    def fresh(cls, n, mode=InnerMode.DF, mu=0.99):
        return cls(_frozen(np.zeros((n, n))), _frozen(np.zeros(n)), InnerMode(mode), float(mu))

    @property
    def n(self):
        return self.m_vec.shape[0]


def normalize(phi):
    """Return ``(phi / m, m)`` with ``m = sqrt(1 + phi^T phi)``."""
    phi = np.asarray(phi, dtype=float)
    m = float(np.sqrt(1.0 + phi @ phi))
    return phi / m, m


def _advance(bank, omega, m_vec, tol):
    k_e = bank.k_e
    if k_e is None and min_eigenvalue(omega) > tol.eps_psd:
        k_e = bank.step
    return replace(bank, omega=_frozen(omega), m_vec=_frozen(m_vec), k_e=k_e, step=bank.step + 1)


def update_df(bank, s, tol=DEFAULT_TOL):
    """Directional-forgetting update.

    Samples that raise the numerical rank of ``omega`` (or that ``omega``
    cannot see, ``phi^T omega phi <= eps_div |phi|^2``) are accumulated
    without forgetting. A zero regressor only advances the step counter.
    """
    if bank.mode is not InnerMode.DF:
        raise ValueError(f"update_df called on a {bank.mode.value} bank")
    omega, m_vec, _ = _backend.K.df_update(
        bank.omega, bank.m_vec, s.phi, s.y_next, bank.mu, tol.eps_rank, tol.eps_div
    )
    return _advance(bank, omega, m_vec, tol)


def update_ef(bank, s, tol=DEFAULT_TOL):
    if bank.mode is not InnerMode.EF:
        raise ValueError(f"update_ef called on a {bank.mode.value} bank")
    phi = s.phi
    m2 = 1.0 + phi @ phi
    keep = 1.0 - bank.mu
    omega = keep * bank.omega + np.outer(phi, phi) / m2
    m_vec = keep * bank.m_vec + phi * (s.y_next / m2)
    return _advance(bank, omega, m_vec, tol)


def update_none(bank, s, tol=DEFAULT_TOL):
    if bank.mode is not InnerMode.NONE:
        raise ValueError(f"update_none called on a {bank.mode.value} bank")
    phi = s.phi
    m2 = 1.0 + phi @ phi
    omega = bank.omega + np.outer(phi, phi) / m2
    m_vec = bank.m_vec + phi * (s.y_next / m2)
    return _advance(bank, omega, m_vec, tol)


_UPDATES = {InnerMode.DF: update_df, InnerMode.EF: update_ef, InnerMode.NONE: update_none}


def update(bank, s, tol=DEFAULT_TOL):
    """Dispatch to the update matching ``bank.mode``."""
    return _UPDATES[bank.mode](bank, s, tol)


def consistency_residual(bank, theta):
    """``|omega theta - m_vec|_2``; zero at the true parameter for noise-free data."""
    return float(np.linalg.norm(bank.omega @ np.asarray(theta, dtype=float) - bank.m_vec))


@dataclass(frozen=True)
class ExcitationReport:
    min_eig_phi_outer: float
    min_eig_omega_sq: float
    window_delta: int
    level_alpha: float


def excitation_report(phi_history, bank, delta):
    """Excitation levels over the trailing window ``k-delta .. k``.

    ``min_eig_phi_outer`` is the smallest eigenvalue of the sum of
    ``phi phi^T`` over the last ``delta + 1`` regressors (``delta = 0`` gives
    the instantaneous value). ``min_eig_omega_sq`` is the smallest eigenvalue
    of ``omega^2`` for the current bank. ``level_alpha`` is the largest
    ``alpha`` with ``sum phi phi^T >= alpha I`` over the window, clipped at
    zero (so it equals ``min_eig_phi_outer``).
    """
    if delta < 0:
        raise ValueError("delta must be non-negative")
    phis = np.atleast_2d(np.asarray(phi_history, dtype=float))
    window = phis[-(delta + 1):]
    outer = window.T @ window
    phi_min = max(min_eigenvalue(outer), 0.0)
    w = np.abs(_backend.K.eigvalsh(bank.omega))
    omega_sq_min = float(np.min(w)) ** 2
    return ExcitationReport(phi_min, omega_sq_min, int(delta), phi_min)
