"""Discrete ARX mass-spring-damper plant and its identification input.

The plant is ``y(k+1) = phi(k)^T theta`` with
``phi(k) = [y(k), y(k-1), u(k), u(k-1)]``. Three published parameter sets
(a, b, c) correspond to m = 5 kg with (k, b) = (1, 1), (10, 0.01) and
(0.1, 10). A :class:`ChangeSchedule` switches ``theta`` at given steps while
the plant history carries over.
"""

import math
from dataclasses import dataclass

import numpy as np

from .bank import _frozen

__all__ = [
    "PUBLISHED_THETA",
    "PlantModel",
    "ChangeSchedule",
    "SimHistory",
    "InputSignal",
    "Stream",
    "paper_theta",
    "input_signal",
    "arx_step",
    "schedule_theta",
    "simulate",
    "OVERFLOW_LIMIT",
]

PUBLISHED_THETA = {
    "a": (1.6405, -0.8187, 0.4606, 0.4307),
    "b": (0.3116, -0.9980, 0.4218, 0.4215),
    "c": (1.1267, -0.1353, 0.2834, 0.1482),
}

OVERFLOW_LIMIT = 1e12


@dataclass(frozen=True)
class PlantModel:
    theta_true: np.ndarray
    label: str

    def __post_init__(self):
        theta = _frozen(self.theta_true).reshape(-1)
        if theta.shape != (4,) or not np.all(np.isfinite(theta)):
            raise ValueError("theta_true must be 4 finite ARX coefficients")
        object.__setattr__(self, "theta_true", theta)


def paper_theta(label):
    try:
        return PlantModel(np.array(PUBLISHED_THETA[label]), label)
    except KeyError:
        raise ValueError(f"unknown plant case {label!r}; expected one of a, b, c") from None


@dataclass(frozen=True)
class ChangeSchedule:
    """Ordered ``(start_step, PlantModel)`` pairs; the first starts at step 0."""

    entries: tuple

    def __post_init__(self):
        entries = tuple(self.entries)
        if not entries or entries[0][0] != 0:
            raise ValueError("schedule must start at step 0")
        starts = [start for start, _ in entries]
        if any(b <= a for a, b in zip(starts, starts[1:])):
            raise ValueError("schedule start steps must be strictly increasing")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def constant(cls, model):
        return cls(((0, model),))

    @classmethod
    def from_labels(cls, pairs, thetas=None):
        """Build from ``(start, label)`` pairs, optionally overriding the label vectors."""
        thetas = thetas or {}
        entries = []
        for start, label in pairs:
            if label in thetas:
                model = PlantModel(np.asarray(thetas[label], dtype=float), label)
            else:
                model = paper_theta(label)
            entries.append((int(start), model))
        return cls(tuple(entries))


def schedule_theta(sched, k):
    """The model active at step ``k``; a change at step s applies to all k >= s."""
    current = sched.entries[0][1]
    for start, model in sched.entries:
        if k >= start:
            current = model
        else:
            break
    return current


@dataclass(frozen=True)
class InputSignal:
    """``u(k) = offset + amplitude * sin(frequency * k)``."""

    amplitude: float = 1.0
    frequency: float = 0.1
    offset: float = 0.0

    def __call__(self, k):
        return self.offset + self.amplitude * math.sin(self.frequency * k)


def input_signal(k):
    """The identification input ``sin(0.1 k)``."""
    if k < 0:
        raise ValueError("step must be non-negative")
    return math.sin(0.1 * k)


@dataclass(frozen=True)
class SimHistory:
    y_curr: float = 0.0
    y_prev: float = 0.0
    u_curr: float = 0.0
    u_prev: float = 0.0


def arx_step(model, hist, u_next):
    """Advance the plant one step.

    Returns ``(y_next, new_hist, phi)`` where ``phi`` is the regressor that
    produced ``y_next``.
    """
    phi = np.array([hist.y_curr, hist.y_prev, hist.u_curr, hist.u_prev])
    y_next = float(phi @ model.theta_true)
    new_hist = SimHistory(y_next, hist.y_curr, float(u_next), hist.u_curr)
    return y_next, new_hist, phi


@dataclass(frozen=True)
class Stream:
    """Precomputed plant data: row k holds ``phi(k)``, ``y(k+1)`` and the active theta."""

    phi: np.ndarray
    y_next: np.ndarray
    theta_true: np.ndarray
    overflow: np.ndarray

    def __len__(self):
        return self.y_next.shape[0]


def simulate(sched, steps, signal=None):
    """Run the plant from rest (``y(0) = y(-1) = u(-1) = 0``) for ``steps`` samples.

    ``overflow[k]`` is set from the first step with ``|y(k+1)| > OVERFLOW_LIMIT`` on.
    """
    signal = signal or InputSignal()
    n = schedule_theta(sched, 0).theta_true.shape[0]
    phis = np.empty((steps, n))
    ys = np.empty(steps)
    thetas = np.empty((steps, n))
    overflow = np.zeros(steps, dtype=bool)
    hist = SimHistory(u_curr=signal(0))
    flagged = False
    for k in range(steps):
        model = schedule_theta(sched, k)
        y_next, hist, phi = arx_step(model, hist, signal(k + 1))
        # Sticky: once the output leaves the limit the rest of the run is unusable.
        flagged = flagged or not abs(y_next) <= OVERFLOW_LIMIT
        phis[k], ys[k], thetas[k], overflow[k] = phi, y_next, model.theta_true, flagged
    for a in (phis, ys, thetas, overflow):
        a.setflags(write=False)
    return Stream(phis, ys, thetas, overflow)
