"""Case (i) / case (ii) experiment orchestration.

A run simulates the plant once, then drives every configured estimator over
the same precomputed stream and logs one diagnostics row per step. Row ``k``
describes the state after sample ``k`` (``phi(k)``, ``y(k+1)``) has been
consumed: the regressor bank has absorbed it and the estimator has stepped
on the updated bank.
"""

import re
from dataclasses import dataclass, field, replace

import numpy as np

from . import _backend
from .bank import InnerMode, RegressorBank, RegressorSample, update
from .errors import ValidationError
from .estimators import (
    COVARIANCE_FORMS,
    CLMemory,
    EstimatorState,
    GainConfig,
    dcl_step,
    dfcl_step,
    ef_rls_step,
    lyapunov_value,
    tlf_rls_step,
)
from .linalg import Tolerances
from .plant import PUBLISHED_THETA, ChangeSchedule, InputSignal, simulate

__all__ = [
    "MethodSpec",
    "ExperimentConfig",
    "TraceRecord",
    "Trace",
    "RunResult",
    "default_config",
    "run",
    "run_case1",
    "run_case2",
    "compute_summary",
    "windowed_min_eig",
    "CONTRACTION_SLACK",
    "SUMMARY_FIELDS",
]

KINDS = ("ef_rls", "tlf_rls", "dcl", "dfcl")
CASES = ("case1", "case2", "custom")
N_PARAMS = 4
CONTRACTION_SLACK = 1e-9
CONSISTENCY_TOL = 1e-9


def _in_open_unit(value):
    return value is not None and 0.0 < value < 1.0


@dataclass(frozen=True)
class MethodSpec:
    """One estimator in a run. Fields a kind does not use are normalized to None."""

    kind: str
    lam: float | None = None
    mu: float | None = None
    inner: str | None = None
    gain: float | None = None
    capacity: int | None = None
    name: str | None = None

    def __post_init__(self):
        kind = self.kind
        if kind not in KINDS:
            raise ValidationError("kind", f"unknown method kind {kind!r}; expected one of {', '.join(KINDS)}")
        set_ = lambda k, v: object.__setattr__(self, k, v)  # noqa: E731
        if kind == "tlf_rls":
            inner = InnerMode(self.inner or "df").value
            set_("inner", inner)
            if inner == "none":
                set_("mu", None)
            elif self.mu is None:
                set_("mu", 0.99)
            set_("gain", None)
            set_("capacity", None)
        elif kind == "ef_rls":
            for k in ("mu", "inner", "gain", "capacity"):
                set_(k, None)
        elif kind == "dcl":
            for k in ("lam", "mu", "inner"):
                set_(k, None)
            set_("gain", 1.0 if self.gain is None else float(self.gain))
            set_("capacity", N_PARAMS if self.capacity is None else int(self.capacity))
        else:
            set_("lam", None)
            set_("inner", None)
            set_("capacity", None)
            set_("mu", 0.5 if self.mu is None else self.mu)
            set_("gain", 1.0 if self.gain is None else float(self.gain))
        if kind in ("ef_rls", "tlf_rls") and self.lam is None:
            set_("lam", 0.99)
        if self.name is None:
            set_("name", _slug(self.label))
        self.validate()

    def validate(self):
        where = self.name
        if self.lam is not None and not _in_open_unit(self.lam):
            raise ValidationError(f"{where}.lambda", f"must lie in (0, 1), got {self.lam!r}")
        if self.mu is not None and not 0.0 <= self.mu < 1.0:
            raise ValidationError(f"{where}.mu", f"must lie in [0, 1), got {self.mu!r}")
        if self.gain is not None and not 0.0 < self.gain < 2.0:
            raise ValidationError(f"{where}.gain", f"must lie in (0, 2), got {self.gain!r}")
        if self.capacity is not None and self.capacity < N_PARAMS:
            raise ValidationError(f"{where}.capacity", f"must be at least {N_PARAMS}, got {self.capacity!r}")
        if not re.fullmatch(r"[A-Za-z0-9_.\-]+", self.name):
            raise ValidationError("name", f"method name {self.name!r} may only use letters, digits, '_', '-', '.'")

    @property
    def label(self):
        if self.kind == "ef_rls":
            return f"EF-RLS(lambda={self.lam:g})"
        if self.kind == "tlf_rls":
            if self.inner == "none":
                return f"TLF-RLS(none,lambda={self.lam:g})"
            return f"TLF-RLS({self.inner.upper()},mu={self.mu:g},lambda={self.lam:g})"
        if self.kind == "dcl":
            return f"DCL(gain={self.gain:g},capacity={self.capacity})"
        return f"DF-CL(mu={self.mu:g},gain={self.gain:g})"


def _slug(label):
    return re.sub(r"[^a-z0-9.]+", "_", label.lower()).strip("_")


CASE1_METHODS = (
    MethodSpec("ef_rls", lam=0.99),
    MethodSpec("ef_rls", lam=0.01),
    MethodSpec("dcl"),
    MethodSpec("dfcl", mu=0.5),
    MethodSpec("tlf_rls", lam=0.99, mu=0.99, inner="df"),
    MethodSpec("tlf_rls", lam=0.01, mu=0.99, inner="df"),
)

CASE2_METHODS = (
    MethodSpec("ef_rls", lam=0.99),
    MethodSpec("tlf_rls", lam=0.01, mu=0.99, inner="df"),
    MethodSpec("tlf_rls", lam=0.01, mu=0.01, inner="df"),
    MethodSpec("tlf_rls", lam=0.01, mu=0.99, inner="ef"),
    MethodSpec("tlf_rls", lam=0.01, inner="none"),
)

CASE2_SCHEDULE = ((0, "a"), (200, "b"), (1200, "c"))


@dataclass(frozen=True)
class ExperimentConfig:
    case_id: str = "case1"
    steps: int = 2000
    methods: tuple = CASE1_METHODS
    schedule: tuple = ((0, "a"),)
    # Plant vector overrides as (label, 4-tuple) pairs; empty means the published values.
    thetas: tuple = ()
    tolerances: Tolerances = field(default_factory=Tolerances)
    seed: int = 0
    gamma: float = 1000.0
    input: InputSignal = field(default_factory=InputSignal)
    excitation_window: int = 50
    p_ceiling: float = 1e12
    covariance_form: str = "sqrt"

    def __post_init__(self):
        object.__setattr__(self, "methods", tuple(self.methods))
        object.__setattr__(self, "schedule", tuple((int(s), str(l)) for s, l in self.schedule))
        object.__setattr__(self, "thetas", tuple((str(l), tuple(map(float, t))) for l, t in self.thetas))
        self.validate()

    def validate(self):
        if self.case_id not in CASES:
            raise ValidationError("case", f"must be one of {', '.join(CASES)}, got {self.case_id!r}")
        if not isinstance(self.steps, int) or self.steps < 1:
            raise ValidationError("steps", f"must be an integer >= 1, got {self.steps!r}")
        if not self.gamma > 0.0:
            raise ValidationError("gamma", f"must be positive, got {self.gamma!r}")
        if self.excitation_window < 0:
            raise ValidationError("excitation_window", "must be non-negative")
        if not self.p_ceiling > 0.0:
            raise ValidationError("p_ceiling", "must be positive")
        if self.covariance_form not in COVARIANCE_FORMS:
            raise ValidationError("covariance_form", f"must be one of {', '.join(COVARIANCE_FORMS)}")
        names = [m.name for m in self.methods]
        if len(set(names)) != len(names):
            raise ValidationError("methods", "method names must be unique")
        for label, theta in self.thetas:
            if label not in PUBLISHED_THETA:
                raise ValidationError(f"plant.theta_{label}", "unknown plant label")
            if len(theta) != N_PARAMS or not np.all(np.isfinite(theta)):
                raise ValidationError(f"plant.theta_{label}", f"needs {N_PARAMS} finite values")
        try:
            ChangeSchedule.from_labels(self.schedule)
        except ValueError as exc:
            raise ValidationError("schedule", str(exc)) from None

    def plant_schedule(self):
        return ChangeSchedule.from_labels(self.schedule, dict(self.thetas))


def default_config(case_id="case1", **changes):
    """The published settings for ``case1``/``case2``; ``custom`` starts empty."""
    if case_id == "case1":
        base = ExperimentConfig("case1", 2000, CASE1_METHODS, ((0, "a"),))
    elif case_id == "case2":
        base = ExperimentConfig("case2", 2400, CASE2_METHODS, CASE2_SCHEDULE)
    elif case_id == "custom":
        base = ExperimentConfig("custom", 2000, (), ((0, "a"),))
    else:
        raise ValidationError("case", f"must be one of {', '.join(CASES)}, got {case_id!r}")
    return replace(base, **changes) if changes else base


@dataclass(frozen=True)
class TraceRecord:
    k: int
    method: str
    theta_hat: np.ndarray
    param_err: float
    ident_err: float
    min_eig_phi: float
    min_eig_omega_sq: float
    min_eig_P: float
    cond_P: float
    lyapunov: float
    diverged: bool


_COLUMNS = (
    "param_err",
    "ident_err",
    "min_eig_phi",
    "min_eig_omega_sq",
    "min_eig_P",
    "cond_P",
    "lyapunov",
)


@dataclass
class Trace:
    """Column-oriented per-step diagnostics for one method."""

    method: str
    name: str
    spec: MethodSpec
    theta_hat: np.ndarray
    param_err: np.ndarray
    ident_err: np.ndarray
    min_eig_phi: np.ndarray
    min_eig_omega_sq: np.ndarray
    min_eig_P: np.ndarray
    cond_P: np.ndarray
    lyapunov: np.ndarray
    diverged: np.ndarray
    k_e: int | None = None
    contraction_violations: int = 0
    # Steps on which the contraction was tested (bank consistent with the true theta).
    contraction_checked: int = 0

    @classmethod
    def empty(cls, spec, steps, n):
        cols = {c: np.full(steps, np.nan) for c in _COLUMNS}
        return cls(
            spec.label,
            spec.name,
            spec,
            np.full((steps, n), np.nan),
            diverged=np.zeros(steps, dtype=bool),
            **cols,
        )

    def __len__(self):
        return self.param_err.shape[0]

    @property
    def k(self):
        return np.arange(len(self))

    def record(self, k):
        return TraceRecord(
            k,
            self.method,
            self.theta_hat[k].copy(),
            *(float(getattr(self, c)[k]) for c in _COLUMNS),
            bool(self.diverged[k]),
        )

    def diverged_at(self):
        hits = np.flatnonzero(self.diverged)
        return int(hits[0]) if hits.size else None


@dataclass
class RunResult:
    config: ExperimentConfig
    stream: object
    traces: dict

    @property
    def summary(self):
        return compute_summary(self)

    def trace(self, name_or_label):
        """Look a trace up by method name, or else by its descriptive label."""
        if name_or_label in self.traces:
            return self.traces[name_or_label]
        for t in self.traces.values():
            if t.method == name_or_label:
                return t
        raise KeyError(name_or_label)


def windowed_min_eig(phis, delta):
    """Smallest eigenvalue of ``sum phi phi^T`` over rows ``k-delta .. k`` for every k."""
    eig = _backend.K.eigvalsh
    out = np.empty(phis.shape[0])
    for k in range(phis.shape[0]):
        w = phis[max(0, k - delta): k + 1]
        out[k] = eig(w.T @ w)[0]
    return out


def _consistent(bank, theta_true):
    """True when the bank's data agrees with ``theta_true`` (``M = omega theta``)."""
    scale = max(1.0, float(np.abs(bank.m_vec).max()))
    return float(np.abs(bank.omega @ theta_true - bank.m_vec).max()) <= CONSISTENCY_TOL * scale


def _p_diagnostics(p):
    w = _backend.K.eigvalsh(p)
    if not np.all(np.isfinite(w)):
        return np.nan, np.inf
    return w[0], (w[-1] / w[0] if w[0] > 0.0 else np.inf)


def _run_method(spec, stream, min_eig_phi, cfg):
    steps, n = stream.phi.shape
    tol = cfg.tolerances
    trace = Trace.empty(spec, steps, n)
    trace.min_eig_phi[:] = min_eig_phi
    kind = spec.kind
    # CL baselines never touch P; any valid lambda keeps the state well-formed.
    state = EstimatorState.initial(n, spec.lam if spec.lam is not None else 0.5, cfg.gamma)
    bank = None
    if kind == "tlf_rls":
        bank = RegressorBank.fresh(n, spec.inner, spec.mu or 0.0)
    elif kind == "dfcl":
        bank = RegressorBank.fresh(n, InnerMode.DF, spec.mu)
    memory = CLMemory(spec.capacity) if kind == "dcl" else None
    gains = GainConfig(spec.gain) if spec.gain is not None else None
    violations = checked = 0
    eig = _backend.K.eigvalsh
    has_p = kind in ("tlf_rls", "ef_rls")

    for k in range(steps):
        phi = stream.phi[k]
        y_next = stream.y_next[k]
        theta_true = stream.theta_true[k]
        trace.ident_err[k] = y_next - phi @ state.theta_hat
        stalled = not (np.isfinite(y_next) and np.all(np.isfinite(phi)))
        if not stalled:
            sample = RegressorSample(phi, y_next)
            if bank is not None:
                bank = update(bank, sample, tol)
            if state.is_finite():
                try:
                    if kind == "tlf_rls":
                        v_before = lyapunov_value(state, theta_true)
                        state = tlf_rls_step(state, bank.omega, bank.m_vec, tol, cfg.covariance_form)
                        v_after = lyapunov_value(state, theta_true)
                        if bank.k_e is not None and k >= bank.k_e and _consistent(bank, theta_true):
                            checked += 1
                            if v_after > spec.lam * v_before + CONTRACTION_SLACK:
                                violations += 1
                    elif kind == "ef_rls":
                        state = ef_rls_step(state, sample, cfg.p_ceiling)
                    elif kind == "dcl":
                        state, memory = dcl_step(state, sample, memory, gains, tol)
                    else:
                        state = dfcl_step(state, bank.omega, bank.m_vec, gains)
                except np.linalg.LinAlgError:  # includes NotPositiveDefinite
                    state = replace(state, diverged=True)
            else:
                state = replace(state, diverged=True)

        trace.theta_hat[k] = state.theta_hat
        err = state.theta_hat - theta_true
        trace.param_err[k] = np.sqrt(err @ err)
        if has_p:
            trace.lyapunov[k] = err @ state.r_mat @ err
            trace.min_eig_P[k], trace.cond_P[k] = _p_diagnostics(state.p_mat)
        if bank is not None:
            trace.min_eig_omega_sq[k] = np.min(np.abs(eig(bank.omega))) ** 2
        trace.diverged[k] = state.diverged or stalled or bool(stream.overflow[k])

    trace.k_e = None if bank is None else bank.k_e
    trace.contraction_violations = violations
    trace.contraction_checked = checked
    return trace


def run(cfg):
    """Simulate the configured plant and drive every method over the same data."""
    stream = simulate(cfg.plant_schedule(), cfg.steps, cfg.input)
    min_eig_phi = windowed_min_eig(stream.phi, cfg.excitation_window)
    traces = {}
    for spec in cfg.methods:
        traces[spec.name] = _run_method(spec, stream, min_eig_phi, cfg)
    return RunResult(cfg, stream, traces)


def run_case1(cfg=None):
    return run(cfg if cfg is not None else default_config("case1"))


def run_case2(cfg=None):
    return run(cfg if cfg is not None else default_config("case2"))


SUMMARY_FIELDS = (
    "method",
    "final_param_err",
    "final_ident_err",
    "k_e",
    "max_cond_P",
    "contraction_violations",
    "contraction_checked",
    "diverged_at",
)


def _nanmax(a):
    return float(np.nanmax(a)) if np.any(~np.isnan(a)) else float("nan")


def compute_summary(result):
    """One row per method: final errors, k_e, worst conditioning, contraction violations."""
    rows = []
    for t in result.traces.values():
        rows.append(
            {
                "method": t.method,
                "final_param_err": float(t.param_err[-1]),
                "final_ident_err": float(t.ident_err[-1]),
                "k_e": t.k_e,
                "max_cond_P": _nanmax(t.cond_P),
                "contraction_violations": t.contraction_violations,
                "contraction_checked": t.contraction_checked,
                "diverged_at": t.diverged_at(),
            }
        )
    return rows
