"""Runtime acceptance checks for the identifier and its experiments.

Each ``criterion_N`` takes an :class:`AcceptanceContext` and returns a
:class:`CriterionResult`; :func:`run_all` evaluates them in order. The
context caches the Case (i) / Case (ii) runs so they are simulated once.
A criterion that raises is reported as failed with the error text.
"""

import math
from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np

from .bank import (
    RegressorBank,
    RegressorSample,
    consistency_residual,
    excitation_report,
    normalize,
    update,
    update_df,
    update_ef,
    update_none,
)
from .estimators import (
    CLMemory,
    EstimatorState,
    GainConfig,
    dcl_step,
    dfcl_step,
    ef_rls_step,
    lyapunov_value,
    parameter_error,
    tlf_rls_step,
)
from .experiments import default_config, run, windowed_min_eig
from .linalg import (
    DEFAULT_TOL,
    condition_number,
    eigenvalues,
    min_eigenvalue,
    numerical_rank,
    solve_spd,
    sym_matrix,
)
from .oracle import batch_minimizer
from .plant import (
    PUBLISHED_THETA,
    ChangeSchedule,
    SimHistory,
    arx_step,
    input_signal,
    paper_theta,
    schedule_theta,
    simulate,
)

__all__ = ["CriterionResult", "AcceptanceContext", "CRITERIA", "evaluate", "run_all", "format_table", "verify"]

# Frozen from a first 10,000-step oracle run of the DF bank (mu = 0.99) on the
# Case (i) stream. ALPHA is lambda_min(omega^2) at k_e, BETA the largest
# lambda_max(omega^2) over the run, R_MAX_KE maps lambda to lambda_max(R(k_e)).
FROZEN_K_E = 4
FROZEN_ALPHA = 5.22262423940818e-09
FROZEN_BETA = 0.9852974448373023
FROZEN_R_MAX_KE = {0.99: 0.3242486812143196, 0.01: 0.2855034749495389}

BOUND_STEPS = 10_000
RANDOM_STREAMS = 10_000
TLF_CASE1 = ("TLF-RLS(DF,mu=0.99,lambda=0.01)", "TLF-RLS(DF,mu=0.99,lambda=0.99)")


@dataclass(frozen=True)
class CriterionResult:
    id: int
    title: str
    passed: bool
    detail: str

    def line(self):
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.id:>2}. {self.title}: {self.detail}"


class AcceptanceContext:
    """Shared inputs for the criteria.

    ``config`` supplies the plant vectors, input, tolerances, gamma and the
    Case (i) length; the method sets and the Case (ii) length are always the
    published ones because the criteria refer to those methods by name.
    """

    def __init__(self, config=None, random_streams=RANDOM_STREAMS, seed=None):
        self.config = config if config is not None else default_config("case1")
        self.random_streams = random_streams
        self.seed = self.config.seed if seed is None else seed

    def _derived(self, case_id, **extra):
        cfg = self.config
        return default_config(
            case_id,
            thetas=cfg.thetas,
            tolerances=cfg.tolerances,
            input=cfg.input,
            gamma=cfg.gamma,
            p_ceiling=cfg.p_ceiling,
            covariance_form=cfg.covariance_form,
            seed=cfg.seed,
            **extra,
        )

    @cached_property
    def case1_config(self):
        return self._derived("case1", steps=self.config.steps)

    @cached_property
    def case2_config(self):
        return self._derived("case2")

    @cached_property
    def case1(self):
        return run(self.case1_config)

    @cached_property
    def case2(self):
        return run(self.case2_config)

    @property
    def tol(self):
        return self.config.tolerances

    def thetas(self):
        return dict(self.config.thetas)

    def case1_stream(self, steps):
        return simulate(ChangeSchedule.from_labels(self.case1_config.schedule, self.thetas()), steps, self.config.input)


def criterion_1(ctx):
    """k_e reproduction on the Case (i) DF bank."""
    stream = ctx.case1.stream
    tol = ctx.tol
    bank = RegressorBank.fresh(4, "df", 0.99)
    mins = []
    for k in range(len(stream)):
        bank = update(bank, RegressorSample(stream.phi[k], stream.y_next[k]), tol)
        mins.append(min_eigenvalue(bank.omega))
    mins = np.array(mins)
    k_e = FROZEN_K_E
    if len(mins) <= k_e:
        return False, f"run has {len(mins)} steps; too short to reach k_e = {k_e}"
    singular_before = bool(np.all(mins[:k_e] <= 1e-12))
    pd_after = bool(np.all(mins[k_e:] > 1e-12))
    ok = singular_before and pd_after and bank.k_e == k_e
    return ok, (
        f"measured k_e={bank.k_e}, min lambda_min(omega) for k>=4 = {mins[k_e:].min():.4g}, "
        f"singular for k<4: {singular_before}"
    )


def criterion_2(ctx):
    """Windowed excitation of sum phi phi^T stays below 1e-6 (non-PE premise)."""
    stream = ctx.case1.stream
    w = windowed_min_eig(stream.phi, 50)
    worst = int(np.argmax(w))
    above = int(np.sum(w >= 1e-6))
    return bool(np.all(w < 1e-6)), (
        f"max windowed lambda_min = {w[worst]:.4g} at k={worst}; {above} of {len(w)} steps >= 1e-6"
    )


def criterion_3(ctx):
    """V(k+1) <= lam V(k) + 1e-9 for every step k >= k_e, both lambdas."""
    parts, ok = [], True
    for label in TLF_CASE1:
        t = ctx.case1.trace(label)
        k_e = t.k_e
        if k_e is None or len(t) < 2000:
            ok = False
            parts.append(f"{label}: run too short ({len(t)} steps, k_e={k_e})")
            continue
        expected = len(t) - k_e
        good = t.contraction_violations == 0 and t.contraction_checked == expected
        ok &= good
        parts.append(f"{label}: {t.contraction_violations} violations over {t.contraction_checked}/{expected} steps")
    return ok, "; ".join(parts)


def _bounded_run(ctx, lam, steps):
    stream = ctx.case1_stream(steps)
    tol = ctx.tol
    bank = RegressorBank.fresh(4, "df", 0.99)
    est = EstimatorState.initial(4, lam, ctx.config.gamma)
    r_min = np.empty(steps)
    r_max = np.empty(steps)
    woodbury = np.empty(steps)
    eye = np.eye(4)
    for k in range(steps):
        bank = update(bank, RegressorSample(stream.phi[k], stream.y_next[k]), tol)
        est = tlf_rls_step(est, bank.omega, bank.m_vec, tol, ctx.config.covariance_form)
        w = eigenvalues(est.r_mat)
        r_min[k], r_max[k] = w[0], w[-1]
        woodbury[k] = np.linalg.norm(est.p_mat @ est.r_mat - eye, np.inf)
    return bank.k_e, r_min, r_max, woodbury


def criterion_4(ctx):
    """Information-matrix bounds over 10,000 steps with frozen alpha/beta."""
    parts, ok = [], True
    for lam in (0.99, 0.01):
        k_e, r_min, r_max, _ = _bounded_run(ctx, lam, BOUND_STEPS)
        if k_e is None:
            ok = False
            parts.append(f"lambda={lam}: omega never positive definite")
            continue
        lower = 0.5 * FROZEN_ALPHA
        upper = FROZEN_R_MAX_KE[lam] + FROZEN_BETA / (1.0 - lam)
        lo_viol = int(np.sum(r_min[k_e:] < lower))
        hi_viol = int(np.sum(r_max[k_e:] > upper))
        ok &= lo_viol == 0 and hi_viol == 0
        parts.append(
            f"lambda={lam}: min lambda_min(R)={r_min[k_e:].min():.3g} (>= {lower:.3g}), "
            f"max lambda_max(R)={r_max[k_e:].max():.4g} (<= {upper:.4g}), {lo_viol + hi_viol} excursions"
        )
    return ok, "; ".join(parts)


def criterion_5(ctx):
    """|P R - I|_inf < 1e-6 at every TLF-RLS step of Case (i)."""
    steps = len(ctx.case1.stream)
    parts, ok = [], True
    for lam in (0.99, 0.01):
        _, _, _, wb = _bounded_run(ctx, lam, steps)
        worst = float(wb.max())
        ok &= bool(worst < 1e-6)
        parts.append(f"lambda={lam}: max {worst:.3g} at k={int(wb.argmax())}")
    return ok, "; ".join(parts)


def _synthetic_check(lam, mu, seed, steps=50):
    rng = np.random.default_rng(seed)
    theta_true = np.array([0.7, -1.3])
    bank = RegressorBank.fresh(2, "df", mu)
    est = EstimatorState.initial(2, lam, 1000.0)
    omegas, m_vecs, worst = [], [], 0.0
    for k in range(1, steps + 1):
        phi = np.array([math.sin(0.3 * k) + 0.5 * rng.standard_normal(), rng.standard_normal()])
        # Measurement noise keeps the minimizer away from theta_true.
        y = phi @ theta_true + 0.1 * rng.standard_normal()
        bank = update_df(bank, RegressorSample(phi, y))
        est = tlf_rls_step(est, bank.omega, bank.m_vec)
        omegas.append(np.array(bank.omega))
        m_vecs.append(np.array(bank.m_vec))
        ref = batch_minimizer(omegas, m_vecs, lam, np.eye(2) / 1000.0, np.zeros(2))
        worst = max(worst, float(np.max(np.abs(est.theta_hat - ref))))
    return worst


def criterion_6(ctx):
    """Recursion equals the closed-form minimizer (n=2), and the oracle recovers theta(a)."""
    worst = max(_synthetic_check(lam, mu, ctx.seed + i) for i, (lam, mu) in enumerate(((0.9, 0.5), (0.5, 0.99))))
    # Oracle on the configured Case (i) data at k = 50 with lambda = 0.01.
    stream = ctx.case1_stream(50)
    bank = RegressorBank.fresh(4, "df", 0.99)
    omegas, m_vecs = [], []
    for k in range(50):
        bank = update(bank, RegressorSample(stream.phi[k], stream.y_next[k]), ctx.tol)
        omegas.append(np.array(bank.omega))
        m_vecs.append(np.array(bank.m_vec))
    theta_a = np.array(PUBLISHED_THETA["a"])
    recovered = batch_minimizer(omegas, m_vecs, 0.01, np.eye(4) / ctx.config.gamma, np.zeros(4))
    gap = float(np.max(np.abs(recovered - theta_a)))
    ok = worst <= 1e-8 and gap <= 1e-6
    return ok, f"max |recursive - batch| over k<=50: {worst:.3g}; batch estimate vs published theta(a): {gap:.3g}"


def criterion_7(ctx):
    """Case (i) ordering at k = 2000 and the two threshold claims."""
    res = ctx.case1
    if len(res.stream) < 2000:
        return False, f"run has {len(res.stream)} steps; need 2000"
    err = {t.method: float(t.param_err[1999]) for t in res.traces.values()}
    tlf01 = err["TLF-RLS(DF,mu=0.99,lambda=0.01)"]
    tlf99 = err["TLF-RLS(DF,mu=0.99,lambda=0.99)"]
    dfcl = err["DF-CL(mu=0.5,gain=1)"]
    dcl = err["DCL(gain=1,capacity=4)"]
    ef99 = err["EF-RLS(lambda=0.99)"]
    ok = tlf01 < tlf99 < dfcl < dcl and ef99 > 1e-2 and tlf01 < 1e-8
    return ok, (
        f"TLF(0.01)={tlf01:.3g} < TLF(0.99)={tlf99:.3g} < DF-CL={dfcl:.3g} < DCL={dcl:.3g}; "
        f"EF-RLS(0.99)={ef99:.3g} (> 1e-2)"
    )


def criterion_8(ctx):
    """EF-RLS(lambda=0.01) raises the divergence flag before step 2000."""
    t = ctx.case1.trace("EF-RLS(lambda=0.01)")
    at = t.diverged_at()
    ok = at is not None and at < 2000
    return ok, f"diverged flag first raised at k={at}"


def criterion_9(ctx):
    """Case (ii): DF recovers within 300 steps of each change; the no-forgetting bank does not."""
    res = ctx.case2
    starts = [s for s, _ in res.config.schedule[1:]]
    df = res.trace("TLF-RLS(DF,mu=0.99,lambda=0.01)").param_err
    none = res.trace("TLF-RLS(none,lambda=0.01)").param_err
    parts, ok = [], True
    for s in starts:
        best = float(df[s: s + 301].min())
        ok &= best < 1e-3
        parts.append(f"min err in [{s}, {s + 300}] = {best:.3g}")
    floor = float(none[starts[0]:].min())
    ok &= floor > 1e-1
    parts.append(f"no-forgetting min err after k={starts[0]} = {floor:.3g}")
    return ok, "; ".join(parts)


def criterion_10(ctx):
    """Mean cond(P) over k in [1500, 2400]: DF inner below EF inner and EF-RLS(0.99)."""
    res = ctx.case2
    window = slice(1500, 2400)
    with np.errstate(invalid="ignore"):
        mean = {
            key: float(np.mean(res.trace(label).cond_P[window]))
            for key, label in (
                ("df", "TLF-RLS(DF,mu=0.99,lambda=0.01)"),
                ("ef_inner", "TLF-RLS(EF,mu=0.99,lambda=0.01)"),
                ("ef_rls", "EF-RLS(lambda=0.99)"),
            )
        }
    ok = mean["df"] < mean["ef_inner"] and mean["df"] < mean["ef_rls"]
    return ok, f"DF inner {mean['df']:.4g}; EF inner {mean['ef_inner']:.4g}; EF-RLS(0.99) {mean['ef_rls']:.4g}"


def _random_stream_check(rng, tol):
    n = int(rng.integers(1, 5))
    mode = ("df", "ef", "none")[int(rng.integers(3))]
    mu = float(rng.uniform(0.0, 1.0)) if mode != "none" else 0.0
    theta = rng.standard_normal(n)
    bank = RegressorBank.fresh(n, mode, mu)
    worst_psd, worst_res = 0.0, 0.0
    basis = rng.standard_normal((max(1, n - 1), n))
    for _ in range(int(rng.integers(1, 30))):
        draw = rng.random()
        if draw < 0.1:
            phi = np.zeros(n)
        elif draw < 0.5:
            # Confined to a lower-dimensional subspace: exercises the forgetting branch.
            phi = rng.standard_normal(basis.shape[0]) @ basis
        else:
            phi = rng.standard_normal(n) * 10.0 ** rng.uniform(-3, 2)
        bank = update(bank, RegressorSample(phi, phi @ theta), tol)
        w = eigenvalues(bank.omega)
        worst_psd = min(worst_psd, w[0] / max(1.0, w[-1]))
        worst_res = max(worst_res, consistency_residual(bank, theta))
    return worst_psd, worst_res


def _hand_examples(ctx):
    """(name, computed, expected, abs tolerance) for the hand-worked examples."""
    out = []
    add = out.append
    phi12 = np.array([1.0, 2.0])
    add(("min_eig I4", min_eigenvalue(np.eye(4)), 1.0, 1e-15))
    add(("min_eig diag(2,5)", min_eigenvalue(np.diag([2.0, 5.0])), 2.0, 1e-15))
    add(("min_eig rank-1", min_eigenvalue(np.outer(phi12, phi12)), 0.0, 1e-14))
    add(("rank zero", numerical_rank(np.zeros((4, 4))), 0, 0))
    add(("rank outer", numerical_rank(np.outer(phi12, phi12) / 6.0), 1, 0))
    add(("rank I4", numerical_rank(np.eye(4)), 4, 0))
    add(("cond I4", condition_number(np.eye(4)), 1.0, 1e-15))
    add(("cond diag(10,1)", condition_number(np.diag([10.0, 1.0])), 10.0, 1e-14))
    add(("cond singular", condition_number(np.outer(phi12, phi12)), math.inf, 0))
    add(("solve diag", solve_spd(np.diag([2.0, 4.0]), np.array([2.0, 4.0])), np.ones(2), 1e-15))
    add(("solve I", solve_spd(np.eye(3), np.array([1.0, -2.0, 3.0])), np.array([1.0, -2.0, 3.0]), 0))
    add(("sym_matrix", sym_matrix([[1.0, 2.0], [0.0, 1.0]]), np.array([[1.0, 1.0], [1.0, 1.0]]), 0))

    pbar, m = normalize(np.zeros(4))
    add(("normalize zero m", m, 1.0, 0))
    add(("normalize zero phi_bar", pbar, np.zeros(4), 0))
    pbar, m = normalize([2.0])
    add(("normalize [2] m", m, math.sqrt(5.0), 1e-15))
    add(("normalize [2] phi_bar", pbar, np.array([2.0 / math.sqrt(5.0)]), 1e-15))
    add(("normalize ones m", normalize(np.ones(4))[1], math.sqrt(5.0), 1e-15))

    e1 = np.array([1.0, 0.0])
    b = update_df(RegressorBank.fresh(2, "df", 0.99), RegressorSample(e1, 3.0))
    add(("df first omega", b.omega, np.array([[0.5, 0.0], [0.0, 0.0]]), 0))
    add(("df first M", b.m_vec, np.array([1.5, 0.0]), 0))
    phi = np.array([1.0, 2.0, -1.0])
    start = RegressorBank(np.outer(phi, phi) / (1 + phi @ phi), phi * 0.5 / (1 + phi @ phi), "df", 1.0)
    b = update_df(start, RegressorSample(phi, 0.5))
    add(("df repeat mu=1 omega", b.omega, np.outer(phi, phi) / (1 + phi @ phi), 1e-15))
    rng = np.random.default_rng(7)
    a = rng.standard_normal((3, 3))
    busy = RegressorBank(a @ a.T, rng.standard_normal(3), "ef", 1.0)
    b = update_ef(busy, RegressorSample(phi, 0.5))
    add(("ef mu=1 omega", b.omega, np.outer(phi, phi) / (1 + phi @ phi), 1e-15))
    b = update_ef(RegressorBank(np.eye(2), np.array([0.2, -0.4]), "ef", 0.5), RegressorSample(e1, 1.0))
    add(("ef I2 omega", b.omega, np.array([[1.0, 0.0], [0.0, 0.5]]), 0))
    add(("ef I2 M", b.m_vec, 0.5 * np.array([0.2, -0.4]) + np.array([0.5, 0.0]), 0))
    b = update_none(RegressorBank.fresh(2, "none", 0.0), RegressorSample(np.zeros(2), 1.0))
    add(("none zero phi", b.omega, np.zeros((2, 2)), 0))
    twice = RegressorBank.fresh(3, "none", 0.0)
    for _ in range(2):
        twice = update_none(twice, RegressorSample(phi, 1.0))
    add(("none twice", twice.omega, 2 * np.outer(phi, phi) / (1 + phi @ phi), 1e-15))
    add(("residual fresh", consistency_residual(RegressorBank.fresh(3), [1.0, 2.0, 3.0]), 0.0, 0))

    rep = excitation_report(np.tile([1.0, 0.0, 0.0], (5, 1)), RegressorBank.fresh(3), 4)
    add(("excitation constant e1", rep.min_eig_phi_outer, 0.0, 0))
    rep = excitation_report(np.eye(4), RegressorBank.fresh(4), 3)
    add(("excitation orthonormal", rep.min_eig_phi_outer, 1.0, 1e-15))

    est = EstimatorState(np.array([1.0]), np.array([[1.0]]), np.array([[1.0]]), 0.5)
    nxt = tlf_rls_step(est, np.array([[1.0]]), np.array([0.0]))
    add(("tlf scalar theta", nxt.theta_hat[0], 1.0 / 3.0, 1e-15))
    add(("tlf scalar P", nxt.p_mat[0, 0], 2.0 / 3.0, 1e-15))
    add(("tlf scalar R", nxt.r_mat[0, 0], 1.5, 1e-15))
    add(("tlf scalar P R", nxt.p_mat[0, 0] * nxt.r_mat[0, 0], 1.0, 1e-15))
    est = EstimatorState.initial(3, 0.8, 10.0, [1.0, -1.0, 2.0])
    nxt = tlf_rls_step(est, np.zeros((3, 3)), np.zeros(3))
    add(("tlf zero omega theta", nxt.theta_hat, est.theta_hat, 0))
    add(("tlf zero omega P", nxt.p_mat, est.p_mat / 0.8, 1e-12))

    # EF-RLS with lambda = 1 is outside the estimator's open range; the
    # scalar example is checked directly against the kernel formula.
    from . import _backend

    theta, p, _, _ = _backend.K.ef_rls_step(np.zeros(1), np.ones((1, 1)), np.ones((1, 1)), np.ones(1), 1.0, 1.0)
    add(("ef_rls scalar theta", theta[0], 0.5, 1e-15))
    add(("ef_rls scalar P", p[0, 0], 0.5, 1e-15))
    est = EstimatorState.initial(2, 0.9, 5.0, [0.3, 0.1])
    nxt = ef_rls_step(est, RegressorSample(np.zeros(2), 4.0))
    add(("ef_rls zero phi theta", nxt.theta_hat, est.theta_hat, 0))
    add(("ef_rls zero phi P", nxt.p_mat, est.p_mat / 0.9, 1e-12))

    nxt, _ = dcl_step(EstimatorState.initial(1, 0.5), RegressorSample([1.0], 1.0), CLMemory(1), GainConfig(1.0))
    add(("dcl scalar", nxt.theta_hat[0], 0.5, 1e-15))
    est = EstimatorState.initial(2, 0.5, theta0=[0.4, -0.2])
    nxt, _ = dcl_step(est, RegressorSample(np.zeros(2), 1.0), CLMemory(2))
    add(("dcl zero phi", nxt.theta_hat, est.theta_hat, 0))
    add(("dfcl zero omega", dfcl_step(est, np.zeros((2, 2)), np.zeros(2)).theta_hat, est.theta_hat, 0))
    tt = np.array([0.25, -1.5])
    add(("dfcl identity", dfcl_step(est, np.eye(2), tt).theta_hat, tt, 1e-15))

    theta_a = np.array(PUBLISHED_THETA["a"])
    est0 = EstimatorState.initial(4, 0.5)
    # Norm of the published case (a) vector, summed independently of numpy.
    norm_a = math.sqrt(math.fsum(v * v for v in PUBLISHED_THETA["a"]))
    add(("param_err case a", parameter_error(est0, theta_a), norm_a, 1e-15))
    add(("param_err e1", parameter_error(replace(est0, theta_hat=np.eye(4)[0]), np.zeros(4)), 1.0, 0))
    unit_r = replace(est0, r_mat=np.eye(4), theta_hat=np.array([1.0, 2.0, 0.0, -2.0]))
    add(("lyapunov R=I", lyapunov_value(unit_r, np.zeros(4)), 9.0, 1e-15))

    for label, expect in PUBLISHED_THETA.items():
        add((f"plant theta {label}", paper_theta(label).theta_true, np.array(expect), 0))
    add(("input k=0", input_signal(0), 0.0, 0))
    add(("input k=10", input_signal(10), 0.841471, 5e-7))
    configured = ChangeSchedule.from_labels([(0, "a"), (1, "b")], ctx.thetas()).entries
    model_a, model_b = configured[0][1], configured[1][1]
    add(("arx case a", arx_step(model_a, SimHistory(1.0, 0.0, 0.0, 0.0), 0.0)[0], 1.6405, 1e-15))
    add(("arx case b", arx_step(model_b, SimHistory(0.0, 0.0, 1.0, 1.0), 0.0)[0], 0.8433, 1e-15))
    sched = ChangeSchedule.from_labels([(0, "a"), (200, "b"), (1200, "c")])
    for k, label in ((0, "a"), (199, "a"), (200, "b"), (1199, "b"), (1200, "c")):
        add((f"schedule k={k}", schedule_theta(sched, k).label, label, None))
    return out


def _matches(computed, expected, tol):
    if tol is None:
        return computed == expected
    computed = np.asarray(computed, dtype=float)
    expected = np.asarray(expected, dtype=float)
    if computed.shape != expected.shape:
        return False
    same_inf = np.isinf(expected) & (computed == expected)
    with np.errstate(invalid="ignore"):
        close = np.abs(computed - expected) <= tol
    return bool(np.all(same_inf | close))


def criterion_11(ctx):
    """Bank property suites over random streams and the hand-worked examples."""
    rng = np.random.default_rng(ctx.seed)
    worst_psd, worst_res = 0.0, 0.0
    for _ in range(ctx.random_streams):
        psd, res = _random_stream_check(rng, DEFAULT_TOL)
        worst_psd, worst_res = min(worst_psd, psd), max(worst_res, res)
    psd_ok = worst_psd >= -1e-12
    res_ok = worst_res <= 1e-10

    gap = 0.0
    for _ in range(200):
        n = int(rng.integers(1, 5))
        a = rng.standard_normal((n, n))
        start_omega, start_m = a @ a.T, rng.standard_normal(n)
        ef = RegressorBank(start_omega, start_m, "ef", 0.0)
        none = RegressorBank(start_omega, start_m, "none", 0.0)
        for _ in range(10):
            s = RegressorSample(rng.standard_normal(n), float(rng.standard_normal()))
            ef, none = update_ef(ef, s), update_none(none, s)
        gap = max(gap, float(np.max(np.abs(ef.omega - none.omega))), float(np.max(np.abs(ef.m_vec - none.m_vec))))
    ef_ok = gap <= 1e-15

    examples = _hand_examples(ctx)
    failed = [name for name, got, want, tol in examples if not _matches(got, want, tol)]
    ok = psd_ok and res_ok and ef_ok and not failed
    detail = (
        f"{ctx.random_streams} streams: worst relative lambda_min {worst_psd:.3g}, "
        f"worst |omega theta - M| {worst_res:.3g}; ef(mu=0) vs none gap {gap:.3g}; "
        f"hand examples {len(examples) - len(failed)}/{len(examples)}"
    )
    if failed:
        detail += f" (failed: {', '.join(failed)})"
    return ok, detail


CRITERIA = (
    (1, "k_e reproduction", criterion_1),
    (2, "non-PE premise (windowed excitation < 1e-6)", criterion_2),
    (3, "Lyapunov contraction", criterion_3),
    (4, "information-matrix bounds", criterion_4),
    (5, "covariance/information duality", criterion_5),
    (6, "batch-oracle equivalence", criterion_6),
    (7, "Case (i) convergence ordering", criterion_7),
    (8, "EF-RLS(0.01) destabilization", criterion_8),
    (9, "Case (ii) recovery after changes", criterion_9),
    (10, "condition-number ordering", criterion_10),
    (11, "bank property suites and hand examples", criterion_11),
)


def evaluate(ctx, number):
    for cid, title, fn in CRITERIA:
        if cid == number:
            try:
                passed, detail = fn(ctx)
            except Exception as exc:  # reported, not raised: one broken check must not hide the others
                passed, detail = False, f"error: {type(exc).__name__}: {exc}"
            return CriterionResult(cid, title, bool(passed), detail)
    raise KeyError(number)


def run_all(ctx=None, only=None):
    ctx = ctx or AcceptanceContext()
    ids = [cid for cid, _, _ in CRITERIA if only is None or cid in only]
    return [evaluate(ctx, cid) for cid in ids]


def format_table(results):
    lines = [r.line() for r in results]
    passed = sum(r.passed for r in results)
    lines.append(f"{passed}/{len(results)} criteria passed")
    return "\n".join(lines)


def verify(config=None, only=None, out=print):
    """Run the checks for ``config``, print the table and return the exit status (0 or 2)."""
    results = run_all(AcceptanceContext(config), only)
    out(format_table(results))
    return 0 if all(r.passed for r in results) else 2
