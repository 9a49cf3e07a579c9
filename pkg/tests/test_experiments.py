import numpy as np
import pytest

from tlfrls.errors import ValidationError
from tlfrls.experiments import (
    ExperimentConfig,
    MethodSpec,
    RunResult,
    compute_summary,
    default_config,
    run,
)
from tlfrls.plant import PUBLISHED_THETA


def test_default_case1_settings():
    cfg = default_config("case1")
    assert cfg.steps == 2000 and cfg.schedule == ((0, "a"),)
    assert [m.label for m in cfg.methods] == [
        "EF-RLS(lambda=0.99)",
        "EF-RLS(lambda=0.01)",
        "DCL(gain=1,capacity=4)",
        "DF-CL(mu=0.5,gain=1)",
        "TLF-RLS(DF,mu=0.99,lambda=0.99)",
        "TLF-RLS(DF,mu=0.99,lambda=0.01)",
    ]


def test_default_case2_settings():
    cfg = default_config("case2")
    assert cfg.steps == 2400
    assert cfg.schedule == ((0, "a"), (200, "b"), (1200, "c"))
    assert [m.label for m in cfg.methods] == [
        "EF-RLS(lambda=0.99)",
        "TLF-RLS(DF,mu=0.99,lambda=0.01)",
        "TLF-RLS(DF,mu=0.01,lambda=0.01)",
        "TLF-RLS(EF,mu=0.99,lambda=0.01)",
        "TLF-RLS(none,lambda=0.01)",
    ]


def test_method_spec_normalizes_unused_fields():
    spec = MethodSpec("ef_rls", lam=0.5, mu=0.3, gain=1.5)
    assert spec.mu is None and spec.gain is None
    assert MethodSpec("tlf_rls", inner="none", mu=0.4).mu is None
    assert MethodSpec("dcl").capacity == 4


@pytest.mark.parametrize(
    "kwargs, field",
    [
        (dict(kind="nope"), "kind"),
        (dict(kind="ef_rls", lam=1.0), "ef_rls_lambda_1.lambda"),
        (dict(kind="tlf_rls", mu=1.0, name="t"), "t.mu"),
        (dict(kind="dfcl", gain=2.0, name="d"), "d.gain"),
        (dict(kind="dcl", capacity=3, name="d"), "d.capacity"),
    ],
)
def test_method_spec_validation(kwargs, field):
    with pytest.raises(ValidationError) as info:
        MethodSpec(**kwargs)
    assert info.value.field == field


def test_config_validation():
    with pytest.raises(ValidationError) as info:
        default_config("case1", steps=0)
    assert info.value.field == "steps"
    with pytest.raises(ValidationError):
        default_config("case1", schedule=((3, "a"),))
    with pytest.raises(ValidationError):
        default_config("case1", methods=(MethodSpec("dcl"), MethodSpec("dcl")))
    with pytest.raises(ValidationError):
        default_config("case1", thetas=(("a", (1.0, 2.0)),))
    with pytest.raises(ValidationError):
        default_config("case9")


def test_case1_traces(case1):
    assert isinstance(case1, RunResult)
    for trace in case1.traces.values():
        assert len(trace) == 2000
        assert trace.theta_hat.shape == (2000, 4)
    tlf = case1.trace("TLF-RLS(DF,mu=0.99,lambda=0.01)")
    assert tlf.k_e == 4 and tlf.contraction_violations == 0
    assert tlf.param_err[-1] < 1e-8
    assert case1.trace("EF-RLS(lambda=0.99)").param_err[-1] > 1e-2
    assert case1.trace("EF-RLS(lambda=0.01)").diverged.any()
    # The diverged baseline does not affect the others.
    for trace in case1.traces.values():
        if trace.method != "EF-RLS(lambda=0.01)":
            assert not trace.diverged.any()


def test_trace_record(case1):
    rec = case1.trace("tlf_rls_df_mu_0.99_lambda_0.01").record(10)
    assert rec.k == 10 and rec.method == "TLF-RLS(DF,mu=0.99,lambda=0.01)"
    assert rec.param_err == pytest.approx(np.linalg.norm(rec.theta_hat - PUBLISHED_THETA["a"]))
    with pytest.raises(KeyError):
        case1.trace("missing")


def test_gradient_baselines_have_no_covariance(case1):
    trace = case1.trace("DCL(gain=1,capacity=4)")
    assert np.isnan(trace.cond_P).all() and np.isnan(trace.min_eig_omega_sq).all()


def test_summary(case1):
    rows = {r["method"]: r for r in case1.summary}
    assert rows["TLF-RLS(DF,mu=0.99,lambda=0.99)"]["k_e"] == 4
    assert rows["TLF-RLS(DF,mu=0.99,lambda=0.99)"]["contraction_violations"] == 0
    assert rows["EF-RLS(lambda=0.01)"]["diverged_at"] is not None
    assert rows["EF-RLS(lambda=0.99)"]["k_e"] is None


def test_empty_method_list_gives_empty_summary():
    result = run(default_config("custom", steps=5))
    assert result.traces == {} and compute_summary(result) == []


def test_case2_switch_recovery_and_isolation(case2):
    none = case2.trace("TLF-RLS(none,lambda=0.01)")
    assert none.param_err[200:].min() > 1e-1
    df = case2.trace("TLF-RLS(DF,mu=0.99,lambda=0.01)")
    assert df.param_err[199] < 1e-8
    ef_inner = case2.trace("TLF-RLS(EF,mu=0.99,lambda=0.01)")
    assert ef_inner.diverged.any()
    assert np.isinf(ef_inner.cond_P[-1])
    assert df.cond_P[-1] < case2.trace("EF-RLS(lambda=0.99)").cond_P[-1]


def test_runs_are_deterministic():
    cfg = default_config("case2", steps=300)
    a, b = run(cfg), run(cfg)
    for label in a.traces:
        np.testing.assert_array_equal(a.traces[label].theta_hat, b.traces[label].theta_hat)
        np.testing.assert_array_equal(a.traces[label].cond_P, b.traces[label].cond_P)


def test_unstable_plant_marks_overflow():
    cfg = default_config(
        "custom",
        steps=80,
        methods=(MethodSpec("tlf_rls", lam=0.5),),
        thetas=(("a", (3.0, 0.0, 1.0, 0.0)),),
    )
    trace = run(cfg).trace("TLF-RLS(DF,mu=0.99,lambda=0.5)")
    assert trace.diverged[-1]
    assert np.isfinite(trace.param_err[: np.argmax(trace.diverged)]).all()


def test_identical_methods_are_kept_apart():
    cfg = default_config("custom", steps=20, methods=(MethodSpec("dcl", name="x"), MethodSpec("dcl", name="y")))
    result = run(cfg)
    assert list(result.traces) == ["x", "y"]
    np.testing.assert_array_equal(result.traces["x"].param_err, result.traces["y"].param_err)


def test_config_is_frozen():
    cfg = ExperimentConfig()
    with pytest.raises(AttributeError):
        cfg.steps = 3
