import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tlfrls.cli import main
from tlfrls.config import dump_config, parse_config
from tlfrls.errors import ParseError, ValidationError
from tlfrls.experiments import MethodSpec, default_config
from tlfrls.linalg import Tolerances
from tlfrls.plant import InputSignal


def test_empty_file_gives_defaults():
    assert parse_config("", case="case1") == default_config("case1")
    assert parse_config("", case="case2") == default_config("case2")
    assert parse_config("case = case2\n") == default_config("case2")


def test_lambda_out_of_range_names_field():
    with pytest.raises(ValidationError) as info:
        parse_config("lambda = 1.5\n", case="case1")
    assert info.value.field == "lambda"


def test_global_lambda_applies_to_rls_methods():
    cfg = parse_config("lambda = 0.5\n", case="case1")
    lams = {m.kind: m.lam for m in cfg.methods}
    assert lams["ef_rls"] == 0.5 and lams["tlf_rls"] == 0.5 and lams["dcl"] is None


def test_overrides():
    cfg = parse_config("", case="case1", overrides=["steps=100"])
    assert cfg.steps == 100
    cfg = parse_config(
        "",
        case="case2",
        overrides=["input.frequency=0.2", "schedule.600=c", "tolerances.eps_rank=1e-8",
                   "method.tlf_rls_none_lambda_0.01.lambda=0.3"],
    )
    assert cfg.input.frequency == 0.2
    assert cfg.schedule == ((0, "a"), (200, "b"), (600, "c"), (1200, "c"))
    assert cfg.tolerances.eps_rank == 1e-8
    assert cfg.methods[-1].lam == 0.3
    with pytest.raises(ValidationError):
        parse_config("", case="case1", overrides=["method.nope.lambda=0.3"])
    with pytest.raises(ValidationError):
        parse_config("", case="case1", overrides=["bogus=1"])
    with pytest.raises(ValidationError):
        parse_config("", case="case1", overrides=["steps"])


def test_steps_zero_rejected():
    with pytest.raises(ValidationError) as info:
        parse_config("steps = 0\n", case="case1")
    assert info.value.field == "steps"


def test_method_sections_replace_defaults():
    text = """
steps = 50
[method fast]
kind = tlf_rls
lambda = 0.01
mu = 0.9
inner = ef
[method cl]
kind = dfcl
"""
    cfg = parse_config(text, case="custom")
    assert [m.name for m in cfg.methods] == ["fast", "cl"]
    assert cfg.methods[0] == MethodSpec("tlf_rls", lam=0.01, mu=0.9, inner="ef", name="fast")


@pytest.mark.parametrize(
    "text, line",
    [
        ("steps = 10\nthis is not a pair\n", 2),
        ("[input]\namplitude = 1\n[input]\n", 3),
        ("steps = 1\nsteps = 2\n", 2),
    ],
)
def test_parse_errors_carry_position(text, line):
    with pytest.raises(ParseError) as info:
        parse_config(text, case="case1")
    assert info.value.line == line and info.value.column >= 1
    assert f"line {line}" in str(info.value)


@pytest.mark.parametrize(
    "text, field",
    [
        ("steps = ten\n", "steps"),
        ("[input]\nphase = 1\n", "input.phase"),
        ("[tolerances]\neps_psd = 2\n", "tolerances.eps_psd"),
        ("[schedule]\n0 = a\n10 = q\n", "schedule.10"),
        ("[plant]\ntheta_a = 1, 2\n", "plant.theta_a"),
        ("[plant]\ntheta_z = 1, 2, 3, 4\n", "plant.theta_z"),
        ("[method m]\nlambda = 0.5\n", "m.kind"),
        ("[method m]\nkind = tlf_rls\ninner = xx\n", "m.inner"),
        ("[method m]\nkind = dcl\ncolour = red\n", "m.colour"),
        ("[wat]\n", "wat"),
        ("case = case2\n", "case"),
        ("covariance_form = qr\n", "covariance_form"),
        ("gamma = nan\n", "gamma"),
    ],
)
def test_validation_errors_name_field(text, field):
    with pytest.raises(ValidationError) as info:
        parse_config(text, case="case1")
    assert info.value.field == field


def test_custom_requires_methods():
    with pytest.raises(ValidationError):
        parse_config("", case="custom")


def test_dump_round_trip_defaults():
    for case in ("case1", "case2"):
        cfg = default_config(case)
        assert parse_config(dump_config(cfg)) == cfg


@settings(max_examples=60, deadline=None)
@given(
    steps=st.integers(1, 10_000),
    lam=st.floats(1e-6, 1 - 1e-6),
    mu=st.floats(0.0, 1 - 1e-6),
    gain=st.floats(1e-6, 2 - 1e-6),
    freq=st.floats(-10, 10),
    eps=st.floats(1e-15, 0.5),
    switch=st.integers(1, 5000),
    theta=st.lists(st.floats(-1e6, 1e6), min_size=4, max_size=4),
    form=st.sampled_from(["sqrt", "direct"]),
)
def test_dump_round_trip_random(steps, lam, mu, gain, freq, eps, switch, theta, form):
    cfg = default_config(
        "custom",
        steps=steps,
        methods=(
            MethodSpec("tlf_rls", lam=lam, mu=mu, inner="df"),
            MethodSpec("dfcl", mu=mu, gain=gain, name="cl"),
            MethodSpec("ef_rls", lam=lam),
        ),
        schedule=((0, "a"), (switch, "b")),
        thetas=(("b", tuple(theta)),),
        input=InputSignal(1.0, freq, 0.0),
        tolerances=Tolerances(eps_rank=eps),
        covariance_form=form,
    )
    assert parse_config(dump_config(cfg)) == cfg


def test_cli_case1_writes_csv(tmp_path, capsys):
    assert main(["case1", "--steps", "30", "--out", str(tmp_path)]) == 0
    names = sorted(p.name for p in tmp_path.iterdir())
    assert "summary.csv" in names and len(names) == 7
    assert "TLF-RLS(DF,mu=0.99,lambda=0.01)" in capsys.readouterr().out


def test_cli_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.ini"
    bad.write_text("lambda = 1.5\n")
    assert main(["case1", "--config", str(bad)]) == 1
    assert "lambda" in capsys.readouterr().err
    bad.write_text("oops\n")
    assert main(["case1", "--config", str(bad)]) == 1
    assert main(["case1", "--config", str(tmp_path / "missing.ini")]) == 3
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert main(["case1", "--steps", "5", "--out", str(blocker / "sub")]) == 3
    assert main(["custom", "--steps", "5"]) == 1


def test_cli_custom(tmp_path, capsys):
    cfg = tmp_path / "c.ini"
    cfg.write_text("steps = 20\n[method only]\nkind = tlf_rls\nlambda = 0.2\n")
    assert main(["custom", "--config", str(cfg), "--set", "method.only.mu=0.5"]) == 0
    assert "TLF-RLS(DF,mu=0.5,lambda=0.2)" in capsys.readouterr().out


def test_cli_verify_subset(capsys):
    assert main(["verify", "--only", "1,8"]) == 0
    out = capsys.readouterr().out
    assert "[PASS]  1." in out and "2/2 criteria passed" in out


def test_cli_verify_wrong_theta_fails_oracle_check(tmp_path, capsys):
    cfg = tmp_path / "wrong.ini"
    cfg.write_text("[plant]\ntheta_a = 1.6, -0.8, 0.46, 0.43\n")
    assert main(["verify", "--config", str(cfg), "--only", "6"]) == 2
    assert "[FAIL]  6." in capsys.readouterr().out


def test_cli_verify_short_run_fails_on_k_e(capsys):
    assert main(["verify", "--steps", "3", "--only", "1"]) == 2
    assert "too short" in capsys.readouterr().out


def test_verify_function_returns_status():
    from tlfrls import verify

    lines = []
    assert verify(None, only={8}, out=lines.append) == 0
    assert "EF-RLS(0.01) destabilization" in lines[0]
    assert verify(parse_config("steps = 3\n", case="case1"), only={7}, out=lines.append) == 2
