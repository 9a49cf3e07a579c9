import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tlfrls.bank import (
    InnerMode,
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
from tlfrls.linalg import eigenvalues, min_eigenvalue
from tlfrls.plant import ChangeSchedule, simulate


def _feed(bank, phis, ys):
    for phi, y in zip(phis, ys):
        bank = update(bank, RegressorSample(phi, y))
    return bank


def test_normalize_examples():
    pbar, m = normalize(np.zeros(4))
    assert m == 1.0 and not pbar.any()
    pbar, m = normalize([2.0])
    assert m == pytest.approx(math.sqrt(5.0), abs=1e-15)
    assert pbar[0] == pytest.approx(2.0 / math.sqrt(5.0), abs=1e-15)
    assert normalize(np.ones(4))[1] == pytest.approx(math.sqrt(5.0), abs=1e-15)


def test_sample_rejects_non_finite():
    with pytest.raises(ValueError):
        RegressorSample([1.0, np.nan], 0.0)
    with pytest.raises(ValueError):
        RegressorSample([1.0], np.inf)


def test_df_first_sample_accumulates():
    b = update_df(RegressorBank.fresh(2, "df", 0.99), RegressorSample([1.0, 0.0], 3.0))
    np.testing.assert_array_equal(b.omega, [[0.5, 0.0], [0.0, 0.0]])
    np.testing.assert_array_equal(b.m_vec, [1.5, 0.0])
    assert b.step == 1 and b.k_e is None


def test_df_full_forgetting_cancels_repeated_direction():
    phi = np.array([1.0, 2.0, -1.0])
    m2 = 1 + phi @ phi
    bank = RegressorBank(np.outer(phi, phi) / m2, 0.7 * phi / m2, "df", 1.0)
    b = update_df(bank, RegressorSample(phi, 0.2))
    np.testing.assert_allclose(b.omega, np.outer(phi, phi) / m2, atol=1e-15)
    np.testing.assert_allclose(b.m_vec, 0.2 * phi / m2, atol=1e-15)


def test_df_only_forgets_excited_direction():
    bank = RegressorBank(np.eye(2), np.array([1.0, 2.0]), "df", 0.5)
    b = update_df(bank, RegressorSample([1.0, 0.0], 1.0))
    # Orthogonal direction untouched; excited one halved then refreshed.
    np.testing.assert_allclose(b.omega, [[1.0, 0.0], [0.0, 1.0]], atol=1e-15)
    np.testing.assert_allclose(b.m_vec, [0.5 + 0.5, 2.0], atol=1e-15)


def test_df_zero_regressor_only_advances():
    bank = RegressorBank(np.eye(2), np.ones(2), "df", 0.5)
    b = update_df(bank, RegressorSample([0.0, 0.0], 5.0))
    np.testing.assert_array_equal(b.omega, bank.omega)
    np.testing.assert_array_equal(b.m_vec, bank.m_vec)
    assert b.step == 1


def test_ef_examples():
    b = update_ef(RegressorBank(np.eye(2), np.array([0.2, -0.4]), "ef", 0.5), RegressorSample([1.0, 0.0], 1.0))
    np.testing.assert_array_equal(b.omega, [[1.0, 0.0], [0.0, 0.5]])
    np.testing.assert_array_equal(b.m_vec, [0.1 + 0.5, -0.2])
    phi = np.array([2.0, -1.0])
    b = update_ef(RegressorBank(5 * np.eye(2), np.ones(2), "ef", 1.0), RegressorSample(phi, 3.0))
    np.testing.assert_allclose(b.omega, np.outer(phi, phi) / 6.0, atol=1e-15)


def test_none_examples():
    phi = np.array([1.0, 1.0, 0.0])
    b = _feed(RegressorBank.fresh(3, "none", 0.0), [phi, phi], [1.0, 1.0])
    np.testing.assert_allclose(b.omega, 2 * np.outer(phi, phi) / 3.0, atol=1e-15)
    b = update_none(RegressorBank.fresh(2, "none", 0.0), RegressorSample([0.0, 0.0], 1.0))
    assert not b.omega.any()


def test_none_grows_linearly():
    phi = np.array([1.0, 0.5])
    lmax = []
    b = RegressorBank.fresh(2, "none", 0.0)
    for k in range(1, 6):
        b = update_none(b, RegressorSample(phi, 0.0))
        lmax.append(eigenvalues(b.omega)[-1])
    np.testing.assert_allclose(np.diff(lmax), (phi @ phi) / (1 + phi @ phi), rtol=1e-12)


def test_mode_mismatch_raises():
    s = RegressorSample([1.0], 1.0)
    with pytest.raises(ValueError):
        update_df(RegressorBank.fresh(1, "ef", 0.5), s)
    with pytest.raises(ValueError):
        update_ef(RegressorBank.fresh(1, "none", 0.0), s)
    with pytest.raises(ValueError):
        update_none(RegressorBank.fresh(1, "df", 0.5), s)
    with pytest.raises(ValueError):
        RegressorBank.fresh(2, "df", 1.5)
    with pytest.raises(ValueError):
        RegressorBank.fresh(2, "xx", 0.5)


def test_case1_stream_excites_after_four_steps():
    stream = simulate(ChangeSchedule.from_labels([(0, "a")]), 300)
    bank = RegressorBank.fresh(4, InnerMode.DF, 0.99)
    for k in range(300):
        bank = update(bank, RegressorSample(stream.phi[k], stream.y_next[k]))
        if k >= 4:
            assert min_eigenvalue(bank.omega) > 0
            assert excitation_report(stream.phi[: k + 1], bank, 0).min_eig_omega_sq > 0
        else:
            assert min_eigenvalue(bank.omega) <= 1e-12
    assert bank.k_e == 4


def test_consistency_residual():
    theta = np.array([0.5, -1.0, 2.0])
    assert consistency_residual(RegressorBank.fresh(3), theta) == 0.0
    rng = np.random.default_rng(1)
    phis = rng.standard_normal((20, 3))
    bank = _feed(RegressorBank.fresh(3, "df", 0.9), phis, phis @ theta)
    assert consistency_residual(bank, theta) <= 1e-10
    assert bank.k_e is not None
    assert consistency_residual(bank, theta + np.eye(3)[0]) > 0


def test_excitation_report_examples():
    rep = excitation_report(np.tile([1.0, 0.0], (6, 1)), RegressorBank.fresh(2), 5)
    assert rep.min_eig_phi_outer == 0.0 and rep.level_alpha == 0.0
    rep = excitation_report(np.eye(4), RegressorBank.fresh(4), 3)
    assert rep.min_eig_phi_outer == pytest.approx(1.0, abs=1e-15)
    assert rep.window_delta == 3
    with pytest.raises(ValueError):
        excitation_report(np.eye(2), RegressorBank.fresh(2), -1)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.0, 1.0), st.sampled_from(["df", "ef", "none"]))
def test_psd_and_linearity_preserved(seed, mu, mode):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 5))
    theta = rng.standard_normal(n)
    basis = rng.standard_normal((max(1, n - 1), n))
    bank = RegressorBank.fresh(n, mode, mu)
    for _ in range(25):
        phi = rng.standard_normal(basis.shape[0]) @ basis if rng.random() < 0.5 else rng.standard_normal(n)
        bank = update(bank, RegressorSample(phi, phi @ theta))
        w = eigenvalues(bank.omega)
        assert w[0] >= -1e-12 * max(1.0, w[-1])
        np.testing.assert_array_equal(bank.omega, bank.omega.T)
        assert consistency_residual(bank, theta) <= 1e-10


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_ef_with_zero_mu_is_accumulation(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 5))
    ef, none = RegressorBank.fresh(n, "ef", 0.0), RegressorBank.fresh(n, "none", 0.0)
    for _ in range(10):
        s = RegressorSample(rng.standard_normal(n), rng.standard_normal())
        ef, none = update_ef(ef, s), update_none(none, s)
    np.testing.assert_array_equal(ef.omega, none.omega)
    np.testing.assert_array_equal(ef.m_vec, none.m_vec)
