import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from tlfrls.linalg import (
    DEFAULT_TOL,
    NotPositiveDefinite,
    Tolerances,
    condition_number,
    eigenvalues,
    max_eigenvalue,
    min_eigenvalue,
    numerical_rank,
    solve_spd,
    sym_matrix,
)

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


def test_min_eigenvalue_examples():
    assert min_eigenvalue(np.eye(4)) == 1.0
    assert min_eigenvalue(np.diag([2.0, 5.0])) == 2.0
    phi = np.array([1.0, 2.0])
    assert abs(min_eigenvalue(np.outer(phi, phi))) < 1e-14


def test_rank_examples():
    assert numerical_rank(np.zeros((4, 4))) == 0
    phi = np.array([0.3, -1.0, 2.0, 0.5])
    assert numerical_rank(np.outer(phi, phi) / (1 + phi @ phi)) == 1
    assert numerical_rank(np.eye(4)) == 4


def test_condition_number_examples():
    assert condition_number(np.eye(4)) == 1.0
    assert condition_number(np.diag([10.0, 1.0])) == pytest.approx(10.0, rel=1e-15)
    assert condition_number(np.outer([1.0, 2.0], [1.0, 2.0])) == np.inf
    assert condition_number(np.full((2, 2), np.inf)) == np.inf


def test_solve_examples():
    np.testing.assert_allclose(solve_spd(np.diag([2.0, 4.0]), np.array([2.0, 4.0])), [1.0, 1.0], atol=1e-15)
    b = np.array([3.0, -1.0])
    np.testing.assert_array_equal(solve_spd(np.eye(2), b), b)


def test_solve_random_spd_round_trip():
    rng = np.random.default_rng(3)
    a = rng.standard_normal((4, 4))
    a = a @ a.T + 0.5 * np.eye(4)
    x = rng.standard_normal(4)
    np.testing.assert_allclose(solve_spd(a, a @ x), x, atol=1e-10)


def test_solve_rejects_singular():
    with pytest.raises(NotPositiveDefinite):
        solve_spd(np.outer([1.0, 2.0], [1.0, 2.0]), np.ones(2))
    with pytest.raises(np.linalg.LinAlgError):
        solve_spd(-np.eye(2), np.ones(2))


def test_sym_matrix_enforces_symmetry():
    s = sym_matrix([[1.0, 2.0], [0.0, 3.0]])
    np.testing.assert_array_equal(s, s.T)
    assert sym_matrix(2.0).shape == (1, 1)
    with pytest.raises(ValueError):
        sym_matrix([[1.0, 2.0, 3.0]])


def test_eigenvalues_of_non_finite_are_nan():
    w = eigenvalues(np.array([[np.nan, 0.0], [0.0, 1.0]]))
    assert np.isnan(w).all()


def test_tolerances_validated():
    assert DEFAULT_TOL == Tolerances(1e-9, 1e-12, 1e-12)
    for bad in (0.0, 1.0, -1e-3):
        with pytest.raises(ValueError):
            Tolerances(eps_rank=bad)


@settings(max_examples=200, deadline=None)
@given(arrays(np.float64, (4, 4), elements=finite), st.permutations(range(4)))
def test_rank_invariant_under_permutation(a, perm):
    s = a @ a.T
    p = np.eye(4)[list(perm)]
    assert numerical_rank(p @ s @ p.T) == numerical_rank(s)


@settings(max_examples=200, deadline=None)
@given(arrays(np.float64, (3, 3), elements=finite))
def test_eigenvalues_sorted_and_bracketed(a):
    s = sym_matrix(a)
    w = eigenvalues(s)
    assert np.all(np.diff(w) >= 0)
    assert min_eigenvalue(s) == w[0] and max_eigenvalue(s) == w[-1]
    np.testing.assert_allclose(w.sum(), np.trace(s), atol=1e-9 * max(1.0, np.abs(s).max()))
