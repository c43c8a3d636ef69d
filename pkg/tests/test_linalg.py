import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from freespec.errors import ArityError, FieldError
from freespec.linalg import (MatrixTuple, ScalarField, SIGMA_X, SIGMA_Y, SIGMA_Z, direct_sum_tuples, kron,
                             lambda_max, lambda_min, psd_check, random_hermitian, real_embedding,
                             real_embedding_inverse, sym)


def test_scalar_field_of_and_join():
    assert ScalarField.of(np.eye(2)) is ScalarField.REAL
    assert ScalarField.of(np.eye(2, dtype=complex)) is ScalarField.REAL
    assert ScalarField.of(SIGMA_Y) is ScalarField.COMPLEX
    assert ScalarField.join(ScalarField.REAL, ScalarField.COMPLEX) is ScalarField.COMPLEX


def test_sym_takes_self_adjoint_part():
    m = np.array([[1.0, 2.0], [0.0, 3.0]])
    assert np.allclose(sym(m), [[1.0, 1.0], [1.0, 3.0]])
    with pytest.raises(ValueError):
        sym(np.ones((2, 3)))


def test_kron_matches_numpy_with_pencil_factor_first():
    a, b = SIGMA_Z, SIGMA_X
    assert np.allclose(kron(a, b), np.kron(a, b))


def test_pauli_eigenvalues():
    for s in (SIGMA_X, SIGMA_Y, SIGMA_Z):
        assert lambda_max(s) == pytest.approx(1.0)
        assert lambda_min(s) == pytest.approx(-1.0)


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=1, max_value=5), st.integers(min_value=0, max_value=10_000))
def test_real_embedding_preserves_spectrum(n, seed):
    rng = np.random.default_rng(seed)
    H = random_hermitian(n, rng, ScalarField.COMPLEX)
    R = real_embedding(H)
    assert np.allclose(R, R.T)
    ev = np.sort(np.linalg.eigvalsh(H))
    evr = np.sort(np.linalg.eigvalsh(R))
    # every eigenvalue appears twice in the real embedding
    assert np.allclose(evr, np.repeat(ev, 2))
    assert np.allclose(real_embedding_inverse(R), H)


def test_psd_check():
    assert psd_check(np.eye(3))
    assert psd_check(np.diag([1.0, 0.0]))
    assert not psd_check(np.diag([1.0, -1e-3]))


def test_matrix_tuple_arithmetic_and_errors():
    X = MatrixTuple.of([SIGMA_Z, SIGMA_X])
    Y = MatrixTuple.of([np.eye(2), np.eye(2)])
    assert X.g == 2 and X.n == 2 and X.field is ScalarField.REAL
    assert (X + Y - Y).allclose(X)
    assert (2 * X).allclose(X + X)
    with pytest.raises(ArityError):
        X + MatrixTuple.of([np.eye(2)])
    with pytest.raises(FieldError):
        X + X.astype(ScalarField.COMPLEX)
    with pytest.raises(FieldError):
        MatrixTuple(np.stack([SIGMA_Y]), ScalarField.REAL)


def test_matrix_tuple_is_symmetrized_and_read_only():
    X = MatrixTuple.of([np.array([[0.0, 2.0], [0.0, 0.0]])])
    assert np.allclose(X[0], SIGMA_X)
    with pytest.raises(ValueError):
        X.items[0, 0, 0] = 1.0


def test_conjugate_by_and_direct_sum():
    X = MatrixTuple.of([SIGMA_Z, SIGMA_X])
    H = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    Xh = X.conjugate_by(H)
    assert np.allclose(Xh[0], SIGMA_X) and np.allclose(Xh[1], SIGMA_Z)
    D = direct_sum_tuples(X, MatrixTuple.of([np.eye(1), -np.eye(1)]))
    assert D.n == 3 and np.allclose(D[1][2, 2], -1.0)


def test_commuting():
    assert MatrixTuple.of([np.diag([1.0, 2.0]), np.diag([3.0, -1.0])]).is_commuting()
    assert not MatrixTuple.of([SIGMA_Z, SIGMA_X]).is_commuting()


@pytest.mark.parametrize("field", [ScalarField.REAL, ScalarField.COMPLEX])
def test_tuple_json_round_trip(field, rng):
    X = MatrixTuple.of([random_hermitian(3, rng, field) for _ in range(2)], field)
    data = json.loads(json.dumps(X.to_json()))
    Y = MatrixTuple.from_json(data)
    assert Y.field is field
    assert Y.allclose(X, atol=0.0)


def test_real_embedding_of_tuple():
    X = MatrixTuple.of([SIGMA_Y], ScalarField.COMPLEX)
    R = X.real_embedding()
    assert R.field is ScalarField.REAL and R.n == 4
    assert np.allclose(np.sort(np.linalg.eigvalsh(R[0])), [-1, -1, 1, 1])
