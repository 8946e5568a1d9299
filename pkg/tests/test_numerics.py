import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chcause import numerics as nx
from chcause.errors import DimensionError, NonFiniteError

from helpers import random_unitary


@pytest.mark.parametrize("eps", [0.0, -1e-9, 1e-3, 0.5])
def test_tolerance_rejects_out_of_range(eps):
    with pytest.raises(ValueError):
        nx.Tolerance(eps)


def test_eps_of_accepts_none_float_and_tolerance():
    assert nx.eps_of(None) == nx.DEFAULT_EPS == 1e-9
    assert nx.eps_of(1e-6) == 1e-6
    assert nx.eps_of(nx.Tolerance(1e-7)) == 1e-7


def test_mat_mul_names_both_shapes():
    with pytest.raises(DimensionError, match=r"\(2, 3\).*\(2, 2\)"):
        nx.mat_mul(np.ones((2, 3)), np.ones((2, 2)))


def test_trace_of_non_square_is_an_error():
    with pytest.raises(DimensionError):
        nx.trace(np.ones((2, 3)))
    assert nx.trace(np.eye(3)) == 3


def test_non_finite_entries_rejected():
    with pytest.raises(NonFiniteError):
        nx.as_matrix([[np.nan, 0], [0, 1]])
    with pytest.raises(NonFiniteError):
        nx.as_ket([1, np.inf])


def test_as_ket_accepts_column_vectors():
    assert nx.as_ket(np.ones((3, 1))).shape == (3,)
    with pytest.raises(DimensionError):
        nx.as_ket(np.ones((2, 2)))


def test_kron_all_dimensions():
    m = nx.kron_all(np.eye(2), np.eye(3), np.eye(2))
    assert m.shape == (12, 12)
    assert nx.approx_eq(m, np.eye(12))


def test_is_unitary():
    rng = np.random.default_rng(0)
    assert nx.is_unitary(random_unitary(4, rng))
    assert not nx.is_unitary(2 * np.eye(2))
    assert not nx.is_unitary(np.ones((2, 3)))


def test_extend_isometry_completes_to_unitary():
    r = 1 / np.sqrt(2)
    images = {0: np.array([0, r, r, 0]), 2: np.array([0, r, -r, 0])}
    u = nx.extend_isometry(4, images)
    assert nx.is_unitary(u)
    assert np.allclose(u[:, 0], images[0])
    assert np.allclose(u[:, 2], images[2])
    assert np.array_equal(u, nx.extend_isometry(4, images))


def test_extend_isometry_rejects_non_orthonormal_images():
    with pytest.raises(ValueError):
        nx.extend_isometry(2, {0: np.array([1, 0]), 1: np.array([1, 0])})
    with pytest.raises(DimensionError):
        nx.extend_isometry(3, {0: np.array([1, 0])})


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 3), st.integers(1, 3), st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_kron_is_associative_and_mixed_product(a, b, c, seed):
    rng = np.random.default_rng(seed)
    x, y, z = (random_unitary(n, rng) for n in (a, b, c))
    assert nx.approx_eq(nx.kron(nx.kron(x, y), z), nx.kron(x, nx.kron(y, z)))
    # (x (x) y)(x' (x) y') = xx' (x) yy'
    x2, y2 = random_unitary(a, rng), random_unitary(b, rng)
    assert nx.approx_eq(nx.kron(x, y) @ nx.kron(x2, y2), nx.kron(x @ x2, y @ y2))


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_adjoint_of_unitary_is_inverse(d, seed):
    u = random_unitary(d, np.random.default_rng(seed))
    assert nx.approx_eq(nx.mat_mul(nx.adjoint(u), u), nx.identity(d))
