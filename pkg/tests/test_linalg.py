import numpy as np
import pytest
from hypothesis import given, strategies as st

from discordkit import linalg
from discordkit.errors import DimensionMismatch, NotHermitian, NotSquare, ShapeMismatch
from discordkit.fixtures import random_density

import oracles

SZ = np.diag([1.0, -1.0]).astype(complex)
seeds = st.integers(0, 2**32 - 1)


def random_hermitian(rng, d):
    a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return 0.5 * (a + a.conj().T)


@pytest.mark.parametrize("method", ["lapack", "jacobi"])
def test_eigendecomposition_reconstructs_1000_matrices(method):
    rng = np.random.default_rng(101)
    n = 1000 if method == "lapack" else 200
    for _ in range(n):
        h = random_hermitian(rng, int(rng.integers(1, 17)))
        e = linalg.hermitian_eigendecomposition(h, method=method)
        v = e.eigenvectors
        assert np.linalg.norm(e.reconstruct() - h) < 1e-9
        assert np.linalg.norm(v.conj().T @ v - np.eye(len(h))) < 1e-10
        assert np.all(np.diff(e.eigenvalues) >= -1e-12)


def test_jacobi_and_lapack_agree_on_spectrum():
    rng = np.random.default_rng(7)
    for _ in range(100):
        h = random_hermitian(rng, int(rng.integers(2, 12)))
        a = linalg.hermitian_eigendecomposition(h, method="lapack").eigenvalues
        b = linalg.hermitian_eigendecomposition(h, method="jacobi").eigenvalues
        assert np.max(np.abs(a - b)) < 1e-10


def test_jacobi_handles_degenerate_and_diagonal_input():
    e = linalg.hermitian_eigendecomposition(np.eye(4), method="jacobi")
    assert np.allclose(e.eigenvalues, 1.0)
    u = np.linalg.qr(np.random.default_rng(0).standard_normal((5, 5)))[0]
    h = u @ np.diag([1, 1, 2, 2, 2]) @ u.T
    e = linalg.hermitian_eigendecomposition(h, method="jacobi")
    assert np.allclose(e.eigenvalues, [1, 1, 2, 2, 2])


def test_eigendecomposition_rejects_bad_input():
    with pytest.raises(NotSquare):
        linalg.hermitian_eigendecomposition(np.zeros((2, 3)))
    with pytest.raises(NotHermitian):
        linalg.hermitian_eigendecomposition(np.array([[0, 1], [0, 0]]))
    with pytest.raises(ValueError):
        linalg.hermitian_eigendecomposition(np.eye(2), method="qr")


def test_pauli_z_spectrum():
    e = linalg.hermitian_eigendecomposition(SZ)
    assert np.allclose(e.eigenvalues, [-1, 1])


def test_spectral_projectors_cluster_degenerate_eigenvalues():
    vals, projs = linalg.spectral_projectors(np.diag([0.5, 0.5 + 1e-12, 2.0]))
    assert len(vals) == 2
    assert [linalg.rank_of_projector(p) for p in projs] == [2, 1]
    assert np.allclose(sum(projs), np.eye(3))


def test_tensor_product_examples():
    assert np.allclose(linalg.tensor_product(SZ, SZ), np.diag([1, -1, -1, 1]))
    p = linalg.tensor_product(np.diag([1, 0]), np.diag([0, 1]))
    expected = np.zeros((4, 4))
    expected[1, 1] = 1
    assert np.allclose(p, expected)


def test_partial_trace_examples():
    rng = np.random.default_rng(3)
    rho, sigma = random_density(rng, 3), random_density(rng, 2)
    assert np.allclose(linalg.partial_trace(np.kron(rho, sigma), [3, 2], [0]), rho, atol=1e-12)
    assert np.allclose(linalg.partial_trace(oracles.bell_projector(), [2, 2], [0]), np.eye(2) / 2)
    assert np.allclose(linalg.partial_trace(np.eye(4) / 4, [2, 2], [1]), np.eye(2) / 2)


def test_partial_trace_rejects_wrong_dims():
    with pytest.raises(DimensionMismatch):
        linalg.partial_trace(np.eye(4), [2, 3], [0])


@given(seeds)
def test_partial_trace_composes(seed):
    rng = np.random.default_rng(seed)
    dims = [int(d) for d in rng.integers(1, 4, size=3)]
    rho = random_density(rng, int(np.prod(dims)))
    step = linalg.partial_trace(linalg.partial_trace(rho, dims, [0, 1]), dims[:2], [1])
    direct = linalg.partial_trace(rho, dims, [1])
    assert np.max(np.abs(step - direct)) < 1e-12
    assert np.max(np.abs(direct - oracles.ptrace3(rho, dims, [2]))) < 1e-12


@given(seeds)
def test_tensor_partial_trace_round_trip(seed):
    rng = np.random.default_rng(seed)
    da, db = (int(x) for x in rng.integers(1, 5, size=2))
    a = rng.standard_normal((da, da)) + 1j * rng.standard_normal((da, da))
    b = rng.standard_normal((db, db)) + 1j * rng.standard_normal((db, db))
    out = linalg.partial_trace(linalg.tensor_product(a, b), [da, db], [0])
    assert np.max(np.abs(out - a * np.trace(b))) < 1e-12


@given(seeds)
def test_trace_is_preserved(seed):
    rng = np.random.default_rng(seed)
    dims = [int(d) for d in rng.integers(1, 4, size=2)]
    m = random_hermitian(rng, int(np.prod(dims)))
    for keep in ([0], [1]):
        assert abs(np.trace(linalg.partial_trace(m, dims, keep)) - np.trace(m)) < 1e-12


def test_frobenius_distance_examples():
    assert linalg.frobenius_distance(np.eye(2), np.eye(2)) == 0.0
    assert linalg.frobenius_distance(SZ, -SZ) == pytest.approx(2 * np.sqrt(2), abs=1e-15)
    assert linalg.frobenius_distance(np.zeros((2, 2)), np.eye(2)) == pytest.approx(np.sqrt(2), abs=1e-15)
    with pytest.raises(ShapeMismatch):
        linalg.frobenius_distance(np.eye(2), np.eye(3))


def test_embed_places_operator_on_the_right_factor():
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    assert np.allclose(linalg.embed(x, [2, 3], 0), np.kron(x, np.eye(3)))
    assert np.allclose(linalg.embed(x, [3, 2, 2], 1), np.kron(np.kron(np.eye(3), x), np.eye(2)))


def test_complete_basis_is_deterministic_and_unitary():
    v = np.array([1, 1j, 0]) / np.sqrt(2)
    b1 = linalg.complete_basis(v, 3)
    b2 = linalg.complete_basis(v, 3)
    assert np.array_equal(b1, b2)
    assert np.allclose(b1[:, 0], v)
    assert np.allclose(b1.conj().T @ b1, np.eye(3), atol=1e-12)


def test_projector_helpers():
    p = linalg.projector(np.array([[1, 0], [0, 1], [0, 0]], dtype=complex))
    assert linalg.is_projector(p)
    assert linalg.rank_of_projector(p) == 2
    assert not linalg.is_projector(np.diag([1.0, 0.5]))
