import numpy as np
import pytest
from hypothesis import given, strategies as st

from discordkit import linalg
from discordkit.errors import DimensionMismatch, InvalidObservable, InvalidState, NotPure
from discordkit.fixtures import bell, example1, random_bipartite, random_density, random_observable, random_pure
from discordkit.states import (
    BipartiteState,
    DensityMatrix,
    Mixture,
    Observable,
    TripartiteState,
    lift_observable,
    luders_mixture,
    luders_selective,
    outcome_probabilities,
    purify,
    range_projector,
    reduce,
    schmidt_decomposition,
)

import oracles

seeds = st.integers(0, 2**32 - 1)
PLUS = np.full((2, 2), 0.5, dtype=complex)


def test_density_matrix_validation():
    DensityMatrix(np.eye(2) / 2)
    with pytest.raises(InvalidState):
        DensityMatrix(np.eye(2))
    with pytest.raises(InvalidState):
        DensityMatrix(np.diag([1.5, -0.5]))


def test_observable_validation():
    with pytest.raises(InvalidObservable):
        Observable((1.0, 1.0), (np.diag([1, 0]), np.diag([0, 1])))
    with pytest.raises(InvalidObservable):
        Observable((1.0,), (np.diag([1, 0]),))
    with pytest.raises(InvalidObservable):
        Observable((1.0, 2.0), (np.diag([1, 0]), PLUS))


def test_observable_from_matrix_groups_degenerate_eigenvalues():
    a = Observable.from_matrix(np.diag([3.0, 1.0, 3.0]))
    assert a.eigenvalues == (1.0, 3.0)
    assert a.ranks == [1, 2]
    assert not a.is_complete
    assert np.allclose(a.matrix, np.diag([3.0, 1.0, 3.0]))


def test_coarsen_adds_remainder_branch():
    a = Observable.computational(4)
    c = a.coarsen([(0, 2)])
    assert c.eigenvalues == (1.0, 0.0)
    assert np.allclose(c.projectors[0], np.diag([1, 0, 1, 0]))
    assert np.allclose(c.projectors[1], np.diag([0, 1, 0, 1]))


def test_reduce_examples():
    s, _ = bell()
    assert np.allclose(reduce(s, 1), np.eye(2) / 2)
    rng = np.random.default_rng(0)
    r1, r2 = random_density(rng, 2), random_density(rng, 3)
    assert np.allclose(BipartiteState(np.kron(r1, r2), 2, 3).reduce(2), r2)
    assert np.allclose(BipartiteState(np.eye(4) / 4, 2, 2).reduce(1), np.eye(2) / 2)


def test_lift_examples():
    sz = Observable.computational(2)
    lifted = lift_observable(sz, 2)
    assert np.allclose(lifted.projectors[0], np.kron(np.eye(2), np.diag([1, 0])))
    assert np.allclose(Observable.trivial(2).lift(3).projectors[0], np.eye(6))
    assert Observable.computational(3).lift(2).ranks == [2, 2, 2]


def test_outcome_probability_examples():
    s, sz = bell()
    assert np.allclose(outcome_probabilities(s.matrix, sz.lift(2)), [0.5, 0.5])
    assert np.allclose(outcome_probabilities(s.matrix, Observable.trivial(4)), [1.0])
    assert np.allclose(outcome_probabilities(np.diag([1, 0]), Observable.computational(2)), [1, 0])
    with pytest.raises(DimensionMismatch):
        outcome_probabilities(np.eye(3) / 3, Observable.computational(2))


def test_luders_examples():
    sz = Observable.computational(2)
    assert np.allclose(luders_mixture(PLUS, sz), np.eye(2) / 2)
    s, _ = bell()
    assert np.allclose(luders_mixture(s.matrix, sz.lift(2)), np.diag([0.5, 0, 0, 0.5]))
    rho = np.diag([0.3, 0.7])
    assert np.allclose(luders_mixture(rho, sz), rho)


def test_luders_selective_examples():
    s, sz = bell()
    p, st0 = luders_selective(s.matrix, sz.lift(2), 0)
    assert p == pytest.approx(0.5)
    assert np.allclose(st0, np.diag([1, 0, 0, 0]))
    p, st1 = luders_selective(np.diag([1.0, 0.0]), sz, 1)
    assert p == 0.0 and st1 is None
    # eigenprojector of the state itself
    rng = np.random.default_rng(4)
    rho = random_density(rng, 3)
    w, v = np.linalg.eigh(rho)
    obs = Observable.from_basis(v)
    for l in range(3):
        p, post = luders_selective(rho, obs, l)
        assert p == pytest.approx(w[l], abs=1e-12)
        assert np.allclose(post, np.outer(v[:, l], v[:, l].conj()))


@given(seeds)
def test_luders_properties(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(2, 6))
    rho = random_density(rng, d)
    a = random_observable(rng, d)
    once = luders_mixture(rho, a)
    assert abs(np.trace(once) - 1) < 1e-12
    assert np.linalg.norm(luders_mixture(once, a) - once) < 1e-12
    assert np.linalg.norm(linalg.commutator(a.matrix, once)) < 1e-10
    DensityMatrix(once)
    rebuilt = np.zeros_like(rho)
    for l in range(len(a)):
        p, post = luders_selective(rho, a, l)
        if post is not None:
            rebuilt += p * post
    assert np.linalg.norm(rebuilt - once) < 1e-10


def test_range_projector_examples():
    rng = np.random.default_rng(5)
    assert np.allclose(range_projector(random_density(rng, 3)), np.eye(3))
    v = random_pure(rng, 3)
    psi = np.outer(v, v.conj())
    assert np.allclose(range_projector(psi), psi)
    assert np.allclose(range_projector(np.diag([0.5, 0.5, 0])), np.diag([1, 1, 0]))


def test_purify_examples():
    s = purify(np.diag([1.0, 0.0]))
    assert s.d1 == 1
    s = purify(np.eye(2) / 2)
    assert np.allclose(s.reduce(2), np.eye(2) / 2)
    assert schmidt_decomposition(s).coefficients == pytest.approx([2 ** -0.5] * 2)
    s = purify(np.diag([0.7, 0.3]))
    assert schmidt_decomposition(s).coefficients == pytest.approx([0.7**0.5, 0.3**0.5])


def test_purify_reduces_back_on_200_states():
    rng = np.random.default_rng(11)
    for _ in range(200):
        d = int(rng.integers(1, 6))
        rho2 = random_density(rng, d, int(rng.integers(1, d + 1)))
        s = purify(rho2)
        assert np.linalg.norm(s.reduce(2) - rho2) < 1e-10
        assert s.d1 == np.linalg.matrix_rank(rho2, tol=1e-10)
        assert abs(oracles.entropy(s.matrix)) < 1e-9


def test_schmidt_examples():
    s = BipartiteState.from_vector([1, 0, 0, 0], 2, 2)
    assert schmidt_decomposition(s).coefficients == pytest.approx([1.0])
    s, _ = bell()
    assert schmidt_decomposition(s).coefficients == pytest.approx([2 ** -0.5] * 2)
    s, _ = example1()
    sd = schmidt_decomposition(s)
    assert sd.coefficients == pytest.approx([2 ** -0.5] * 2, abs=1e-12)
    # one right Schmidt vector is |i=3> up to phase
    overlaps = np.abs(sd.right_vectors[2, :])
    assert max(overlaps) == pytest.approx(1.0, abs=1e-12)


def test_schmidt_rejects_mixed_state():
    with pytest.raises(NotPure):
        schmidt_decomposition(BipartiteState(np.eye(4) / 4, 2, 2))


@given(seeds)
def test_schmidt_reconstructs_projector_and_spectrum(seed):
    rng = np.random.default_rng(seed)
    d1, d2 = (int(x) for x in rng.integers(1, 5, size=2))
    s = BipartiteState.from_vector(random_pure(rng, d1 * d2), d1, d2)
    sd = schmidt_decomposition(s)
    v = sd.vector()
    # the state vector is fixed only up to a global phase
    assert np.linalg.norm(np.outer(v, v.conj()) - s.matrix) < 1e-9
    assert abs(np.sum(sd.coefficients**2) - 1) < 1e-10
    assert np.all(np.diff(sd.coefficients) <= 1e-15)
    for red in (s.reduce(1), s.reduce(2)):
        w = np.sort(np.linalg.eigvalsh(red))[::-1][: len(sd.coefficients)]
        assert np.max(np.abs(w - sd.coefficients**2)) < 1e-9


def test_mixture_drops_zero_weight_states():
    m = Mixture(np.array([1.0, 0.0]), (np.eye(2) / 2, np.eye(2) / 2))
    assert m.states[1] is None
    assert m.support == [0]
    with pytest.raises(InvalidState):
        Mixture(np.array([0.5, 0.4]), (np.eye(2) / 2, np.eye(2) / 2))


def test_tripartite_marginals_and_cuts():
    rng = np.random.default_rng(9)
    r = random_density(rng, 12)
    t = TripartiteState(r, 2, 3, 2)
    assert np.allclose(t.marginal([2]), oracles.ptrace3(r, [2, 3, 2], [2]))
    assert t.split([1]).dims == (2, 6)
    assert t.split([1, 2]).dims == (6, 2)
    with pytest.raises(ValueError):
        t.split([2])


def test_random_bipartite_has_requested_rank():
    s = random_bipartite(np.random.default_rng(7), 3, 3, 4)
    assert np.linalg.matrix_rank(s.matrix, tol=1e-10) == 4
