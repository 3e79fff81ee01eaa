"""Seeded state and observable generators, plus the named fixtures.

Every random generator takes a ``numpy.random.Generator``; nothing here
touches global random state.
"""

from __future__ import annotations

from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

from . import linalg
from .errors import UnknownFixture
from .states import BipartiteState, Mixture, Observable


# -- random building blocks -------------------------------------------------

def ginibre(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def random_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    """Haar-distributed unitary (QR of a Ginibre matrix with the phase fix)."""
    q, r = np.linalg.qr(ginibre(rng, d, d))
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_density(rng: np.random.Generator, d: int, rank: Optional[int] = None) -> np.ndarray:
    """Random state of the given rank (full rank by default) via ``G G^dagger``."""
    rank = d if rank is None else rank
    g = ginibre(rng, d, rank)
    m = g @ g.conj().T
    return m / np.real(np.trace(m))


def random_pure(rng: np.random.Generator, d: int) -> np.ndarray:
    v = ginibre(rng, d, 1)[:, 0]
    return v / np.linalg.norm(v)


def random_grouping(rng: np.random.Generator, n: int, groups: int) -> list[list[int]]:
    """Split ``range(n)`` into ``groups`` nonempty random classes."""
    perm = rng.permutation(n)
    cuts = np.sort(rng.choice(np.arange(1, n), size=groups - 1, replace=False)) if groups > 1 else []
    return [sorted(int(i) for i in c) for c in np.split(perm, cuts)]


def observable_from_groups(basis: np.ndarray, groups: Sequence[Sequence[int]]) -> Observable:
    projs = [linalg.projector(basis[:, list(g)]) for g in groups]
    return Observable.from_projectors(projs)


def random_observable(rng: np.random.Generator, d: int, branches: Optional[int] = None) -> Observable:
    """Random observable with ``branches`` eigenspaces (complete when ``branches == d``)."""
    branches = d if branches is None else branches
    return observable_from_groups(random_unitary(rng, d), random_grouping(rng, d, branches))


def random_bipartite(rng: np.random.Generator, d1: int, d2: int, rank: Optional[int] = None) -> BipartiteState:
    """Random state of ``d1 x d2`` by tracing a random purification."""
    return BipartiteState(random_density(rng, d1 * d2, rank), d1, d2)


def random_refinement_pair(rng: np.random.Generator, d: int):
    """``(coarse, fine)`` observables where ``fine`` refines ``coarse``."""
    fine = random_observable(rng, d, int(rng.integers(1, d + 1)))
    n = len(fine)
    coarse = Observable.from_projectors(
        [sum(fine.projectors[i] for i in g) for g in random_grouping(rng, n, int(rng.integers(1, n + 1)))]
    )
    return coarse, fine


def random_mixture(rng: np.random.Generator, d: int, n: int, orthogonal: bool = False) -> Mixture:
    """Mixture of ``n`` random components, pairwise orthogonal on request.

    Orthogonal mixtures place each component on its own block of a random
    basis, so ``n <= d`` is required then.
    """
    w = rng.dirichlet(np.ones(n))
    if not orthogonal:
        return Mixture(w, tuple(random_density(rng, d, int(rng.integers(1, d + 1))) for _ in range(n)))
    u = random_unitary(rng, d)
    states = []
    for g in random_grouping(rng, d, n):
        v = u[:, g]
        k = len(g)
        sub = random_density(rng, k, int(rng.integers(1, k + 1)))
        states.append(v @ sub @ v.conj().T)
    return Mixture(w, tuple(states))


def _block_split(rng: np.random.Generator, d: int, blocks: int) -> list[np.ndarray]:
    """Orthonormal column blocks of a random unitary, contiguous random sizes."""
    u = random_unitary(rng, d)
    sizes = np.diff(np.concatenate([[0], np.sort(rng.choice(np.arange(1, d), size=blocks - 1, replace=False)), [d]])) if blocks > 1 else [d]
    out, start = [], 0
    for sz in sizes:
        out.append(u[:, start:start + int(sz)])
        start += int(sz)
    return out


def random_structured_bipartite(rng: np.random.Generator, d1: int, d2: int):
    """A state with block structure and an observable adapted to it.

    The state is an orthogonal (in both subsystems) mixture of blocks. Each
    block is either a product, a classical-quantum mixture along a local
    basis, or a generic state. The returned observable is built inside the
    nearby blocks, and is sometimes aligned with the classical bases, so
    the coarsening string tends to be nontrivial at every stage.
    Returns ``(state, observable)``.
    """
    blocks = int(rng.integers(1, min(d1, d2, 3) + 1))
    left = _block_split(rng, d1, blocks)
    right = _block_split(rng, d2, blocks)
    w = rng.dirichlet(np.ones(blocks))
    rho = np.zeros((d1 * d2, d1 * d2), dtype=complex)
    vecs2, groups = [], []
    for k in range(blocks):
        v1, v2 = left[k], right[k]
        k1, k2 = v1.shape[1], v2.shape[1]
        kind = rng.integers(3)
        if kind == 0:
            r1 = random_density(rng, k1, int(rng.integers(1, k1 + 1)))
            r2 = random_density(rng, k2)
            local = np.kron(r1, r2)
            basis2 = random_unitary(rng, k2)
        elif kind == 1:
            basis2 = random_unitary(rng, k2)
            q = rng.dirichlet(np.ones(k2))
            r1s = [random_density(rng, k1, int(rng.integers(1, k1 + 1))) for _ in range(k2)]
            if k2 > 1 and rng.random() < 0.5:
                r1s[1] = r1s[0]
            local = sum(q[j] * np.kron(r1s[j], linalg.projector(basis2[:, j])) for j in range(k2))
            if rng.random() < 0.3:
                basis2 = random_unitary(rng, k2)
        else:
            local = random_density(rng, k1 * k2, int(rng.integers(1, k1 * k2 + 1)))
            basis2 = random_unitary(rng, k2)
        emb = np.kron(v1, v2)
        rho += w[k] * emb @ local @ emb.conj().T
        cols = v2 @ basis2
        start = len(vecs2)
        vecs2.extend(cols.T)
        groups.extend([[start + g for g in grp] for grp in random_grouping(rng, k2, int(rng.integers(1, k2 + 1)))])
    basis = np.column_stack(vecs2)
    state = BipartiteState(0.5 * (rho + rho.conj().T), d1, d2)
    return state, observable_from_groups(basis, groups)


# -- zero-discord constructions ----------------------------------------------

class ZeroDiscordFixture(NamedTuple):
    state: BipartiteState
    observable: Observable
    blocks: list  # nearby range projectors of the admixed products


def _mono_orthogonal_blocks(rng: np.random.Generator, d1: int, d2: int, blocks: int):
    right = _block_split(rng, d2, blocks)
    w = rng.dirichlet(np.ones(blocks))
    r1 = [random_density(rng, d1) for _ in range(blocks)]
    return right, w, r1


def strong_zero_state(rng: np.random.Generator, d1: int, d2: int) -> ZeroDiscordFixture:
    """Mixture of products with orthogonal nearby parts and an observable commuting with each.

    The discord is a strong zero.
    """
    blocks = int(rng.integers(1, d2 + 1))
    right, w, r1 = _mono_orthogonal_blocks(rng, d1, d2, blocks)
    rho = np.zeros((d1 * d2, d1 * d2), dtype=complex)
    vecs = []
    for k in range(blocks):
        v = right[k]
        r2 = random_density(rng, v.shape[1])
        _, ev = np.linalg.eigh(r2)
        vecs.extend((v @ ev).T)
        rho += w[k] * np.kron(r1[k], v @ r2 @ v.conj().T)
    basis = np.column_stack(vecs)
    obs = observable_from_groups(basis, random_grouping(rng, d2, int(rng.integers(1, d2 + 1))))
    return ZeroDiscordFixture(BipartiteState(0.5 * (rho + rho.conj().T), d1, d2), obs, [linalg.projector(v) for v in right])


def weak_zero_state(rng: np.random.Generator, d1: int, d2: int, min_local: float = 1e-3) -> ZeroDiscordFixture:
    """Mixture of products with orthogonal nearby parts and an observable
    that respects the blocks but not the states inside them.

    Needs ``d2 >= 2``. The discord is a weak zero with local coherence at
    least ``min_local``.
    """
    from .measures import coherence_information

    if d2 < 2:
        raise ValueError("a weak zero needs d2 >= 2")
    while True:
        blocks = int(rng.integers(1, d2))  # leaves at least one block of size >= 2
        right, w, r1 = _mono_orthogonal_blocks(rng, d1, d2, blocks)
        rho = np.zeros((d1 * d2, d1 * d2), dtype=complex)
        vecs = []
        for k in range(blocks):
            v = right[k]
            r2 = random_density(rng, v.shape[1])
            vecs.extend((v @ random_unitary(rng, v.shape[1])).T)
            rho += w[k] * np.kron(r1[k], v @ r2 @ v.conj().T)
        obs = observable_from_groups(np.column_stack(vecs), random_grouping(rng, d2, int(rng.integers(2, d2 + 1))))
        state = BipartiteState(0.5 * (rho + rho.conj().T), d1, d2)
        if coherence_information(obs, state.reduce(2)) >= min_local:
            return ZeroDiscordFixture(state, obs, [linalg.projector(v) for v in right])


def barrier_state(rng: np.random.Generator, d1: int = 2, min_gap: float = 0.1) -> BipartiteState:
    """Slightly noisy entangled state on ``d1 x 2`` with ``I12 - S1 > min_gap``."""
    from .measures import mutual_information, von_neumann_entropy

    while True:
        psi = random_pure(rng, d1 * 2)
        eps = 0.2 * rng.random()
        rho = (1 - eps) * np.outer(psi, psi.conj()) + eps * random_density(rng, d1 * 2)
        s = BipartiteState(0.5 * (rho + rho.conj().T), d1, 2)
        if mutual_information(s) - von_neumann_entropy(s.reduce(1)) > min_gap:
            return s


# -- named states ------------------------------------------------------------

def bell() -> tuple[BipartiteState, Observable]:
    v = np.zeros(4)
    v[0] = v[3] = 1.0
    return BipartiteState.from_vector(v, 2, 2), Observable.computational(2)


def product() -> tuple[BipartiteState, Observable]:
    r1 = np.array([[0.6, 0.2], [0.2, 0.4]])
    r2 = np.diag([0.7, 0.3])
    return BipartiteState(np.kron(r1, r2), 2, 2), Observable.computational(2)


def classical_classical() -> tuple[BipartiteState, Observable]:
    return BipartiteState(np.diag([0.5, 0, 0, 0.5]), 2, 2), Observable.computational(2)


def weakzero() -> tuple[BipartiteState, Observable]:
    """Uncorrelated state probed along ``sigma_x``: zero discord, positive local coherence."""
    r1 = np.diag([0.6, 0.4])
    r2 = np.diag([0.7, 0.3])
    sx = np.array([[0, 1], [1, 0]])
    return BipartiteState(np.kron(r1, r2), 2, 2), Observable.from_matrix(sx)


def _e(d: int, i: int) -> np.ndarray:
    v = np.zeros(d, dtype=complex)
    v[i] = 1.0
    return v


def example1(alpha: Sequence[complex] = (0.5, 0.5, 2 ** -0.5)) -> tuple[BipartiteState, Observable]:
    """``a1 |1>|1> + a2 |1>|2> + a3 |2>|3>`` on ``2 x 3``, probed in the nearby computational basis.

    The first two nearby branches leave the distant system in the same state.
    """
    a = np.asarray(alpha, dtype=complex)
    psi = a[0] * np.kron(_e(2, 0), _e(3, 0)) + a[1] * np.kron(_e(2, 0), _e(3, 1)) + a[2] * np.kron(_e(2, 1), _e(3, 2))
    return BipartiteState.from_vector(psi, 2, 3), Observable.computational(3)


def example2(r: Sequence[float] = (0.5, 0.3, 0.2), rotated: bool = False) -> tuple[BipartiteState, Observable]:
    """Schmidt state ``sum_q sqrt(r_q) |q>|q>`` with a nondegenerate nearby spectrum.

    With ``rotated`` the probe keeps ``|1>`` and mixes every other Schmidt
    vector into every other basis vector.
    """
    r = np.asarray(r, dtype=float)
    n = len(r)
    psi = sum(np.sqrt(r[q]) * np.kron(_e(n, q), _e(n, q)) for q in range(n))
    state = BipartiteState.from_vector(psi, n, n)
    if not rotated:
        return state, Observable.computational(n)
    basis = np.eye(n, dtype=complex)
    if n > 1:
        m = n - 1
        k = np.arange(m)
        basis[1:, 1:] = np.exp(2j * np.pi * np.outer(k, k) / m) / np.sqrt(m)  # Fourier block
    return state, Observable.from_basis(basis)


def example3(alpha: Sequence[complex] = (0.5, 0.5, 2 ** -0.5), r: Sequence[float] = (0.5, 0.3, 0.2)) -> tuple[BipartiteState, Observable]:
    """Equal mixture of the two pure examples placed on orthogonal subspaces."""
    a = np.asarray(alpha, dtype=complex)
    a = a / np.linalg.norm(a)
    r = np.asarray(r, dtype=float)
    nq = len(r)
    d1, d2 = 2 + nq, 3 + nq
    phi = a[0] * np.kron(_e(d1, 0), _e(d2, 0)) + a[1] * np.kron(_e(d1, 0), _e(d2, 1)) + a[2] * np.kron(_e(d1, 1), _e(d2, 2))
    psi = sum(np.sqrt(r[q]) * np.kron(_e(d1, 2 + q), _e(d2, 3 + q)) for q in range(nq))
    psi = psi / np.linalg.norm(psi)
    rho = 0.5 * np.outer(phi, phi.conj()) + 0.5 * np.outer(psi, psi.conj())
    return BipartiteState(rho, d1, d2), Observable.computational(d2)


NAMED: dict[str, Callable[[], tuple[BipartiteState, Observable]]] = {
    "bell": bell,
    "product": product,
    "classical_classical": classical_classical,
    "weakzero": weakzero,
    "example1": example1,
    "example2": example2,
    "example3": example3,
}


def named(name: str, seed: int = 0, d1: int = 3, d2: int = 3, rank: Optional[int] = None):
    """Look up a fixture by name; ``random_bipartite`` uses ``seed``, ``d1``, ``d2`` and ``rank``.

    The random fixture is paired with the computational observable.
    """
    if name == "random_bipartite":
        rng = np.random.default_rng(seed)
        return random_bipartite(rng, d1, d2, rank), Observable.computational(d2)
    try:
        return NAMED[name]()
    except KeyError:
        raise UnknownFixture(f"unknown fixture {name!r}; known: {sorted([*NAMED, 'random_bipartite'])}") from None
