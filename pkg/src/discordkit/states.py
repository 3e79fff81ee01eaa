"""States, observables and the Lüders machinery.

Observables are stored in spectral form: a tuple of distinct real
eigenvalues and the matching orthogonal projectors, which resolve the
identity. Coarsened observables carry eigenvalues ``1, 2, 3, ...`` for
their detectable classes; whatever is left of the identity (the
undetectable part) is kept as a separate branch with eigenvalue ``0`` so
the completeness relation still holds.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import linalg
from .errors import (
    DimensionMismatch,
    InvalidObservable,
    InvalidState,
    NotPure,
)
from .linalg import as_matrix

STATE_TOL = 1e-10
#: a branch with probability at or below this is undetectable
DETECT_TOL = 1e-12


def validate_density_matrix(m: np.ndarray, tol: float = STATE_TOL) -> None:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidState(f"density matrix must be square, got shape {m.shape}")
    herr = linalg.hermiticity_error(m)
    if herr > tol:
        raise InvalidState(f"density matrix not Hermitian (||m - m^dagger||_F = {herr:.2e})")
    tr = np.trace(m).real
    if abs(tr - 1.0) > tol:
        raise InvalidState(f"density matrix trace is {tr!r}, expected 1")
    lo = float(linalg.eigvalsh(m)[0])
    if lo < -tol:
        raise InvalidState(f"density matrix has negative eigenvalue {lo:.3e}")


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A validated state: Hermitian, positive semidefinite, unit trace."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(as_matrix(self.matrix), dtype=complex)
        validate_density_matrix(m)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def pure(cls, vector) -> "DensityMatrix":
        v = np.asarray(vector, dtype=complex).reshape(-1)
        v = v / np.linalg.norm(v)
        return cls(np.outer(v, v.conj()))

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityMatrix":
        return cls(np.eye(dim) / dim)


@dataclass(frozen=True, eq=False)
class Observable:
    """Discrete observable ``sum_l a_l P_l`` with distinct eigenvalues.

    Use the ``from_*`` constructors; the raw constructor validates
    idempotency, orthogonality and completeness to ``1e-10``.
    """

    eigenvalues: tuple
    projectors: tuple

    def __post_init__(self):
        vals = tuple(float(a) for a in self.eigenvalues)
        projs = tuple(np.array(as_matrix(p), dtype=complex) for p in self.projectors)
        if len(vals) != len(projs) or not vals:
            raise InvalidObservable("need one projector per eigenvalue and at least one branch")
        d = projs[0].shape[0]
        srt = sorted(vals)
        if any(b - a <= 1e-9 for a, b in zip(srt, srt[1:])):
            raise InvalidObservable(f"eigenvalues are not pairwise distinct: {vals}")
        total = np.zeros((d, d), dtype=complex)
        for i, p in enumerate(projs):
            if p.shape != (d, d):
                raise InvalidObservable("projectors have inconsistent shapes")
            if not linalg.is_projector(p, 1e-10):
                raise InvalidObservable(f"branch {i} is not a Hermitian idempotent")
            total += p
        for i in range(len(projs)):
            for j in range(i + 1, len(projs)):
                if np.linalg.norm(projs[i] @ projs[j]) > 1e-10:
                    raise InvalidObservable(f"projectors {i} and {j} are not orthogonal")
        if np.linalg.norm(total - np.eye(d)) > 1e-10:
            raise InvalidObservable("projectors do not sum to the identity")
        for p in projs:
            p.setflags(write=False)
        object.__setattr__(self, "eigenvalues", vals)
        object.__setattr__(self, "projectors", projs)

    # -- constructors -------------------------------------------------
    @classmethod
    def from_projectors(cls, projectors, eigenvalues=None) -> "Observable":
        projectors = list(projectors)
        if eigenvalues is None:
            eigenvalues = range(1, len(projectors) + 1)
        return cls(tuple(eigenvalues), tuple(projectors))

    @classmethod
    def from_basis(cls, vectors, eigenvalues=None) -> "Observable":
        """Complete observable from orthonormal basis vectors given as columns."""
        v = np.asarray(vectors, dtype=complex)
        return cls.from_projectors([linalg.projector(v[:, i]) for i in range(v.shape[1])], eigenvalues)

    @classmethod
    def computational(cls, dim: int, eigenvalues=None) -> "Observable":
        return cls.from_basis(np.eye(dim), eigenvalues)

    @classmethod
    def from_matrix(cls, m, cluster_tol: float = linalg.CLUSTER_TOL) -> "Observable":
        vals, projs = linalg.spectral_projectors(m, cluster_tol)
        return cls(tuple(vals), tuple(projs))

    @classmethod
    def trivial(cls, dim: int, value: float = 1.0) -> "Observable":
        return cls((value,), (np.eye(dim),))

    # -- views --------------------------------------------------------
    @property
    def dim(self) -> int:
        return self.projectors[0].shape[0]

    def __len__(self) -> int:
        return len(self.projectors)

    @property
    def ranks(self) -> list[int]:
        return [linalg.rank_of_projector(p) for p in self.projectors]

    @property
    def is_complete(self) -> bool:
        return all(r == 1 for r in self.ranks)

    @property
    def matrix(self) -> np.ndarray:
        return sum(a * p for a, p in zip(self.eigenvalues, self.projectors))

    def embed(self, dims: Sequence[int], index: int) -> "Observable":
        """The same observable acting on factor ``index`` of a larger tensor product."""
        return Observable(self.eigenvalues, tuple(linalg.embed(p, dims, index) for p in self.projectors))

    def lift(self, d1: int) -> "Observable":
        """``1 (x) A`` on ``d1 * dim``: the observable seen as a subsystem-2 observable."""
        return self.embed((d1, self.dim), 1)

    def coarsen(self, classes: Sequence[Sequence[int]]) -> "Observable":
        """Merge branches class by class.

        ``classes`` need not cover every branch; the uncovered branches are
        gathered into one extra branch with eigenvalue ``0``.
        """
        covered = {i for c in classes for i in c}
        projs = [sum(self.projectors[i] for i in c) for c in classes]
        vals = list(range(1, len(projs) + 1))
        rest = [i for i in range(len(self)) if i not in covered]
        if rest:
            projs.append(sum(self.projectors[i] for i in rest))
            vals.append(0)
        return Observable(tuple(vals), tuple(projs))


@dataclass(frozen=True, eq=False)
class BipartiteState:
    """A density matrix on ``d1 * d2`` with subsystem 1 as the slow index."""

    matrix: np.ndarray
    d1: int
    d2: int

    def __post_init__(self):
        m = np.array(as_matrix(self.matrix), dtype=complex)
        if self.d1 * self.d2 != m.shape[0]:
            raise DimensionMismatch(f"d1*d2 = {self.d1 * self.d2} but matrix dimension is {m.shape[0]}")
        validate_density_matrix(m)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dims(self) -> tuple[int, int]:
        return (self.d1, self.d2)

    @property
    def dim(self) -> int:
        return self.d1 * self.d2

    @property
    def state(self) -> DensityMatrix:
        return DensityMatrix(self.matrix)

    def reduce(self, keep: int) -> np.ndarray:
        return reduce(self, keep)

    @classmethod
    def from_vector(cls, psi, d1: int, d2: int) -> "BipartiteState":
        v = np.asarray(psi, dtype=complex).reshape(-1)
        v = v / np.linalg.norm(v)
        return cls(np.outer(v, v.conj()), d1, d2)


@dataclass(frozen=True, eq=False)
class TripartiteState:
    matrix: np.ndarray
    d1: int
    d2: int
    d3: int

    def __post_init__(self):
        m = np.array(as_matrix(self.matrix), dtype=complex)
        if self.d1 * self.d2 * self.d3 != m.shape[0]:
            raise DimensionMismatch("d1*d2*d3 does not match the matrix dimension")
        validate_density_matrix(m, 1e-9)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dims(self) -> tuple[int, int, int]:
        return (self.d1, self.d2, self.d3)

    def marginal(self, keep) -> np.ndarray:
        return linalg.partial_trace(self.matrix, self.dims, [k - 1 for k in keep])

    def split(self, first: Sequence[int]) -> BipartiteState:
        """View as a bipartite state, e.g. ``split([1])`` gives the 1|(2+3) cut.

        Only contiguous cuts are supported: ``[1]`` or ``[1, 2]``.
        """
        first = sorted(first)
        if first == [1]:
            return BipartiteState(self.matrix, self.d1, self.d2 * self.d3)
        if first == [1, 2]:
            return BipartiteState(self.matrix, self.d1 * self.d2, self.d3)
        raise ValueError("only the cuts 1|23 and 12|3 are supported")


@dataclass(frozen=True, eq=False)
class SchmidtDecomposition:
    """``|psi> = sum_k coefficients[k] left[:, k] (x) right[:, k]``."""

    coefficients: np.ndarray
    left_vectors: np.ndarray
    right_vectors: np.ndarray

    def vector(self) -> np.ndarray:
        out = 0
        for k, c in enumerate(self.coefficients):
            out = out + c * np.kron(self.left_vectors[:, k], self.right_vectors[:, k])
        return np.asarray(out, dtype=complex)


@dataclass(frozen=True, eq=False)
class Mixture:
    """Finite mixture ``sum_k w_k rho_k``; zero-weight components carry no state."""

    weights: np.ndarray
    states: tuple = field(default=())

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or len(w) != len(self.states):
            raise InvalidState("need one weight per component")
        if np.any(w < -1e-12) or abs(w.sum() - 1.0) > 1e-10:
            raise InvalidState("weights must be nonnegative and sum to 1")
        w = np.clip(w, 0.0, None)
        states = []
        for wk, s in zip(w, self.states):
            if wk <= 0.0:
                states.append(None)
            else:
                m = np.array(as_matrix(s), dtype=complex)
                validate_density_matrix(m, 1e-9)
                states.append(m)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "states", tuple(states))

    def __len__(self) -> int:
        return len(self.weights)

    @property
    def support(self) -> list[int]:
        return [k for k, w in enumerate(self.weights) if w > 0]

    @property
    def average(self) -> np.ndarray:
        return sum(self.weights[k] * self.states[k] for k in self.support)


# -- operations ------------------------------------------------------------

def reduce(s: BipartiteState, keep: int) -> np.ndarray:
    """Reduced state of subsystem ``keep`` (1 or 2)."""
    if keep not in (1, 2):
        raise ValueError("keep must be 1 or 2")
    return linalg.partial_trace(s.matrix, s.dims, [keep - 1])


def lift_observable(a2: Observable, d1: int) -> Observable:
    return a2.lift(d1)


def _check_dims(rho: np.ndarray, a: Observable) -> None:
    if rho.shape != (a.dim, a.dim):
        raise DimensionMismatch(f"state of dimension {rho.shape[0]} vs observable of dimension {a.dim}")


def outcome_probabilities(rho, a: Observable) -> np.ndarray:
    """``p_l = tr(rho P_l)``; tiny negative round-off is clipped to zero."""
    rho = as_matrix(rho)
    _check_dims(rho, a)
    p = np.array([np.real(np.vdot(pl, rho)) for pl in a.projectors])
    p[(p < 0) & (p >= -1e-12)] = 0.0
    return p


def luders_mixture(rho, a: Observable) -> np.ndarray:
    """Non-selective Lüders map ``sum_l P_l rho P_l``."""
    rho = as_matrix(rho)
    _check_dims(rho, a)
    return sum(p @ rho @ p for p in a.projectors)


def luders_selective(rho, a: Observable, l: int):
    """Probability of branch ``l`` and the normalized post-selection state.

    The state is ``None`` when the branch is undetectable.
    """
    rho = as_matrix(rho)
    _check_dims(rho, a)
    p = a.projectors[l]
    prob = float(np.real(np.vdot(p, rho)))
    if prob <= DETECT_TOL:
        return max(prob, 0.0), None
    return prob, p @ rho @ p / prob


def range_projector(rho, tol: float = 1e-10) -> np.ndarray:
    """Projector onto the span of eigenvectors with eigenvalue above ``tol``."""
    eig = linalg.hermitian_eigendecomposition(as_matrix(rho), tol=1e-8)
    v = eig.eigenvectors[:, eig.eigenvalues > tol]
    return v @ v.conj().T


def purify(rho2) -> BipartiteState:
    """Minimal purification: ancilla (subsystem 1) of dimension ``rank(rho2)``."""
    rho2 = as_matrix(rho2)
    eig = linalg.hermitian_eigendecomposition(rho2, tol=1e-8)
    keep = eig.eigenvalues > DETECT_TOL
    lam = eig.eigenvalues[keep][::-1]
    vecs = eig.eigenvectors[:, keep][:, ::-1]
    r = len(lam)
    d2 = rho2.shape[0]
    psi = np.zeros(r * d2, dtype=complex)
    for k in range(r):
        e = np.zeros(r)
        e[k] = 1.0
        psi += np.sqrt(lam[k]) * np.kron(e, vecs[:, k])
    return BipartiteState.from_vector(psi, r, d2)


def state_vector(s: BipartiteState, tol: float = 1e-9) -> np.ndarray:
    """Dominant eigenvector of a pure state; raises :class:`NotPure` otherwise."""
    eig = linalg.hermitian_eigendecomposition(s.matrix, tol=1e-8)
    if eig.eigenvalues[-1] < 1.0 - tol:
        raise NotPure(f"largest eigenvalue {eig.eigenvalues[-1]:.6f} < 1 - {tol:g}")
    return eig.eigenvectors[:, -1]


def schmidt_decomposition(psi: BipartiteState, tol: float = 1e-9) -> SchmidtDecomposition:
    v = state_vector(psi, tol)
    u, sv, vh = np.linalg.svd(v.reshape(psi.d1, psi.d2), full_matrices=False)
    keep = sv > 1e-12
    return SchmidtDecomposition(sv[keep], u[:, keep], vh[keep].T)
