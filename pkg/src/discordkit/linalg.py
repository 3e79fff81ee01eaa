"""Dense complex-matrix kernel.

Everything here works on plain ``numpy`` arrays. Subsystem 1 is always the
slow (leftmost) Kronecker factor, so a vector on ``d1 * d2`` is indexed as
``i1 * d2 + i2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, NotHermitian, NotSquare, ShapeMismatch

#: eigenvalues closer than this (relative to the spectral radius) share an eigenspace
CLUSTER_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class HermitianEigen:
    """Eigenvalues in ascending order with orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def as_matrix(m) -> np.ndarray:
    """Return ``m`` as a 2-D complex array (accepts objects with a ``matrix`` attribute)."""
    if hasattr(m, "matrix"):
        m = m.matrix
    return np.asarray(m, dtype=complex)


def dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def _check_square(m: np.ndarray) -> None:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NotSquare(f"expected a square matrix, got shape {m.shape}")


def hermiticity_error(m: np.ndarray) -> float:
    return float(np.linalg.norm(m - m.conj().T))


def hermitian_eigendecomposition(m, tol: float = 1e-10, method: str = "lapack") -> HermitianEigen:
    """Diagonalize a Hermitian matrix.

    Parameters
    ----------
    m : array_like
        Square complex matrix, Hermitian up to ``tol`` in Frobenius norm.
    tol : float
        Largest accepted ``||m - m^dagger||_F``.
    method : {"lapack", "jacobi"}
        ``"lapack"`` calls ``numpy.linalg.eigh``; ``"jacobi"`` runs the
        cyclic complex Jacobi sweep in :func:`jacobi_eigh`.

    Raises
    ------
    NotSquare, NotHermitian
    """
    m = as_matrix(m)
    _check_square(m)
    err = hermiticity_error(m)
    if err > tol:
        raise NotHermitian(f"||m - m^dagger||_F = {err:.3e} exceeds {tol:.1e}")
    h = 0.5 * (m + m.conj().T)
    if method == "lapack":
        w, v = np.linalg.eigh(h)
    elif method == "jacobi":
        w, v = jacobi_eigh(h)
    else:
        raise ValueError(f"unknown eigensolver {method!r}")
    return HermitianEigen(np.asarray(w, dtype=float), v)


def jacobi_eigh(h: np.ndarray, rel_tol: float = 1e-12, max_sweeps: int = 100):
    """Cyclic Jacobi eigensolver for a complex Hermitian matrix.

    Each pair ``(p, q)`` is annihilated by a phase rotation that makes the
    2x2 block real symmetric followed by a real Givens rotation. Sweeps stop
    once the off-diagonal Frobenius norm drops below ``rel_tol * ||h||_F``.

    Returns ``(eigenvalues, eigenvectors)`` sorted ascending.
    """
    a = np.array(h, dtype=complex)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = np.linalg.norm(a)
    if n < 2 or scale == 0.0:
        return np.real(np.diag(a)).copy(), v
    target = rel_tol * scale
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off < target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                b = a[p, q]
                r = abs(b)
                if r < 1e-300:
                    continue
                phase = b / r
                tau = (a[q, q].real - a[p, p].real) / (2.0 * r)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # phase fix diag(1, conj(phase)) then the real rotation
                g = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ g
                a[idx, :] = g.conj().T @ a[idx, :]
                a[q, p] = a[p, q] = 0.0
                v[:, idx] = v[:, idx] @ g
    w = np.real(np.diag(a))
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def eigvalsh(m) -> np.ndarray:
    """Eigenvalues of a (numerically) Hermitian matrix, ascending."""
    m = as_matrix(m)
    return np.linalg.eigvalsh(0.5 * (m + m.conj().T))


def spectral_projectors(m, cluster_tol: float = CLUSTER_TOL):
    """Split a Hermitian matrix into distinct eigenvalues and eigenprojectors.

    Eigenvalues within ``cluster_tol * max(1, spectral radius)`` of their
    neighbour are merged; the reported eigenvalue is the cluster mean.
    """
    eig = hermitian_eigendecomposition(m)
    w, vecs = eig.eigenvalues, eig.eigenvectors
    scale = max(1.0, float(np.max(np.abs(w))) if w.size else 1.0)
    groups: list[list[int]] = []
    for i in range(len(w)):
        if groups and w[i] - w[groups[-1][-1]] <= cluster_tol * scale:
            groups[-1].append(i)
        else:
            groups.append([i])
    values = [float(np.mean(w[g])) for g in groups]
    projectors = [vecs[:, g] @ vecs[:, g].conj().T for g in groups]
    return values, projectors


def tensor_product(*ops) -> np.ndarray:
    """Kronecker product, leftmost factor slowest."""
    out = np.ones((1, 1), dtype=complex)
    for op in ops:
        out = np.kron(out, as_matrix(op))
    return out


def embed(op, dims: Sequence[int], index: int) -> np.ndarray:
    """Place ``op`` on subsystem ``index`` of a tensor product with identities elsewhere."""
    op = as_matrix(op)
    if op.shape != (dims[index], dims[index]):
        raise DimensionMismatch(f"operator of shape {op.shape} does not act on factor of dimension {dims[index]}")
    left = int(np.prod(dims[:index], dtype=int))
    right = int(np.prod(dims[index + 1:], dtype=int))
    return np.kron(np.kron(np.eye(left), op), np.eye(right))


def partial_trace(m, dims: Sequence[int], keep) -> np.ndarray:
    """Trace out every subsystem not listed in ``keep``.

    ``keep`` holds zero-based subsystem indices; the result keeps them in
    their original order.
    """
    m = as_matrix(m)
    dims = [int(d) for d in dims]
    total = int(np.prod(dims, dtype=int))
    if m.shape != (total, total):
        raise DimensionMismatch(f"matrix shape {m.shape} does not match dims {dims}")
    keep = sorted(set(int(k) for k in keep))
    n = len(dims)
    if any(k < 0 or k >= n for k in keep):
        raise DimensionMismatch(f"subsystem indices {keep} out of range for {n} subsystems")
    t = m.reshape(dims + dims)
    letters = "abcdefghijklmnopqrstuvwxyz"
    row = list(letters[:n])
    col = list(letters[n:2 * n])
    for i in range(n):
        if i not in keep:
            col[i] = row[i]
    out = "".join(row[i] for i in keep) + "".join(col[i] for i in keep)
    res = np.einsum("".join(row) + "".join(col) + "->" + out, t)
    dk = int(np.prod([dims[i] for i in keep], dtype=int))
    return res.reshape(dk, dk)


def frobenius_distance(a, b) -> float:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape:
        raise ShapeMismatch(f"shapes {a.shape} and {b.shape} differ")
    return float(np.linalg.norm(a - b))


def commutator(a, b) -> np.ndarray:
    return a @ b - b @ a


def projector(vectors) -> np.ndarray:
    """Orthogonal projector onto the span of the given orthonormal columns."""
    v = np.asarray(vectors, dtype=complex)
    if v.ndim == 1:
        v = v[:, None]
    return v @ v.conj().T


def is_projector(p: np.ndarray, tol: float = 1e-10) -> bool:
    return hermiticity_error(p) <= tol and float(np.linalg.norm(p @ p - p)) <= tol


def rank_of_projector(p: np.ndarray) -> int:
    return int(round(float(np.real(np.trace(p)))))


def complete_basis(first, dim: int, tol: float = 1e-10) -> np.ndarray:
    """Extend a unit vector to an orthonormal basis (columns).

    Gram-Schmidt over the standard basis in index order; candidates whose
    residual norm falls below ``tol`` are skipped. Deterministic.
    """
    first = np.asarray(first, dtype=complex).reshape(-1)
    cols = [first / np.linalg.norm(first)]
    for k in range(dim):
        if len(cols) == dim:
            break
        e = np.zeros(dim, dtype=complex)
        e[k] = 1.0
        for c in cols:
            e = e - c * np.vdot(c, e)
        # second pass keeps orthogonality at machine precision
        for c in cols:
            e = e - c * np.vdot(c, e)
        nrm = np.linalg.norm(e)
        if nrm < tol:
            continue
        cols.append(e / nrm)
    return np.column_stack(cols)
