"""When is the discord zero, and why.

A zero is *strong* when the observable leaves the global state (and so
also the nearby reduction) undisturbed, and *weak* when the global and
local coherence are both positive but cancel exactly.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import linalg
from .errors import BlocksDoNotCommute, InvalidObservable, InvariantViolation
from .measures import check_identity, coherence_information, nonneg
from .states import DETECT_TOL, BipartiteState, Mixture, Observable, luders_mixture

ZERO_TOL = 1e-8
WEAK_LOCAL_MIN = 1e-6
GAP_MIN = 1e-6
COMMUTE_TOL = 1e-9


class Kind(enum.Enum):
    STRONG_ZERO = "StrongZero"
    WEAK_ZERO = "WeakZero"
    POSITIVE = "Positive"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class DiscordClassification:
    kind: Kind
    discord: float
    global_coherence: float
    local_coherence: float
    commutator_norm: float
    lueders_defect: float


def classify(s: BipartiteState, a2: Observable, tol: float = ZERO_TOL) -> DiscordClassification:
    """Sort the discord of ``a2`` in ``s`` into strong zero, weak zero or positive.

    ``commutator_norm`` is ``sqrt(sum_l ||[1 (x) P_l, rho]||^2 / 2)`` and
    ``lueders_defect`` is ``||rho - sum_l P_l rho P_l||``; the two are equal
    in exact arithmetic and are compared as a consistency check. A strong
    zero is declared when the global coherence is below ``tol``; this must
    agree with the commutator test in the direction allowed by Pinsker's
    inequality.
    """
    lifted = a2.lift(s.d1)
    rho = s.matrix
    comm = float(np.sqrt(0.5 * sum(np.linalg.norm(linalg.commutator(P, rho)) ** 2 for P in lifted.projectors)))
    defect = float(np.linalg.norm(rho - luders_mixture(rho, lifted)))
    if abs(comm - defect) > 1e-10:
        raise InvariantViolation(f"commutator ({comm:.3e}) and Lüders fixed-point ({defect:.3e}) tests disagree")

    glob = coherence_information(lifted, rho)
    loc = coherence_information(a2, s.reduce(2))
    disc = nonneg(glob - loc, "discord")
    # Pinsker: I_C >= ||rho - rho_L||_1^2 / (2 ln 2), and ||.||_1 >= ||.||_F
    if comm < tol and glob >= tol:
        raise InvariantViolation(f"observable commutes with the state but global coherence is {glob:.3e}")
    if glob < tol and comm > np.sqrt(2 * np.log(2) * tol):
        raise InvariantViolation(f"global coherence {glob:.3e} is too small for commutator {comm:.3e}")

    if glob < tol:
        kind = Kind.STRONG_ZERO
    elif disc < tol and loc >= WEAK_LOCAL_MIN:
        kind = Kind.WEAK_ZERO
    else:
        kind = Kind.POSITIVE
    return DiscordClassification(kind, disc, glob, loc, comm, defect)


# -- the subsystem commutant -----------------------------------------------

def hermitian_basis(d: int) -> list[np.ndarray]:
    """Orthonormal basis (Hilbert-Schmidt) of the real space of ``d x d`` Hermitian matrices."""
    out = []
    for j in range(d):
        e = np.zeros((d, d), dtype=complex)
        e[j, j] = 1.0
        out.append(e)
    for j in range(d):
        for k in range(j + 1, d):
            sym = np.zeros((d, d), dtype=complex)
            sym[j, k] = sym[k, j] = 2 ** -0.5
            asym = np.zeros((d, d), dtype=complex)
            asym[j, k] = -1j * 2 ** -0.5
            asym[k, j] = 1j * 2 ** -0.5
            out.extend([sym, asym])
    return out


def commutant_basis(s: BipartiteState, rel_tol: float = 1e-8) -> list[np.ndarray]:
    """Hermitian ``X`` on subsystem 2 with ``[1 (x) X, rho] = 0``.

    The commutator map is written as a real matrix acting on coordinates in
    :func:`hermitian_basis`; its numerical nullspace (singular values at or
    below ``rel_tol`` times the largest) spans the answer.
    """
    basis = hermitian_basis(s.d2)
    cols = []
    for e in basis:
        c = linalg.commutator(linalg.embed(e, s.dims, 1), s.matrix).reshape(-1)
        cols.append(np.concatenate([c.real, c.imag]))
    m = np.column_stack(cols)
    _, sv, vt = np.linalg.svd(m)
    full = np.zeros(len(basis))
    full[: len(sv)] = sv
    cutoff = rel_tol * sv[0] if sv.size and sv[0] > 0 else np.inf
    null = vt[full <= cutoff] if np.isfinite(cutoff) else vt
    return [sum(c * e for c, e in zip(row, basis)) for row in null]


def subsystem_commutant_projectors(s: BipartiteState, tol: float = ZERO_TOL, seed: int = 0) -> list[np.ndarray]:
    """Finest decomposition of the identity on subsystem 2 that commutes with the state.

    Takes a random real combination of the commutant basis (seeded, redrawn
    up to five times while two distinct eigenvalues sit closer than
    ``1e-6``) and returns its eigenprojectors.
    """
    xs = commutant_basis(s)
    rng = np.random.default_rng(seed)
    projs = None
    for _ in range(5):
        x = sum(rng.standard_normal() * b for b in xs)
        x = x / max(np.linalg.norm(x), 1e-300)
        vals, projs = linalg.spectral_projectors(x)
        if len(vals) < 2 or min(np.diff(vals)) >= GAP_MIN:
            break
    for p in projs:
        err = float(np.linalg.norm(linalg.commutator(linalg.embed(p, s.dims, 1), s.matrix)))
        if err >= tol:
            raise InvariantViolation(f"commutant projector fails to commute with the state ({err:.3e})")
    return projs


def _blocks_with_weights(s: BipartiteState, projs: Sequence[np.ndarray]):
    out = []
    for p in projs:
        lp = linalg.embed(p, s.dims, 1)
        w = float(np.real(np.vdot(lp, s.matrix)))
        if w > DETECT_TOL:
            out.append((w, lp @ s.matrix @ lp / w))
    return out


def mono_orthogonality_certificate(s: BipartiteState, tol: float = ZERO_TOL):
    """Decide whether the state splits into pieces with orthogonal nearby reductions.

    Returns ``(True, mixture)`` with the witnessing mixture of global
    states, or ``(False, None)``.
    """
    pieces = _blocks_with_weights(s, subsystem_commutant_projectors(s, tol))
    if len(pieces) < 2:
        return False, None
    weights = np.array([w for w, _ in pieces])
    mix = Mixture(weights / weights.sum(), tuple(r for _, r in pieces))
    if linalg.frobenius_distance(mix.average, s.matrix) > tol:
        raise InvariantViolation("commutant blocks do not reassemble the state")
    nearby = [linalg.partial_trace(r, s.dims, [1]) for _, r in pieces]
    for a in range(len(nearby)):
        for b in range(a + 1, len(nearby)):
            if np.linalg.norm(nearby[a] @ nearby[b]) > tol:
                raise InvariantViolation("witness nearby reductions are not orthogonal")
    return True, mix


def strong_zero_complete_observable(s: BipartiteState, tol: float = ZERO_TOL) -> Optional[Observable]:
    """A complete nearby observable with strong zero discord, if one exists.

    One exists exactly when every eigenprojector of a generic commutant
    element is rank one; the state is then ``sum_l p_l rho_1^l (x) |l><l|``,
    which is reconstructed as a check.
    """
    projs = subsystem_commutant_projectors(s, tol)
    if any(linalg.rank_of_projector(p) != 1 for p in projs):
        return None
    obs = Observable.from_projectors(projs)
    rebuilt = np.zeros_like(s.matrix)
    for p in projs:
        lp = linalg.embed(p, s.dims, 1)
        rebuilt += np.kron(linalg.partial_trace(lp @ s.matrix @ lp, s.dims, [0]), p)
    if linalg.frobenius_distance(rebuilt, s.matrix) > tol:
        raise InvariantViolation("classical-quantum form does not reassemble the state")
    return obs


# -- statistical decomposition ---------------------------------------------

@dataclass(frozen=True)
class StatisticalDecomposition:
    weights: tuple
    global_coherence: float
    global_coherence_blocks: tuple
    discord: float
    discord_blocks: tuple

    @property
    def coherence_residual(self) -> float:
        return abs(self.global_coherence - sum(w * c for w, c in zip(self.weights, self.global_coherence_blocks)))

    @property
    def discord_residual(self) -> float:
        return abs(self.discord - sum(w * c for w, c in zip(self.weights, self.discord_blocks)))


def statistical_decomposition_check(s: BipartiteState, a2: Observable, blocks: Sequence[np.ndarray]) -> StatisticalDecomposition:
    """Split coherence and discord over nearby blocks that commute with the state and with ``a2``.

    ``blocks`` are orthogonal projectors on subsystem 2 summing to the
    identity. Raises :class:`BlocksDoNotCommute` when a block fails either
    commutation to ``1e-9``.
    """
    blocks = [np.asarray(b, dtype=complex) for b in blocks]
    if linalg.frobenius_distance(sum(blocks), np.eye(s.d2)) > 1e-10:
        raise InvalidObservable("blocks do not sum to the identity")
    for n, b in enumerate(blocks):
        lb = linalg.embed(b, s.dims, 1)
        if np.linalg.norm(linalg.commutator(lb, s.matrix)) > COMMUTE_TOL:
            raise BlocksDoNotCommute(f"block {n} does not commute with the state")
        if any(np.linalg.norm(linalg.commutator(b, p)) > COMMUTE_TOL for p in a2.projectors):
            raise BlocksDoNotCommute(f"block {n} does not commute with the observable")

    lifted = a2.lift(s.d1)
    glob = coherence_information(lifted, s.matrix)
    disc = nonneg(glob - coherence_information(a2, s.reduce(2)), "discord")
    weights, cg, cd = [], [], []
    for w, r in _blocks_with_weights(s, blocks):
        piece = BipartiteState(0.5 * (r + r.conj().T), s.d1, s.d2)
        g = coherence_information(lifted, piece.matrix)
        weights.append(w)
        cg.append(g)
        cd.append(nonneg(g - coherence_information(a2, piece.reduce(2)), "discord"))
    report = StatisticalDecomposition(tuple(weights), glob, tuple(cg), disc, tuple(cd))
    check_identity(report.coherence_residual, 0.0, "coherence splits over commuting blocks")
    check_identity(report.discord_residual, 0.0, "discord splits over commuting blocks")
    return report
