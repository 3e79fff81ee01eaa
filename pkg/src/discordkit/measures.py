"""Entropies, coherence information and discord decompositions.

All quantities are in bits. Eigenvalues at or below ``1e-12`` are dropped
from entropy sums (``0 log 0 = 0``). Quantities that are nonnegative in
exact arithmetic are checked against ``-1e-9`` and then floored at zero;
identities are checked to ``1e-8`` (see :func:`identity_tolerance`) and raise
:class:`~discordkit.errors.InvariantViolation` when they fail.
"""

from __future__ import annotations

import contextlib
import contextvars
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from . import linalg
from .errors import (
    DimensionMismatch,
    InvariantViolation,
    NotARefinement,
    NotDistribution,
    UnsupportedDimension,
)
from .linalg import as_matrix
from .states import (
    DETECT_TOL,
    BipartiteState,
    Mixture,
    Observable,
    luders_mixture,
    outcome_probabilities,
)

EIG_TOL = 1e-12
NEG_TOL = 1e-9
IDENTITY_TOL = 1e-8

COHERENCE_METHODS = ("entropy_increase", "relative_entropy", "entropy_split")


def nonneg(value: float, name: str) -> float:
    """Check a provably nonnegative quantity and floor it at zero."""
    if value < -NEG_TOL:
        raise InvariantViolation(f"{name} = {value:.3e} should be nonnegative")
    return max(float(value), 0.0)


_identity_tol = contextvars.ContextVar("identity_tol", default=IDENTITY_TOL)


@contextlib.contextmanager
def identity_tolerance(tol: float):
    """Temporarily change the tolerance used when checking identities."""
    token = _identity_tol.set(tol)
    try:
        yield tol
    finally:
        _identity_tol.reset(token)


def current_identity_tolerance() -> float:
    return _identity_tol.get()


def check_identity(lhs: float, rhs: float, name: str, tol: Optional[float] = None) -> float:
    """Raise :class:`InvariantViolation` unless ``|lhs - rhs| <= tol``; return the gap."""
    tol = _identity_tol.get() if tol is None else tol
    gap = abs(lhs - rhs)
    if gap > tol:
        raise InvariantViolation(f"{name}: |{lhs:.12f} - {rhs:.12f}| = {gap:.3e} > {tol:g}")
    return gap


def _entropy_of_spectrum(w: np.ndarray) -> float:
    w = w[w > EIG_TOL]
    return float(abs(-np.sum(w * np.log2(w))))


def von_neumann_entropy(rho) -> float:
    """``-tr rho log2 rho``."""
    return _entropy_of_spectrum(linalg.eigvalsh(rho))


def shannon_entropy(p) -> float:
    p = np.asarray(p, dtype=float).reshape(-1)
    if p.size == 0 or np.any(p < -1e-12) or abs(p.sum() - 1.0) > 1e-10:
        raise NotDistribution(f"not a probability vector: {p}")
    p = p[p > 0]
    return float(abs(-np.sum(p * np.log2(p))))


def relative_entropy(rho, sigma) -> float:
    """``S(rho || sigma)`` in bits, ``inf`` when the support of ``rho`` leaks out of ``sigma``'s."""
    rho, sigma = as_matrix(rho), as_matrix(sigma)
    if rho.shape != sigma.shape:
        raise DimensionMismatch(f"shapes {rho.shape} and {sigma.shape} differ")
    eig = linalg.hermitian_eigendecomposition(sigma, tol=1e-8)
    supp = eig.eigenvalues > EIG_TOL
    v_in = eig.eigenvectors[:, supp]
    v_out = eig.eigenvectors[:, ~supp]
    if v_out.shape[1]:
        leak = v_out.conj().T @ rho @ v_out
        if np.linalg.norm(leak) > 1e-9:
            return float("inf")
    diag = np.real(np.einsum("ij,ik,kj->j", v_in.conj(), rho, v_in))
    cross = float(np.sum(diag * np.log2(eig.eigenvalues[supp])))
    return nonneg(-von_neumann_entropy(rho) - cross, "relative entropy")


def coherence_information(a: Observable, rho, method: str = "entropy_increase") -> float:
    """Coherence information of observable ``a`` in state ``rho``.

    Three equivalent routes are available:

    ``"entropy_increase"``
        ``S(sum_l P_l rho P_l) - S(rho)``
    ``"relative_entropy"``
        ``S(rho || sum_l P_l rho P_l)``
    ``"entropy_split"``
        ``H(p_l) + sum_l p_l S(P_l rho P_l / p_l) - S(rho)``
    """
    rho = as_matrix(rho)
    if rho.shape != (a.dim, a.dim):
        raise DimensionMismatch(f"state of dimension {rho.shape[0]} vs observable of dimension {a.dim}")
    if method == "entropy_increase":
        val = von_neumann_entropy(luders_mixture(rho, a)) - von_neumann_entropy(rho)
    elif method == "relative_entropy":
        val = relative_entropy(rho, luders_mixture(rho, a))
    elif method == "entropy_split":
        p = outcome_probabilities(rho, a)
        cond = sum(
            pl * von_neumann_entropy(P @ rho @ P / pl)
            for pl, P in zip(p, a.projectors)
            if pl > DETECT_TOL
        )
        val = shannon_entropy(p / p.sum()) + cond - von_neumann_entropy(rho)
    else:
        raise ValueError(f"unknown method {method!r}; choose from {COHERENCE_METHODS}")
    return nonneg(val, "coherence information")


def _mutual_information(rho: np.ndarray, d1: int, d2: int) -> float:
    s1 = von_neumann_entropy(linalg.partial_trace(rho, (d1, d2), [0]))
    s2 = von_neumann_entropy(linalg.partial_trace(rho, (d1, d2), [1]))
    return nonneg(s1 + s2 - von_neumann_entropy(rho), "mutual information")


def mutual_information(s: BipartiteState) -> float:
    """``S1 + S2 - S12``."""
    return _mutual_information(s.matrix, s.d1, s.d2)


def _check_a2(s: BipartiteState, a2: Observable) -> None:
    if a2.dim != s.d2:
        raise DimensionMismatch(f"observable acts on dimension {a2.dim}, subsystem 2 has {s.d2}")


# -- mutual information split by an interrogating observable ---------------

@dataclass(frozen=True, eq=False)
class DiscordDecomposition:
    """Mutual information split along a subsystem-2 observable.

    ``mutual_information = information_gain + discord + residual``, where
    ``discord = global_coherence - local_coherence``. Per-branch lists are
    indexed like the observable's branches; undetectable branches hold
    ``None``.
    """

    mutual_information: float
    information_gain: float
    discord: float
    residual: float
    global_coherence: float
    local_coherence: float
    probabilities: np.ndarray
    conditional_states: list  # distant states rho_1^l
    conditional_nearby: list  # rho_2^l
    conditional_global: list  # rho_12^l
    branch_mutual_information: list
    s1: float
    s2: float
    s12: float

    @property
    def detectable(self) -> list[int]:
        return [l for l, p in enumerate(self.probabilities) if p > DETECT_TOL]


def mutual_information_decomposition(s: BipartiteState, a2: Observable) -> DiscordDecomposition:
    """Split ``I(rho_12)`` into information gain, discord and residual correlations."""
    _check_a2(s, a2)
    return _decompose(s.matrix, s.d1, s.d2, a2)


def _decompose(rho: np.ndarray, d1: int, d2: int, a2: Observable) -> DiscordDecomposition:
    dims = (d1, d2)
    rho1 = linalg.partial_trace(rho, dims, [0])
    rho2 = linalg.partial_trace(rho, dims, [1])
    s1, s2, s12 = (von_neumann_entropy(x) for x in (rho1, rho2, rho))
    mi = nonneg(s1 + s2 - s12, "mutual information")

    lifted = a2.lift(d1)
    probs = outcome_probabilities(rho, lifted)
    c1, c2, c12, branch_mi = [], [], [], []
    gain = 0.0
    residual = 0.0
    for pl, P in zip(probs, lifted.projectors):
        if pl <= DETECT_TOL:
            c1.append(None)
            c2.append(None)
            c12.append(None)
            branch_mi.append(None)
            continue
        r12 = P @ rho @ P / pl
        r1 = linalg.partial_trace(r12, dims, [0])
        r2 = linalg.partial_trace(r12, dims, [1])
        i_l = nonneg(
            von_neumann_entropy(r1) + von_neumann_entropy(r2) - von_neumann_entropy(r12),
            "branch mutual information",
        )
        gain += pl * relative_entropy(r1, rho1)
        residual += pl * i_l
        c1.append(r1)
        c2.append(r2)
        c12.append(r12)
        branch_mi.append(i_l)

    glob = coherence_information(lifted, rho)
    loc = coherence_information(a2, rho2)
    discord = nonneg(glob - loc, "discord")
    check_identity(gain + discord + residual, mi, "gain + discord + residual = mutual information")
    return DiscordDecomposition(
        mutual_information=mi,
        information_gain=nonneg(gain, "information gain"),
        discord=discord,
        residual=nonneg(residual, "residual correlations"),
        global_coherence=glob,
        local_coherence=loc,
        probabilities=probs,
        conditional_states=c1,
        conditional_nearby=c2,
        conditional_global=c12,
        branch_mutual_information=branch_mi,
        s1=s1,
        s2=s2,
        s12=s12,
    )


def discord(s: BipartiteState, a2: Observable) -> float:
    """Global minus local coherence information of ``a2``."""
    _check_a2(s, a2)
    glob = coherence_information(a2.lift(s.d1), s.matrix)
    loc = coherence_information(a2, linalg.partial_trace(s.matrix, s.dims, [1]))
    return nonneg(glob - loc, "discord")


class LudersIdentity(NamedTuple):
    lueders_mutual_information: float
    information_gain: float
    residual: float
    mutual_information: float


def lueders_mutual_information_identity(s: BipartiteState, a2: Observable) -> LudersIdentity:
    """Mutual information left after the non-selective Lüders map on subsystem 2.

    Checks that it equals gain plus residual correlations, and that it does
    not exceed the mutual information of the original state.
    """
    dec = mutual_information_decomposition(s, a2)
    rho_l = luders_mixture(s.matrix, a2.lift(s.d1))
    i_l = _mutual_information(rho_l, s.d1, s.d2)
    check_identity(i_l, dec.information_gain + dec.residual, "I(rho^L) = gain + residual")
    if i_l > dec.mutual_information + NEG_TOL:
        raise InvariantViolation(f"I(rho^L) = {i_l:.12f} exceeds I(rho) = {dec.mutual_information:.12f}")
    return LudersIdentity(i_l, dec.information_gain, dec.residual, dec.mutual_information)


# -- refinement ------------------------------------------------------------

def refinement_map(fine: Observable, coarse: Observable, rho2, tol: float = 1e-9) -> dict:
    """Branches of ``fine`` that make up each detectable branch of ``coarse``.

    Raises :class:`NotARefinement` unless every detectable eigenprojector of
    ``coarse`` (with respect to ``rho2``) is a sum of eigenprojectors of
    ``fine``.
    """
    if fine.dim != coarse.dim:
        raise DimensionMismatch("observables act on different dimensions")
    probs = outcome_probabilities(rho2, coarse)
    out = {}
    for l, (pl, P) in enumerate(zip(probs, coarse.projectors)):
        if pl <= DETECT_TOL:
            continue
        members = [q for q, R in enumerate(fine.projectors) if np.linalg.norm(P @ R - R) < tol]
        total = sum((fine.projectors[q] for q in members), np.zeros_like(P))
        if np.linalg.norm(total - P) > tol:
            raise NotARefinement(f"detectable branch {l} of the coarse observable is not a sum of fine branches")
        out[l] = members
    return out


@dataclass(frozen=True, eq=False)
class RefinementReport:
    """Decompositions under a coarse observable and a refinement of it.

    The ``*_two_step`` fields assemble the fine decomposition by first
    probing with the coarse observable and then probing each conditional
    state with the fine one.
    """

    coarse: DiscordDecomposition
    fine: DiscordDecomposition
    gain_two_step: float
    discord_two_step: float
    residual_two_step: float


def two_step_decomposition(s: BipartiteState, a2: Observable, a2_fine: Observable) -> RefinementReport:
    _check_a2(s, a2)
    _check_a2(s, a2_fine)
    rho2 = linalg.partial_trace(s.matrix, s.dims, [1])
    refinement_map(a2_fine, a2, rho2)
    coarse = mutual_information_decomposition(s, a2)
    fine = mutual_information_decomposition(s, a2_fine)

    gain = coarse.information_gain
    disc = coarse.discord
    resid = 0.0
    for l in coarse.detectable:
        sub = _decompose(coarse.conditional_global[l], s.d1, s.d2, a2_fine)
        pl = coarse.probabilities[l]
        gain += pl * sub.information_gain
        disc += pl * sub.discord
        resid += pl * sub.residual

    check_identity(gain, fine.information_gain, "two-step information gain")
    check_identity(disc, fine.discord, "two-step discord")
    check_identity(resid, fine.residual, "two-step residual correlations")
    for name, lo, hi in (
        ("information gain", coarse.information_gain, fine.information_gain),
        ("discord", coarse.discord, fine.discord),
        ("residual correlations", fine.residual, coarse.residual),
    ):
        if lo > hi + NEG_TOL:
            raise InvariantViolation(f"{name} is not monotone under refinement ({lo:.12f} > {hi:.12f})")
    return RefinementReport(coarse, fine, gain, disc, resid)


# -- subsystem entropy decomposition ---------------------------------------

@dataclass(frozen=True, eq=False)
class EntropyDecomposition:
    """``S12 = S1 - I12 + S2`` with every term split along ``a2``.

    ``S1 = residual_s1 + gain``; ``I12 = gain + discord + residual_corr``;
    ``S2 = outcome_entropy - local_coherence + residual_s2``.
    """

    residual_s1: float
    gain: float
    discord: float
    residual_corr: float
    outcome_entropy: float
    local_coherence: float
    residual_s2: float
    s1: float
    mutual_information: float
    s2: float
    s12: float

    def rows(self) -> list[tuple[str, float]]:
        return [
            ("residual S1", self.residual_s1),
            ("information gain", self.gain),
            ("discord", self.discord),
            ("residual correlations", self.residual_corr),
            ("H(p_l)", self.outcome_entropy),
            ("local coherence", self.local_coherence),
            ("residual S2", self.residual_s2),
            ("S1", self.s1),
            ("I12", self.mutual_information),
            ("S2", self.s2),
            ("S12", self.s12),
        ]


def subsystem_entropy_decomposition(s: BipartiteState, a2: Observable) -> EntropyDecomposition:
    dec = mutual_information_decomposition(s, a2)
    det = dec.detectable
    p = dec.probabilities
    res1 = sum(p[l] * von_neumann_entropy(dec.conditional_states[l]) for l in det)
    res2 = sum(p[l] * von_neumann_entropy(dec.conditional_nearby[l]) for l in det)
    h = shannon_entropy(p / p.sum())
    check_identity(res1 + dec.information_gain, dec.s1, "S1 bracket")
    check_identity(dec.information_gain + dec.discord + dec.residual, dec.mutual_information, "I12 bracket")
    check_identity(h - dec.local_coherence + res2, dec.s2, "S2 bracket")
    check_identity(dec.s1 - dec.mutual_information + dec.s2, dec.s12, "S12 = S1 - I12 + S2")
    return EntropyDecomposition(
        residual_s1=float(res1),
        gain=dec.information_gain,
        discord=dec.discord,
        residual_corr=dec.residual,
        outcome_entropy=h,
        local_coherence=dec.local_coherence,
        residual_s2=float(res2),
        s1=dec.s1,
        mutual_information=dec.mutual_information,
        s2=dec.s2,
        s12=dec.s12,
    )


# -- mixtures --------------------------------------------------------------

class MixtureGain(NamedTuple):
    gain: float
    mixing_entropy: float


def mixture_information_gain(m: Mixture) -> MixtureGain:
    """Information gain ``J = sum_k w_k S(rho_k || rho)`` and mixing entropy ``H(w)``.

    ``J`` is cross-checked against ``S(rho) - sum_k w_k S(rho_k)`` and
    against ``0 <= J <= H(w)``.
    """
    rho = m.average
    gain = 0.0
    residual = 0.0
    for k in m.support:
        gain += m.weights[k] * relative_entropy(m.states[k], rho)
        residual += m.weights[k] * von_neumann_entropy(m.states[k])
    check_identity(gain, von_neumann_entropy(rho) - residual, "J = S(rho) - sum w S(rho_k)")
    h = shannon_entropy(m.weights)
    if gain > h + NEG_TOL:
        raise InvariantViolation(f"J = {gain:.12f} exceeds the mixing entropy {h:.12f}")
    return MixtureGain(nonneg(gain, "information gain"), h)


def majorization_check(p, q, tol: float = 1e-10) -> bool:
    """True when ``p`` is majorized by ``q`` (partial sums of ``p`` never exceed those of ``q``)."""
    p = np.sort(np.asarray(p, dtype=float))[::-1]
    q = np.sort(np.asarray(q, dtype=float))[::-1]
    n = max(len(p), len(q))
    p = np.pad(p, (0, n - len(p)))
    q = np.pad(q, (0, n - len(q)))
    return bool(np.all(np.cumsum(p) <= np.cumsum(q) + tol))


def pure_refinement_weights(m: Mixture) -> np.ndarray:
    """Weights ``w_k r_j^k`` of the mixture refined into eigenvectors of each component."""
    out = []
    for k in m.support:
        r = linalg.eigvalsh(m.states[k])
        out.extend(m.weights[k] * r[r > EIG_TOL])
    return np.asarray(out)


def max_trace_overlap(m: Mixture) -> float:
    sup = m.support
    best = 0.0
    for i, k in enumerate(sup):
        for kk in sup[i + 1:]:
            best = max(best, float(np.real(np.vdot(m.states[k], m.states[kk]))))
    return best


class SaturationReport(NamedTuple):
    saturated: bool
    orthogonal: bool
    gap: float
    max_overlap: float


def orthogonality_from_saturation(m: Mixture, tol: float = 1e-9, gap_tol: float = 1e-8) -> SaturationReport:
    """Compare ``J == H(w)`` with pairwise orthogonality of the components.

    The two flags are computed independently (entropies versus trace
    overlaps) and must agree.
    """
    gain, h = mixture_information_gain(m)
    overlap = max_trace_overlap(m)
    saturated = h - gain <= gap_tol
    orthogonal = overlap < tol
    if saturated != orthogonal:
        raise InvariantViolation(
            f"J = H(w) is {saturated} but pairwise orthogonality is {orthogonal} "
            f"(gap {h - gain:.3e}, max overlap {overlap:.3e})"
        )
    return SaturationReport(saturated, orthogonal, h - gain, overlap)


# -- bounds and search -----------------------------------------------------

class ConditionalEntropyBound(NamedTuple):
    conditional_entropy: float
    discord_lower_bound: float


def conditional_entropy_bound(s: BipartiteState) -> ConditionalEntropyBound:
    """``S(1|2) = S1 - I12`` and the lower bound ``max(0, I12 - S1)`` on any complete-observable discord."""
    s1 = von_neumann_entropy(s.reduce(1))
    i12 = mutual_information(s)
    return ConditionalEntropyBound(s1 - i12, max(0.0, i12 - s1))


def bloch_bases(resolution: int):
    """Orthonormal qubit bases on a polar x azimuthal grid.

    Returns an array of shape ``(resolution**2, 2, 2)`` whose ``[n, :, b]``
    column is basis vector ``b``. Polar angles include both poles, so the
    computational basis is at index 0.
    """
    theta = np.linspace(0.0, np.pi, resolution)
    phi = np.linspace(0.0, 2 * np.pi, resolution, endpoint=False)
    t, f = np.meshgrid(theta, phi, indexing="ij")
    t, f = t.ravel(), f.ravel()
    c, s = np.cos(t / 2), np.sin(t / 2)
    e = np.exp(1j * f)
    out = np.empty((t.size, 2, 2), dtype=complex)
    out[:, 0, 0] = c
    out[:, 1, 0] = e * s
    out[:, 0, 1] = -np.conj(e) * s
    out[:, 1, 1] = c
    return out


def _batched_entropy(mats: np.ndarray) -> np.ndarray:
    w = np.linalg.eigvalsh(mats)
    w = np.where(w > EIG_TOL, w, 1.0)
    return np.abs(-np.sum(w * np.log2(w), axis=-1))


def grid_discords(s: BipartiteState, bases: np.ndarray) -> np.ndarray:
    """Discord of every complete qubit observable in ``bases`` (shape ``(n, 2, 2)``)."""
    if s.d2 != 2:
        raise UnsupportedDimension(f"basis grids need d2 = 2, got {s.d2}")
    d1 = s.d1
    proj = np.einsum("nab,ncb->nbac", bases, bases.conj())  # [n, branch, 2, 2]
    r = s.matrix.reshape(d1, 2, d1, 2)
    glob = np.einsum("nkac,icjd,nkdb->niajb", proj, r, proj).reshape(-1, 2 * d1, 2 * d1)
    rho2 = s.reduce(2)
    loc = np.einsum("nkac,cd,nkdb->nab", proj, rho2, proj)
    s12 = von_neumann_entropy(s.matrix)
    s2 = von_neumann_entropy(rho2)
    return (_batched_entropy(glob) - s12) - (_batched_entropy(loc) - s2)


def min_discord_grid(s: BipartiteState, resolution: int = 64):
    """Smallest discord over a Bloch-sphere grid of complete qubit observables.

    This is an upper estimate of the least discord; no local refinement is
    attempted. Returns ``(best_discord, best_observable)``.
    """
    bases = bloch_bases(resolution)
    vals = grid_discords(s, bases)
    i = int(np.argmin(vals))
    return nonneg(float(vals[i]), "discord"), Observable.from_basis(bases[i])
