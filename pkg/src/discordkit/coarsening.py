"""Coarsening an interrogating observable down to its quasi-classical core.

Starting from a subsystem-2 observable ``A``, three successive coarsenings
are built, each grouping the branches of the previous one:

* ``B`` (essential): branches whose distant states coincide are merged.
* ``C`` (twin): branches whose distant states overlap are chained together
  until the distant mixture becomes orthogonal.
* ``D`` (quasi-classical): branches coupled through off-diagonal blocks of
  the global state are chained together until ``D`` commutes with it.

Only detectable branches take part in the grouping. Every coarsened
observable keeps the undetectable remainder as an extra zero-eigenvalue
branch, so it still resolves the identity.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from . import linalg
from .errors import InvariantViolation
from .measures import (
    NEG_TOL,
    DiscordDecomposition,
    _decompose,
    check_identity,
    coherence_information,
    current_identity_tolerance,
    nonneg,
    shannon_entropy,
)
from .states import (
    DETECT_TOL,
    BipartiteState,
    Mixture,
    Observable,
    luders_mixture,
    outcome_probabilities,
    range_projector,
)

STATE_EQ_TOL = 1e-8
LINK_TOL = 1e-9


# -- partitions ------------------------------------------------------------

class _UnionFind:
    def __init__(self, items: Iterable[int]):
        self.parent = {i: i for i in items}

    def find(self, i: int) -> int:
        root = i
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[i] != root:
            self.parent[i], i = root, self.parent[i]
        return root

    def union(self, i: int, j: int) -> None:
        ri, rj = self.find(i), self.find(j)
        if ri != rj:
            # smaller index becomes the root so roots are class minima
            lo, hi = min(ri, rj), max(ri, rj)
            self.parent[hi] = lo


@dataclass(frozen=True)
class Partition:
    """Disjoint nonempty index classes, ordered by their smallest member."""

    classes: tuple

    def __post_init__(self):
        classes = tuple(tuple(sorted(int(i) for i in c)) for c in self.classes)
        seen: set[int] = set()
        for c in classes:
            if not c:
                raise ValueError("partition classes must be nonempty")
            if seen.intersection(c):
                raise ValueError("partition classes overlap")
            seen.update(c)
        object.__setattr__(self, "classes", tuple(sorted(classes)))

    def __len__(self) -> int:
        return len(self.classes)

    def __iter__(self):
        return iter(self.classes)

    @property
    def members(self) -> list[int]:
        return sorted(i for c in self.classes for i in c)

    def refines(self, other: "Partition") -> bool:
        """True when every class of ``self`` sits inside a class of ``other``."""
        home = {i: n for n, c in enumerate(other.classes) for i in c}
        return all(len({home.get(i) for i in c}) == 1 and c[0] in home for c in self.classes)

    @classmethod
    def singletons(cls, items: Iterable[int]) -> "Partition":
        return cls(tuple((i,) for i in items))

    @classmethod
    def from_links(cls, items: Sequence[int], linked: Callable[[int, int], bool]) -> "Partition":
        """Transitive closure of a symmetric link relation (union-find)."""
        uf = _UnionFind(items)
        for a, i in enumerate(items):
            for j in items[a + 1:]:
                if linked(i, j):
                    uf.union(i, j)
        groups: dict[int, list[int]] = {}
        for i in items:
            groups.setdefault(uf.find(i), []).append(i)
        return cls(tuple(groups.values()))


def _detectable(probs: np.ndarray) -> list[int]:
    return [l for l, p in enumerate(probs) if p > DETECT_TOL]


def distant_mixture(dec: DiscordDecomposition) -> Mixture:
    """The mixture ``rho_1 = sum_l p_l rho_1^l`` over detectable branches."""
    det = set(dec.detectable)
    w = np.array([p if l in det else 0.0 for l, p in enumerate(dec.probabilities)])
    w = w / w.sum()
    return Mixture(w, tuple(dec.conditional_states))


# -- the three coarsenings -------------------------------------------------

def essential_coarsening(s: BipartiteState, a2: Observable, tol: float = STATE_EQ_TOL):
    """Merge branches of ``a2`` whose distant states agree.

    Two detectable branches are linked when their distant states are within
    Frobenius distance ``tol``; classes are the transitive closure of that
    link. Returns ``(observable, partition)``.
    """
    dec = _decompose(s.matrix, s.d1, s.d2, a2)
    states = dec.conditional_states
    part = Partition.from_links(
        dec.detectable,
        lambda i, j: linalg.frobenius_distance(states[i], states[j]) < tol,
    )
    return a2.coarsen(part.classes), part


def m_chained_partition(m: Mixture, tol: float = LINK_TOL) -> Partition:
    """Finest grouping of a mixture's components into mutually orthogonal clumps.

    Components ``k`` and ``k'`` are linked when ``tr(rho_k rho_k') > tol``.
    """
    return Partition.from_links(m.support, lambda i, j: _overlap(m.states[i], m.states[j]) > tol)


def _overlap(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.real(np.vdot(a, b)))


def coarsen_mixture(m: Mixture, part: Partition) -> Mixture:
    weights, states = [], []
    for c in part.classes:
        w = sum(m.weights[k] for k in c)
        weights.append(w)
        states.append(sum(m.weights[k] * m.states[k] for k in c) / w)
    return Mixture(np.array(weights) / sum(weights), tuple(states))


def is_orthogonal_mixture(m: Mixture, tol: float = LINK_TOL) -> bool:
    sup = m.support
    return all(_overlap(m.states[i], m.states[j]) <= tol for a, i in enumerate(sup) for j in sup[a + 1:])


@dataclass(frozen=True, eq=False)
class TwinPair:
    """Subsystem observables that act identically on the global state.

    ``c1.projectors[t] (x) 1`` and ``1 (x) c2.projectors[t]`` give the same
    result when applied to the state, for every shared index ``t``.
    """

    c1: Observable
    c2: Observable
    shared: tuple  # indices t present in both
    max_residual: float


def twin_coarsening(s: BipartiteState, b2_ess: Observable, tol: float = LINK_TOL):
    """Chain the branches of ``b2_ess`` until the distant mixture is orthogonal.

    Returns ``(c2_tw, twin_pair, partition)``. The twin observable on
    subsystem 1 is spanned by the range projectors of the coarse distant
    states, plus a zero-eigenvalue remainder when they do not fill the space.
    """
    dec = _decompose(s.matrix, s.d1, s.d2, b2_ess)
    part = m_chained_partition(distant_mixture(dec), tol)
    c2 = b2_ess.coarsen(part.classes)

    dims = s.dims
    rho = s.matrix
    q1 = []
    for c in part.classes:
        block = sum(dec.probabilities[i] * dec.conditional_states[i] for i in c)
        q1.append(range_projector(block / np.real(np.trace(block)), DETECT_TOL))
    for a in range(len(q1)):
        for b in range(a + 1, len(q1)):
            if np.linalg.norm(q1[a] @ q1[b]) > 1e-9:
                raise InvariantViolation("distant range projectors of the twin coarsening overlap")
    projs1 = list(q1)
    vals1 = list(range(1, len(q1) + 1))
    rest = np.eye(s.d1) - sum(q1)
    if np.real(np.trace(rest)) > 0.5:
        projs1.append(rest)
        vals1.append(0)
    c1 = Observable(tuple(vals1), tuple(projs1))

    resid = 0.0
    for t in range(len(part)):
        left = linalg.embed(c1.projectors[t], dims, 0) @ rho
        right = linalg.embed(c2.projectors[t], dims, 1) @ rho
        resid = max(resid, float(np.linalg.norm(left - right)))
    if resid > 1e-9:
        raise InvariantViolation(f"twin relation fails: residual {resid:.3e}")
    for obs, red in ((c1, s.reduce(1)), (c2, s.reduce(2))):
        err = float(np.linalg.norm(linalg.commutator(obs.matrix, red)))
        if err > 1e-9:
            raise InvariantViolation(f"twin observable does not commute with its reduction ({err:.3e})")
    return c2, TwinPair(c1, c2, tuple(range(len(part))), resid), part


def o_chained_coarsening(rho, c: Observable, tol: float = LINK_TOL):
    """Chain branches of ``c`` coupled by off-diagonal blocks of ``rho``.

    Detectable branches ``t`` and ``t'`` are linked when
    ``||P_t rho P_t'||_F > tol``. The result is the finest coarsening of
    ``c`` that commutes with ``rho``. Returns ``(observable, partition)``.
    """
    rho = linalg.as_matrix(rho)
    probs = outcome_probabilities(rho, c)
    P = c.projectors
    part = Partition.from_links(
        _detectable(probs),
        lambda i, j: np.linalg.norm(P[i] @ rho @ P[j]) > tol,
    )
    return c.coarsen(part.classes), part


# -- the full string ------------------------------------------------------

@dataclass(frozen=True)
class NoiseLedger:
    """Split of the outcome entropy ``H(p_l)`` into five nonnegative parts."""

    redundant_noise: float
    essential_noise: float
    garbled_gain: float
    pure_quantum: float
    quasi_classical: float

    @property
    def total(self) -> float:
        return (
            self.redundant_noise
            + self.essential_noise
            + self.garbled_gain
            + self.pure_quantum
            + self.quasi_classical
        )

    def rows(self) -> list[tuple[str, float]]:
        return [
            ("redundant-noise", self.redundant_noise),
            ("essential-noise", self.essential_noise),
            ("garbled", self.garbled_gain),
            ("pure-quantum", self.pure_quantum),
            ("quasi-classical", self.quasi_classical),
        ]


@dataclass(frozen=True, eq=False)
class CoarseningChain:
    """``D <= C <= B <= A`` with partitions, outcome distributions and the ledger.

    ``partitions[0]`` groups branches of ``a2`` into those of ``b2_ess``,
    ``partitions[1]`` groups ``b2_ess`` into ``c2_tw`` and ``partitions[2]``
    groups ``c2_tw`` into ``d2_qc``.
    """

    a2: Observable
    b2_ess: Observable
    c2_tw: Observable
    d2_qc: Observable
    partitions: tuple
    probabilities: dict  # "l", "s", "t", "k" -> detectable outcome probabilities
    gains: dict  # "A", "B", "C", "D" -> information gain
    ledger: NoiseLedger
    twin: TwinPair
    outcome_entropy: float

    @property
    def stages(self) -> list[tuple[str, Observable]]:
        return [("D", self.d2_qc), ("C", self.c2_tw), ("B", self.b2_ess), ("A", self.a2)]


def _class_probabilities(probs: np.ndarray, part: Partition) -> np.ndarray:
    return np.array([sum(probs[i] for i in c) for c in part.classes])


def _check_containment(child: Observable, parent: Observable, part: Partition, name: str) -> None:
    for n, c in enumerate(part.classes):
        err = np.linalg.norm(child.projectors[n] - sum(parent.projectors[i] for i in c))
        if err > 1e-12:
            raise InvariantViolation(f"{name} branch {n} is not a sum of parent branches ({err:.2e})")


def _ordered(values: Sequence[float], names: Sequence[str], what: str, tol: float) -> None:
    for (a, na), (b, nb) in zip(zip(values, names), zip(values[1:], names[1:])):
        if a > b + tol:
            raise InvariantViolation(f"{what}: {na} = {a:.12f} exceeds {nb} = {b:.12f}")


def build_chain(s: BipartiteState, a2: Observable, tol: float = STATE_EQ_TOL, link_tol: float = LINK_TOL) -> CoarseningChain:
    """Build ``B``, ``C`` and ``D`` from ``a2`` and check the string relations."""
    b2, p_ab = essential_coarsening(s, a2, tol)
    c2, twin, p_bc = twin_coarsening(s, b2, link_tol)
    _, p_cd = o_chained_coarsening(s.matrix, c2.lift(s.d1), link_tol)
    d2 = c2.coarsen(p_cd.classes)
    for child, parent, part, name in ((b2, a2, p_ab, "B"), (c2, b2, p_bc, "C"), (d2, c2, p_cd, "D")):
        _check_containment(child, parent, part, name)

    decs = {name: _decompose(s.matrix, s.d1, s.d2, obs) for name, obs in (("A", a2), ("B", b2), ("C", c2), ("D", d2))}
    p_l = decs["A"].probabilities[_detectable(decs["A"].probabilities)]
    p_s = _class_probabilities(decs["A"].probabilities, p_ab)
    p_t = _class_probabilities(p_s, p_bc)
    p_k = _class_probabilities(p_t, p_cd)
    for name, pushed in (("B", p_s), ("C", p_t), ("D", p_k)):
        direct = decs[name].probabilities[: len(pushed)]
        if np.max(np.abs(direct - pushed)) > 1e-10:
            raise InvariantViolation(f"{name} outcome probabilities are not the push-forward of p_l")
    h = {k: shannon_entropy(v / v.sum()) for k, v in (("l", p_l), ("s", p_s), ("t", p_t), ("k", p_k))}
    gains = {k: d.information_gain for k, d in decs.items()}

    _ordered([gains["D"], gains["C"], gains["B"]], ["J_D", "J_C", "J_B"], "information gain string", NEG_TOL)
    check_identity(gains["B"], gains["A"], "J_B = J_A")
    check_identity(gains["D"], h["k"], "J_D = H(p_k)")
    check_identity(gains["C"], h["t"], "J_C = H(p_t)")
    _ordered([h["t"], h["s"], h["l"]], ["H(p_t)", "H(p_s)", "H(p_l)"], "outcome entropy string", NEG_TOL)

    ledger = NoiseLedger(
        redundant_noise=nonneg(h["l"] - h["s"], "redundant noise"),
        essential_noise=nonneg(h["s"] - gains["B"], "essential noise"),
        garbled_gain=nonneg(gains["B"] - h["t"], "garbled information gain"),
        pure_quantum=nonneg(h["t"] - h["k"], "pure quantum information"),
        quasi_classical=nonneg(h["k"], "quasi-classical information"),
    )
    check_identity(ledger.total, h["l"], "noise ledger sums to H(p_l)")

    # twin stage: no local coherence left, discord is all global coherence
    dc = decs["C"]
    check_identity(dc.local_coherence, 0.0, "I_C(C, rho_2) = 0")
    check_identity(dc.discord, dc.global_coherence, "discord(C) = I_C(C, rho_12)")

    # quasi-classical stage: compatible with the global state, biorthogonal
    dd = decs["D"]
    comm = float(np.linalg.norm(linalg.commutator(d2.lift(s.d1).matrix, s.matrix)))
    if comm > 1e-9:
        raise InvariantViolation(f"[D, rho_12] = {comm:.3e}")
    check_identity(dd.discord, 0.0, "discord(D) = 0")
    k_det = dd.detectable
    for a, k in enumerate(k_det):
        for kk in k_det[a + 1:]:
            for states in (dd.conditional_states, dd.conditional_nearby):
                if np.linalg.norm(states[k] @ states[kk]) > tol:
                    raise InvariantViolation(f"global mixture under D is not biorthogonal (branches {k}, {kk})")

    return CoarseningChain(
        a2=a2,
        b2_ess=b2,
        c2_tw=c2,
        d2_qc=d2,
        partitions=(p_ab, p_bc, p_cd),
        probabilities={"l": p_l, "s": p_s, "t": p_t, "k": p_k},
        gains=gains,
        ledger=ledger,
        twin=twin,
        outcome_entropy=h["l"],
    )


@dataclass(frozen=True)
class QuantumnessReport:
    """Coherence and discord along ``D, C, B, A`` with straight-line residuals."""

    global_coherence: tuple
    local_coherence: tuple
    discords: tuple
    straight_line_global: tuple  # the four summands for the global state
    straight_line_local: tuple
    max_residual: float


def _straight_line(stages: Sequence[Observable], rho: np.ndarray) -> tuple:
    """Split ``I_C(A, rho)`` over the string by applying coarse Lüders maps first."""
    parts = []
    current = rho
    for obs in stages:
        parts.append(coherence_information(obs, current))
        current = luders_mixture(current, obs)
    return tuple(parts)


def quantumness_monotonicity(s: BipartiteState, chain: CoarseningChain, tol: Optional[float] = None) -> QuantumnessReport:
    """Check that coherence and discord grow along ``D, C, B, A``.

    Also checks that ``I_C(A, rho)`` splits into the coherence of ``D``
    plus the coherence of each finer stage in the state already dephased by
    the coarser ones, on subsystem 2 and on the global state.
    """
    tol = current_identity_tolerance() if tol is None else tol
    stages = [obs for _, obs in chain.stages]
    names = [n for n, _ in chain.stages]
    rho2 = s.reduce(2)
    glob, loc, disc = [], [], []
    for obs in stages:
        g = coherence_information(obs.lift(s.d1), s.matrix)
        lc = coherence_information(obs, rho2)
        glob.append(g)
        loc.append(lc)
        disc.append(nonneg(g - lc, "discord"))
    _ordered(glob, names, "global coherence string", tol)
    _ordered(loc, names, "local coherence string", tol)
    _ordered(disc, names, "discord string", tol)

    line_g = _straight_line([o.lift(s.d1) for o in stages], s.matrix)
    line_l = _straight_line(stages, rho2)
    r = max(
        check_identity(sum(line_g), glob[-1], "straight line, global state", tol),
        check_identity(sum(line_l), loc[-1], "straight line, subsystem 2", tol),
    )
    return QuantumnessReport(tuple(glob), tuple(loc), tuple(disc), line_g, line_l, r)
