"""Ideal measurement of a nearby observable by a pointer system.

The pointer (subsystem 3) starts in ``|phi>`` and has one basis vector per
branch of the measured observable. The interaction
``U = sum_l P_l (x) V_l`` with ``V_l |phi> = |l>`` copies the branch index
into the pointer. Afterwards the (1+2) marginal is the Lüders mixture of
the initial state, and the mutual information between 1 and (2+3) equals
the initial one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import linalg
from .coarsening import essential_coarsening, twin_coarsening
from .errors import DimensionMismatch, InvariantViolation
from .measures import (
    _decompose,
    check_identity,
    coherence_information,
    current_identity_tolerance,
    shannon_entropy,
    von_neumann_entropy,
)
from .states import BipartiteState, Observable, TripartiteState, luders_mixture, outcome_probabilities

UNITARY_TOL = 1e-10
STATE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class ApparatusSpec:
    """Measured observable, pointer basis (columns) and initial pointer vector.

    By default the pointer basis is the standard basis of a pointer with
    one level per branch and the pointer starts in its first level.
    Pointer positions are ``1, 2, ...``.
    """

    a2: Observable
    pointer_basis: Optional[np.ndarray] = None
    initial_pointer: Optional[np.ndarray] = None

    def __post_init__(self):
        d3 = len(self.a2)
        basis = np.eye(d3, dtype=complex) if self.pointer_basis is None else np.asarray(self.pointer_basis, dtype=complex)
        if basis.shape != (d3, d3):
            raise DimensionMismatch(f"pointer basis must be {d3}x{d3}, got {basis.shape}")
        if np.linalg.norm(basis.conj().T @ basis - np.eye(d3)) > UNITARY_TOL:
            raise ValueError("pointer basis is not orthonormal")
        phi = basis[:, 0] if self.initial_pointer is None else np.asarray(self.initial_pointer, dtype=complex).reshape(-1)
        if phi.shape != (d3,) or abs(np.linalg.norm(phi) - 1.0) > UNITARY_TOL:
            raise ValueError("initial pointer must be a unit vector on the pointer space")
        object.__setattr__(self, "pointer_basis", basis)
        object.__setattr__(self, "initial_pointer", phi)

    @property
    def d3(self) -> int:
        return len(self.a2)

    @property
    def pointer(self) -> Observable:
        return Observable.from_basis(self.pointer_basis, range(1, self.d3 + 1))


def build_measurement_unitary(spec: ApparatusSpec) -> np.ndarray:
    """``sum_l P_l (x) V_l`` on ``d2 * d3``.

    Each ``V_l`` sends the initial pointer to pointer vector ``l``: it is
    ``B_l B_phi^dagger`` where ``B_v`` is the deterministic orthonormal
    completion of ``v``.
    """
    d3 = spec.d3
    from_phi = linalg.complete_basis(spec.initial_pointer, d3)
    u = np.zeros((spec.a2.dim * d3, spec.a2.dim * d3), dtype=complex)
    for l, p in enumerate(spec.a2.projectors):
        v_l = linalg.complete_basis(spec.pointer_basis[:, l], d3) @ from_phi.conj().T
        u += np.kron(p, v_l)
    err = float(np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0])))
    if err > UNITARY_TOL:
        raise InvariantViolation(f"measurement interaction is not unitary ({err:.2e})")
    return u


@dataclass(frozen=True, eq=False)
class PremeasurementResult:
    initial: BipartiteState
    spec: ApparatusSpec
    unitary: np.ndarray
    final_state: TripartiteState
    outcome_probabilities: np.ndarray

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.final_state.dims

    def pointer_projector(self, l: int) -> np.ndarray:
        """``1 (x) 1 (x) |l><l|`` on the full space."""
        return linalg.embed(self.spec.pointer.projectors[l], self.dims, 2)


def premeasure(s: BipartiteState, spec: ApparatusSpec) -> PremeasurementResult:
    """Couple the state to the pointer and check the copy relations.

    Checks that pointer level ``l`` is found with the branch probability
    ``p_l`` and, when found, leaves (1+2) in the selective Lüders state;
    that the (1+2) marginal is the Lüders mixture; and that the entropy is
    unchanged.
    """
    if spec.a2.dim != s.d2:
        raise DimensionMismatch(f"apparatus measures dimension {spec.a2.dim}, subsystem 2 has {s.d2}")
    d1, d2, d3 = s.d1, s.d2, spec.d3
    u = build_measurement_unitary(spec)
    full_u = np.kron(np.eye(d1), u)
    start = np.kron(s.matrix, linalg.projector(spec.initial_pointer))
    final = full_u @ start @ full_u.conj().T
    final = TripartiteState(0.5 * (final + final.conj().T), d1, d2, d3)
    pointer = [linalg.embed(q, final.dims, 2) for q in spec.pointer.projectors]

    lifted = spec.a2.lift(d1)
    p = outcome_probabilities(s.matrix, lifted)
    p_f = np.array([np.real(np.vdot(q, final.matrix)) for q in pointer])
    check_identity(float(np.max(np.abs(p - p_f))), 0.0, "pointer statistics equal branch probabilities", STATE_TOL)
    for l in range(d3):
        if p[l] <= 1e-12:
            continue
        q = pointer[l]
        got = linalg.partial_trace(q @ final.matrix @ q, final.dims, [0, 1]) / p[l]
        want = lifted.projectors[l] @ s.matrix @ lifted.projectors[l] / p[l]
        check_identity(linalg.frobenius_distance(got, want), 0.0, f"pointer level {l} selects the Lüders state", STATE_TOL)
    marginal = final.marginal([1, 2])
    check_identity(linalg.frobenius_distance(marginal, luders_mixture(s.matrix, lifted)), 0.0, "(1+2) marginal is the Lüders mixture", STATE_TOL)
    check_identity(von_neumann_entropy(final.matrix), von_neumann_entropy(s.matrix), "entropy preserved")
    return PremeasurementResult(s, spec, u, final, p_f)


def _a2_on_23(spec: ApparatusSpec) -> Observable:
    return Observable(spec.a2.eigenvalues, tuple(np.kron(p, np.eye(spec.d3)) for p in spec.a2.projectors))


@dataclass(frozen=True)
class CheckReport:
    """Named residuals of asserted identities, all below ``tol``."""

    residuals: dict
    values: dict = field(default_factory=dict)
    tol: Optional[float] = None

    def __post_init__(self):
        if self.tol is None:
            object.__setattr__(self, "tol", current_identity_tolerance())

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values()) if self.residuals else 0.0

    def assert_all(self) -> "CheckReport":
        for name, r in self.residuals.items():
            if not r <= self.tol:
                raise InvariantViolation(f"{name}: residual {r:.3e} exceeds {self.tol:g}")
        return self


def premeasurement_equalities(s: BipartiteState, r: PremeasurementResult, tol: Optional[float] = None) -> CheckReport:
    """Compare the decomposition of ``I(1:2)`` before with that of ``I(1:23)`` after.

    Every ingredient (probabilities, distant states, the distant marginal,
    global and local coherence, per-branch mutual information) and every
    term of the split matches.
    """
    before = _decompose(s.matrix, s.d1, s.d2, r.spec.a2)
    split = r.final_state.split([1])
    after = _decompose(split.matrix, split.d1, split.d2, _a2_on_23(r.spec))

    res = {"p_l": float(np.max(np.abs(before.probabilities - after.probabilities)))}
    dist = [0.0]
    mi = [0.0]
    for l in before.detectable:
        dist.append(linalg.frobenius_distance(before.conditional_states[l], after.conditional_states[l]))
        mi.append(abs(before.branch_mutual_information[l] - after.branch_mutual_information[l]))
    res["distant states"] = max(dist)
    res["distant marginal"] = linalg.frobenius_distance(s.reduce(1), r.final_state.marginal([1]))
    res["global coherence"] = abs(before.global_coherence - after.global_coherence)
    res["local coherence"] = abs(before.local_coherence - after.local_coherence)
    res["branch mutual information"] = max(mi)
    res["information gain"] = abs(before.information_gain - after.information_gain)
    res["discord"] = abs(before.discord - after.discord)
    res["residual correlations"] = abs(before.residual - after.residual)
    vals = {
        "information gain": after.information_gain,
        "discord": after.discord,
        "residual correlations": after.residual,
        "global coherence": after.global_coherence,
        "local coherence": after.local_coherence,
    }
    return CheckReport(res, vals, tol).assert_all()


def entropy_shift_report(s: BipartiteState, r: PremeasurementResult, tol: Optional[float] = None) -> CheckReport:
    """Entropy bookkeeping across the measurement interaction.

    Checks, for the final state: ``I(1:23)`` equals the initial ``I(1:2)``;
    ``S(123) = S(12) - I(12:3) + S(3)`` with the (1+2) entropy raised by the
    global coherence and the pointer entropy equal to ``H(p_l)``; the same
    split along the pointer observable; the global coherence of the
    measured observable equals that of the pointer after the interaction;
    the two are twins; and the pointer is its own twin coarsening.
    """
    dims = r.dims
    rho = r.final_state.matrix
    d1, d2, d3 = dims
    spec = r.spec
    lifted = spec.a2.lift(d1)
    p = outcome_probabilities(s.matrix, lifted)
    det = [l for l in range(len(p)) if p[l] > 1e-12]
    h = shannon_entropy(p / p.sum())

    s12 = von_neumann_entropy(s.matrix)
    ic_glob = coherence_information(lifted, s.matrix)
    ic_loc = coherence_information(spec.a2, s.reduce(2))
    rho12f = r.final_state.marginal([1, 2])
    rho3f = r.final_state.marginal([3])
    s123f = von_neumann_entropy(rho)
    s12f = von_neumann_entropy(rho12f)
    s3f = von_neumann_entropy(rho3f)
    i12_3 = s12f + s3f - s123f

    i1_23 = von_neumann_entropy(r.final_state.marginal([1])) + von_neumann_entropy(r.final_state.marginal([2, 3])) - s123f
    i12_before = von_neumann_entropy(s.reduce(1)) + von_neumann_entropy(s.reduce(2)) - s12
    i12f = von_neumann_entropy(r.final_state.marginal([1])) + von_neumann_entropy(r.final_state.marginal([2])) - s12f

    a3_full = spec.pointer.embed(dims, 2)
    a2_full = spec.a2.embed(dims, 1)
    ic_a3 = coherence_information(a3_full, rho)
    ic_a2_f = coherence_information(a2_full, rho)

    branch_entropy = 0.0
    for l in det:
        P = lifted.projectors[l]
        branch_entropy += p[l] * von_neumann_entropy(P @ s.matrix @ P / p[l])

    res = {
        "I(1:23) = I(1:2)": abs(i1_23 - i12_before),
        "S(123) = S(12)": abs(s123f - s12),
        "S(12) after = S(12) + global coherence": abs(s12f - (s12 + ic_glob)),
        "I(12:3) = global coherence + H(p_l)": abs(i12_3 - (ic_glob + h)),
        "S(3) = H(p_l)": abs(s3f - h),
        "S(12) after = sum p S(rho_12^l) + H(p_l)": abs(s12f - (branch_entropy + h)),
        "I(12:3) = H(p_l) + pointer coherence": abs(i12_3 - (h + ic_a3)),
        "pointer coherence in rho_3 = 0": coherence_information(spec.pointer, rho3f),
        "global coherence preserved": abs(ic_glob - ic_a2_f),
        "pointer coherence = global coherence": abs(ic_a3 - ic_glob),
        "I(1:2) drop = discord": abs((i12_before - i12f) - (ic_glob - ic_loc)),
    }
    if i12f > i1_23 + 1e-9:
        raise InvariantViolation("strong subadditivity violated: I(1:2) after exceeds I(1:23)")

    twin = 0.0
    for l in range(len(p)):
        twin = max(twin, linalg.frobenius_distance(rho @ a2_full.projectors[l], rho @ r.pointer_projector(l)))
    res["twin residual"] = twin

    p3 = outcome_probabilities(rho3f, spec.pointer)
    res["pointer entropy = H(p_l)"] = abs(shannon_entropy(p3 / p3.sum()) - h)

    # the pointer is already its own twin coarsening in the (1+2)|3 cut
    cut123 = r.final_state.split([1, 2])
    b3, part_b = essential_coarsening(cut123, spec.pointer)
    _, _, part_c = twin_coarsening(cut123, b3)
    if len(part_b) != len(det) or len(part_c) != len(det):
        raise InvariantViolation("pointer observable is not its own twin coarsening")

    report = CheckReport(res, {"S(3)": s3f, "global coherence": ic_glob, "H(p_l)": h}, tol)
    if twin > 1e-9:
        raise InvariantViolation(f"twin residual {twin:.3e} exceeds 1e-9")
    return report.assert_all()


def collapse(r: PremeasurementResult) -> TripartiteState:
    """Lüders mixture of the final state along the pointer.

    Checks that it equals ``sum_l p_l rho_12^l (x) |l><l|``, commutes with
    the pointer and leaves the (1+2) marginal unchanged.
    """
    a3 = r.spec.pointer.embed(r.dims, 2)
    out = luders_mixture(r.final_state.matrix, a3)
    s = r.initial
    lifted = r.spec.a2.lift(s.d1)
    expected = sum(
        np.kron(P @ s.matrix @ P, r.spec.pointer.projectors[l])
        for l, P in enumerate(lifted.projectors)
    )
    check_identity(linalg.frobenius_distance(out, expected), 0.0, "collapsed state", STATE_TOL)
    check_identity(float(np.linalg.norm(linalg.commutator(out, a3.matrix))), 0.0, "collapsed state commutes with the pointer", STATE_TOL)
    tr3 = linalg.partial_trace(out, r.dims, [0, 1])
    check_identity(linalg.frobenius_distance(tr3, r.final_state.marginal([1, 2])), 0.0, "(1+2) marginal unchanged", STATE_TOL)
    return TripartiteState(0.5 * (out + out.conj().T), *r.dims)
