"""Command-line front end.

    discordkit analyze  STATE OBS
    discordkit chain    STATE OBS
    discordkit classify STATE OBS
    discordkit measure  STATE OBS
    discordkit gen      NAME [D1 D2 RANK]

Exit codes: 0 success, 2 unreadable or invalid input, 3 dimension mismatch,
4 an internal identity failed its residual check.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

import numpy as np

from . import fileio, fixtures
from .coarsening import LINK_TOL, build_chain, quantumness_monotonicity
from .errors import DimensionMismatch, DiscordKitError, InvariantViolation
from .measurement import ApparatusSpec, collapse, entropy_shift_report, premeasure, premeasurement_equalities
from .measures import (
    conditional_entropy_bound,
    identity_tolerance,
    mutual_information_decomposition,
    subsystem_entropy_decomposition,
)
from .states import BipartiteState
from .zerodiscord import classify, mono_orthogonality_certificate, strong_zero_complete_observable

EXIT_OK, EXIT_INPUT, EXIT_DIMS, EXIT_INTERNAL = 0, 2, 3, 4


class Report:
    """Titled sections of labelled numbers, rendered as text or JSON."""

    def __init__(self):
        self.sections: list[tuple[str, list[tuple[str, object]], bool]] = []
        self.lines: list[str] = []

    def section(self, title: str, rows, scientific: bool = False) -> None:
        self.sections.append((title, list(rows), scientific))

    def text(self) -> str:
        out = []
        for title, rows, sci in self.sections:
            out.append(f"== {title}")
            width = max((len(k) for k, _ in rows), default=0)
            for k, v in rows:
                out.append(f"  {k:<{width}}  {_fmt(v, sci)}")
        out.extend(self.lines)
        return "\n".join(out) + "\n"

    def json(self) -> str:
        obj = {title: {k: _jsonable(v) for k, v in rows} for title, rows, _ in self.sections}
        if self.lines:
            obj["messages"] = list(self.lines)
        return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _fmt(v, scientific: bool = False) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.3e}" if scientific else f"{float(v) + 0.0:.6f}".replace("-0.000000", "0.000000")
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt(x, scientific) for x in v) + "]"
    return str(v)


def _jsonable(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(v)
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return str(v)


def _load_pair(args) -> tuple[BipartiteState, object]:
    s = fileio.read_state(args.state)
    if not isinstance(s, BipartiteState):
        raise fileio.ValidationError("dims", "expected a bipartite state (two subsystems)")
    a2 = fileio.read_observable(args.observable)
    if a2.dim != s.d2:
        raise DimensionMismatch(f"observable acts on dimension {a2.dim}, subsystem 2 has dimension {s.d2}")
    return s, a2


# -- commands --------------------------------------------------------------

def cmd_analyze(args) -> Report:
    s, a2 = _load_pair(args)
    dec = mutual_information_decomposition(s, a2)
    ent = subsystem_entropy_decomposition(s, a2)
    bound = conditional_entropy_bound(s)
    rep = Report()
    rep.section("mutual information split (bits)", [
        ("mutual information", dec.mutual_information),
        ("information gain", dec.information_gain),
        ("discord", dec.discord),
        ("residual correlations", dec.residual),
        ("global coherence", dec.global_coherence),
        ("local coherence", dec.local_coherence),
    ])
    rep.section("subsystem entropies (bits)", ent.rows())
    rep.section("conditional entropy", [
        ("S(1|2)", bound.conditional_entropy),
        ("discord lower bound", bound.discord_lower_bound),
    ])
    rep.section("outcomes", [(f"p[{l}]", float(p)) for l, p in enumerate(dec.probabilities)])
    return rep


def cmd_chain(args) -> Report:
    s, a2 = _load_pair(args)
    chain = build_chain(s, a2, tol=args.tol)
    q = quantumness_monotonicity(s, chain)
    rep = Report()
    rep.section("branches", [
        ("A", len(a2)),
        ("B (essential)", len(chain.b2_ess)),
        ("C (twin)", len(chain.c2_tw)),
        ("D (quasi-classical)", len(chain.d2_qc)),
        ("A -> B classes", str(chain.partitions[0].classes)),
        ("B -> C classes", str(chain.partitions[1].classes)),
        ("C -> D classes", str(chain.partitions[2].classes)),
    ])
    rep.section("information gain (bits)", [(k, chain.gains[k]) for k in "DCBA"])
    rep.section("noise ledger (bits)", chain.ledger.rows() + [("total = H(p_l)", chain.outcome_entropy)])
    names = [n for n, _ in chain.stages]
    rep.section("quantumness along D, C, B, A (bits)", [
        *((f"global coherence {n}", v) for n, v in zip(names, q.global_coherence)),
        *((f"local coherence {n}", v) for n, v in zip(names, q.local_coherence)),
        *((f"discord {n}", v) for n, v in zip(names, q.discords)),
    ])
    rep.section("residuals", [("max straight-line residual", q.max_residual)], scientific=True)
    # classes are sensitive to near-ties, so say which cutoffs produced them
    rep.section("tolerances", [("distant-state equality", args.tol), ("branch linking", LINK_TOL)], scientific=True)
    return rep


def cmd_classify(args) -> Report:
    s, a2 = _load_pair(args)
    c = classify(s, a2, tol=args.tol)
    mono, _ = mono_orthogonality_certificate(s, tol=args.tol)
    complete = strong_zero_complete_observable(s, tol=args.tol)
    rep = Report()
    rep.section("classification", [
        ("kind", str(c.kind)),
        ("discord", c.discord),
        ("global coherence", c.global_coherence),
        ("local coherence", c.local_coherence),
        ("commutator norm", c.commutator_norm),
        ("Lueders defect", c.lueders_defect),
    ])
    rep.section("certificate", [
        ("mono-orthogonal", mono),
        ("strong-zero complete observable exists", complete is not None),
    ])
    rep.lines.append(str(c.kind))
    return rep


def cmd_measure(args) -> Report:
    s, a2 = _load_pair(args)
    r = premeasure(s, ApparatusSpec(a2))
    eq = premeasurement_equalities(s, r)
    shift = entropy_shift_report(s, r)
    final = collapse(r)
    unitary_err = float(np.linalg.norm(r.unitary.conj().T @ r.unitary - np.eye(r.unitary.shape[0])))
    rep = Report()
    rep.section("split before vs after (bits)", sorted(eq.values.items()))
    rep.section("residuals: split before vs after", sorted(eq.residuals.items()), scientific=True)
    rep.section("residuals: entropy bookkeeping", sorted(shift.residuals.items()), scientific=True)
    rep.section("summary", [
        ("unitarity residual", unitary_err),
        ("max residual split", eq.max_residual),
        ("max residual entropy", shift.max_residual),
    ], scientific=True)
    rep.section("collapsed state", [("dims", list(final.dims))])
    rep.lines.append(f"PASS all identities within {args.tol:g}")
    return rep


def cmd_gen(args) -> Optional[Report]:
    ints = list(args.params)
    if args.name == "random_bipartite":
        if len(ints) not in (2, 3):
            raise fileio.ValidationError("params", "random_bipartite takes D1 D2 [RANK]")
        d1, d2 = ints[:2]
        rank = ints[2] if len(ints) == 3 else None
        s, obs = fixtures.named(args.name, seed=args.seed, d1=d1, d2=d2, rank=rank)
    else:
        if ints:
            raise fileio.ValidationError("params", f"{args.name} takes no parameters")
        s, obs = fixtures.named(args.name, seed=args.seed)
    text = fileio.dumps_state(s.matrix, s.dims)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.obs_out:
        fileio.write_observable(args.obs_out, obs)
    return None


COMMANDS = {
    "analyze": (cmd_analyze, "split mutual information along an observable"),
    "chain": (cmd_chain, "build the coarsening string and noise ledger"),
    "classify": (cmd_classify, "classify the discord as strong zero, weak zero or positive"),
    "measure": (cmd_measure, "simulate a premeasurement and check its bookkeeping"),
    "gen": (cmd_gen, "write a named or random state file"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-8, help="tolerance for asserted identities (default 1e-8)")
    common.add_argument("--seed", type=int, default=0, help="seed for random generators")
    common.add_argument("--json", action="store_true", help="emit JSON instead of text tables")
    common.add_argument("--out", help="write output to this file instead of stdout")

    parser = argparse.ArgumentParser(prog="discordkit", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_text)
        if name == "gen":
            p.add_argument("name", help="bell, product, classical_classical, weakzero, example1-3, random_bipartite")
            p.add_argument("params", nargs="*", type=int, help="D1 D2 [RANK] for random_bipartite")
            p.add_argument("--obs-out", help="also write the paired observable here")
        else:
            p.add_argument("state")
            p.add_argument("observable")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    func = COMMANDS[args.command][0]
    try:
        with identity_tolerance(args.tol):
            rep = func(args)
    except InvariantViolation as exc:
        print(f"internal check failed: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except DimensionMismatch as exc:
        print(f"dimension mismatch: {exc}", file=sys.stderr)
        return EXIT_DIMS
    except (DiscordKitError, KeyError, ValueError) as exc:
        print(f"invalid input: {exc.args[0] if exc.args else exc}", file=sys.stderr)
        return EXIT_INPUT
    if rep is not None:
        text = rep.json() if args.json else rep.text()
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
