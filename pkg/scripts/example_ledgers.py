"""Print the coarsening chain and noise ledger for each built-in example."""

import argparse
from dataclasses import dataclass

from discordkit import fixtures
from discordkit.coarsening import build_chain, quantumness_monotonicity


@dataclass(frozen=True)
class Config:
    names: tuple = ("bell", "product", "classical_classical", "weakzero", "example1", "example2", "example3")
    rotated_example2: bool = True


def run(cfg: Config) -> None:
    cases = [(name, *fixtures.named(name)) for name in cfg.names]
    if cfg.rotated_example2:
        cases.append(("example2 (rotated probe)", *fixtures.example2(rotated=True)))
    for name, s, a2 in cases:
        chain = build_chain(s, a2)
        q = quantumness_monotonicity(s, chain)
        sizes = " -> ".join(str(len(o)) for o in (chain.a2, chain.b2_ess, chain.c2_tw, chain.d2_qc))
        print(f"{name}: branches A->B->C->D {sizes}, H(p_l) = {chain.outcome_entropy:.6f}")
        for label, value in chain.ledger.rows():
            print(f"    {label:16s} {value:.6f}")
        print("    discord D,C,B,A  " + "  ".join(f"{d:.6f}" for d in q.discords))


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--no-rotated", action="store_true", help="skip the rotated probe of example2")
    args = ap.parse_args()
    run(Config(rotated_example2=not args.no_rotated))


if __name__ == "__main__":
    main()
