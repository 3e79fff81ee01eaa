"""Largest identity residuals over seeded random states, per dimension pair.

Runs the decomposition, the chain and a premeasurement on each state and
reports the worst residual seen for each family of checks.
"""

import argparse
from dataclasses import dataclass

import numpy as np

from discordkit import fixtures
from discordkit.coarsening import build_chain, quantumness_monotonicity
from discordkit.measurement import ApparatusSpec, entropy_shift_report, premeasure, premeasurement_equalities
from discordkit.measures import mutual_information_decomposition


@dataclass(frozen=True)
class Config:
    seed: int = 0
    samples: int = 50
    max_d1: int = 3
    max_d2: int = 3


def survey(cfg: Config, d1: int, d2: int, rng: np.random.Generator) -> dict:
    worst = {"split": 0.0, "chain": 0.0, "measurement": 0.0}
    for n in range(cfg.samples):
        if n % 2:
            s, a2 = fixtures.random_structured_bipartite(rng, d1, d2)
        else:
            s = fixtures.random_bipartite(rng, d1, d2, int(rng.integers(1, d1 * d2 + 1)))
            a2 = fixtures.random_observable(rng, d2, int(rng.integers(1, d2 + 1)))
        dec = mutual_information_decomposition(s, a2)
        gap = abs(dec.information_gain + dec.discord + dec.residual - dec.mutual_information)
        worst["split"] = max(worst["split"], gap)
        chain = build_chain(s, a2)
        q = quantumness_monotonicity(s, chain)
        worst["chain"] = max(worst["chain"], q.max_residual, abs(chain.ledger.total - chain.outcome_entropy))
        r = premeasure(s, ApparatusSpec(a2))
        m = max(premeasurement_equalities(s, r).max_residual, entropy_shift_report(s, r).max_residual)
        worst["measurement"] = max(worst["measurement"], m)
    return worst


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=Config.seed)
    ap.add_argument("--samples", type=int, default=Config.samples)
    args = ap.parse_args()
    cfg = Config(seed=args.seed, samples=args.samples)
    rng = np.random.default_rng(cfg.seed)
    print(f"{'d1':>3} {'d2':>3} {'split':>10} {'chain':>10} {'measurement':>12}")
    for d1 in range(1, cfg.max_d1 + 1):
        for d2 in range(2, cfg.max_d2 + 1):
            w = survey(cfg, d1, d2, rng)
            print(f"{d1:>3} {d2:>3} {w['split']:10.2e} {w['chain']:10.2e} {w['measurement']:12.2e}")


if __name__ == "__main__":
    main()
