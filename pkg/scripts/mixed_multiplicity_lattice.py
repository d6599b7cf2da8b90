"""Compare e(I, J) computed from tree measures with lattice-point counts of
dim R/(I^n) for random primary monomial ideals.

    python scripts/mixed_multiplicity_lattice.py --pairs 100 --max-exp 6
"""

import argparse
import random
from dataclasses import dataclass

from valtree import treemeasure as TM
from valtree.acceptance import lattice_mixed


@dataclass(frozen=True)
class LatticeConfig:
    pairs: int = 50
    max_exp: int = 5
    seed: int = 7


def random_monomial_ideal(rng, max_exp):
    gens = {(rng.randint(1, max_exp), 0), (0, rng.randint(1, max_exp))}
    for _ in range(rng.randint(0, 2)):
        gens.add((rng.randint(1, max_exp), rng.randint(1, max_exp)))
    return sorted(gens)


def as_text(gens):
    return ", ".join("*".join(v if e == 1 else f"{v}^{e}" for v, e in (("x", a), ("y", b)) if e) for a, b in gens)


def main(cfg: LatticeConfig) -> int:
    rng = random.Random(cfg.seed)
    bad = 0
    for _ in range(cfg.pairs):
        gi, gj = random_monomial_ideal(rng, cfg.max_exp), random_monomial_ideal(rng, cfg.max_exp)
        tree = TM.mixed_multiplicity(TM.parse_ideal(as_text(gi)), TM.parse_ideal(as_text(gj)))
        lat = lattice_mixed(gi, gj)
        flag = "" if tree == lat else "  MISMATCH"
        bad += tree != lat
        print(f"e({as_text(gi)} | {as_text(gj)}) tree={tree} lattice={lat}{flag}")
    print(f"{cfg.pairs - bad}/{cfg.pairs} pairs agree")
    return 1 if bad else 0


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--pairs", type=int, default=LatticeConfig.pairs)
    ap.add_argument("--max-exp", type=int, default=LatticeConfig.max_exp)
    ap.add_argument("--seed", type=int, default=LatticeConfig.seed)
    a = ap.parse_args()
    raise SystemExit(main(LatticeConfig(a.pairs, a.max_exp, a.seed)))
