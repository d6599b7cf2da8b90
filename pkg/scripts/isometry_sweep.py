"""Sweep random blowup compositions and check the Farey/SKP dictionary and the
class/measure isometry on every vertex pair.

    python scripts/isometry_sweep.py --graphs 200 --depth 8 --seed 1
"""

import argparse
import random
import time
from dataclasses import dataclass

from valtree import dualgraph as DG
from valtree import skp as S
from valtree import treemeasure as TM
from valtree.corpus import random_blowups


@dataclass(frozen=True)
class SweepConfig:
    graphs: int = 100
    depth: int = 8
    seed: int = 1


def sweep(cfg: SweepConfig):
    rng = random.Random(cfg.seed)
    stats = {"graphs": 0, "vertices": 0, "pairs": 0, "failures": 0}
    for _ in range(cfg.graphs):
        G = random_blowups(rng, rng.randint(1, cfg.depth))
        n = len(G.vertices)
        skps = [DG.vertex_to_skp(G, E) for E in range(n)]
        rhos = [TM.class_measure(G, E) for E in range(n)]
        for E in range(n):
            ok = (S.thinness(skps[E]) == G.vertices[E].A
                  and S.generic_multiplicity(skps[E]) == G.vertices[E].b)
            for F in range(n):
                ok &= TM.inner_product(rhos[E], rhos[F]) == (1 if E == F else 0)
                stats["pairs"] += 1
            stats["failures"] += not ok
        stats["graphs"] += 1
        stats["vertices"] += n
    return stats


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--graphs", type=int, default=SweepConfig.graphs)
    ap.add_argument("--depth", type=int, default=SweepConfig.depth)
    ap.add_argument("--seed", type=int, default=SweepConfig.seed)
    a = ap.parse_args()
    t0 = time.perf_counter()
    st = sweep(SweepConfig(a.graphs, a.depth, a.seed))
    print(" ".join(f"{k}={v}" for k, v in st.items()) + f" seconds={time.perf_counter() - t0:.1f}")
    raise SystemExit(1 if st["failures"] else 0)
