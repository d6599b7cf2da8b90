"""Invariants, resolution size and timing for every curve of the built-in corpus.

    python scripts/corpus_report.py [--markdown]
"""

import argparse
import time
from dataclasses import dataclass

from valtree import dualgraph as DG
from valtree import skp as S
from valtree.corpus import corpus, multi_branch_sets


@dataclass(frozen=True)
class ReportConfig:
    markdown: bool = False


def rows():
    for name, C in corpus():
        t0 = time.perf_counter()
        s = S.skp_of_branch(C)
        ci = DG.classical_invariants(C)
        G = DG.minimal_desing_from_branches([C])
        ok = DG.isomorphic(G, DG.minimal_desing_from_equising(DG.equising_from_branches([C])))
        dt = time.perf_counter() - t0
        yield (name, C.to_text(), ci.n, ",".join(map(str, ci.beta_bar)), len(G.vertices),
               len(s.keys), "yes" if ok else "NO", f"{dt * 1000:.0f}")
    for name, Cs in multi_branch_sets():
        t0 = time.perf_counter()
        G = DG.minimal_desing_from_branches(list(Cs))
        ok = DG.isomorphic(G, DG.minimal_desing_from_equising(DG.equising_from_branches(list(Cs))))
        dt = time.perf_counter() - t0
        yield (name, f"{len(Cs)} branches", "-", "-", len(G.vertices), "-",
               "yes" if ok else "NO", f"{dt * 1000:.0f}")


def main(cfg: ReportConfig):
    head = ("curve", "parameterization", "n", "semigroup", "blowups", "keys", "alg=charts", "ms")
    table = [head] + [tuple(map(str, r)) for r in rows()]
    if cfg.markdown:
        print("| " + " | ".join(head) + " |")
        print("|" + "---|" * len(head))
        for r in table[1:]:
            print("| " + " | ".join(r) + " |")
        return
    widths = [max(len(r[i]) for r in table) for i in range(len(head))]
    for r in table:
        print("  ".join(c.ljust(w) for c, w in zip(r, widths)))


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--markdown", action="store_true")
    main(ReportConfig(markdown=ap.parse_args().markdown))
