"""Fixed curve corpus and seeded random generators for properties and experiments."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Tuple

from .arith import BiPoly, BranchParam, parse_branch
from . import skp as S
from . import dualgraph as DG
from .treemeasure import IdealSpec, default_branches

CORPUS_TEXT: Tuple[Tuple[str, str], ...] = (
    ("diagonal", "n=1; y=t"),
    ("x-axis", "n=1; y=0"),
    ("y-axis", "n=1; x=0; y=t"),
    ("parabola", "n=1; y=t^2"),
    ("smooth-tangent", "x=t^2; y=t^2+t^3"),
    ("cusp", "n=2; y=t^3"),
    ("cusp-t5", "n=2; y=t^3+t^5"),
    ("cusp-swapped", "x=t^3; y=t^2"),
    ("tangential", "n=2; x=t^2+t^4; y=t^3+2*t^5+t^7"),
    ("e6", "n=3; y=t^4"),
    ("e8", "n=3; y=t^5"),
    ("two-pairs", "n=4; y=t^6+t^7"),
)


def corpus() -> List[Tuple[str, BranchParam]]:
    return [(name, parse_branch(t)) for name, t in CORPUS_TEXT]


def branch(name: str) -> BranchParam:
    return dict(corpus())[name]


def multi_branch_sets() -> List[Tuple[str, Tuple[BranchParam, ...]]]:
    """Reduced curves with several branches, including the tangential pair."""
    b = branch
    return [
        ("tangential-pair", (b("cusp"), b("tangential"))),
        ("two-lines", (parse_branch("n=1; y=t"), parse_branch("n=1; y=-t"))),
        ("axes-and-cusp", (b("y-axis"), b("x-axis"), b("cusp"))),
        ("two-cusps", (b("cusp"), b("cusp-t5"))),
    ]


# ---------------------------------------------------------------------------
# random SKPs and polynomials


def _rand_q(rng: random.Random, height: int, lo: Fraction) -> Fraction:
    while True:
        q = Fraction(rng.randint(1, height), rng.randint(1, height))
        if q > 0 and lo + q > lo:
            return lo + q


def random_skp(rng: random.Random, max_len: int = 3, height: int = 12) -> S.SKP:
    """Random valid finite SKP with k <= max_len and value increments of height <= height."""
    while True:
        k = rng.randint(1, max_len)
        vals = [Fraction(1), Fraction(rng.randint(1, height), rng.randint(1, height))]
        if vals[1] < 1:
            vals[1] = 1 / vals[1]
        keys = [S.X, S.Y]
        ok = True
        for j in range(1, k):
            nj, ms = S._decompose(vals, j)
            if ms[0] < 0:
                ok = False
                break
            mono = BiPoly.const(rng.choice([1, -1, 2, Fraction(1, 2)]))
            for l, e in enumerate(ms):
                mono = mono * keys[l] ** e
            keys.append(keys[j] ** nj - mono)
            vals.append(_rand_q(rng, height, nj * vals[j]))
        if not ok:
            continue
        swap = vals[1] > 1 and rng.random() < 0.3
        s = S.SKP(tuple(keys), tuple(vals), swap)
        if S.validate(s) is None:
            return s


def random_poly(rng: random.Random, max_deg: int = 6, max_terms: int = 5) -> BiPoly:
    while True:
        terms = {}
        for _ in range(rng.randint(1, max_terms)):
            i = rng.randint(0, max_deg)
            j = rng.randint(0, max_deg - i)
            if i + j == 0:
                continue
            terms[(i, j)] = Fraction(rng.randint(-3, 3))
        p = BiPoly({m: c for m, c in terms.items() if c})
        if p.terms:
            return p


# ---------------------------------------------------------------------------
# random blowup sequences


def random_blowups(rng: random.Random, depth: int) -> DG.DualGraph:
    """Random composition of point blowups: `depth` centers, free or satellite."""
    G = DG.blowup_at(DG.DualGraph(), ("origin",))
    for _ in range(depth - 1):
        if G.edges and rng.random() < 0.5:
            a, b = rng.choice(G.edges)
            G = DG.blowup_at(G, ("satellite", a, b))
        else:
            G = DG.blowup_at(G, ("free", rng.randrange(len(G.vertices))))
    return G


def corpus_graphs(depth: int) -> List[Tuple[str, DG.DualGraph]]:
    """First `depth` blowups along each corpus branch plus the minimal models."""
    out = []
    for name, C in corpus():
        pts, _ = DG.nearby_points_of_branch(C, until=depth)
        G = DG.DualGraph()
        for p in pts:
            if p.kind == "origin":
                G = DG.blowup_at(G, ("origin",))
            elif p.kind == "free":
                E = [x for x in p.labels if x is not None][0]
                G = DG.blowup_at(G, ("free", E))
            else:
                G = DG.blowup_at(G, ("satellite",) + tuple(p.labels))
        out.append((name + f"@{depth}", G))
        out.append((name, DG.minimal_desing_from_branches([C])))
    return out


# ---------------------------------------------------------------------------
# random ideal specs


POOL = ("x", "y", "L", "P", "C")


def ideal_pool():
    return default_branches({
        "L": parse_branch("n=1; y=t"),
        "P": parse_branch("n=1; y=t^2"),
        "C": parse_branch("n=2; y=t^3"),
    })


def random_ideal(rng: random.Random, max_gens: int = 3, max_exp: int = 3) -> IdealSpec:
    pool = ideal_pool()
    gens = set()
    for _ in range(rng.randint(1, max_gens)):
        names = rng.sample(POOL, rng.randint(1, 2))
        gens.add(tuple(sorted((n, rng.randint(1, max_exp)) for n in names)))
    used = sorted({n for g in gens for n, _ in g})
    return IdealSpec(tuple((n, pool[n]) for n in used), tuple(sorted(gens)))


@dataclass(frozen=True)
class RandomConfig:
    seed: int = 20240611
    n_skp: int = 200
    n_ideal_pairs: int = 50
    blowup_depth: int = 8
    isometry_depth: int = 6
