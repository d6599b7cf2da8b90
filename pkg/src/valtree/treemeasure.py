"""Finite parameterized trees in the valuative tree: potentials, the tree
Laplacian, tree transforms of ideals, Zariski factorization, mixed
multiplicities and the measure/cohomology isometry on blowup models."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .arith import INF, BranchParam, ExtRat, ValtreeError, fmt_q, parse_branch
from . import skp as S
from . import dualgraph as DG


# ---------------------------------------------------------------------------
# masses


@dataclass(frozen=True)
class CQ:
    """Gaussian rational re + i*im."""

    re: Fraction
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", Fraction(self.re))
        object.__setattr__(self, "im", Fraction(self.im))

    @staticmethod
    def lift(v) -> "CQ":
        return v if isinstance(v, CQ) else CQ(Fraction(v))

    def __add__(self, o):
        o = CQ.lift(o)
        return CQ(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return CQ(-self.re, -self.im)

    def __sub__(self, o):
        return self + (-CQ.lift(o))

    def __rsub__(self, o):
        return CQ.lift(o) - self

    def __mul__(self, o):
        o = CQ.lift(o)
        return CQ(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def conj(self) -> "CQ":
        return CQ(self.re, -self.im)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def real(self) -> Optional[Fraction]:
        return self.re if not self.im else None


Mass = Union[Fraction, CQ]


def _conj(m: Mass) -> Mass:
    return m.conj() if isinstance(m, CQ) else m


def _simplify(m: Mass) -> Mass:
    if isinstance(m, CQ) and not m.im:
        return m.re
    return m


def fmt_mass(m: Mass):
    if isinstance(m, CQ):
        return [fmt_q(m.re), fmt_q(m.im)]
    return fmt_q(m)


def _scale(m: Mass, v: ExtRat) -> ExtRat:
    """m * v allowing v = inf only for positive real m."""
    if v is INF:
        if isinstance(m, CQ):
            m = m.real()
            if m is None:
                raise ValtreeError("complex mass against infinite skewness")
        if m > 0:
            return INF
        if m == 0:
            return Fraction(0)
        raise ValtreeError("negative mass against infinite skewness")
    return m * v


def _sum(vals) -> ExtRat:
    acc: Mass = Fraction(0)
    for v in vals:
        if v is INF:
            return INF
        acc = acc + v
    return _simplify(acc)


# ---------------------------------------------------------------------------
# node identity


def node_key(s: S.SKP):
    if s.truncated:
        return ("curve", s.source)
    return ("val",) + s.data()


def alpha_wedge(s: S.SKP, t: S.SKP) -> ExtRat:
    """alpha(s ^ t), the basic pairing of two tree points."""
    return S.skewness(S.wedge(s, t))


# ---------------------------------------------------------------------------
# measures


@dataclass(frozen=True)
class AtomicMeasure:
    atoms: Tuple[Tuple[S.SKP, Mass], ...] = ()

    @staticmethod
    def of(pairs) -> "AtomicMeasure":
        acc: Dict = {}
        rep: Dict = {}
        for s, m in pairs:
            k = node_key(s)
            rep.setdefault(k, s)
            acc[k] = acc.get(k, Fraction(0)) + m
        items = [(rep[k], _simplify(v)) for k, v in acc.items() if v]
        items.sort(key=lambda sm: S.skp_to_text(sm[0]))
        return AtomicMeasure(tuple(items))

    def __add__(self, other: "AtomicMeasure") -> "AtomicMeasure":
        return AtomicMeasure.of(self.atoms + other.atoms)

    def scale(self, c) -> "AtomicMeasure":
        return AtomicMeasure.of((s, m * c) for s, m in self.atoms)

    def mass(self) -> Mass:
        return _simplify(sum((m for _, m in self.atoms), Fraction(0)))

    def same(self, other: "AtomicMeasure") -> bool:
        a = {node_key(s): m for s, m in self.atoms}
        b = {node_key(s): m for s, m in other.atoms}
        return a == b


# ---------------------------------------------------------------------------
# finite trees


@dataclass(frozen=True)
class FiniteTree:
    """Nodes (SKPs) closed under infima, rooted at nu_m, with segment multiplicities."""

    nodes: Tuple[S.SKP, ...]
    alpha: Tuple[ExtRat, ...]
    parent: Tuple[Optional[int], ...]
    mult: Tuple[Optional[int], ...]  # multiplicity on the segment ]parent, node]

    def children(self, i: int) -> List[int]:
        return [j for j, p in enumerate(self.parent) if p == i]

    def index(self, s: S.SKP) -> int:
        k = node_key(s)
        for i, t in enumerate(self.nodes):
            if node_key(t) == k:
                return i
        raise KeyError("point not in tree")

    def leq(self, i: int, j: int) -> bool:
        """node i lies on the segment [root, node j]."""
        while j is not None:
            if j == i:
                return True
            j = self.parent[j]
        return False


def tree_from_points(points: Sequence[S.SKP]) -> FiniteTree:
    pts: Dict = {node_key(S.NU_M): S.NU_M}
    for p in points:
        pts.setdefault(node_key(p), p)
    base = list(pts.values())
    for a, b in combinations(base, 2):
        w = S.wedge(a, b)
        pts.setdefault(node_key(w), w)
    for p in list(pts.values()):
        for j in S.approximating_indices(p):
            q = p.prefix(j)
            pts.setdefault(node_key(q), q)
    nodes = list(pts.values())
    alphas = [S.skewness(n) for n in nodes]
    order = sorted(range(len(nodes)), key=lambda i: (alphas[i] is INF,
                                                     alphas[i] if alphas[i] is not INF else 0,
                                                     S.skp_to_text(nodes[i]),
                                                     str(nodes[i].source)))
    nodes = [nodes[i] for i in order]
    alphas = [alphas[i] for i in order]
    parent: List[Optional[int]] = [None] * len(nodes)
    for i in range(1, len(nodes)):
        best = None
        for j in range(len(nodes)):
            if j == i:
                continue
            if alphas[j] is INF:
                continue
            if alphas[i] is not INF and alphas[j] >= alphas[i]:
                continue
            if S.compare(nodes[j], nodes[i]) == "less":
                if best is None or alphas[j] > alphas[best]:
                    best = j
        parent[i] = best
    mult = [None] + [S.multiplicity(nodes[i]) for i in range(1, len(nodes))]
    return FiniteTree(tuple(nodes), tuple(alphas), tuple(parent), tuple(mult))


# ---------------------------------------------------------------------------
# potentials


@dataclass(frozen=True)
class TreePotential:
    """Values at nodes and slopes d g / d alpha on the edge into each node."""

    tree: FiniteTree
    values: Tuple[ExtRat, ...]
    slopes: Tuple[Optional[Mass], ...]

    def value_at(self, s: S.SKP) -> ExtRat:
        return self.values[self.tree.index(s)]


def _check_affine(T: FiniteTree, values, slopes):
    for i in range(1, len(T.nodes)):
        p = T.parent[i]
        if T.alpha[i] is INF:
            continue
        if values[i] - values[p] != slopes[i] * (T.alpha[i] - T.alpha[p]):
            raise ValtreeError("potential is not affine on a segment")


def laplacian(g: TreePotential) -> AtomicMeasure:
    """Atoms: incoming minus outgoing slopes; at the root g(root) minus outgoing."""
    T = g.tree
    out = []
    for i in range(len(T.nodes)):
        kids = T.children(i)
        outflow = sum((g.slopes[c] for c in kids), Fraction(0))
        if T.parent[i] is None:
            m = g.values[i] - outflow
        else:
            m = g.slopes[i] - outflow
        if m:
            out.append((T.nodes[i], m))
    return AtomicMeasure.of(out)


def potential_on(T: FiniteTree, rho: AtomicMeasure) -> TreePotential:
    values = []
    for i, node in enumerate(T.nodes):
        values.append(_sum(_scale(m, alpha_wedge(s, node)) for s, m in rho.atoms))
    idx = [T.index(s) for s, _ in rho.atoms]
    slopes: List[Optional[Mass]] = [None]
    for i in range(1, len(T.nodes)):
        sl = sum((m for (s, m), j in zip(rho.atoms, idx) if T.leq(i, j)), Fraction(0))
        slopes.append(_simplify(sl))
    return TreePotential(T, tuple(values), tuple(slopes))


def potential_of_measure(rho: AtomicMeasure) -> TreePotential:
    """g(tau) = sum mass * alpha(sigma ^ tau) on the tree spanned by the atoms."""
    T = tree_from_points([s for s, _ in rho.atoms])
    return potential_on(T, rho)


def inner_product(rho: AtomicMeasure, sigma: AtomicMeasure) -> ExtRat:
    """sum m_i conj(m'_j) alpha(t_i ^ t'_j)."""
    terms = []
    for s, m in rho.atoms:
        for t, mm in sigma.atoms:
            terms.append(_scale(m * _conj(mm), alpha_wedge(s, t)))
    return _sum(terms)


# ---------------------------------------------------------------------------
# ideals


COORD_X = BranchParam(1, (), None, True)   # {x = 0}
COORD_Y = BranchParam(1, (), None, False)  # {y = 0}


@dataclass(frozen=True)
class IdealSpec:
    """Generators as formal products of named branches."""

    branches: Tuple[Tuple[str, BranchParam], ...]
    generators: Tuple[Tuple[Tuple[str, int], ...], ...]

    def __post_init__(self):
        if not self.generators:
            raise ValtreeError("an ideal needs at least one generator")
        names = {n for n, _ in self.branches}
        for gen in self.generators:
            for name, e in gen:
                if name not in names:
                    raise ValtreeError(f"undeclared branch {name!r}")
                if e <= 0:
                    raise ValtreeError("exponents must be positive")

    def branch(self, name: str) -> BranchParam:
        return dict(self.branches)[name]

    def to_text(self) -> str:
        return ", ".join(product_to_text(g) for g in self.generators)


def product_to_text(gen) -> str:
    return "*".join(n if e == 1 else f"{n}^{e}" for n, e in gen) or "1"


def default_branches(extra: Optional[Mapping[str, BranchParam]] = None):
    d = {"x": COORD_X, "y": COORD_Y}
    if extra:
        d.update(extra)
    return d


_FACTOR = re.compile(r"\s*([A-Za-z_]\w*)\s*(?:\^\s*(\d+))?\s*")


def parse_product(text: str, names) -> Tuple[Tuple[str, int], ...]:
    """'x^2*C' -> (('C',1),('x',2)); juxtaposed coordinate letters ('xy') are split."""
    out: Dict[str, int] = {}
    for part in text.split("*"):
        part = part.strip()
        if not part:
            raise ValtreeError(f"malformed product {text!r}")
        pos = 0
        while pos < len(part):
            m = _FACTOR.match(part, pos)
            if not m or m.end() == pos:
                raise ValtreeError(f"malformed factor in {text!r} at offset {pos}")
            name, e = m.group(1), int(m.group(2) or 1)
            if name not in names and set(name) <= set(names):
                for ch in name[:-1]:
                    out[ch] = out.get(ch, 0) + 1
                name = name[-1]
            if name not in names:
                raise ValtreeError(f"undeclared branch {name!r}")
            out[name] = out.get(name, 0) + e
            pos = m.end()
    return tuple(sorted(out.items()))


def parse_ideal(text: str, branches: Optional[Mapping[str, BranchParam]] = None) -> IdealSpec:
    br = default_branches(branches)
    gens = tuple(parse_product(g, br) for g in text.split(",") if g.strip())
    if not gens:
        raise ValtreeError("empty ideal")
    used = sorted({n for g in gens for n, _ in g})
    return IdealSpec(tuple((n, br[n]) for n in used), gens)


def ideal_product(I: IdealSpec, J: IdealSpec) -> IdealSpec:
    br = dict(I.branches)
    for n, C in J.branches:
        if n in br and br[n] != C:
            raise ValtreeError(f"branch {n!r} declared twice")
        br[n] = C
    gens = []
    for a in I.generators:
        for b in J.generators:
            d = dict(a)
            for n, e in b:
                d[n] = d.get(n, 0) + e
            gens.append(tuple(sorted(d.items())))
    gens = tuple(sorted(set(gens)))
    return IdealSpec(tuple(sorted(br.items())), gens)


def ideal_multiplicity_order(I: IdealSpec) -> int:
    """m(I): least order of a generator."""
    return min(sum(e * I.branch(n).n for n, e in g) for g in I.generators)


def ideal_to_json(I: IdealSpec) -> dict:
    return {
        "schema": "ideal.v1",
        "branches": {n: C.to_text() for n, C in I.branches if n not in ("x", "y")},
        "generators": [product_to_text(g) for g in I.generators],
    }


def ideal_from_json(d: dict) -> IdealSpec:
    if d.get("schema", "ideal.v1") != "ideal.v1":
        raise ValtreeError("expected schema ideal.v1")
    br = {n: parse_branch(t) for n, t in d.get("branches", {}).items()}
    return parse_ideal(", ".join(d["generators"]), br)


@lru_cache(maxsize=512)
def _curve_skp(C: BranchParam) -> S.SKP:
    return S.skp_of_branch(C)


def span_tree(branches: Sequence[BranchParam],
              kinks: Sequence[Tuple[BranchParam, ExtRat]] = ()) -> FiniteTree:
    """Tree spanned by nu_m, the curve valuations and requested kink points."""
    pts = [_curve_skp(C) for C in dict.fromkeys(branches)]
    for C, a in kinks:
        pts.append(S.point_at_skewness(_curve_skp(C), a))
    return tree_from_points(pts)


def _gen_affine(T: FiniteTree, gen, I: IdealSpec):
    """Values and edge slopes of g_phi for a product phi of branches."""
    ends = [(_curve_skp(I.branch(n)), e * I.branch(n).n) for n, e in gen]
    end_idx = [(T.index(s), w) for s, w in ends]
    vals, slopes = [], [None]
    for node in T.nodes:
        vals.append(_sum(_scale(Fraction(w), alpha_wedge(node, s)) for s, w in ends))
    for i in range(1, len(T.nodes)):
        slopes.append(sum((Fraction(w) for j, w in end_idx if T.leq(i, j)), Fraction(0)))
    return vals, slopes


def _envelope_kinks(T: FiniteTree, lines) -> List[S.SKP]:
    """Points where the minimum of affine functions switches, edge by edge."""
    kinks = []
    for i in range(1, len(T.nodes)):
        p = T.parent[i]
        a0, a1 = T.alpha[p], T.alpha[i]
        cur_lines = [(vals[p], slopes[i]) for vals, slopes in lines]
        best = min(cur_lines, key=lambda vs: (vs[0], vs[1]))
        pos = a0
        while True:
            nxt = None
            for v, s in cur_lines:
                if s < best[1]:
                    a = a0 + (v - best[0]) / (best[1] - s)
                    if a > pos and (nxt is None or a < nxt[0] or (a == nxt[0] and s < nxt[1][1])):
                        nxt = (a, (v, s))
            if nxt is None or (a1 is not INF and nxt[0] >= a1):
                break
            pos, best = nxt[0], nxt[1]
            kinks.append(S.point_at_skewness(T.nodes[i], pos))
    return kinks


def _ideal_tree(I: IdealSpec, extra: Sequence[BranchParam] = ()):
    brs = [C for _, C in I.branches] + list(extra)
    T0 = span_tree(brs)
    lines = [_gen_affine(T0, g, I) for g in I.generators]
    kinks = _envelope_kinks(T0, lines)
    if kinks:
        T = tree_from_points(list(T0.nodes) + kinks)
    else:
        T = T0
    return T


def _min_potential(T: FiniteTree, I: IdealSpec) -> TreePotential:
    lines = [_gen_affine(T, g, I) for g in I.generators]
    values = []
    for i in range(len(T.nodes)):
        values.append(min(vals[i] for vals, _ in lines))
    slopes: List[Optional[Fraction]] = [None]
    for i in range(1, len(T.nodes)):
        p = T.parent[i]
        if T.alpha[i] is INF:
            at_p = [(vals[p], sl[i]) for vals, sl in lines]
            slopes.append(min(at_p)[1])
        else:
            slopes.append((values[i] - values[p]) / (T.alpha[i] - T.alpha[p]))
    return TreePotential(T, tuple(values), tuple(slopes))


def tree_transform(I: IdealSpec) -> TreePotential:
    """g_I(nu) = min over generators of nu(generator), on the span tree with kinks."""
    T = _ideal_tree(I)
    return _min_potential(T, I)


def generator_potential(I: IdealSpec, gen, T: FiniteTree) -> TreePotential:
    vals, slopes = _gen_affine(T, gen, I)
    return TreePotential(T, tuple(vals), tuple(slopes))


@dataclass(frozen=True)
class Factor:
    valuation: S.SKP
    b: int
    n: int
    kind: str


def zariski_factor(I: IdealSpec) -> Tuple[AtomicMeasure, Tuple[Factor, ...]]:
    """rho_I = Laplacian of g_I, factored as sum n_i b_i nu_i."""
    rho = laplacian(tree_transform(I))
    factors = []
    for s, m in rho.atoms:
        if S.is_curve(s):
            b, kind = S.multiplicity(s), "curve"
        else:
            b, kind = S.generic_multiplicity(s), "divisorial"
        q = Fraction(m) / b
        if q.denominator != 1 or q <= 0:
            raise ValtreeError(f"atom mass {m} is not a positive multiple of {b}")
        factors.append(Factor(s, b, int(q), kind))
    return rho, tuple(factors)


def integral_closure_member(phi: Sequence[Tuple[str, int]], I: IdealSpec,
                            branches: Optional[Mapping[str, BranchParam]] = None) -> bool:
    """phi in the integral closure of I, i.e. g_phi >= g_I on the whole tree."""
    br = default_branches(branches)
    br.update(I.branches)
    for n, _ in phi:
        if n not in br:
            raise ValtreeError(f"undeclared branch {n!r}")
    br = {n: br[n] for n in sorted({n for n, _ in phi} | set(dict(I.branches)))}
    extra = [br[n] for n, _ in phi if n not in dict(I.branches)]
    J = IdealSpec(tuple(sorted(br.items())), I.generators)
    T = _ideal_tree(J, extra)
    gI = _min_potential(T, J)
    P = IdealSpec(tuple(sorted(br.items())), (tuple(phi),))
    vphi, sphi = _gen_affine(T, tuple(phi), P)
    for i in range(len(T.nodes)):
        if vphi[i] < gI.values[i]:
            return False
        if T.alpha[i] is INF and i:
            p = T.parent[i]
            if sphi[i] < gI.slopes[i] or vphi[p] < gI.values[p]:
                return False
    return True


def mixed_multiplicity(I: IdealSpec, J: IdealSpec) -> Fraction:
    """e(I, J) = rho_I . rho_J for primary ideals."""
    rI, _ = zariski_factor(I)
    rJ, _ = zariski_factor(J)
    for s, _ in rI.atoms + rJ.atoms:
        if S.is_curve(s):
            raise ValtreeError("ideal is not primary (curve atom in its tree measure)")
    return inner_product(rI, rJ)


# ---------------------------------------------------------------------------
# classes on blowup models


@dataclass(frozen=True)
class CohomClass:
    coords: Tuple[Tuple[int, Mass], ...]

    @staticmethod
    def of(d: Mapping[int, Mass]) -> "CohomClass":
        return CohomClass(tuple(sorted((i, c) for i, c in d.items() if c)))

    def __add__(self, other: "CohomClass") -> "CohomClass":
        d = dict(self.coords)
        for i, c in other.coords:
            d[i] = d.get(i, Fraction(0)) + c
        return CohomClass.of(d)

    def scale(self, c) -> "CohomClass":
        return CohomClass.of({i: v * c for i, v in self.coords})


def pairing(w: CohomClass, v: CohomClass) -> Mass:
    """w.v = -sum c_i conj(c'_i) in the basis of exceptional classes."""
    d = dict(v.coords)
    return _simplify(-sum((c * _conj(d[i]) for i, c in w.coords if i in d), Fraction(0)))


def class_of_vertex(G: DG.DualGraph, E: int) -> CohomClass:
    return CohomClass.of({E: Fraction(1)})


def class_measure(G: DG.DualGraph, E: int) -> AtomicMeasure:
    """Measure of [E] at its creation model: b_E nu_E minus parents' b nu."""
    comp = G.vertices[E]
    nu = DG.vertex_to_skp(G, E)
    if comp.kind == "origin":
        return AtomicMeasure.of([(nu, Fraction(1))])
    atoms = [(nu, Fraction(comp.b))]
    for P in comp.parents:
        atoms.append((DG.vertex_to_skp(G, P), -Fraction(G.vertices[P].b)))
    return AtomicMeasure.of(atoms)


def measure_of_class(G: DG.DualGraph, w: CohomClass) -> AtomicMeasure:
    out = AtomicMeasure()
    for i, c in w.coords:
        out = out + class_measure(G, i).scale(c)
    return out


def divisorial_class(G: DG.DualGraph, E: int) -> CohomClass:
    """omega_E = [E] + omega of each component E was created from."""
    comp = G.vertices[E]
    w = class_of_vertex(G, E)
    for P in comp.parents:
        w = w + divisorial_class(G, P)
    return w


def class_of_divisorial(s: S.SKP, G: DG.DualGraph) -> CohomClass:
    """Class whose measure is b(nu) nu, for nu realized by a vertex of G."""
    for E in range(len(G.vertices)):
        if S.compare(DG.vertex_to_skp(G, E), s) == "equal":
            return divisorial_class(G, E)
    raise ValtreeError("valuation is not a vertex of the graph")


# ---------------------------------------------------------------------------
# serialization


def measure_to_json(rho: AtomicMeasure) -> dict:
    return {"schema": "measure.v1",
            "atoms": [{"node": S.skp_to_json(s), "mass": fmt_mass(m)} for s, m in rho.atoms]}


def measure_from_json(d: dict) -> AtomicMeasure:
    if d.get("schema", "measure.v1") != "measure.v1":
        raise ValtreeError("expected schema measure.v1")
    pairs = []
    for a in d["atoms"]:
        m = a["mass"]
        mass = CQ(Fraction(m[0]), Fraction(m[1])) if isinstance(m, list) else Fraction(m)
        pairs.append((S.skp_from_json(a["node"]), mass))
    return AtomicMeasure.of(pairs)


def measure_to_text(rho: AtomicMeasure) -> str:
    if not rho.atoms:
        return "0\n"
    lines = []
    for s, m in rho.atoms:
        fm = fmt_mass(m)
        if isinstance(fm, list):
            fm = f"({fm[0]} + {fm[1]}i)"
        lines.append(f"{fm} * {S.skp_to_text(s)}")
    return "\n".join(lines) + "\n"


def check_positive_potential(g: TreePotential) -> Optional[str]:
    """Nonnegative, increasing, concave at every node; None when all hold."""
    T = g.tree
    for i in range(len(T.nodes)):
        v = g.values[i]
        if v is not INF and v < 0:
            return f"negative value at node {i}"
        kids = T.children(i)
        out = sum((g.slopes[c] for c in kids), Fraction(0))
        if T.parent[i] is None:
            if out > v:
                return "outgoing slopes exceed the root value"
        else:
            if g.slopes[i] < 0:
                return f"decreasing into node {i}"
            if any(g.slopes[c] > g.slopes[i] for c in kids) or out > g.slopes[i]:
                return f"not concave at node {i}"
    return None
