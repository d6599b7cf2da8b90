"""Blowups, Farey weights and dual graphs; minimal desingularization of plane
curves by chart simulation and from equisingularity data; Eggers trees and
classical invariants."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import gcd
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .arith import (
    INF,
    ArithConfig,
    BranchParam,
    ExtRat,
    Q,
    TruncationError,
    ValtreeError,
    branch_from_xy,
    default_trunc,
    fmt_q,
    intersection_number,
)
from . import skp as S

# A key identifies an infinitely near point on the last exceptional curve:
# ("c", c) is the point v/u = c of the first chart, ("inf",) the point u/v = 0.
Key = Tuple
Path = Tuple[Key, ...]


@dataclass(frozen=True)
class ExcComponent:
    """Exceptional component with its Farey weight and creation data.

    ``path``/``labels`` locate the blown-up point (chart path from the origin and
    the components {u=0}, {v=0} through it); they are None for graphs built
    without chart information.
    """

    farey: Tuple[int, int]
    kind: str  # origin | free | satellite
    parents: Tuple[int, ...] = ()
    path: Optional[Path] = None
    labels: Optional[Tuple[Optional[int], Optional[int]]] = None

    @property
    def A(self) -> Fraction:
        return Fraction(self.farey[0], self.farey[1])

    @property
    def b(self) -> int:
        return self.farey[1]


@dataclass(frozen=True)
class DualGraph:
    vertices: Tuple[ExcComponent, ...] = ()
    edges: Tuple[Tuple[int, int], ...] = ()
    attachments: Tuple[Tuple[str, int], ...] = ()

    root = 0

    def neighbors(self, v: int) -> List[int]:
        out = []
        for a, b in self.edges:
            if a == v:
                out.append(b)
            elif b == v:
                out.append(a)
        return sorted(out)

    def children(self, v: int) -> List[int]:
        """Neighbours further from E_0 (equivalently: with larger Farey parameter)."""
        A = self.vertices[v].A
        return [w for w in self.neighbors(v) if self.vertices[w].A > A]

    def parent(self, v: int) -> Optional[int]:
        A = self.vertices[v].A
        ps = [w for w in self.neighbors(v) if self.vertices[w].A < A]
        return ps[0] if ps else None

    def descendants(self, v: int) -> List[int]:
        out, stack = [], [v]
        while stack:
            w = stack.pop()
            out.append(w)
            stack.extend(self.children(w))
        return sorted(out)

    def attachment_map(self) -> Dict[str, int]:
        return dict(self.attachments)

    def attach(self, bid: str, v: int) -> "DualGraph":
        att = dict(self.attachments)
        att[str(bid)] = v
        return DualGraph(self.vertices, self.edges, tuple(sorted(att.items())))


def _edge(a: int, b: int) -> Tuple[int, int]:
    return (a, b) if a < b else (b, a)


# ---------------------------------------------------------------------------
# elementary blowups


def _new_vertex(G: DualGraph, kind: str, parents: Tuple[int, ...], path=None, labels=None
                ) -> Tuple[DualGraph, int]:
    V = G.vertices
    if kind == "origin":
        w = (2, 1)
    elif kind == "free":
        a, b = V[parents[0]].farey
        w = (a + 1, b)
    else:
        (a1, b1), (a2, b2) = V[parents[0]].farey, V[parents[1]].farey
        w = (a1 + a2, b1 + b2)
    idx = len(V)
    edges = set(G.edges)
    if kind == "free":
        edges.add(_edge(parents[0], idx))
    elif kind == "satellite":
        edges.discard(_edge(*parents))
        edges.add(_edge(parents[0], idx))
        edges.add(_edge(parents[1], idx))
    comp = ExcComponent(w, kind, parents, path, labels)
    return DualGraph(V + (comp,), tuple(sorted(edges)), G.attachments), idx


def _point_on(G: DualGraph, E: int, key: Key):
    """Path and labels of the point `key` on component E (chart data needed)."""
    c = G.vertices[E]
    if c.path is None:
        return None, None
    Lu, Lv = c.labels
    if key[0] == "inf":
        labels = (Lu, E)
    elif key[1] == 0:
        labels = (E, Lv)
    else:
        labels = (E, None)
    return c.path + (key,), labels


def blowup_at(G: DualGraph, p: Tuple) -> DualGraph:
    """Blow up the origin, a free point on E, or the satellite point E cap E'."""
    kind = p[0]
    if kind == "origin":
        if G.vertices:
            raise ValtreeError("the origin can only be blown up first")
        return _new_vertex(G, "origin", (), (), (None, None))[0]
    if not G.vertices:
        raise ValtreeError("blow up the origin first")
    if kind == "free":
        E = p[1]
        if not 0 <= E < len(G.vertices):
            raise ValtreeError(f"no vertex {E}")
        path = labels = None
        if G.vertices[E].path is not None:
            used = {v.path[-1][1] for v in G.vertices
                    if v.path is not None and len(v.path) == len(G.vertices[E].path) + 1
                    and v.path[:-1] == G.vertices[E].path and v.path[-1][0] == "c"}
            c = 1
            while Fraction(c) in used:
                c += 1
            path, labels = _point_on(G, E, ("c", Fraction(c)))
        return _new_vertex(G, "free", (E,), path, labels)[0]
    if kind == "satellite":
        E1, E2 = p[1], p[2]
        if _edge(E1, E2) not in G.edges:
            raise ValtreeError("satellite blowup needs adjacent components")
        path = labels = None
        late, early = max(E1, E2), min(E1, E2)
        comp = G.vertices[late]
        if comp.path is not None:
            Lu, Lv = comp.labels
            key = ("c", Fraction(0)) if Lv == early else ("inf",)
            path, labels = _point_on(G, late, key)
        return _new_vertex(G, "satellite", (E1, E2), path, labels)[0]
    raise ValtreeError(f"unknown blowup center {p!r}")


# ---------------------------------------------------------------------------
# exact truncated series used by the chart simulation


@dataclass(frozen=True)
class Series:
    """Power series sum c_e t^e known modulo t^prec (prec None: exact)."""

    coeffs: Tuple[Tuple[int, Fraction], ...]
    prec: Optional[int] = None

    @staticmethod
    def of(d: Mapping[int, Fraction], prec=None) -> "Series":
        items = tuple(sorted((e, Fraction(c)) for e, c in d.items()
                             if c and (prec is None or e < prec)))
        return Series(items, prec)

    def order(self) -> ExtRat:
        if self.coeffs:
            return self.coeffs[0][0]
        if self.prec is None:
            return INF
        raise TruncationError("series order beyond truncation")

    def coeff(self, e: int) -> Fraction:
        if self.prec is not None and e >= self.prec:
            raise TruncationError("coefficient beyond truncation")
        return dict(self.coeffs).get(e, Fraction(0))

    def shift_down(self, a: int) -> "Series":
        return Series(tuple((e - a, c) for e, c in self.coeffs),
                      None if self.prec is None else self.prec - a)

    def minus_const(self, c: Fraction) -> "Series":
        d = dict(self.coeffs)
        d[0] = d.get(0, Fraction(0)) - c
        return Series.of(d, self.prec)

    def mul(self, other: "Series", cap: int) -> "Series":
        precs = [p for p in (self.prec, other.prec) if p is not None]
        prec = None
        if precs:
            o1 = self.coeffs[0][0] if self.coeffs else 0
            o2 = other.coeffs[0][0] if other.coeffs else 0
            cands = []
            if self.prec is not None:
                cands.append(self.prec + o2)
            if other.prec is not None:
                cands.append(other.prec + o1)
            prec = min(cands)
        out: Dict[int, Fraction] = {}
        for e1, c1 in self.coeffs:
            for e2, c2 in other.coeffs:
                if prec is not None and e1 + e2 >= prec:
                    continue
                out[e1 + e2] = out.get(e1 + e2, Fraction(0)) + c1 * c2
        return Series.of(out, prec)

    def _exact_quotient(self, den: "Series") -> Optional["Series"]:
        """Polynomial quotient when den (order 0) divides self exactly."""
        rem = dict(self.coeffs)
        d = dict(den.coeffs)
        top = max(d)
        q: Dict[int, Fraction] = {}
        while rem:
            e = min(rem)
            if e + top > max(rem):
                return None
            c = rem[e] / d[0]
            q[e] = c
            for f, dc in d.items():
                v = rem.get(e + f, Fraction(0)) - c * dc
                if v:
                    rem[e + f] = v
                else:
                    rem.pop(e + f, None)
        return Series.of(q)

    def divide(self, other: "Series", T: int) -> "Series":
        """self / other, assuming ord self >= ord other."""
        a = other.order()
        if a is INF:
            raise ValtreeError("division by zero series")
        num = self.shift_down(a)
        if num.coeffs and num.coeffs[0][0] < 0:
            raise ValtreeError("quotient is not a power series")
        den = other.shift_down(a)
        if len(den.coeffs) == 1 and den.prec is None:
            c = den.coeffs[0][1]
            return Series(tuple((e, v / c) for e, v in num.coeffs), num.prec)
        if num.prec is None and den.prec is None and num.coeffs:
            q = num._exact_quotient(den)
            if q is not None:
                return q
        P = T if den.prec is None else min(T, den.prec)
        d = dict(den.coeffs)
        inv = [Fraction(0)] * P
        inv[0] = 1 / d[0]
        for k in range(1, P):
            acc = Fraction(0)
            for e, c in den.coeffs:
                if e == 0:
                    continue
                if e > k:
                    break
                acc += c * inv[k - e]
            inv[k] = -acc * inv[0]
        invs = Series.of({k: v for k, v in enumerate(inv)}, P)
        return num.mul(invs, T)


@dataclass(frozen=True)
class NearbyPoint:
    path: Path
    kind: str  # origin | free | satellite
    labels: Tuple[Optional[int], Optional[int]]


@dataclass
class _SimBranch:
    bid: str
    u: Series
    v: Series


def _key_sort(k: Key):
    return (1, 0) if k[0] == "inf" else (0, k[1])


def _is_done(b: _SimBranch, labels) -> bool:
    Lu, Lv = labels
    if (Lu is None) == (Lv is None):
        return False  # origin or satellite point
    ordv = b.u.order() if Lu is not None else b.v.order()
    return ordv == 1


def _step(b: _SimBranch, T: int) -> Tuple[Key, _SimBranch]:
    a, bb = b.u.order(), b.v.order()
    if a <= bb:
        v1 = b.v.divide(b.u, T)
        c = v1.coeff(0)
        return ("c", c), _SimBranch(b.bid, b.u, v1.minus_const(c))
    return ("inf",), _SimBranch(b.bid, b.u.divide(b.v, T), b.v)


def _initial(C: BranchParam, bid: str) -> _SimBranch:
    X, Y = C.original_param()
    return _SimBranch(bid, Series.of(X), Series.of(Y))


@dataclass(frozen=True)
class DesingConfig:
    trunc: Optional[int] = None
    trunc_cap: int = 1 << 12
    max_blowups: int = 400


def _simulate(branches: Sequence[Tuple[str, BranchParam]], T: int, cfg: DesingConfig):
    G = DualGraph()
    trace: Dict[str, List[NearbyPoint]] = {bid: [] for bid, _ in branches}
    work = [((), (None, None), [_initial(C, bid) for bid, C in branches])]
    count = 0
    while work:
        path, labels, here = work.pop(0)
        single_done = len(here) == 1 and path != () and _is_done(here[0], labels)
        if single_done:
            Lu, Lv = labels
            G = G.attach(here[0].bid, Lu if Lu is not None else Lv)
            continue
        count += 1
        if count > cfg.max_blowups:
            raise ValtreeError("desingularization exceeded the blowup cap")
        Lu, Lv = labels
        if path == ():
            kind, parents = "origin", ()
        elif Lu is not None and Lv is not None:
            kind, parents = "satellite", (Lu, Lv)
        else:
            kind, parents = "free", (Lu if Lu is not None else Lv,)
        G, F = _new_vertex(G, kind, parents, path, labels)
        for b in here:
            trace[b.bid].append(NearbyPoint(path, kind, labels))
        groups: Dict[Key, List[_SimBranch]] = {}
        for b in here:
            key, nb = _step(b, T)
            groups.setdefault(key, []).append(nb)
        for key in sorted(groups, key=_key_sort):
            _, new_labels = _point_on(G, F, key)
            work.append((path + (key,), new_labels, groups[key]))
    return G, trace


def _with_trunc(fn, cfg: DesingConfig, max_exp: int):
    T = cfg.trunc or default_trunc(max_exp)
    while True:
        try:
            return fn(T)
        except TruncationError:
            if T >= cfg.trunc_cap:
                raise
            T = min(2 * T, cfg.trunc_cap)


def nearby_points_of_branch(C: BranchParam, until: Optional[int] = None,
                            cfg: DesingConfig = DesingConfig()):
    """Infinitely near points of C (origin first) and the final strict transform.

    With ``until=None`` the sequence stops at the minimal desingularization;
    otherwise after ``until`` points.
    """
    def run(T):
        pts: List[NearbyPoint] = []
        G = DualGraph()
        b = _initial(C, "C")
        path, labels = (), (None, None)
        while True:
            if until is None and path != () and _is_done(b, labels):
                return pts, (b.u, b.v)
            if until is not None and len(pts) >= until:
                return pts, (b.u, b.v)
            if len(pts) > cfg.max_blowups:
                raise ValtreeError("blowup cap exceeded")
            Lu, Lv = labels
            kind = "origin" if path == () else ("satellite" if Lu is not None and Lv is not None
                                                 else "free")
            parents = () if kind == "origin" else tuple(x for x in labels if x is not None)
            G, F = _new_vertex(G, kind, parents, path, labels)
            pts.append(NearbyPoint(path, kind, labels))
            key, b = _step(b, T)
            path = path + (key,)
            _, labels = _point_on(G, F, key)

    return _with_trunc(run, cfg, C.max_exponent())


def minimal_desing_from_branches(Cs: Sequence[BranchParam], ids: Optional[Sequence[str]] = None,
                                 cfg: DesingConfig = DesingConfig()) -> DualGraph:
    """Dual graph of the minimal desingularization, by chart simulation."""
    if ids is None:
        ids = [str(i) for i in range(len(Cs))]
    if len(set(Cs)) != len(Cs):
        raise ValtreeError("branches must be pairwise distinct")
    pairs = list(zip(ids, Cs))
    mx = max(C.max_exponent() for C in Cs)
    return _with_trunc(lambda T: _simulate(pairs, T, cfg)[0], cfg, mx)


# ---------------------------------------------------------------------------
# equisingularity data and the algorithm on Farey weights


@dataclass(frozen=True)
class EquisingData:
    """Multiplicities, Farey parameters of approximating sequences, contacts."""

    n: Tuple[int, ...]
    A: Tuple[Tuple[Fraction, ...], ...]
    contact: Tuple[Tuple[ExtRat, ...], ...]  # symmetric matrix, diagonal inf
    ids: Tuple[str, ...] = ()

    def __post_init__(self):
        if not self.ids:
            object.__setattr__(self, "ids", tuple(str(i) for i in range(len(self.n))))
        self.validate()

    def validate(self):
        r = len(self.n)
        if len(self.A) != r or len(self.contact) != r or len(self.ids) != r:
            raise ValtreeError("equisingularity data: inconsistent sizes")
        for j in range(r):
            As = self.A[j]
            if any(a <= 2 for a in As):
                raise ValtreeError("characteristic Farey parameters must exceed 2")
            if any(As[i] >= As[i + 1] for i in range(len(As) - 1)):
                raise ValtreeError("characteristic Farey parameters must increase")
            if len(self.contact[j]) != r:
                raise ValtreeError("contact matrix must be square")
        for i, j in combinations(range(r), 2):
            c = self.contact[i][j]
            if c != self.contact[j][i]:
                raise ValtreeError("contact matrix must be symmetric")
            if c is INF or c < 2:
                raise ValtreeError("contacts must be finite and at least 2")
        for i, j, k in combinations(range(r), 3):
            vals = sorted([self.contact[i][j], self.contact[j][k], self.contact[i][k]])
            if vals[0] != vals[1]:
                raise ValtreeError("ultrametric violation in contact data")

    def g(self, j: int) -> int:
        return len(self.A[j])


def equising_from_branches(Cs: Sequence[BranchParam], ids: Optional[Sequence[str]] = None,
                           cfg: ArithConfig = ArithConfig()) -> EquisingData:
    """Equisingularity data; contacts come from intersection numbers."""
    skps = [S.skp_of_branch(C) for C in Cs]
    As = tuple(tuple(e.A for e in S.approximating_sequence(s)) for s in skps)
    r = len(Cs)
    M = [[INF] * r for _ in range(r)]
    for i, j in combinations(range(r), 2):
        try:
            cd = intersection_number(Cs[i], Cs[j], cfg)
            alpha = cd / (Cs[i].n * Cs[j].n)
            if skps[i].swap != skps[j].swap:
                alpha = Fraction(1)
        except ValtreeError:
            alpha = S.skewness(S.wedge(skps[i], skps[j]))
        A = S.thinness_at(skps[i], alpha)
        M[i][j] = M[j][i] = A
    return EquisingData(tuple(C.n for C in Cs), As, tuple(tuple(row) for row in M),
                        tuple(ids) if ids else ())


def minimal_desing_from_equising(D: EquisingData, max_iter: int = 10000) -> DualGraph:
    """Dual graph of the minimal desingularization from Farey data alone."""
    r = len(D.n)
    G = _new_vertex(DualGraph(), "origin", ())[0]
    JE: Dict[int, List[int]] = {0: list(range(r))}
    Je: Dict[Tuple[int, int], List[int]] = {}
    edge_order: List[Tuple[int, int]] = []
    I = [1] * r

    def target(j):
        return D.A[j][I[j] - 1] if I[j] <= D.g(j) else INF

    def done(j):
        return I[j] > D.g(j)

    def classes(E):
        AE = G.vertices[E].A
        out: List[List[int]] = []
        for j in JE.get(E, []):
            for cl in out:
                if D.contact[j][cl[0]] > AE:
                    cl.append(j)
                    break
            else:
                out.append([j])
        return out

    def vertex_needs(E):
        return any(len(cl) >= 2 or not done(cl[0]) for cl in classes(E))

    for _ in range(max_iter):
        vs = [E for E in range(len(G.vertices)) if JE.get(E) and vertex_needs(E)]
        es = [e for e in edge_order if Je.get(e)]
        if not vs and not es:
            break
        for E in vs:
            keep: List[int] = []
            for cl in classes(E):
                if len(cl) == 1 and done(cl[0]):
                    keep.extend(cl)
                    continue
                G, F = _new_vertex(G, "free", (E,))
                AF = G.vertices[F].A
                f = _edge(E, F)
                edge_order.append(f)
                JE[F] = [j for j in cl if AF < target(j)]
                Je[f] = [j for j in cl if AF > target(j)]
                if any(AF == target(j) for j in cl):
                    raise ValtreeError("approximating element at a free point: invalid data")
            JE[E] = keep
        for e in es:
            members = Je.pop(e)
            E1, E2 = e
            if G.vertices[E1].A > G.vertices[E2].A:
                E1, E2 = E2, E1
            G, F = _new_vertex(G, "satellite", (E1, E2))
            AF = G.vertices[F].A
            edge_order.remove(e)
            e1, e2 = _edge(E1, F), _edge(F, E2)
            edge_order.extend([e1, e2])
            JE[F] = [j for j in members if AF == target(j)]
            for j in JE[F]:
                I[j] += 1
            Je[e1] = [j for j in members if AF > target(j) and j not in JE[F]]
            Je[e2] = [j for j in members if AF < target(j) and j not in JE[F]]
    else:
        raise ValtreeError("desingularization from equisingularity data did not terminate")
    for E, js in JE.items():
        for j in js:
            G = G.attach(D.ids[j], E)
    return G


# ---------------------------------------------------------------------------
# comparisons and invariants


def canonical_form(G: DualGraph):
    """Rooted labelled tree (weights + attachments), independent of creation order."""
    att: Dict[int, List[str]] = {}
    for bid, v in G.attachments:
        att.setdefault(v, []).append(bid)

    def canon(v):
        kids = sorted(canon(w) for w in G.children(v))
        return (G.vertices[v].farey, tuple(sorted(att.get(v, []))), tuple(kids))

    return canon(0) if G.vertices else ()


def isomorphic(G: DualGraph, H: DualGraph) -> bool:
    return canonical_form(G) == canonical_form(H)


def vertex_invariants(G: DualGraph, E: int) -> Tuple[Fraction, int, int]:
    """(A, b, m) with m the least b over the components dominating E."""
    c = G.vertices[E]
    m = min(G.vertices[F].b for F in G.descendants(E))
    return c.A, c.b, m


def curvette(G: DualGraph, E: int, c: int = 1) -> BranchParam:
    """A smooth branch through a free point of E, transverse to E."""
    comp = G.vertices[E]
    if comp.path is None:
        raise ValtreeError("vertex has no chart data")
    keys = comp.path + (("c", Fraction(c)),)
    u: Dict[int, Fraction] = {1: Fraction(1)}
    v: Dict[int, Fraction] = {}
    for key in reversed(keys):
        if key[0] == "c":
            cc = key[1]
            shifted = dict(v)
            shifted[0] = shifted.get(0, Fraction(0)) + cc
            v = _umul(u, shifted)
        else:
            u = _umul(u, v)
    return branch_from_xy(u, v)


def _umul(a, b):
    out: Dict[int, Fraction] = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            out[e1 + e2] = out.get(e1 + e2, Fraction(0)) + c1 * c2
    return {e: c for e, c in out.items() if c}


def vertex_to_skp(G: DualGraph, E: int) -> S.SKP:
    """The divisorial valuation of E: infimum of two curvettes at distinct free points."""
    C1, C2 = curvette(G, E, 1), curvette(G, E, 2)
    return S.wedge(S.skp_of_branch(C1), S.skp_of_branch(C2))


def edge_determinants(G: DualGraph) -> List[Tuple[int, int, int]]:
    out = []
    for a, b in G.edges:
        (a1, b1), (a2, b2) = G.vertices[a].farey, G.vertices[b].farey
        out.append((a, b, abs(a1 * b2 - a2 * b1)))
    return out


# ---------------------------------------------------------------------------
# classical invariants


@dataclass(frozen=True)
class ClassicalInvariants:
    n: int
    g: int
    beta: Tuple[int, ...]
    e: Tuple[int, ...]
    n_i: Tuple[int, ...]
    beta_bar: Tuple[int, ...]


def _as_int(q: Fraction, what: str) -> int:
    if Fraction(q).denominator != 1:
        raise ValtreeError(f"{what} is not an integer: {q}")
    return int(q)


def classical_invariants(C: BranchParam) -> ClassicalInvariants:
    """Characteristic exponents and semigroup generators via thinness/skewness."""
    s = S.skp_of_branch(C)
    n = C.n
    ap = S.approximating_sequence(s)
    g = len(ap)
    ms = [e.m for e in ap] + [n]
    beta = tuple(_as_int(n * (e.A - 1), "beta") for e in ap)
    e = tuple(n // ms[i + 1] for i in range(g))
    es = (n,) + e
    n_i = tuple(es[i] // es[i + 1] for i in range(g))
    bbar = (n,) + tuple(_as_int(n * a.alpha * a.m, "beta-bar") for a in ap)
    inv = ClassicalInvariants(n, g, beta, e, n_i, bbar)
    _check_classical(inv)
    return inv


def beta_bar_recursion(n: int, beta: Sequence[int], n_i: Sequence[int]) -> Tuple[int, ...]:
    """beta-bar from characteristic exponents: bb_1 = b_1, bb_i = n_{i-1} bb_{i-1} + b_i - b_{i-1}."""
    if not beta:
        return (n,)
    out = [n, beta[0]]
    for i in range(1, len(beta)):
        out.append(n_i[i - 1] * out[-1] + beta[i] - beta[i - 1])
    return tuple(out)


def _check_classical(inv: ClassicalInvariants):
    e_prev = inv.n
    for i, b in enumerate(inv.beta):
        e_i = gcd(e_prev, b)
        if e_i != inv.e[i] or inv.n_i[i] != e_prev // e_i:
            raise ValtreeError("classical invariants inconsistent")
        e_prev = e_i
    if beta_bar_recursion(inv.n, inv.beta, inv.n_i) != inv.beta_bar:
        raise ValtreeError("beta-bar recursion fails")


def puiseux_characteristic(C: BranchParam) -> Tuple[int, ...]:
    """Characteristic exponents read off y(t) directly (x = t^n only)."""
    if not C.puiseux_form:
        raise ValtreeError("needs x = t^n")
    e = C.n
    out = []
    for ex, _ in C.ycoeffs:
        if ex % e:
            out.append(ex)
            e = gcd(e, ex)
    return tuple(out)


# ---------------------------------------------------------------------------
# Eggers tree


@dataclass(frozen=True)
class GluedTree:
    """Finite tree of branch segments [root, inf] glued along contacts."""

    params: Tuple[ExtRat, ...]
    members: Tuple[Tuple[str, ...], ...]
    marked: Tuple[bool, ...]
    parent: Tuple[Optional[int], ...]


def glued_tree(ids: Sequence[str], root: Fraction, marks: Sequence[Sequence[Fraction]],
               contact) -> GluedTree:
    r = len(ids)
    nodes: Dict[Tuple, Dict] = {}
    for j in range(r):
        pts = {root, INF} | set(marks[j])
        pts |= {contact(j, jj) for jj in range(r) if jj != j}
        prev = None
        for K in sorted(pts, key=lambda v: (v is INF, v if v is not INF else 0)):
            cls = frozenset([j] + [jj for jj in range(r) if jj != j and K is not INF
                                   and contact(j, jj) >= K])
            key = (K, cls)
            node = nodes.setdefault(key, {"marked": False, "parent": prev})
            if K in marks[j]:
                node["marked"] = True
            prev = key
    order = sorted(nodes, key=lambda k: (k[0] is INF, k[0] if k[0] is not INF else 0,
                                         sorted(k[1])))
    index = {k: i for i, k in enumerate(order)}
    return GluedTree(
        tuple(k[0] for k in order),
        tuple(tuple(ids[j] for j in sorted(k[1])) for k in order),
        tuple(nodes[k]["marked"] for k in order),
        tuple(None if nodes[k]["parent"] is None else index[nodes[k]["parent"]] for k in order),
    )


def eggers_tree(D: EquisingData) -> GluedTree:
    """Segments [1, inf] per branch, glued at A(contact)-1, marked at A(j,i)-1."""
    marks = [tuple(a - 1 for a in D.A[j]) for j in range(len(D.n))]
    return glued_tree(D.ids, Fraction(1), marks,
                      lambda i, j: D.contact[i][j] - 1)


# ---------------------------------------------------------------------------
# serialization


def _key_json(k: Key):
    return ["inf"] if k[0] == "inf" else ["c", fmt_q(k[1])]


def _key_from_json(k):
    return ("inf",) if k[0] == "inf" else ("c", Fraction(k[1]))


def graph_to_json(G: DualGraph) -> dict:
    verts = []
    for i, v in enumerate(G.vertices):
        d = {"id": i, "weight": list(v.farey), "kind": v.kind, "parents": list(v.parents)}
        if v.path is not None:
            d["center"] = [_key_json(k) for k in v.path]
            d["labels"] = list(v.labels)
        verts.append(d)
    return {
        "schema": "dualgraph.v1",
        "vertices": verts,
        "edges": [list(e) for e in G.edges],
        "attachments": {bid: v for bid, v in G.attachments},
    }


def graph_from_json(d: dict) -> DualGraph:
    if d.get("schema") != "dualgraph.v1":
        raise ValtreeError("expected schema dualgraph.v1")
    verts = []
    for v in d["vertices"]:
        path = tuple(_key_from_json(k) for k in v["center"]) if "center" in v else None
        labels = tuple(v["labels"]) if "labels" in v else None
        verts.append(ExcComponent(tuple(v["weight"]), v["kind"], tuple(v["parents"]), path, labels))
    edges = tuple(sorted(_edge(*e) for e in d["edges"]))
    att = tuple(sorted((str(k), int(v)) for k, v in d["attachments"].items()))
    return DualGraph(tuple(verts), edges, att)


def _branch_label(bid: str) -> str:
    return f"C{bid}" if bid[:1].isdigit() else bid


def graph_to_dot(G: DualGraph) -> str:
    lines = ["graph dual {"]
    for i, v in enumerate(G.vertices):
        a, b = v.farey
        lines.append(f'  E{i} [label="E{i} ({a},{b})"];')
    for a, b in G.edges:
        lines.append(f"  E{a} -- E{b};")
    for bid, v in G.attachments:
        name = _branch_label(bid)
        lines.append(f'  "{name}" [shape=diamond, label="{name}"];')
        lines.append(f'  "{name}" -- E{v};')
    lines.append("}")
    return "\n".join(lines) + "\n"


def graph_to_text(G: DualGraph) -> str:
    lines = []
    for i, v in enumerate(G.vertices):
        A, b, m = vertex_invariants(G, i)
        par = ",".join(f"E{p}" for p in v.parents)
        lines.append(f"E{i} ({v.farey[0]},{v.farey[1]}) {v.kind}{'(' + par + ')' if par else ''}"
                     f" A={fmt_q(A)} b={b} m={m}")
    lines.append("edges: " + " ".join(f"E{a}-E{b}" for a, b in G.edges))
    if G.attachments:
        lines.append("attachments: " + " ".join(f"{_branch_label(bid)}@E{v}" for bid, v in G.attachments))
    return "\n".join(lines) + "\n"


def equising_to_json(D: EquisingData) -> dict:
    return {
        "schema": "equising.v1",
        "branches": [{"id": D.ids[j], "n": D.n[j], "A": [fmt_q(a) for a in D.A[j]]}
                     for j in range(len(D.n))],
        "contacts": [{"pair": [D.ids[i], D.ids[j]], "A": fmt_q(D.contact[i][j])}
                     for i, j in combinations(range(len(D.n)), 2)],
    }


def equising_from_json(d: dict) -> EquisingData:
    if d.get("schema", "equising.v1") != "equising.v1":
        raise ValtreeError("expected schema equising.v1")
    br = d["branches"]
    ids = tuple(str(b.get("id", i)) for i, b in enumerate(br))
    r = len(br)
    M = [[INF] * r for _ in range(r)]
    pos = {bid: i for i, bid in enumerate(ids)}
    for c in d.get("contacts", []):
        i, j = pos[str(c["pair"][0])], pos[str(c["pair"][1])]
        M[i][j] = M[j][i] = Q(c["A"])
    for i, j in combinations(range(r), 2):
        if M[i][j] is INF:
            raise ValtreeError(f"missing contact for pair {ids[i]},{ids[j]}")
    return EquisingData(tuple(int(b["n"]) for b in br),
                        tuple(tuple(Q(a) for a in b.get("A", [])) for b in br),
                        tuple(tuple(row) for row in M), ids)


def glued_tree_to_text(T: GluedTree, param: str = "K") -> str:
    lines = []
    for i in range(len(T.params)):
        p = T.parent[i]
        lines.append(f"N{i} {param}={fmt_q(T.params[i])} branches={','.join(T.members[i])}"
                     f"{' mark' if T.marked[i] else ''}{'' if p is None else f' parent=N{p}'}")
    return "\n".join(lines) + "\n"
