"""Acceptance checks 1-9, shared by `valtree selftest` and the test suite.

Every check compares two independently computed quantities: SKP evaluation
against substitution orders, chart simulation against the Farey-weight
algorithm, tree inner products against lattice-point counts, and so on.
"""

from __future__ import annotations

import os
import random
import subprocess
import sys
from math import gcd
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Tuple

from .arith import INF, BiPoly, intersection_number, substitute_order
from . import skp as S
from . import dualgraph as DG
from . import treemeasure as TM
from . import corpus as CP


@dataclass(frozen=True)
class AcceptanceConfig:
    seed: int = 20240611
    n_skp: int = 200
    n_ideal_pairs: int = 50
    blowup_depth: int = 8
    isometry_depth: int = 6
    n_random_graphs: int = 24
    golden_dir: Optional[str] = None


@dataclass(frozen=True)
class CheckResult:
    index: int
    name: str
    ok: bool
    detail: str

    def line(self) -> str:
        return f"[{'PASS' if self.ok else 'FAIL'}] {self.index} {self.name}: {self.detail}"


class _Fail(Exception):
    pass


def _expect(cond: bool, msg: str):
    if not cond:
        raise _Fail(msg)


# ---------------------------------------------------------------------------
# 1. valuation axioms


def check_valuation_axioms(cfg: AcceptanceConfig) -> str:
    rng = random.Random(cfg.seed)
    for i in range(cfg.n_skp):
        s = CP.random_skp(rng)
        for j, U in enumerate(s.keys):
            Uin = U.swapped() if s.swap else U
            _expect(S.eval_skp(s, Uin) == s.values[j], f"nu(U_{j}) != b_{j} for {s}")
        p, q = CP.random_poly(rng), CP.random_poly(rng)
        vp, vq = S.eval_skp(s, p), S.eval_skp(s, q)
        _expect(S.eval_skp(s, p * q) == vp + vq, f"additivity fails for {s}, {p}, {q}")
        vs = S.eval_skp(s, p + q)
        _expect(vs >= min(vp, vq), f"ultrametric inequality fails for {s}, {p}, {q}")
    return f"{cfg.n_skp} random SKPs, exact"


# ---------------------------------------------------------------------------
# 2. SKP evaluation vs substitution order


def check_oracle_equivalence(cfg: AcceptanceConfig) -> str:
    rng = random.Random(cfg.seed + 2)
    count = 0
    for name, C in CP.corpus():
        s = S.skp_of_branch(C)
        polys = [BiPoly.monomial(i, j) for i in range(9) for j in range(9 - i)]
        polys += [CP.random_poly(rng) for _ in range(10)]
        for p in polys:
            lhs = S.eval_skp(s, p)
            o = substitute_order(p, C)
            rhs = o if o is INF else o / C.n
            _expect(lhs == rhs, f"{name}: {p} gives {lhs} vs oracle {rhs}")
            count += 1
    return f"{len(CP.CORPUS_TEXT)} curves, {count} polynomials, exact"


# ---------------------------------------------------------------------------
# 3. Farey side vs SKP side


def _graphs(cfg: AcceptanceConfig, depth: int) -> List[Tuple[str, DG.DualGraph]]:
    rng = random.Random(cfg.seed + 3 + depth)
    gs = CP.corpus_graphs(depth)
    for i in range(cfg.n_random_graphs):
        gs.append((f"random{i}", CP.random_blowups(rng, rng.randint(1, depth))))
    return gs


def check_farey_isometry(cfg: AcceptanceConfig) -> str:
    nv = ne = 0
    for name, G in _graphs(cfg, cfg.blowup_depth):
        skps = [DG.vertex_to_skp(G, E) for E in range(len(G.vertices))]
        for E, s in enumerate(skps):
            comp = G.vertices[E]
            _expect(S.thinness(s) == comp.A and S.generic_multiplicity(s) == comp.b,
                    f"{name}: vertex {comp.farey} vs SKP {s}")
            nv += 1
        for a, b, det in DG.edge_determinants(G):
            upper = a if G.vertices[a].A > G.vertices[b].A else b
            _expect(det == S.multiplicity(skps[upper]),
                    f"{name}: determinant {det} on edge {a}-{b}")
            ne += 1
    return f"{nv} vertices, {ne} edges, exact"


# ---------------------------------------------------------------------------
# 4. minimal desingularization


def check_desing(cfg: AcceptanceConfig) -> str:
    sets = [(name, (C,)) for name, C in CP.corpus()] + CP.multi_branch_sets()
    for name, Cs in sets:
        ids = [str(i) for i in range(len(Cs))]
        chart = DG.minimal_desing_from_branches(list(Cs), ids)
        D = DG.equising_from_branches(list(Cs), ids)
        alg = DG.minimal_desing_from_equising(D)
        _expect(DG.isomorphic(chart, alg), f"{name}: graphs differ")
    C1, C2 = CP.branch("cusp"), CP.branch("tangential")
    _expect(intersection_number(C1, C2) == 8, "tangential pair: C1.C2 != 8")
    D = DG.equising_from_branches([C1, C2])
    _expect(D.contact[0][1] == Fraction(7, 2), f"tangential pair contact {D.contact[0][1]}")
    return f"{len(sets)} curves incl. tangential pair (C1.C2 = 8)"


# ---------------------------------------------------------------------------
# 5. classical dictionary


def check_classical(cfg: AcceptanceConfig) -> str:
    cusp = DG.classical_invariants(CP.branch("cusp"))
    _expect(cusp.beta_bar == (2, 3), f"cusp semigroup {cusp.beta_bar}")
    for name, C in CP.corpus():
        s = S.skp_of_branch(C)
        ap = S.approximating_sequence(s)
        tree_side = (C.n,) + tuple(C.n * a.alpha * a.m for a in ap)
        beta = tuple(C.n * (a.A - 1) for a in ap)
        es = [C.n]
        for b in beta:
            es.append(gcd(es[-1], int(b)))
        n_i = tuple(es[i] // es[i + 1] for i in range(len(beta)))
        rec = DG.beta_bar_recursion(C.n, [int(b) for b in beta], n_i)
        _expect(tuple(tree_side) == rec, f"{name}: {tree_side} vs {rec}")
        if C.puiseux_form:
            _expect(DG.puiseux_characteristic(C) == tuple(beta), f"{name}: characteristic exponents")
    return f"cusp semigroup (2,3); recursion on {len(CP.CORPUS_TEXT)} branches"


# ---------------------------------------------------------------------------
# 6. Zariski factorization


def check_ideals(cfg: AcceptanceConfig) -> str:
    m2 = TM.AtomicMeasure.of([(S.NU_M, Fraction(2))])
    for text in ("x^2, y^2", "x^2, xy, y^2"):
        rho, _ = TM.zariski_factor(TM.parse_ideal(text))
        _expect(rho.same(m2), f"rho({text}) = {TM.measure_to_text(rho).strip()}")
    _expect(TM.integral_closure_member((("x", 1), ("y", 1)), TM.parse_ideal("x^2, y^2")),
            "xy not in closure of (x^2, y^2)")
    _expect(not TM.integral_closure_member((("x", 1),), TM.parse_ideal("x^2, y^2")),
            "x wrongly in closure of (x^2, y^2)")
    rng = random.Random(cfg.seed + 6)
    for _ in range(cfg.n_ideal_pairs):
        I, J = CP.random_ideal(rng), CP.random_ideal(rng)
        rI, _ = TM.zariski_factor(I)
        rJ, _ = TM.zariski_factor(J)
        rIJ, _ = TM.zariski_factor(TM.ideal_product(I, J))
        _expect(rIJ.same(rI + rJ), f"rho(IJ) != rho(I) + rho(J) for {I.to_text()} / {J.to_text()}")
        for K, r in ((I, rI), (J, rJ)):
            _expect(r.mass() == TM.ideal_multiplicity_order(K), f"mass != m(I) for {K.to_text()}")
    return f"2 nu_m examples, closure, {cfg.n_ideal_pairs} random pairs"


# ---------------------------------------------------------------------------
# 7. mixed multiplicities vs lattice counts and intersection numbers


def _monomial_gens(I: TM.IdealSpec) -> List[Tuple[int, int]]:
    out = []
    for g in I.generators:
        d = dict(g)
        if set(d) - {"x", "y"}:
            raise ValueError("not monomial")
        out.append((d.get("x", 0), d.get("y", 0)))
    return out


def _minimal(gens):
    gens = sorted(set(gens))
    out = []
    for a, b in gens:
        if not any(a2 <= a and b2 <= b for a2, b2 in out):
            out.append((a, b))
    return out


def _power(gens, n):
    cur = [(0, 0)]
    for _ in range(n):
        cur = _minimal([(a + c, b + d) for a, b in cur for c, d in gens])
    return cur


def colength(gens) -> int:
    """dim k[[x,y]]/I for a monomial ideal, by counting exponents outside I."""
    gens = _minimal(gens)
    if not any(b == 0 for _, b in gens) or not any(a == 0 for a, _ in gens):
        raise ValueError("ideal is not primary")
    amax = max(a for a, b in gens if b == 0)
    total = 0
    for a in range(amax):
        total += min(b for a2, b in gens if a2 <= a)
    return total


def lattice_multiplicity(gens) -> int:
    """e(I) as the stable second difference of n -> dim R/I^n."""
    vals = [colength(_power(gens, n)) for n in range(6, 11)]
    d2 = [vals[i + 2] - 2 * vals[i + 1] + vals[i] for i in range(3)]
    if len(set(d2)) != 1:
        raise ValueError("Hilbert-Samuel function not yet polynomial")
    return d2[0]


def lattice_mixed(I_gens, J_gens) -> Fraction:
    IJ = _minimal([(a + c, b + d) for a, b in I_gens for c, d in J_gens])
    return Fraction(lattice_multiplicity(IJ) - lattice_multiplicity(I_gens)
                    - lattice_multiplicity(J_gens), 2)


MONOMIAL_PAIRS = (
    ("x, y", "x, y"),
    ("x^2, y^3", "x^2, y^3"),
    ("x^2, xy, y^2", "x^3, x^2*y, x*y^2, y^3"),
    ("x, y", "x^4, y^4"),
    ("x^2, y^3", "x^3, y^2"),
    ("x^2, x*y, y^4", "x, y^2"),
    ("x^3, y", "x, y^5"),
    ("x^4, x^2*y, y^3", "x^2, y^3"),
    ("x^5, x^2*y^2, y^3", "x^3, x*y, y^4"),
    ("x^2, y^5", "x^4, x*y^2, y^3"),
)


def _max_power(a: int) -> str:
    mono = lambda i, j: "*".join(f"{v}^{e}" for v, e in (("x", i), ("y", j)) if e)
    return ", ".join(mono(i, a - i) for i in range(a + 1))


def check_mixed(cfg: AcceptanceConfig) -> str:
    e = TM.mixed_multiplicity(TM.parse_ideal("x^2, y^3"), TM.parse_ideal("x^2, y^3"))
    _expect(e == 6, f"e(x^2, y^3) = {e}")
    for a in range(1, 4):
        for b in range(1, 4):
            ma, mb = TM.parse_ideal(_max_power(a)), TM.parse_ideal(_max_power(b))
            _expect(TM.mixed_multiplicity(ma, mb) == a * b, f"e(m^{a}, m^{b})")
    for ti, tj in MONOMIAL_PAIRS:
        I, J = TM.parse_ideal(ti), TM.parse_ideal(tj)
        lhs = TM.mixed_multiplicity(I, J)
        rhs = lattice_mixed(_monomial_gens(I), _monomial_gens(J))
        _expect(lhs == rhs, f"e({ti} | {tj}) = {lhs} vs lattice {rhs}")
    branches = [C for _, C in CP.corpus()]
    n_par = 0
    for i in range(len(branches)):
        for j in range(i + 1, len(branches)):
            C, D = branches[i], branches[j]
            if C == D:
                continue
            inum = intersection_number(C, D)
            I = TM.IdealSpec((("A", C), ("B", D)), ((("A", 1),), (("B", 1),)))
            _expect(TM.mixed_multiplicity(I, I) == inum, f"e((C, D)) != C.D for {i},{j}")
            rc, _ = TM.zariski_factor(TM.IdealSpec((("A", C),), ((("A", 1),),)))
            rd, _ = TM.zariski_factor(TM.IdealSpec((("B", D),), ((("B", 1),),)))
            _expect(TM.inner_product(rc, rd) == inum, f"rho_C . rho_D != C.D for {i},{j}")
            n_par += 1
    return f"{len(MONOMIAL_PAIRS)} monomial pairs vs lattice counts, {n_par} branch pairs vs C.D"


# ---------------------------------------------------------------------------
# 8. cohomology isometry


def check_cohomology(cfg: AcceptanceConfig) -> str:
    npairs = 0
    for name, G in _graphs(cfg, cfg.isometry_depth):
        nV = len(G.vertices)
        rhos = [TM.class_measure(G, E) for E in range(nV)]
        omegas = [TM.divisorial_class(G, E) for E in range(nV)]
        skps = [DG.vertex_to_skp(G, E) for E in range(nV)]
        for E in range(nV):
            for F in range(nV):
                ip = TM.inner_product(rhos[E], rhos[F])
                w = -TM.pairing(TM.class_of_vertex(G, E), TM.class_of_vertex(G, F))
                _expect(ip == w == (1 if E == F else 0), f"{name}: rho_E . rho_F at {E},{F}")
                dd = -TM.pairing(omegas[E], omegas[F])
                bE, bF = G.vertices[E].b, G.vertices[F].b
                _expect(dd == bE * bF * TM.alpha_wedge(skps[E], skps[F]),
                        f"{name}: divisorial pairing at {E},{F}")
                npairs += 1
            inv = S.invariants(skps[E])
            _expect(-TM.pairing(omegas[E], omegas[E]) == inv.b ** 2 * inv.alpha,
                    f"{name}: -w.w != b^2 alpha at {E}")
            rw = TM.measure_of_class(G, omegas[E])
            _expect(rw.same(TM.AtomicMeasure.of([(skps[E], Fraction(inv.b))])),
                    f"{name}: rho of divisorial class at {E}")
            for r in (rhos[E], rw):
                for s, m in r.atoms:
                    _expect(Fraction(m) % S.generic_multiplicity(s) == 0,
                            f"{name}: atom mass {m} not in b Z")
    return f"{npairs} vertex pairs, exact"


# ---------------------------------------------------------------------------
# 9. determinism


GOLDEN_COMMANDS: Tuple[Tuple[str, Tuple[str, ...]], ...] = (
    ("invariants_cusp", ("invariants", "--branch", "n=2; y=t^3")),
    ("skp_tangential", ("skp", "--branch", "n=2; x=t^2+t^4; y=t^3+2*t^5+t^7", "--json")),
    ("desing_cusp_dot", ("desing", "--branch", "n=2; y=t^3", "--dot")),
    ("desing_pair_json", ("desing", "--branch", "A: n=2; y=t^3",
                          "--branch", "B: n=2; x=t^2+t^4; y=t^3+2*t^5+t^7", "--json")),
    ("eggers_pair", ("eggers", "--branch", "A: n=2; y=t^3", "--branch", "B: n=2; y=t^3+t^5")),
    ("classical_e8", ("classical", "--branch", "n=4; y=t^6+t^7")),
    ("ideal_factor", ("ideal-factor", "--ideal", "x^2, y^3", "--json")),
    ("mult", ("mult", "--ideal", "x^2, y^3")),
    ("closure", ("closure", "--phi", "x*y", "--ideal", "x^2, y^2")),
    ("classmeasure", ("classmeasure", "--branch", "n=2; y=t^3", "--json")),
    ("wedge", ("wedge", "--branch", "n=2; y=t^3", "--branch", "n=1; y=0")),
    ("eval", ("eval", "--branch", "n=2; y=t^3+t^5", "--poly", "y^2 - x^3")),
)


def run_cli(argv: Sequence[str], hashseed: str = "0") -> Tuple[int, bytes]:
    env = dict(os.environ, PYTHONHASHSEED=hashseed)
    src = str(Path(__file__).resolve().parents[1])
    env["PYTHONPATH"] = src + os.pathsep + env.get("PYTHONPATH", "")
    p = subprocess.run([sys.executable, "-m", "valtree", *argv], capture_output=True, env=env)
    return p.returncode, p.stdout


def check_determinism(cfg: AcceptanceConfig) -> str:
    for name, argv in GOLDEN_COMMANDS:
        c1, o1 = run_cli(argv, "1")
        c2, o2 = run_cli(argv, "2")
        _expect(c1 == 0 and c2 == 0, f"{name}: exit codes {c1}, {c2}")
        _expect(o1 == o2, f"{name}: output differs between runs")
        if cfg.golden_dir:
            gold = Path(cfg.golden_dir) / f"{name}.out"
            _expect(gold.exists() and gold.read_bytes() == o1, f"{name}: differs from golden")
    extra = " and goldens" if cfg.golden_dir else ""
    return f"{len(GOLDEN_COMMANDS)} CLI outputs byte-stable across hash seeds{extra}"


CHECKS: Tuple[Tuple[int, str, Callable[[AcceptanceConfig], str]], ...] = (
    (1, "valuation axioms", check_valuation_axioms),
    (2, "SKP vs substitution oracle", check_oracle_equivalence),
    (3, "Farey weights vs SKP invariants", check_farey_isometry),
    (4, "desingularization algorithm vs charts", check_desing),
    (5, "classical dictionary", check_classical),
    (6, "Zariski factorization", check_ideals),
    (7, "mixed multiplicities", check_mixed),
    (8, "cohomology isometry", check_cohomology),
    (9, "determinism", check_determinism),
)


def run_check(index: int, cfg: AcceptanceConfig = AcceptanceConfig()) -> CheckResult:
    for i, name, fn in CHECKS:
        if i == index:
            try:
                return CheckResult(i, name, True, fn(cfg))
            except _Fail as e:
                return CheckResult(i, name, False, str(e))
            except Exception as e:  # an unexpected error is a failed criterion
                return CheckResult(i, name, False, f"{type(e).__name__}: {e}")
    raise KeyError(index)


def run_all(cfg: AcceptanceConfig = AcceptanceConfig(), only: Optional[Sequence[int]] = None
            ) -> List[CheckResult]:
    return [run_check(i, cfg) for i, _, _ in CHECKS if only is None or i in only]
