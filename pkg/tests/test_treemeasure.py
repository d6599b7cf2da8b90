import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from valtree import dualgraph as DG
from valtree import skp as S
from valtree import treemeasure as TM
from valtree.arith import INF, ValtreeError, parse_branch
from valtree.corpus import random_blowups, random_ideal, random_skp

CUSP = parse_branch("n=2; y=t^3")
F18 = parse_branch("n=2; x=t^2+t^4; y=t^3+2*t^5+t^7")
REES = S.make_skp(["x", "y"], ["3/2", 1])  # nu(x) = 3/2, nu(y) = 1
seeds = st.integers(0, 10 ** 6)


def measure(pairs):
    return TM.AtomicMeasure.of([(s, Fraction(m)) for s, m in pairs])


def random_measure(rng, positive=True, n=3):
    lo = 1 if positive else -3
    return measure([(random_skp(rng), rng.choice([x for x in range(lo, 4) if x]))
                    for _ in range(rng.randint(1, n))])


def test_span_tree_examples():
    T = TM.span_tree([CUSP, TM.COORD_Y])
    assert T.alpha[:2] == (1, Fraction(3, 2)) and T.mult[1] == 1
    assert sorted(T.children(1)) == [2, 3]
    T = TM.span_tree([CUSP])
    assert len(T.nodes) == 3  # nu_m, the approximating point, the end
    T = TM.span_tree([CUSP, F18])
    w = T.index(S.wedge(S.skp_of_branch(CUSP), S.skp_of_branch(F18)))
    assert T.alpha[w] == 2 and T.mult[w] == 2


def test_tree_transform_examples():
    g = TM.tree_transform(TM.parse_ideal("x^2, y^3"))
    assert g.values[0] == 2 and g.value_at(REES) == 3
    g = TM.tree_transform(TM.parse_ideal("C", {"C": CUSP}))
    T = g.tree
    for i, node in enumerate(T.nodes):
        assert g.values[i] == TM._scale(Fraction(2), TM.alpha_wedge(node, S.skp_of_branch(CUSP)))
    assert TM.tree_transform(TM.parse_ideal("x, y")).values[0] == 1


def test_kinks_are_inserted():
    g = TM.tree_transform(TM.parse_ideal("x^2, y^3"))
    assert any(S.compare(n, REES) == "equal" for n in g.tree.nodes)
    for i in range(1, len(g.tree.nodes)):
        assert g.slopes[i].denominator == 1


def test_laplacian_examples():
    rho = TM.laplacian(TM.tree_transform(TM.parse_ideal("x^2, y^3")))
    assert rho.same(measure([(REES, 2)]))
    for text in ("x^2, y^2", "x^2, xy, y^2"):
        rho = TM.laplacian(TM.tree_transform(TM.parse_ideal(text)))
        assert rho.same(measure([(S.NU_M, 2)]))
    T = TM.span_tree([TM.COORD_Y])
    g = TM.TreePotential(T, (Fraction(1), INF), (None, Fraction(1)))
    assert TM.laplacian(g).same(measure([(T.nodes[1], 1)]))


def test_potential_examples():
    g = TM.potential_of_measure(measure([(S.NU_M, 1)]))
    assert set(g.values) == {1}
    g = TM.potential_of_measure(measure([(REES, 2)]))
    assert g.values[0] == 2 and g.value_at(REES) == 3


@given(seeds, st.booleans())
def test_laplacian_inverts_potential(seed, positive):
    rho = random_measure(random.Random(seed), positive)
    assert TM.laplacian(TM.potential_of_measure(rho)).same(rho)


def test_zariski_examples():
    rho, f = TM.zariski_factor(TM.parse_ideal("x^2, y^3"))
    assert [(x.b, x.n, x.kind) for x in f] == [(2, 1, "divisorial")]
    rho, f = TM.zariski_factor(TM.parse_ideal("x^3, x^2*y, x*y^2, y^3"))
    assert rho.same(measure([(S.NU_M, 3)])) and f[0].n == 3
    rho, f = TM.zariski_factor(TM.parse_ideal("C", {"C": CUSP}))
    assert [(x.b, x.n, x.kind) for x in f] == [(2, 1, "curve")]


@given(seeds)
def test_ideal_transforms(seed):
    rng = random.Random(seed)
    I, J = random_ideal(rng), random_ideal(rng)
    gI = TM.tree_transform(I)
    assert TM.check_positive_potential(gI) is None
    rI, fI = TM.zariski_factor(I)
    rJ, _ = TM.zariski_factor(J)
    assert rI.mass() == gI.values[0] == TM.ideal_multiplicity_order(I)
    assert TM.zariski_factor(TM.ideal_product(I, J))[0].same(rI + rJ)
    for f in fI:
        b = S.generic_multiplicity(f.valuation) if f.kind == "divisorial" else \
            S.multiplicity(f.valuation)
        assert f.b == b and f.n >= 1


def test_closure_examples():
    assert TM.integral_closure_member((("x", 1), ("y", 1)), TM.parse_ideal("x^2, y^2"))
    assert not TM.integral_closure_member((("x", 1),), TM.parse_ideal("x^2, y^2"))
    assert not TM.integral_closure_member((("y", 1),), TM.parse_ideal("x^2, y^3"))
    assert TM.integral_closure_member((("x", 1), ("y", 2)), TM.parse_ideal("x^2, y^3"))
    C = {"C": CUSP}
    assert TM.integral_closure_member((("C", 2),), TM.parse_ideal("C", C), C)
    assert not TM.integral_closure_member((("x", 5),), TM.parse_ideal("C", C), C)


@given(seeds)
def test_closure_contains_generators(seed):
    I = random_ideal(random.Random(seed))
    for g in I.generators:
        assert TM.integral_closure_member(g, I)


def test_inner_product_examples():
    assert TM.inner_product(measure([(S.NU_M, 1)]), measure([(S.NU_M, 1)])) == 1
    r = measure([(REES, 2)])
    assert TM.inner_product(r, r) == 6
    rx, _ = TM.zariski_factor(TM.parse_ideal("x"))
    ry, _ = TM.zariski_factor(TM.parse_ideal("y"))
    assert TM.inner_product(rx, ry) == 1
    assert TM.inner_product(rx, rx) is INF


@given(seeds)
def test_inner_product_inequalities(seed):
    rng = random.Random(seed)
    a, b = random_measure(rng), random_measure(rng)
    ab = TM.inner_product(a, b)
    assert ab == TM.inner_product(b, a)
    assert ab * ab <= TM.inner_product(a, a) * TM.inner_product(b, b)
    assert ab >= a.mass() * b.mass()


@given(seeds)
def test_complex_inner_product_is_sesquilinear(seed):
    rng = random.Random(seed)
    a, b = random_measure(rng, False), random_measure(rng, False)
    i = TM.CQ(0, 1)
    base = TM.CQ.lift(TM.inner_product(a, b))
    assert TM.CQ.lift(TM.inner_product(a.scale(i), b)) == i * base
    assert TM.CQ.lift(TM.inner_product(a, b.scale(i))) == i.conj() * base
    z = TM.inner_product(a.scale(TM.CQ(1, 2)), a.scale(TM.CQ(1, 2)))
    assert TM.CQ.lift(z).im == 0


def test_mixed_multiplicity_examples():
    m = TM.parse_ideal("x, y")
    assert TM.mixed_multiplicity(m, m) == 1
    I = TM.parse_ideal("x^2, y^3")
    assert TM.mixed_multiplicity(I, I) == 6
    with pytest.raises(ValtreeError):
        TM.mixed_multiplicity(TM.parse_ideal("x"), m)


def test_class_measures():
    G = DG.minimal_desing_from_branches([CUSP])
    assert TM.class_measure(G, 0).same(measure([(S.NU_M, 1)]))
    assert TM.class_measure(G, 1).same(measure([(S.monomial_skp(1, 2), 1), (S.NU_M, -1)]))
    nu = DG.vertex_to_skp(G, 2)
    assert TM.class_measure(G, 2).same(
        measure([(nu, 2), (S.NU_M, -1), (S.monomial_skp(1, 2), -1)]))
    assert TM.pairing(TM.class_of_vertex(G, 2), TM.class_of_vertex(G, 2)) == -1
    sq = [-TM.pairing(w, w) for w in (TM.class_of_divisorial(DG.vertex_to_skp(G, E), G)
                                      for E in range(3))]
    assert sq == [1, 2, 6]


@given(seeds, st.integers(1, 6))
def test_isometry_on_random_models(seed, depth):
    G = random_blowups(random.Random(seed), depth)
    n = len(G.vertices)
    for E in range(n):
        for F in range(n):
            lhs = TM.inner_product(TM.class_measure(G, E), TM.class_measure(G, F))
            assert lhs == -TM.pairing(TM.class_of_vertex(G, E), TM.class_of_vertex(G, F))
        nu = DG.vertex_to_skp(G, E)
        w = TM.class_of_divisorial(nu, G)
        assert TM.measure_of_class(G, w).same(measure([(nu, G.vertices[E].b)]))


def test_measure_json_roundtrip():
    rho = TM.AtomicMeasure.of([(REES, Fraction(2)), (S.NU_M, TM.CQ(1, -3))])
    assert TM.measure_from_json(TM.measure_to_json(rho)).same(rho)
    I = TM.parse_ideal("C^2*x, y^3", {"C": CUSP})
    assert TM.ideal_from_json(TM.ideal_to_json(I)) == I


def test_ideal_grammar():
    I = TM.parse_ideal("xy, x^2*y, y^3")
    assert I.generators[0] == (("x", 1), ("y", 1))
    with pytest.raises(ValtreeError):
        TM.parse_ideal("z^2")
    with pytest.raises(ValtreeError):
        TM.parse_ideal(" , ")
