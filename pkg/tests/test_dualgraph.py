import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from valtree import dualgraph as DG
from valtree import skp as S
from valtree.arith import INF, ValtreeError, parse_branch
from valtree.corpus import corpus, multi_branch_sets, random_blowups

CUSP = parse_branch("n=2; y=t^3")
F18 = parse_branch("n=2; x=t^2+t^4; y=t^3+2*t^5+t^7")


def weights(G):
    return sorted(v.farey for v in G.vertices)


def test_blowup_weights():
    G = DG.blowup_at(DG.DualGraph(), ("origin",))
    assert weights(G) == [(2, 1)]
    G = DG.blowup_at(G, ("free", 0))
    assert G.vertices[1].farey == (3, 1)
    G = DG.blowup_at(G, ("satellite", 0, 1))
    assert G.vertices[2].farey == (5, 2)
    assert G.edges == ((0, 2), (1, 2))
    with pytest.raises(ValtreeError):
        DG.blowup_at(G, ("satellite", 0, 1))


@given(st.integers(0, 10 ** 6), st.integers(1, 9))
def test_graph_invariants(seed, depth):
    G = random_blowups(random.Random(seed), depth)
    n = len(G.vertices)
    assert len(G.edges) == n - 1
    for a, b, det in DG.edge_determinants(G):
        lo, hi = sorted((a, b), key=lambda v: G.vertices[v].A)
        b1, b2 = G.vertices[lo].b, G.vertices[hi].b
        assert G.vertices[hi].A - G.vertices[lo].A == Fraction(det, b1 * b2)
        assert det == DG.vertex_invariants(G, hi)[2]


def test_cusp_points_and_graph():
    pts, _ = DG.nearby_points_of_branch(CUSP)
    assert [p.kind for p in pts] == ["origin", "free", "satellite"]
    G = DG.minimal_desing_from_branches([CUSP])
    assert weights(G) == [(2, 1), (3, 1), (5, 2)]
    assert G.attachments == (("0", 2),)
    assert len(DG.nearby_points_of_branch(parse_branch("n=1; y=t"))[0]) == 1


def test_smooth_curves():
    assert weights(DG.minimal_desing_from_branches([parse_branch("n=1; y=0")])) == [(2, 1)]
    G = DG.minimal_desing_from_branches([parse_branch("n=1; y=t"), parse_branch("n=1; y=-t")])
    assert weights(G) == [(2, 1)] and dict(G.attachments) == {"0": 0, "1": 0}


def test_tangential_pair():
    G = DG.minimal_desing_from_branches([CUSP, F18], ["A", "B"])
    assert weights(G) == [(2, 1), (3, 1), (5, 2), (6, 2), (7, 2)]
    D = DG.equising_from_branches([CUSP, F18], ["A", "B"])
    assert D.contact[0][1] == Fraction(7, 2)
    assert DG.isomorphic(G, DG.minimal_desing_from_equising(D))


@pytest.mark.parametrize("name,Cs", [(n, (C,)) for n, C in corpus()] + multi_branch_sets())
def test_equising_algorithm_matches_charts(name, Cs):
    chart = DG.minimal_desing_from_branches(list(Cs))
    alg = DG.minimal_desing_from_equising(DG.equising_from_branches(list(Cs)))
    assert DG.isomorphic(chart, alg)


def test_vertex_invariants_and_skp():
    G = DG.minimal_desing_from_branches([CUSP])
    assert DG.vertex_invariants(G, 0) == (2, 1, 1)
    assert DG.vertex_to_skp(G, 0) == S.NU_M
    assert DG.vertex_to_skp(G, 1) == S.monomial_skp(1, 2)
    s = DG.vertex_to_skp(G, 2)
    assert S.thinness(s) == Fraction(5, 2) and S.generic_multiplicity(s) == 2
    G2 = DG.blowup_at(G, ("free", 2))
    A, b, m = DG.vertex_invariants(G2, 3)
    assert (A, b, m) == (3, 2, 2)


def test_classical():
    c = DG.classical_invariants(CUSP)
    assert (c.n, c.g, c.beta, c.e, c.beta_bar) == (2, 1, (3,), (1,), (2, 3))
    assert DG.classical_invariants(parse_branch("n=2; y=t^3+t^5")).beta_bar == (2, 3)
    assert DG.classical_invariants(parse_branch("n=1; y=t^2")).beta_bar == (1,)
    c = DG.classical_invariants(parse_branch("n=4; y=t^6+t^7"))
    assert c.beta == (6, 7) and c.beta_bar == (4, 6, 13)
    assert DG.beta_bar_recursion(4, (6, 7), (2, 2)) == (4, 6, 13)


def test_eggers():
    T = DG.eggers_tree(DG.equising_from_branches([CUSP]))
    assert T.params == (1, Fraction(3, 2), INF)
    assert T.marked == (False, True, False)
    T = DG.eggers_tree(DG.equising_from_branches([CUSP, F18], ["A", "B"]))
    glued = [p for p, mem in zip(T.params, T.members) if mem == ("A", "B")]
    assert max(glued) == Fraction(5, 2)
    T = DG.eggers_tree(DG.equising_from_branches([parse_branch("n=1; y=t"),
                                                   parse_branch("n=1; y=-t")]))
    assert [m for p, m in zip(T.params, T.members) if p == 1] == [("0", "1")]


def test_serialization_roundtrip():
    G = DG.minimal_desing_from_branches([CUSP, F18], ["A", "B"])
    assert DG.graph_from_json(DG.graph_to_json(G)) == G
    D = DG.equising_from_branches([CUSP, F18], ["A", "B"])
    assert DG.equising_from_json(DG.equising_to_json(D)) == D
    dot = DG.graph_to_dot(DG.minimal_desing_from_branches([CUSP]))
    assert all(f"({a},{b})" in dot for a, b in [(2, 1), (3, 1), (5, 2)])


def test_equising_validation():
    bad = {"branches": [{"id": "a", "n": 2, "A": ["5/2"]}, {"id": "b", "n": 2, "A": ["5/2"]},
                        {"id": "c", "n": 1, "A": []}],
           "contacts": [{"pair": ["a", "b"], "A": "3"}, {"pair": ["a", "c"], "A": "2"},
                        {"pair": ["b", "c"], "A": "5/2"}]}
    with pytest.raises(ValtreeError):
        DG.equising_from_json(bad)


def test_deep_free_vertices_get_divisorial_skps():
    # regression: distinct curvettes sharing a truncated prefix must not wedge to a curve
    rng = random.Random(1)
    for _ in range(80):
        G = random_blowups(rng, rng.randint(1, 9))
        for E, v in enumerate(G.vertices):
            s = DG.vertex_to_skp(G, E)
            assert not s.truncated
            assert S.thinness(s) == v.A and S.generic_multiplicity(s) == v.b
