import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from valtree import skp as S
from valtree.arith import INF, parse_branch, parse_poly, substitute_order
from valtree.corpus import corpus, random_poly, random_skp

seeds = st.integers(0, 10 ** 6)
CUSP = parse_branch("n=2; y=t^3")


def sk(keys, vals):
    return S.make_skp(keys, vals)


def test_validate_examples():
    assert S.validate(sk(["x", "y"], [1, "3/2"])) is None
    s = sk(["x", "y", "y^2 - x^3"], [1, "3/2", 7])
    kd = S.key_data(s)[1]
    assert (kd.n, kd.m[0], kd.theta) == (2, 3, 1)
    with pytest.raises(S.SKPViolation) as e:
        sk(["x", "y", "y^2 - x^3"], [1, "3/2", 2])
    assert e.value.rule == "P1"


def test_eval_examples():
    assert S.eval_skp(S.NU_M, parse_poly("x^2 + y^3")) == 2
    assert S.eval_skp(sk(["x", "y"], [1, "3/2"]), parse_poly("y^2 - x^3")) == 3
    assert S.eval_skp(sk(["x", "y", "y^2-x^3"], [1, "3/2", "inf"]), parse_poly("y^2 - x^3")) is INF
    assert S.eval_skp(sk(["x", "y", "y^2-x^3"], [1, "3/2", 7]), parse_poly("y")) == Fraction(3, 2)


def test_skp_of_branch_examples():
    assert str(S.skp_of_branch(CUSP)) == "[(x, y, y^2 - x^3); (1, 3/2, inf)]"
    assert str(S.skp_of_branch(parse_branch("n=1; y=t"))) == "[(x, y, -x + y); (1, 1, inf)]"
    s = S.skp_of_branch(parse_branch("n=2; y=t^3+t^5"))
    assert s.values == (1, Fraction(3, 2), 4, 5, INF)


@given(seeds)
def test_valuation_axioms(seed):
    rng = random.Random(seed)
    s = random_skp(rng)
    p, q = random_poly(rng), random_poly(rng)
    assert S.eval_skp(s, p * q) == S.eval_skp(s, p) + S.eval_skp(s, q)
    assert S.eval_skp(s, p + q) >= min(S.eval_skp(s, p), S.eval_skp(s, q))


@pytest.mark.parametrize("name,C", corpus())
def test_curve_valuation_matches_substitution(name, C):
    s = S.skp_of_branch(C)
    rng = random.Random(len(name))
    for _ in range(15):
        p = random_poly(rng)
        o = substitute_order(p, C)
        assert S.eval_skp(s, p) == (o if o is INF else o / C.n)


def test_compare_examples():
    a = sk(["x", "y"], [1, "3/2"])
    b = sk(["x", "y", "y^2-x^3"], [1, "3/2", 7])
    assert S.compare(a, b) == "less"
    assert S.compare(b, a) == "greater"
    assert S.compare(a, a) == "equal"
    assert S.compare(a, sk(["x", "y", "y-x"], [1, 1, 5])) == "incomparable"


def test_wedge_examples():
    w = S.wedge(S.skp_of_branch(CUSP), S.skp_of_branch(parse_branch("n=1; y=0")))
    assert str(w) == "[(x, y); (1, 3/2)]"
    assert S.wedge(S.monomial_skp(1, 2), S.monomial_skp(2, 1)) == S.NU_M


@given(seeds)
def test_wedge_is_infimum(seed):
    rng = random.Random(seed)
    s, t = random_skp(rng), random_skp(rng)
    w = S.wedge(s, t)
    assert S.leq(w, s) and S.leq(w, t)
    assert S.wedge(t, s) == w
    assert S.wedge(s, s) == s
    for _ in range(3):
        p = random_poly(rng)
        assert S.eval_skp(w, p) <= min(S.eval_skp(s, p), S.eval_skp(t, p))


def test_invariants_examples():
    r = S.invariants(S.NU_M)
    assert (r.alpha, r.A, r.m, r.b, r.kind) == (1, 2, 1, 1, "divisorial")
    r = S.invariants(sk(["x", "y", "y^2-x^3"], [1, "3/2", 7]))
    assert (r.alpha, r.A, r.m, r.b) == (Fraction(7, 2), Fraction(13, 2), 2, 2)
    assert [(a.k, a.m, a.alpha, a.A) for a in r.approx] == [(1, 1, Fraction(3, 2), Fraction(5, 2))]
    assert r.semigroup == (1, Fraction(3, 2), 7)
    r = S.invariants(S.skp_of_branch(CUSP))
    assert (r.kind, r.alpha, r.A, r.m) == ("curve", INF, INF, 2)
    assert tuple(v * r.m for v in r.semigroup) == (2, 3)


@given(seeds)
def test_thinness_bounds(seed):
    s = random_skp(random.Random(seed))
    r = S.invariants(s)
    assert r.A >= 1 + r.alpha
    assert (r.A == 1 + r.alpha) == (r.m == 1)
    if r.m > 1:
        assert r.A < r.m * r.alpha


def test_relative_invariants():
    assert S.relative_invariants(S.NU_M) == (1, 2, 1)
    ax, _, mx = S.relative_invariants(S.monomial_skp(2, 1))
    assert (ax, mx) == (Fraction(1, 2), 1)
    assert S.relative_invariants(sk(["x", "y", "y^2-x^3"], [1, "3/2", 7])) == \
        (Fraction(7, 2), Fraction(13, 2), 2)


def test_eval_irreducible_and_ball_distance():
    cusp = S.skp_of_branch(CUSP)
    assert S.eval_irreducible(S.monomial_skp(1, 2), cusp) == 3
    assert S.eval_irreducible(cusp, cusp) is INF
    assert S.eval_irreducible(S.NU_M, cusp) == 2
    c2 = parse_branch("n=2; x=t^2+t^4; y=t^3+2*t^5+t^7")
    assert S.ball_distance(CUSP, parse_branch("n=1; y=0")) == Fraction(2, 3)
    assert S.ball_distance(CUSP, c2) == Fraction(1, 2)
    assert S.ball_distance(CUSP, parse_branch("n=1; x=0; y=t")) == 1


@given(seeds)
def test_json_roundtrip(seed):
    s = random_skp(random.Random(seed))
    assert S.skp_from_json(S.skp_to_json(s)) == s


@given(seeds, st.fractions(min_value=1, max_value=20, max_denominator=7))
def test_point_at_skewness(seed, a):
    C = corpus()[seed % 12][1]
    s = S.skp_of_branch(C)
    p = S.point_at_skewness(s, a)
    assert S.skewness(p) == a
    assert S.leq(p, s)
