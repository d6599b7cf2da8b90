from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from valtree.arith import (INF, BiPoly, ParseError, ValtreeError, format_poly,
                           intersection_number, parse_branch, parse_poly,
                           substitute_order, weierstrass_divide)

polys = st.dictionaries(
    st.tuples(st.integers(0, 5), st.integers(0, 5)),
    st.fractions(min_value=-5, max_value=5, max_denominator=4).filter(bool),
    max_size=6,
).map(BiPoly)


def test_extended_rationals():
    assert Fraction(3) + INF is INF
    assert min(Fraction(3), INF) == 3
    assert INF > Fraction(10 ** 9)
    with pytest.raises(ValtreeError):
        _ = INF * 0


def test_parse_examples():
    assert parse_poly("y^2 - x^3").terms == {(0, 2): 1, (3, 0): -1}
    assert parse_poly("(x+y)^2").terms == {(2, 0): 1, (1, 1): 2, (0, 2): 1}
    with pytest.raises(ParseError) as e:
        parse_poly("x + ")
    assert e.value.offset == 4


def test_parse_rejects_negative_exponent():
    with pytest.raises(ParseError):
        parse_poly("x^-1")


@given(polys)
def test_print_parse_roundtrip(p):
    assert parse_poly(format_poly(p)) == p


@given(polys, polys)
def test_ring_laws(p, q):
    assert p * q == q * p
    assert (p + q) * p == p * p + q * p


def test_substitute_order_examples():
    cusp = parse_branch("n=2; y=t^3")
    assert substitute_order(parse_poly("y"), cusp) == 3
    assert substitute_order(parse_poly("y^2 - x^3"), cusp) is INF
    assert substitute_order(parse_poly("y^2 - x^3"), parse_branch("n=2; y=t^3+t^5")) == 8


def test_weierstrass_examples():
    U = parse_poly("y^2 - x^3")
    assert weierstrass_divide(parse_poly("y^3"), U)[:2] == [parse_poly("x^3*y"), parse_poly("y")]
    q = weierstrass_divide(U, U)
    assert q[0].is_zero() and q[1] == BiPoly.const(1)
    assert weierstrass_divide(parse_poly("x*y + 1"), U) == [parse_poly("x*y + 1")]


@given(polys)
def test_weierstrass_reconstructs(p):
    U = parse_poly("y^2 - x^3 - x^4")
    acc = BiPoly.const(0)
    for i, c in enumerate(weierstrass_divide(p, U)):
        acc = acc + c * U ** i
    assert acc == p


def test_branch_validation():
    with pytest.raises(ValtreeError):
        parse_branch("n=2; y=t^4")  # not primitive
    with pytest.raises(ValtreeError):
        parse_branch("n=3; y=t^2")  # tangent to x = 0
    sw = parse_branch("x=t^3; y=t^2")
    assert sw.swap and sw.n == 2


def test_intersection_numbers():
    c1 = parse_branch("n=2; y=t^3")
    c2 = parse_branch("n=2; x=t^2+t^4; y=t^3+2*t^5+t^7")
    assert intersection_number(c1, c2) == intersection_number(c2, c1) == 8
    assert intersection_number(c1, parse_branch("n=1; y=0")) == 3
