from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sl2boundary import H0, RationalFunction, WeightPolynomial, pochhammer, ratfunc_eval, ratfunc_reduce
from sl2boundary.errors import MalformedInputError, PoleError
from sl2boundary.exact import as_ratfunc, format_rational, parse_rational

fractions = st.fractions(min_value=-50, max_value=50, max_denominator=12)
polys = st.lists(fractions, max_size=4).map(WeightPolynomial)
nonzero_polys = st.lists(fractions, max_size=3).map(lambda cs: WeightPolynomial(cs + [1]))
ratfuncs = st.builds(lambda n, d: RationalFunction(n, d), polys, nonzero_polys)


def test_format_and_parse_rational():
    assert format_rational(Fraction(6, 4)) == "3/2"
    assert format_rational(-3) == "-3"
    assert parse_rational(" -7/14 ") == Fraction(-1, 2)
    with pytest.raises(MalformedInputError):
        parse_rational("1/0")
    with pytest.raises(MalformedInputError):
        parse_rational("h0")


def test_polynomial_text_and_division():
    p = WeightPolynomial((1, 0, -2, Fraction(1, 3)))
    assert p.to_text() == "1/3*h0^3 - 2*h0^2 + 1"
    q, r = p.divmod(WeightPolynomial((1, 1)))
    assert q * WeightPolynomial((1, 1)) + r == p
    assert r.degree < 1


def test_rational_function_normalizes():
    f = RationalFunction(WeightPolynomial((-4, 0, 1)), WeightPolynomial((-4, 2)))
    # (h0^2 - 4) / (2 h0 - 4) = (h0 + 2) / 2
    assert f == (H0 + 2) / 2
    assert f.is_polynomial()
    assert (1 / (H0 - 2)).to_text() == "(1)/(h0 - 2)"
    assert as_ratfunc(Fraction(-3, 4)).to_text() == "-3/4"


def test_zero_denominator_rejected():
    with pytest.raises(MalformedInputError):
        RationalFunction(1, 0)


def test_eval_at_pole():
    f = 1 / ((H0 - 2) * (H0 - 3))
    assert ratfunc_eval(f, 5) == Fraction(1, 6)
    with pytest.raises(PoleError):
        ratfunc_eval(f, 3)


def test_pochhammer_is_falling():
    assert pochhammer(5, 3) == 60
    assert pochhammer(Fraction(1, 2), 0) == 1
    assert pochhammer(H0, 2) == H0 * (H0 - 1)
    with pytest.raises(MalformedInputError):
        pochhammer(3, -1)


@given(ratfuncs, ratfuncs, ratfuncs)
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a - a == 0
    if not b.is_zero():
        assert (a / b) * b == a


@given(ratfuncs)
def test_canonical_representative(f):
    assert f.den.lead == 1
    assert f.num.gcd(f.den).degree == 0
    assert ratfunc_reduce(RationalFunction.unreduced(f.num * 3, f.den * 3)) == f
    assert hash(f) == hash(ratfunc_reduce(f))


@settings(max_examples=60)
@given(ratfuncs, fractions)
def test_evaluation_is_a_homomorphism(f, h):
    g = f * f + 1
    try:
        v = ratfunc_eval(f, h)
    except PoleError:
        return
    assert ratfunc_eval(g, h) == v * v + 1
    assert f.substitute(h) == as_ratfunc(v)
