import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sl2boundary.errors import DomainError, ParseError
from sl2boundary.exact import H0
from sl2boundary.model import random_field
from sl2boundary.parsing import format_field, parse_field_expr, parse_weight_expr, parse_word


@pytest.mark.parametrize(
    "text,canonical",
    [
        ("2*r^2+x1^2", "x1^2 + 2*r^2"),
        ("(x1+x2)^2", "x1^2 + 2*x1*x2 + x2^2"),
        ("x1*x2*3/4", "3/4*x1*x2"),
        ("r^(5/2)", "r^(5/2)"),
        ("-2/3*r", "-2/3*r"),
        ("3*x1 - 3*x1", "0"),
        ("log(r)*x1", "log(r)*x1"),
    ],
)
def test_canonical_output(text, canonical):
    assert format_field(parse_field_expr(text, 3)) == canonical


def test_error_positions():
    with pytest.raises(ParseError) as info:
        parse_field_expr("x1^(1/2)", 3)
    err = info.value
    assert (err.line, err.column) == (1, 4)
    assert "only r may carry" in str(err)
    with pytest.raises(ParseError) as info:
        parse_field_expr("x1 +", 3)
    assert info.value.column == 5
    with pytest.raises(ParseError):
        parse_field_expr("x4", 3)


def test_mixed_exponent_classes():
    with pytest.raises(DomainError):
        parse_field_expr("r^(1/2) + r", 3)


def test_weight_expressions():
    assert parse_weight_expr("h0-1") == H0 - 1
    assert parse_weight_expr("(h0-1)/(h0-2)") == (H0 - 1) / (H0 - 2)
    assert parse_weight_expr("2*h0+1/2") == H0 * 2 + Fraction(1, 2)
    with pytest.raises(ParseError):
        parse_weight_expr("h1")


def test_word_errors():
    with pytest.raises(ParseError):
        parse_word("y z")
    with pytest.raises(ParseError):
        parse_word("y^(1/2)")
    with pytest.raises(ParseError):
        parse_word("O", None)
    with pytest.raises(ParseError):
        parse_word("Obar", 3)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32), st.integers(1, 4))
def test_format_parse_round_trip(seed, n):
    rng = random.Random(seed)
    w = Fraction(rng.randint(-5, 5), rng.randint(1, 3))
    f = random_field(rng, n, w, degree=4, r_degree=3, n_terms=rng.randint(0, 6))
    assert parse_field_expr(format_field(f), n, w) == f


@settings(max_examples=40)
@given(st.text(alphabet="x1r23^*+-()/ ", max_size=15))
def test_garbage_raises_only_library_errors(text):
    try:
        parse_field_expr(text, 3)
    except (ParseError, DomainError):
        pass
