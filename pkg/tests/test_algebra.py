import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sl2boundary import algebra as alg
from sl2boundary.errors import DomainError, MalformedInputError
from sl2boundary.exact import H0, as_ratfunc
from sl2boundary.model import random_field, realize_form, y_apply
from sl2boundary.parsing import parse_word

F0 = alg.FormalSection("f0", None)
LETTERS = {"x": alg.X, "y": alg.Y, "h": alg.H}


def rewrite_randomly(word, weight, rng):
    """Independent normal-ordering oracle for words in x, y, h.

    Applies the defining relations at randomly chosen positions until every
    term reads ``x^a y^b`` (any ``h`` at the right edge becomes the weight).
    Returns ``{(a, b): coefficient}``.
    """
    pending = [(tuple(word), as_ratfunc(1))]
    done = {}
    while pending:
        w, c = pending.pop()
        if w and w[-1] == "h":
            pending.append((w[:-1], c * weight))
            continue
        spots = [i for i in range(len(w) - 1) if (w[i], w[i + 1]) in (("y", "x"), ("h", "x"), ("h", "y"))]
        if not spots:
            key = (w.count("x"), w.count("y"))
            done[key] = done.get(key, as_ratfunc(0)) + c
            continue
        i = rng.choice(spots)
        a, b = w[i], w[i + 1]
        head, tail = w[:i], w[i + 2 :]
        if (a, b) == ("y", "x"):  # yx = xy - h
            pending += [(head + ("x", "y") + tail, c), (head + ("h",) + tail, -c)]
        elif (a, b) == ("h", "x"):  # hx = xh + 2x
            pending += [(head + ("x", "h") + tail, c), (head + ("x",) + tail, c * 2)]
        else:  # hy = yh - 2y
            pending += [(head + ("y", "h") + tail, c), (head + ("y",) + tail, c * -2)]
    # weights of h acting past y's were already accounted for by the relations
    return {k: v for k, v in done.items() if not v.is_zero()}


def engine_as_dict(form):
    out = {}
    for (expo, logdeg, tail, _section), c in form.terms.items():
        assert logdeg == 0
        assert all(g.kind == "Y" for g in tail)
        out[(int(expo.constant_value()), len(tail))] = c
    return out


words = st.lists(st.sampled_from("xyh"), min_size=1, max_size=8)


@settings(max_examples=80, deadline=None)
@given(words, st.integers(0, 2 ** 32))
def test_engine_agrees_with_random_strategy_rewriter(word, seed):
    got = engine_as_dict(alg.reduce([LETTERS[c] for c in word], F0))
    assert got == rewrite_randomly(word, H0, random.Random(seed))


@settings(max_examples=40, deadline=None)
@given(st.lists(st.sampled_from([alg.X, alg.Y, alg.H, alg.LOGX, alg.LOGTAU]), min_size=2, max_size=7), st.data())
def test_confluence_under_splitting(word, data):
    cut = data.draw(st.integers(0, len(word)))
    whole = alg.reduce(word, F0)
    inner = alg.reduce(word[cut:], F0, engine=alg.Engine())
    split = alg.OperatorExpr.word(word[:cut]).apply(inner, alg.Engine())
    assert whole == split


def test_basic_normal_forms():
    assert alg.reduce([alg.Y, alg.X], F0).to_text() == "(-h0)*f0 + 1*x y f0"
    assert alg.reduce([alg.Y, alg.X, alg.X], F0).to_text() == "(-2*h0 - 2)*x f0 + 1*x^2 y f0"
    assert alg.reduce([], F0).to_text() == "1*f0"
    assert alg.CanonicalForm().to_text() == "0"


def test_sl2_relations():
    assert alg.commutator([alg.X], [alg.Y], F0).to_text() == "(h0)*f0"
    assert alg.commutator([alg.H], [alg.X], F0) == alg.reduce([alg.X], F0).scale(2)
    assert alg.commutator([alg.H], [alg.Y], F0) == alg.reduce([alg.Y], F0).scale(-2)


@pytest.mark.parametrize("k", range(1, 7))
def test_power_commutators(k):
    got = alg.commutator([alg.xpow(k)], [alg.Y], F0)
    assert got == alg.reduce([alg.xpow(k - 1)], F0).scale(H0 * k + k * (k - 1))
    got = alg.commutator([alg.X], [alg.Y] * k, F0)
    assert got == alg.reduce([alg.Y] * (k - 1), F0).scale(H0 * k - k * (k - 1))


@settings(max_examples=30, deadline=None)
@given(st.fractions(min_value=-5, max_value=5, max_denominator=4).filter(lambda a: a != 0))
def test_general_power_commutator(a):
    # [x^a, y] = a x^(a-1) (h + a - 1) on a section of weight h0
    got = alg.commutator([alg.xpow(a)], [alg.Y], F0)
    assert got == alg.reduce([alg.xpow(a - 1)], F0).scale((H0 + (a - 1)) * a)


def test_log_rules():
    fb = alg.FormalSection("fbar0", 2 - H0)
    assert alg.reduce([alg.Y, alg.LOGX], fb).to_text() == "(h0 - 1)*x^-1 fbar0 + 1*logx y fbar0"
    assert alg.commutator([alg.H], [alg.LOGX], F0).to_text() == "2*f0"
    assert alg.commutator([alg.X], [alg.LOGTAU], F0).is_zero()


def test_contraction_mode():
    con = alg.Engine(contraction=True)
    assert alg.commutator([alg.X], [alg.Y], F0, engine=con).is_zero()
    assert alg.commutator([alg.H], [alg.X], F0, engine=con).to_text() == "2*x f0"


@pytest.mark.parametrize("m", range(1, 6))
def test_weyl_shortcut_matches_expansion(m):
    f1 = alg.FormalSection("f1", m - 1)
    rule = alg.reduce([alg.weyl(m), alg.X], f1, engine=alg.Engine())
    expanded = alg.OperatorExpr.word((alg.weyl(m), alg.X)).expand_weyl().apply(f1, alg.Engine())
    assert rule == expanded


def test_generator_validation():
    with pytest.raises(MalformedInputError):
        alg.Generator("Z")
    with pytest.raises(MalformedInputError):
        alg.weyl(-1)


def test_standard_expressions_vanish_generic():
    ex = alg.STANDARD_EXPRESSIONS
    for key in ("y_K_f0", "K_x_f1", "y_second_fbar0"):
        assert alg.verify_zero(ex[key], 10, [None]).passed, key


def test_solution_operator_detects_tampering():
    spec = alg.first_kind_spec(None, 10)
    ok = spec.operator()
    bad = ok + alg.OperatorExpr.word((alg.xpow(2), alg.Y, alg.Y)).scale(Fraction(1, 7))
    target = alg.FormalSection("f0", None)
    y = alg.OperatorExpr.word((alg.Y,))
    assert (y @ ok).apply(target, alg.Engine(), max_degree=8).is_zero()
    assert not (y @ bad).apply(target, alg.Engine(), max_degree=8).is_zero()


@pytest.mark.parametrize("h0", [2, 3, 5])
def test_log_operator_ordering(h0):
    ex = alg.STANDARD_EXPRESSIONS
    assert alg.verify_zero(ex["O_x_f1"], 10, [h0]).passed
    assert not alg.verify_zero(ex["O_unaveraged_x_f1"], 10, [h0]).passed
    assert alg.verify_zero(ex["O_unaveraged_minus_leftover"], 10, [h0]).passed
    assert alg.verify_zero(ex["O_tau_shift"], 10, [h0]).passed


def test_leftover_needs_m_positive():
    with pytest.raises(DomainError):
        alg.leftover_residue(as_ratfunc(1), 6)


def test_parse_word_blocks():
    assert parse_word("y x x").apply(F0, alg.Engine()) == alg.reduce([alg.Y, alg.X, alg.X], F0)
    assert parse_word("y^3") .apply(F0, alg.Engine()) == alg.reduce([alg.Y] * 3, F0)
    obar = parse_word("y Obar", 1, 10)
    assert obar.apply(alg.FormalSection("f0", 1), alg.Engine(), max_degree=8).is_zero()


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_engine_realized_in_model(seed):
    rng = random.Random(seed)
    d = rng.choice((3, 4, 5))
    w = Fraction(rng.randint(-6, 6), rng.randint(1, 2))
    f = random_field(rng, d - 1, w)
    word = [rng.choice([alg.X, alg.Y]) for _ in range(rng.randint(1, 6))]
    form = alg.reduce(word, alg.FormalSection("f", d + 2 * w))
    direct = f
    for g in reversed(word):
        direct = direct.mul_r(1) if g is alg.X else y_apply(direct, d)
    assert realize_form(form, {"f": f}, d) == direct
