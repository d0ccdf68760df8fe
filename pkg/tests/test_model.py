import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sl2boundary.errors import DomainError, ExceptionalWeightError, NoSolutionError, WeightMismatchError
from sl2boundary.model import (
    DensityField,
    gjms_constant,
    h_apply,
    idotd_apply,
    interior_scale_form,
    obstruction,
    p_k_build,
    q_holographic,
    random_field,
    sl2_realization_check,
    solve_first_kind,
    solve_log_density,
    solve_log_kind,
    solve_second_kind,
    y_apply,
)
from sl2boundary.parsing import parse_field_expr

seeds = st.integers(0, 2 ** 32)


def field(text, n=3, w=0):
    return parse_field_expr(text, n, Fraction(w))


@settings(max_examples=30, deadline=None)
@given(seeds, st.sampled_from([3, 4, 5]))
def test_sl2_relations_hold(seed, d):
    rng = random.Random(seed)
    w = Fraction(rng.randint(-8, 8), rng.randint(1, 4))
    f = random_field(rng, d - 1, w)
    x = lambda g: g.mul_r(1)
    y = lambda g: y_apply(g, d)
    assert x(y(f)) - y(x(f)) == f.scale(d + 2 * w)
    assert h_apply(x(f), d) - x(h_apply(f, d)) == x(f).scale(2)


def test_lorentzian_signature():
    assert sl2_realization_check(4, 5, seed=3, signature=(1, 1, -1)).passed


def test_weight_mismatch():
    with pytest.raises(WeightMismatchError):
        field("x1", 3, 0) + field("x1", 3, 1)


def test_restrict_refuses_singular_terms():
    with pytest.raises(DomainError):
        field("r^(-1)*x1").restrict()
    with pytest.raises(DomainError):
        field("log(r)*x1").restrict()


def test_laplacian_of_quadratic():
    assert field("x1^2 + 3*x1*x2 + x2^2", 2).restrict().laplacian().to_text() == "4"


def test_idotd_on_constant_weight_zero_kills_it():
    # I.D annihilates constants in the weight where the first-order part vanishes
    f = DensityField.constant(3, 1, weight=Fraction(-1))
    assert idotd_apply(f, 4).is_zero()


@pytest.mark.parametrize("k,d,c", [(2, 3, 1), (2, 5, 1), (4, 5, 9)])
def test_gjms_constants(k, d, c):
    g = gjms_constant(k, d, trials=3)
    assert g.passed and g.constant == c


@pytest.mark.parametrize("k", [1, 3])
def test_odd_order_restricts_to_zero(k):
    g = gjms_constant(k, 4, trials=3)
    assert g.zero_restriction and g.tangential


def test_p_k_is_tangential():
    assert p_k_build(2, 4).is_tangential()
    assert p_k_build(3, 5).is_tangential()


def test_q_requires_even_n():
    with pytest.raises(DomainError):
        q_holographic(field("x1^2", 3))
    assert q_holographic(field("x1^2", 3), allow_odd=True) is not None


def test_first_kind_exact_and_truncated():
    sol = solve_first_kind(field("x1^2", 3, Fraction(-1, 4)), 4, 6)
    assert sol.assembled().to_text() == "x1^2 + 2*r^2"
    assert sol.residual_order() is None
    assert sol.to_json()["residual_order"] == "inf"
    short = solve_first_kind(field("x1^2", 3, Fraction(-1, 4)), 4, 1)
    assert short.residual().to_text() == "-2/3*r"


@settings(max_examples=20, deadline=None)
@given(seeds, st.integers(0, 5))
def test_first_kind_residual_order(seed, N):
    rng = random.Random(seed)
    w0 = Fraction(5 * rng.randint(-3, 3) + rng.randint(1, 4), 5)  # keeps h0 off the integers
    f0 = random_field(rng, 3, w0, degree=7, n_terms=5)
    sol = solve_first_kind(f0, 4, N)
    assert sol.residual_order() is None or sol.residual_order() >= N


def test_exceptional_weight_reports_obstruction():
    f0 = field("x1^4 + x2^2*x3", 3, Fraction(-1, 2))
    with pytest.raises(ExceptionalWeightError) as info:
        solve_first_kind(f0, 4, 6)
    err = info.value
    assert (err.h0, err.ell) == (3, 1)
    assert err.obstruction == obstruction(f0, 4)
    assert err.multiple == 1


def test_second_kind():
    s = solve_second_kind(field("1", 3, Fraction(-11, 4)), 4, Fraction(-1, 4), 6)
    assert s.assembled().to_text() == "r^(5/2)"
    with pytest.raises(NoSolutionError):
        solve_second_kind(field("1", 3, Fraction(-11, 4)), 4, Fraction(-1, 4), 6, alpha=1)


def test_log_kind_odd_and_even():
    lk = solve_log_kind(field("x1^2", 3, Fraction(-1, 2)), 4, 6)
    assert lk.log_coefficient().to_text() == "-1"
    assert lk.residual_order() is None
    even = solve_log_kind(field("x1^2", 3, 0), 4, 6)
    assert not even.has_log_terms()


def test_log_density():
    om = field("x1^2 + 3*x1*x2 + x2^2", 2)
    ld = solve_log_density(-om, 3, 6)
    assert ld.log_coefficient().to_text() == "2"
    om4 = field("x1^4 - x2^2*x3^2 + x4^3*x1", 4)
    ld4 = solve_log_density(-om4, 5, 6)
    q = q_holographic(om4)
    assert ld4.log_coefficient() == q.scale(Fraction(1, 16)).with_weight(ld4.log_coefficient().weight)
    assert not solve_log_density(-field("x1^4 - x3^2"), 4, 6).has_log_terms()


@settings(max_examples=10, deadline=None)
@given(seeds)
def test_log_solution_independent_of_log_tau_extension(seed):
    rng = random.Random(seed)
    f0 = random_field(rng, 3, Fraction(-1, 2), degree=4, r_degree=0)
    tau = random_field(rng, 3, -1, degree=3).mul_r(1).with_weight(0)
    a = solve_log_kind(f0, 4, 6)
    b = solve_log_kind(f0, 4, 6, logtau=tau)
    assert a.log_coefficient() == b.log_coefficient()


def test_interior_scale_round_trip_log():
    lk = solve_log_kind(field("x1^2", 3, Fraction(-1, 2)), 4, 6)
    isf = interior_scale_form(lk, Fraction(5, 2))
    assert isf.reassemble() == lk.assembled()
    with pytest.raises(DomainError):
        interior_scale_form(lk, 1)
