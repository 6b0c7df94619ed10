from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from skewberk.errors import CoeffRootUnavailable, PrecisionLoss
from skewberk.valcore import (
    INF,
    THETA,
    PuiseuxSeries as PS,
    ValExp,
    exp_compare,
    ps_arith,
    ps_compose,
    ps_inv,
    ps_pow_rational,
    ps_val,
    rational_between,
    working_order,
)

X = PS.x()
ONE = PS.const(1)


def test_exp_compare_examples():
    assert exp_compare(ValExp(F(1, 2)), ValExp(0, F(1, 2))) == "<"
    assert exp_compare(ValExp(3), ValExp(3)) == "="
    # 7/5 vs 1 + (2/7)sqrt2: 196 < 200 after squaring
    assert exp_compare(ValExp(F(7, 5)), ValExp(1, F(2, 7))) == "<"
    assert exp_compare(ValExp(1, F(2, 7)), ValExp(F(7, 5))) == ">"


def test_valexp_render_and_arith():
    assert str(ValExp(F(1, 2), 1)) == "1/2+1*sqrt2"
    assert str(ValExp(0, F(-3, 2))) == "0-3/2*sqrt2"
    assert (THETA + 1).is_rational() is False
    assert ValExp(F(3, 2)).as_fraction() == F(3, 2)


def test_rational_between():
    r = rational_between(ValExp(1), THETA)
    assert 1 < r < THETA
    r = rational_between(THETA, ValExp(F(3, 2)))
    assert THETA < r < F(3, 2)


def test_arith_examples():
    assert ps_arith("mul", ONE + X, ONE - X) == ONE - X * X
    assert ps_val(PS.monomial(1, F(3, 2)) + PS.monomial(1, 2)) == F(3, 2)
    h = ONE + PS.monomial(1, F(1, 2))
    assert h * h == ONE + PS.monomial(2, F(1, 2)) + X
    assert ps_arith("neg", X) == -X


def test_mul_order_propagation():
    a = PS([(0, 1)], order=5)
    b = PS([(2, 1)], order=4)
    assert (a * b).order == min(5 + 2, 4 + 0)
    assert (a + b).order == 4


def test_inverse_examples():
    with working_order(10):
        inv = ps_inv(ONE - X)
        assert inv.terms == tuple((F(k), F(1)) for k in range(10))
        assert ps_inv(X) == PS.monomial(1, -1)
        g = ps_inv(X * X * (ONE + X))
        assert g.valuation() == -2
        assert [c for _, c in g.terms[:4]] == [1, -1, 1, -1]
        resid = X * X * (ONE + X) * g - ONE
        assert resid.val_lower_bound() >= 10
    with pytest.raises(ZeroDivisionError):
        ps_inv(PS())


def test_pow_examples():
    assert ps_pow_rational(X * X, F(1, 2)) == X
    with working_order(12):
        r = ps_pow_rational(ONE + X, F(1, 2))
        assert [c for _, c in r.terms[:3]] == [1, F(1, 2), F(-1, 8)]
        assert (r * r - ONE - X).val_lower_bound() >= 12
    with pytest.raises(CoeffRootUnavailable):
        ps_pow_rational(2 * X, F(1, 2))


def test_compose_examples():
    assert ps_compose(PS.monomial(1, F(1, 2)), X * X) == X
    assert ps_compose(ONE + X, X + X * X) == ONE + X + X * X
    assert ps_compose(X + X**3, 2 * X) == 2 * X + 8 * X**3


def test_val_examples():
    assert ps_val(PS.monomial(1, F(3, 2)) * (ONE + X)) == F(3, 2)
    assert ps_val(PS()) == INF
    assert ps_val((ONE + X) - ONE) == 1
    with pytest.raises(PrecisionLoss):
        ps_val(PS([], order=3))


def test_render():
    s = ONE + PS.monomial(2, F(1, 2)) - PS.monomial(1, 3)
    assert str(s) == "1 + 2*x^(1/2) - x^(3)"
    assert str(PS([(0, 1)], order=4)) == "1 + O(x^(4))"


# --- properties -----------------------------------------------------------

exps = st.fractions(min_value=-3, max_value=3, max_denominator=4)
coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=5).filter(lambda c: c != 0)
series = st.lists(st.tuples(exps, coeffs), min_size=1, max_size=5).map(PS).filter(
    lambda s: not s.is_exact_zero()
)
valexps = st.builds(ValExp, st.fractions(-5, 5, max_denominator=7), st.fractions(-3, 3, max_denominator=7))


@settings(max_examples=200, deadline=None)
@given(series, series)
def test_strong_triangle_equality(a, b):
    if ps_val(a) != ps_val(b):
        assert ps_val(a + b) == min(ps_val(a), ps_val(b))


@settings(max_examples=200, deadline=None)
@given(series, series)
def test_valuation_multiplicative(a, b):
    assert ps_val(a * b) == ps_val(a) + ps_val(b)


@settings(max_examples=200, deadline=None)
@given(series)
def test_inverse_round_trip(a):
    with working_order(8):
        inv = ps_inv(a)
        assert ps_val(inv) == -ps_val(a)
        assert (a * inv - ONE).val_lower_bound() >= 8


@settings(max_examples=1000, deadline=None)
@given(valexps, valexps, valexps)
def test_exp_compare_total_order(a, b, c):
    ab, ba = exp_compare(a, b), exp_compare(b, a)
    assert {"<": ">", ">": "<", "=": "="}[ab] == ba
    if ab == "=":
        assert a == b
    if exp_compare(a, b) in "<=" and exp_compare(b, c) in "<=":
        assert exp_compare(a, c) in "<="
    # agrees with the real value
    if ab != "=":
        assert (ab == "<") == (float(a) < float(b)) or abs(float(a) - float(b)) < 1e-12
