import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from skewberk.errors import PoleAtCenter, PoleInDisk
from skewberk.ratcalc import (
    Disk,
    RationalFunc,
    YPoly,
    count_zeros_poles,
    gauss_norm,
    image_of_annulus,
    image_of_disk,
    newton_polygon,
    newton_puiseux_roots,
    oo,
    rf_eval,
    taylor_expand,
    wdeg,
)
from skewberk.valcore import THETA, PuiseuxSeries as PS, ValExp, ps_val, working_order

X = PS.x()
Y = RationalFunc.y()
ZERO = PS()


def xp(e, c=1):
    return PS.monomial(c, e)


def test_rf_eval_examples():
    assert rf_eval(1 / Y, ZERO) is oo
    assert rf_eval((Y * Y - X) / (Y - 1), ZERO) == X
    assert rf_eval(Y * Y, oo) is oo
    assert rf_eval(1 / Y, oo) == ZERO


def test_taylor_examples():
    assert taylor_expand(Y * Y, ZERO, 3) == [ZERO, ZERO, PS.const(1)]
    assert taylor_expand(1 / (1 - Y), ZERO, 5) == [PS.const(1)] * 5
    c = taylor_expand((Y * Y - X) / (Y - 1), ZERO, 3)
    assert c == [X, X, X - 1]
    with pytest.raises(PoleAtCenter):
        taylor_expand(1 / Y, ZERO, 2)


def test_newton_polygon_examples():
    p = newton_polygon((Y * Y - X).num)
    assert p.segments == ((F(-1, 2), 2),) and p.vanishing == 0
    p = newton_polygon((Y * (Y - X)).num)
    assert p.vanishing == 1 and p.root_valuations() == [(1, 1)]
    p = newton_polygon((Y - 1).num)
    assert p.segments == ((0, 1),)


def test_newton_polygon_matches_factorisation():
    # roots x^2 (twice), x^(1/3), 5
    f = (Y - xp(2)) ** 2 * (Y - xp(F(1, 3))) * (Y - 5)
    vals = sorted(newton_polygon(f.num).root_valuations())
    assert vals == [(0, 1), (F(1, 3), 1), (2, 2)]


def test_count_zeros_poles_examples():
    f = Y * (Y - X)
    assert count_zeros_poles(f, ZERO, 1, True) == (2, 0)
    assert count_zeros_poles(f, ZERO, 1, False) == (1, 0)
    assert count_zeros_poles(1 / Y, ZERO, 0, True) == (0, 1)


def test_gauss_norm_examples():
    f = Y * Y - X
    assert gauss_norm(f, ZERO, 0) == 0
    assert gauss_norm(f, ZERO, 1) == 1
    assert gauss_norm(RationalFunc.const(xp(F(5, 2))), X, THETA) == F(5, 2)
    assert gauss_norm(Y, ZERO, THETA) == THETA


def test_wdeg_examples():
    f = Y * Y - X
    assert wdeg(f, ZERO, F(1, 2), "outer") == 0
    assert wdeg(f, ZERO, F(1, 2), "inner") == 2
    for rho in (0, 1, THETA):
        assert wdeg(Y**3, ZERO, rho, "inner") == wdeg(Y**3, ZERO, rho, "outer") == 3
    assert wdeg(1 / Y, ZERO, 0, "inner") == wdeg(1 / Y, ZERO, 0, "outer") == -1


def test_image_of_disk_examples():
    d, m = image_of_disk(Y * Y, Disk(ZERO, 1))
    assert (d.center, d.radius_exp, m) == (ZERO, 2, 2)
    d, m = image_of_disk(Y * Y - X, Disk(ZERO, 1))
    assert (d.center, d.radius_exp, m) == (-X, 2, 2)
    d, m = image_of_disk(Y + Y * Y, Disk(ZERO, F(1, 2)))
    assert (d.center, d.radius_exp, m) == (ZERO, F(1, 2), 1)
    with pytest.raises(PoleInDisk):
        image_of_disk(1 / (Y - X), Disk(ZERO, 1))


def test_image_of_annulus_examples():
    r = image_of_annulus(1 / Y, ZERO, 1, 2)
    assert (r.case, r.outer_exp, r.inner_exp, r.degree) == ("M=N<=-1", -2, -1, 1)
    r = image_of_annulus(Y * Y, ZERO, 1, 2)
    assert (r.case, r.outer_exp, r.inner_exp, r.degree) == ("M=N>=1", 2, 4, 2)
    # y(y-x) has both zeros at valuation >= 1, so the annulus 0 < v < 1 sees
    # wdeg 2 from either side and maps 2-to-1 onto 0 < v < 2.
    r = image_of_annulus(Y * (Y - X), ZERO, 0, 1)
    assert (r.case, r.M, r.N, r.degree) == ("M=N>=1", 2, 2, 2)
    assert (r.outer_exp, r.inner_exp) == (0, 2)


def test_image_of_annulus_laurent_constant():
    # y + 1 + x^3/y: zeros of f - 1 have valuation 3/2, outside 0 < v < 1
    f = Y + 1 + xp(3) / Y
    r = image_of_annulus(f, ZERO, 0, 1)
    assert (r.case, r.center, r.degree) == ("M=N>=1", PS.const(1), 1)
    assert (r.outer_exp, r.inner_exp) == (0, 1)
    # y + 1 + 1/y has zeros of f - 1 at valuation 0, so the image is a disk
    r = image_of_annulus(Y + 1 + 1 / Y, ZERO, F(-1, 2), F(1, 2))
    assert (r.case, r.M, r.N) == ("M<N", -1, 1)
    assert r.disk.contains(PS.const(1)) and r.disk.radius_exp == F(-1, 2)


def test_image_of_annulus_case_m_less_than_n():
    # y/(y - x) on 0 < v < 1: a pole of valuation 1 sits inside the inner
    # closed disk together with the zero at 0
    f = (Y - 1) * Y / (Y - X)
    r = image_of_annulus(f, ZERO, F(1, 2), 1)
    assert r.M <= r.N


def test_newton_puiseux_examples():
    res = newton_puiseux_roots((Y * Y - X * X).num, 6)
    assert sorted(str(r) for r, _ in res.roots) == sorted(["x^(1)", "-x^(1)"])
    p = (Y * Y - X - X * X).num
    res = newton_puiseux_roots(p, 6)
    assert res.complete and len(res.roots) == 2
    for r, _ in res.roots:
        assert p(r).val_lower_bound() >= 6
        assert r.terms[0] in ((F(1, 2), 1), (F(1, 2), -1))
    res = newton_puiseux_roots((Y * Y - 2 * X).num, 6)
    assert not res.roots
    assert res.unresolved[0]["valuation"] == F(1, 2)
    assert res.unresolved[0]["degree"] == 2


def test_newton_puiseux_cusp():
    p = (Y**3 - X * X).num
    res = newton_puiseux_roots(p, 6)
    # y = x^(2/3) is the only branch whose residue equation c^3 = 1 is rational
    assert [str(r) for r, _ in res.roots] == ["x^(2/3)"]
    assert res.unresolved and res.unresolved[0]["degree"] == 2


# --- properties -----------------------------------------------------------

coef = st.fractions(min_value=-4, max_value=4, max_denominator=3)
mono = st.tuples(st.integers(-3, 3), coef).map(lambda t: PS.monomial(t[1], t[0]) if t[1] else PS())
ypoly = st.lists(mono, min_size=1, max_size=5).map(YPoly).filter(lambda p: not p.is_zero())
radii = st.one_of(
    st.fractions(-2, 2, max_denominator=4).map(ValExp),
    st.fractions(-1, 1, max_denominator=4).map(lambda r: ValExp(r, F(1, 2))),
)
centres = st.sampled_from([ZERO, PS.const(1), X, PS.const(-2) + xp(F(1, 2))])


@settings(max_examples=100, deadline=None)
@given(ypoly, ypoly, ypoly, ypoly, centres, radii)
def test_gauss_norm_multiplicative(g1, h1, g2, h2, a, rho):
    f1, f2 = RationalFunc(g1, h1), RationalFunc(g2, h2)
    assert gauss_norm(f1 * f2, a, rho) == gauss_norm(f1, a, rho) + gauss_norm(f2, a, rho)


@settings(max_examples=100, deadline=None)
@given(ypoly, ypoly, centres, radii)
def test_gauss_norm_ultrametric(g1, g2, a, rho):
    f1, f2 = RationalFunc(g1), RationalFunc(g2)
    s = f1 + f2
    if s.num.is_zero():
        return
    n1, n2 = gauss_norm(f1, a, rho), gauss_norm(f2, a, rho)
    assert gauss_norm(s, a, rho) >= min(n1, n2)
    if n1 != n2:
        assert gauss_norm(s, a, rho) == min(n1, n2)


def _sample_in_disk(rng, a, rho):
    # a + x^rho * (unit) + higher terms; residue class chosen at random
    u = rng.choice([0, 1, -1, 2, 3, F(1, 2), 7])
    tail = PS.monomial(rng.choice([1, -3, 5]), rho + F(rng.randint(1, 6), rng.choice([1, 2, 3])))
    return a + PS.monomial(u, rho) + tail


@settings(max_examples=50, deadline=None)
@given(ypoly, centres, st.fractions(-1, 2, max_denominator=3))
def test_gauss_norm_dominates_evaluation(g, a, rho):
    f = RationalFunc(g)
    rng = random.Random(hash((str(g), rho)))
    n = gauss_norm(f, a, rho)
    vals = []
    for _ in range(50):
        b = _sample_in_disk(rng, a, rho)
        v = f.num(b)
        vals.append(ps_val(v))
    assert all(v >= n for v in vals)
    assert min(vals) == n


@settings(max_examples=50, deadline=None)
@given(ypoly, st.fractions(-1, 2, max_denominator=3))
def test_wdeg_jump_counts_crossed_roots(g, rho):
    p = RationalFunc(g)
    if g.degree < 1:
        return
    # step from just above rho to just below it: outer wdeg gains the roots of valuation rho
    nu = newton_polygon(g.shift(ZERO))
    at = sum(L for v, L in nu.root_valuations() if v == rho)
    assert wdeg(p, ZERO, rho, "inner") - wdeg(p, ZERO, rho, "outer") == at


def test_newton_puiseux_residual_random():
    rng = random.Random(7)
    for _ in range(10):
        roots = [
            PS.monomial(rng.choice([1, -1, 2, F(1, 3)]), F(rng.randint(0, 4), rng.choice([1, 2])))
            + PS.monomial(rng.randint(-3, 3), F(rng.randint(5, 9), 2))
            for _ in range(rng.randint(1, 3))
        ]
        p = YPoly([1])
        for r in roots:
            p = p * YPoly([-r, 1])
        with working_order(12):
            res = newton_puiseux_roots(p, 6)
        assert res.complete
        assert sum(m for _, m in res.roots) == p.degree
        for r, _ in res.roots:
            assert p(r).val_lower_bound() >= 6
