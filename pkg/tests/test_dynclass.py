from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from skewberk.berktree import GAUSS, INFTY, DiskPoint, TypeI
from skewberk.dynclass import (
    NotPeriodicWithin,
    attracting_typeI_from_disk,
    classify_fixed_hyperbolic,
    classify_fixed_typeI,
    classify_periodic_typeI,
    classify_repelling_typeI,
    contraction_attractor,
    cycle_of,
    detect_cycle,
    exceptional_places,
    exceptional_typeI,
    julia_test,
    orbit,
)
from skewberk.errors import HypothesisFailed, NotContracting, NotFixed
from skewberk.ratcalc import Disk, RationalFunc as RF, oo
from skewberk.residue import ReducedMap
from skewberk.skewmap import apply_point, apply_typeI, local_degree, mk_skew
from skewberk.valcore import THETA, PuiseuxSeries as PS, working_order

X = PS.x()
Y = RF.y()
ONE = PS.const(1)


def xp(e, c=1):
    return PS.monomial(c, e)


def test_orbit_examples():
    pts = orbit(mk_skew(X, Y * Y), DiskPoint(0, F(1, 2)), 3).points
    assert [p.radius_exp for p in pts] == [F(1, 2), 1, 2, 4]
    assert set(orbit(mk_skew(xp(3), Y * Y), GAUSS, 4).points) == {GAUSS}
    pts = orbit(mk_skew(xp(2), Y), TypeI(X), 3).points
    assert [p.value for p in pts] == [X, xp(F(1, 2)), xp(F(1, 4)), xp(F(1, 8))]


def test_orbit_stops_with_flag():
    # 1/(a - 1) cannot be evaluated when a - 1 is known only as O(x^2)
    orb = orbit(mk_skew(X, Y * Y), TypeI(PS([], order=3)), 2)
    assert len(orb.points) == 3 and orb.stopped is None
    orb = orbit(mk_skew(X, 1 / (Y - 1)), TypeI(ONE + PS([], order=2)), 2)
    assert orb.stopped and len(orb.points) == 1


def test_detect_cycle_examples():
    rep = detect_cycle(mk_skew(xp(3), Y * Y), GAUSS, 5)
    assert rep.period == 1 and rep.preperiod == 0
    rep = detect_cycle(mk_skew(X, 1 / Y), DiskPoint(0, 1), 5)
    assert rep.period == 2 and {p.radius_exp for p in rep.points} == {1, -1}
    assert isinstance(detect_cycle(mk_skew(X, Y * Y), DiskPoint(0, 1), 5), NotPeriodicWithin)
    rep = detect_cycle(mk_skew(X, Y * Y), DiskPoint(-1, F(1, 2)), 5)
    assert rep.preperiod == 1 and rep.points == [DiskPoint(1, F(1, 2))]


def test_classify_typeI_examples():
    c = classify_fixed_typeI(mk_skew(xp(2), Y), 1)
    assert c.cls == "superrepelling" and c.d == 1 and c.dq == F(1, 2)
    assert classify_fixed_typeI(mk_skew(X, 2 * Y), 0).cls == "indifferent"
    c = classify_fixed_typeI(mk_skew(X, X * Y), 0)
    assert c.cls == "attracting" and c.multiplier_exp == 1
    assert classify_fixed_typeI(mk_skew(X, Y * Y), 0).cls == "superattracting"
    assert classify_fixed_typeI(mk_skew(X, Y / X), 0).cls == "repelling"
    with pytest.raises(NotFixed):
        classify_fixed_typeI(mk_skew(X, Y + 1), 0)


def test_classify_periodic_typeI():
    # -y swaps 1 and -1 but the square is the identity
    c = classify_periodic_typeI(mk_skew(X, -Y), 1, 2)
    assert c.cls == "indifferent"


def test_classify_typeI_at_infinity():
    c = classify_fixed_typeI(mk_skew(X, Y * Y), oo)
    assert c.cls == "superattracting" and c.d == 2


def test_classify_hyperbolic_examples():
    phi = mk_skew(xp(3), Y * Y)
    h = classify_fixed_hyperbolic(phi, cycle_of(phi, GAUSS))
    assert (h.cls, h.numeric, h.multiplier) == ("attracting", "num-attracting", F(2, 3))
    ms = {d.where: d.multiplier for d in h.directions}
    assert ms["generic"] == F(1, 3) and ms["outward"] == F(2, 3)
    phi = mk_skew(xp(2), Y**3)
    h = classify_fixed_hyperbolic(phi, cycle_of(phi, GAUSS))
    assert (h.cls, h.numeric) == ("saddle", "num-repelling")
    assert sorted(d.multiplier for d in h.directions) == [F(1, 2), F(3, 2), F(3, 2)]
    phi = mk_skew(X, Y * Y)
    h = classify_fixed_hyperbolic(phi, cycle_of(phi, GAUSS))
    assert (h.cls, h.multiplier) == ("repelling", 2)


def test_julia_examples():
    for p1, p2, verdict in [(xp(2), Y**3, "julia"), (xp(3), Y * Y, "fatou"), (X, Y * Y, "julia")]:
        phi = mk_skew(p1, p2)
        assert julia_test(phi, cycle_of(phi, GAUSS)).verdict == verdict


def test_julia_bad_direction_not_exceptional():
    # degree one at the Gauss point, but residue 0 is bad and is sent to the
    # fixed direction residue 1 instead of being periodic
    phi = mk_skew(X, Y + X / Y + 1)
    cyc = cycle_of(phi, GAUSS)
    assert cyc.degree_product == 1
    assert julia_test(phi, cyc).verdict == "julia"
    assert julia_test(phi, cyc, bound=5).verdict == "indeterminate"


def test_julia_degree_one_fatou():
    phi = mk_skew(X, 2 * Y)
    assert julia_test(phi, cycle_of(phi, GAUSS)).verdict == "fatou"
    # bad direction 0 is swapped with outward by the order-two map 1/t
    phi = mk_skew(X, (Y + X) / (Y * Y))
    cyc = cycle_of(phi, GAUSS)
    assert cyc.degree_product == 1
    assert julia_test(phi, cyc).verdict == "fatou"


def test_julia_type_iii():
    phi = mk_skew(xp(2), Y * Y)
    cyc = cycle_of(phi, DiskPoint(0, THETA))
    assert cyc.multiplier == 1
    assert julia_test(phi, cyc).verdict == "fatou"
    assert classify_fixed_hyperbolic(phi, cyc).cls == "indifferent"


def test_classify_repelling_typeI():
    assert classify_repelling_typeI(mk_skew(X, 2 * Y), 0).verdict == "fatou-plausible"
    assert classify_repelling_typeI(mk_skew(X, Y / X), 0).verdict == "julia"
    r = classify_repelling_typeI(mk_skew(xp(2), Y), 1)
    assert r.verdict == "fatou-plausible" and r.caveat


def test_contraction_attractor():
    r = contraction_attractor(mk_skew(xp(3), Y * Y))
    assert r.point == GAUSS and r.exact
    assert contraction_attractor(mk_skew(xp(4), Y)).point == GAUSS
    with pytest.raises(NotContracting):
        contraction_attractor(mk_skew(X, Y * Y))
    # from zeta(0, 1/2) the radii shrink by 2/3 each step and never land exactly
    r = contraction_attractor(mk_skew(xp(3), Y * Y), F(1, 100), 40, DiskPoint(0, F(1, 2)))
    assert not r.exact
    assert [p.radius_exp for p in r.prefix[:4]] == [F(1, 2), F(1, 3), F(2, 9), F(4, 27)]


def catalan(n):
    out, c = [], 1
    for k in range(n):
        out.append(c)
        c = c * 2 * (2 * k + 1) // (k + 2)
    return out


def test_attracting_typeI_catalan():
    with working_order(12):
        a = attracting_typeI_from_disk(mk_skew(X, Y * Y + X), Disk(PS(), F(1, 2)))
        assert [c for _, c in a.terms[:10]] == catalan(10)
        assert (apply_typeI(mk_skew(X, Y * Y + X), a) - a).val_lower_bound() >= 12


def test_attracting_typeI_other():
    assert attracting_typeI_from_disk(mk_skew(X, RF.const(X)), Disk(PS(), F(1, 2))) == X
    assert attracting_typeI_from_disk(mk_skew(X, Y * Y), Disk(PS(), 1)) == PS()
    with pytest.raises(HypothesisFailed):
        attracting_typeI_from_disk(mk_skew(xp(2), Y * Y), Disk(PS(), 1))
    with pytest.raises(HypothesisFailed):
        attracting_typeI_from_disk(mk_skew(X, 2 * Y), Disk(PS(), 1))


def test_exceptional_typeI():
    assert {str(p) for p in exceptional_typeI(mk_skew(X, Y**3)).points} == {"typeI(0)", "infty"}
    ex = exceptional_typeI(mk_skew(X, Y * Y - X))
    assert ex.points == [INFTY] and not ex.indeterminate
    ex = exceptional_typeI(mk_skew(X, (Y * Y - X) / (Y - 1)))
    assert ex.points == [] or ex.indeterminate
    assert {str(p) for p in exceptional_typeI(mk_skew(X, 1 / Y**2)).points} == {"typeI(0)", "infty"}


def test_exceptional_places_of_residue_maps():
    assert exceptional_places(ReducedMap.identity()) == []
    assert exceptional_places(ReducedMap.from_coeffs([0, 0, 1], [1])) == [F(0), oo]
    assert exceptional_places(ReducedMap.from_coeffs([-1, 0, 1], [1])) == [oo]
    # Newton's map for t^2 - 2 is conjugate to squaring with exceptional set {+-sqrt2}
    (p,) = exceptional_places(ReducedMap.from_coeffs([2, 0, 1], [0, 2]))
    assert [int(c) for c in p.all_coeffs()] == [1, 0, -2]
    assert exceptional_places(ReducedMap.from_coeffs([1, 0, 1], [0, 0, 1])) == []


# --- properties -----------------------------------------------------------


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([1, 2, 3]), st.integers(1, 4), st.integers(1, 3))
def test_type_iii_cycles_are_indifferent(n, k, m):
    # (x^k, y^k) fixes zeta(0, r) for every r; Type III ones must have D*Q = 1
    phi = mk_skew(xp(k), Y**k)
    z = DiskPoint(0, THETA * F(m, n))
    cyc = cycle_of(phi, z, 4)
    assert cyc.multiplier == 1
    assert julia_test(phi, cyc).verdict == "fatou"


@settings(max_examples=30, deadline=None)
@given(
    st.sampled_from([X, xp(2), xp(3), 2 * X]),
    st.sampled_from([Y * Y, Y**3, 1 / Y, Y * Y + X, X * Y, (Y - X) / (Y + 1), Y**3 / X]),
    st.sampled_from([GAUSS, DiskPoint(0, 1), DiskPoint(0, -1), DiskPoint(ONE, F(1, 2))]),
)
def test_multiplier_is_product_of_local_degrees(p1, p2, z):
    phi = mk_skew(p1, p2)
    rep = detect_cycle(phi, z, 6)
    if isinstance(rep, NotPeriodicWithin):
        return
    prod = 1
    for p in rep.points:
        prod *= local_degree(phi, p)
    assert rep.multiplier == prod * phi.q**rep.period
    for p, nxt in zip(rep.points, rep.points[1:] + rep.points[:1]):
        assert apply_point(phi, p) == nxt


@settings(max_examples=30, deadline=None)
@given(
    st.sampled_from([X, xp(2), xp(3)]),
    st.sampled_from([Y * Y, Y**3, 1 / Y, Y * Y + X, X * Y, Y**3 / X, Y * Y * (Y - 1)]),
)
def test_saddles_are_julia(p1, p2):
    phi = mk_skew(p1, p2)
    rep = detect_cycle(phi, GAUSS, 4)
    if isinstance(rep, NotPeriodicWithin) or rep.preperiod:
        return
    h = classify_fixed_hyperbolic(phi, rep)
    if h.cls == "saddle":
        assert h.numeric == "num-repelling"
        assert julia_test(phi, rep).verdict == "julia"


@settings(max_examples=20, deadline=None)
@given(st.sampled_from([xp(3), xp(4), xp(2)]), st.sampled_from([Y, Y + 1, Y * Y, 2 * Y]))
def test_contraction_residual(p1, p2):
    phi = mk_skew(p1, p2)
    if phi.rdeg * phi.q >= 1:
        return
    r = contraction_attractor(phi, F(1, 10**4), 100)
    if r.exact:
        assert apply_point(phi, r.point) == r.point
