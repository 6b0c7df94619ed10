"""Orbits, cycles and the classification of periodic points.

The Julia/Fatou test for hyperbolic cycles follows the periodic-point
criterion: a cycle is Julia when it is numerically repelling, and a
non-repelling Type II cycle is Fatou exactly when some direction is
exceptional and every bad direction is.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from sympy import Poly, QQ, resultant, symbols

from .berktree import (
    GAUSS,
    BerkPoint,
    Direction,
    DiskPoint,
    TypeI,
    TypeIV,
    hyp_dist,
    leq,
)
from .errors import (
    HypothesisFailed,
    Indeterminate,
    NotContracting,
    NotFixed,
    PrecisionLoss,
    SkewBerkError,
)
from .ratcalc import Disk, RationalFunc, image_of_disk, newton_puiseux_roots, oo, taylor_expand
from .residue import ReducedMap, rational_roots, t as T_SYM, to_sym
from .skewmap import (
    SkewProduct,
    _typeI_degree,
    apply_point,
    apply_typeI,
    bad_directions,
    compose_skew,
    local_degree,
    push_phi1,
    tangent_data,
)
from .valcore import INF, PuiseuxSeries, ValExp, default_order, fmt_q

DEFAULT_BOUND = 12
MOEBIUS_PERIOD_BOUND = 12  # lcm of the finite orders 2, 3, 4, 6 over Q


# ---------------------------------------------------------------------------
# orbits and cycles


@dataclass
class Orbit:
    points: list
    stopped: str | None = None  # reason when the orbit ended early


def orbit(phi: SkewProduct, z: BerkPoint, n: int) -> Orbit:
    if n < 0:
        raise ValueError("number of steps must be non-negative")
    pts = [z]
    for _ in range(n):
        try:
            pts.append(apply_point(phi, pts[-1]))
        except SkewBerkError as exc:
            return Orbit(pts, f"{type(exc).__name__}: {exc}")
    return Orbit(pts)


def same_point(z: BerkPoint, w: BerkPoint) -> bool:
    """Point equality; classical points compare as far as both are known."""
    if isinstance(z, TypeI) and isinstance(w, TypeI):
        if z.is_infinity() or w.is_infinity():
            return z.is_infinity() and w.is_infinity()
        return z.value.equal_to_order(w.value)
    if isinstance(z, TypeIV) or isinstance(w, TypeIV):
        raise Indeterminate("Type IV cycle equality is only semi-decidable")
    return z == w


@dataclass
class CycleReport:
    points: list
    period: int
    preperiod: int
    degrees: list
    q: Fraction

    @property
    def degree_product(self) -> int:
        out = 1
        for d in self.degrees:
            out *= d
        return out

    @property
    def Q(self) -> Fraction:
        return self.q**self.period

    @property
    def multiplier(self) -> Fraction:
        return self.degree_product * self.Q

    @property
    def kind(self) -> str:
        return self.points[0].kind


@dataclass
class NotPeriodicWithin:
    bound: int
    stopped: str | None = None


def detect_cycle(phi: SkewProduct, z: BerkPoint, max_n: int):
    """First repeat along the orbit of z, as a CycleReport."""
    if max_n < 1:
        raise ValueError("max_n must be at least 1")
    orb = orbit(phi, z, max_n)
    pts = orb.points
    for j in range(1, len(pts)):
        for i in range(j):
            if same_point(pts[i], pts[j]):
                cyc = pts[i:j]
                degs = [local_degree(phi, p) for p in cyc]
                return CycleReport(cyc, j - i, i, degs, phi.q)
    if orb.stopped:
        raise Indeterminate(f"orbit stopped before a repeat: {orb.stopped}")
    return NotPeriodicWithin(max_n)


def cycle_of(phi: SkewProduct, z: BerkPoint, max_n: int = 64) -> CycleReport:
    rep = detect_cycle(phi, z, max_n)
    if isinstance(rep, NotPeriodicWithin):
        raise NotFixed(f"point is not periodic within {max_n} steps")
    if rep.preperiod:
        raise NotFixed("point is strictly preperiodic")
    return rep


# ---------------------------------------------------------------------------
# classical fixed points


@dataclass
class TypeIClass:
    cls: str
    d: int
    dq: Fraction
    b_d: PuiseuxSeries | None
    multiplier_exp: Fraction | None  # q * val(b_d), when dq = 1

    def numeric(self) -> str:
        return "dq>1" if self.dq > 1 else ("dq<1" if self.dq < 1 else "dq=1")


def _leading_taylor(f: RationalFunc, a) -> tuple[int, PuiseuxSeries]:
    if a is oo:
        return _leading_taylor(f.inverted(), PuiseuxSeries())
    from .ratcalc import rf_eval

    if rf_eval(f, a) is oo:
        d = _typeI_degree(f, a)
        g = RationalFunc(f.den, f.num)
        return d, taylor_expand(g, a, d + 1)[d]
    d = _typeI_degree(f, a)
    return d, taylor_expand(f, a, d + 1)[d]


def classify_fixed_typeI(phi: SkewProduct, a) -> TypeIClass:
    img = apply_typeI(phi, a)
    if not same_point(TypeI(img), TypeI(a)):
        raise NotFixed("point is not fixed")
    d, bd = _leading_taylor(phi.phi2, a)
    dq = d * phi.q
    if dq > 1:
        return TypeIClass("superattracting", d, dq, bd, None)
    if dq < 1:
        return TypeIClass("superrepelling", d, dq, bd, None)
    v = bd.valuation()
    mexp = phi.q * v
    cls = "attracting" if v > 0 else ("repelling" if v < 0 else "indifferent")
    return TypeIClass(cls, d, dq, bd, mexp)


def classify_periodic_typeI(phi: SkewProduct, a, period: int) -> TypeIClass:
    psi = phi
    for _ in range(period - 1):
        psi = compose_skew(phi, psi)
    return classify_fixed_typeI(psi, a)


@dataclass
class TypeIJulia:
    verdict: str  # "julia" or "fatou-plausible"
    cls: TypeIClass
    caveat: str | None = None


def classify_repelling_typeI(phi: SkewProduct, a) -> TypeIJulia:
    c = classify_fixed_typeI(phi, a)
    if c.cls == "repelling":
        return TypeIJulia("julia", c)
    if c.cls == "superrepelling":
        return TypeIJulia(
            "fatou-plausible", c, "superrepelling points can lie in the Fatou set"
        )
    return TypeIJulia("fatou-plausible", c)


# ---------------------------------------------------------------------------
# residue-field dynamics along a Type II cycle


def _cycle_maps(phi: SkewProduct, cyc: CycleReport) -> list[ReducedMap]:
    return [tangent_data(phi, z).reduced for z in cyc.points]


def _compose_all(maps: list[ReducedMap]) -> ReducedMap:
    out = ReducedMap.identity()
    for r in maps:
        out = r.compose(out)
    return out


# A "place" of P^1 over the algebraic closure of Q, up to Galois conjugacy:
# a Fraction, oo, or a monic irreducible sympy Poly of degree >= 2.


def _place_image(R: ReducedMap, p):
    if p is oo or isinstance(p, Fraction):
        return R(p)
    # image of the roots of p: the resultant in t of p(t) and y*den(t) - num(t)
    y = symbols("y_img")
    expr = resultant(p.as_expr(), y * R.den.as_expr() - R.num.as_expr(), T_SYM)
    img = Poly(expr, y, domain=QQ)
    if img.degree() < p.degree():
        return None  # some conjugate goes to infinity
    _, facs = img.factor_list()
    if len(facs) != 1:
        return None
    f = facs[0][0].monic()
    if f.degree() == 1:
        c0 = -f.all_coeffs()[1]
        return Fraction(int(c0.p), int(c0.q))
    return Poly(f.as_expr().subs(y, T_SYM), T_SYM, domain=QQ).monic()


def _place_key(p):
    if p is oo:
        return ("oo",)
    if isinstance(p, Fraction):
        return ("q", p)
    return ("p", tuple(p.all_coeffs()))


def _place_str(p) -> str:
    if p is oo:
        return "outward"
    if isinstance(p, Fraction):
        return f"residue-coordinate {fmt_q(p)}"
    return f"roots of {p.as_expr()}"


def ramification_places(R: ReducedMap) -> list[tuple[object, int]]:
    """(place, e) for every critical place of R."""
    facs, e_inf = R.ramification()
    out = []
    for f, k in facs:
        if f.degree() == 1:
            c0 = -f.all_coeffs()[1]
            out.append((Fraction(int(c0.p), int(c0.q)), k + 1))
        else:
            out.append((f, k + 1))
    if e_inf > 1:
        out.append((oo, e_inf))
    return out


def exceptional_places(R: ReducedMap) -> list:
    """Periodic totally ramified places of R (empty for degree 1)."""
    D = R.degree
    if D < 2:
        return []
    S = [p for p, e in ramification_places(R) if e == D]
    keys = {_place_key(p) for p in S}
    out = []
    for p in S:
        cur, ok = p, False
        for _ in range(len(S)):
            cur = _place_image(R, cur)
            if cur is None or _place_key(cur) not in keys:
                break
            if _place_key(cur) == _place_key(p):
                ok = True
                break
        if ok:
            out.append(p)
    return out


def _bad_places(phi: SkewProduct, z: DiskPoint) -> list:
    bd = bad_directions(phi, z)
    places = []
    for v in bd.directions:
        places.append(oo if v.is_outward() else v.residue_coordinate())
    for fac in bd.unresolved:
        places.append(Poly(fac, T_SYM, domain=QQ).monic())
    return places


# ---------------------------------------------------------------------------
# hyperbolic classification


@dataclass
class DirectionMultiplier:
    where: str
    degree: int
    multiplier: Fraction


@dataclass
class HyperbolicClass:
    cls: str  # indifferent / attracting / repelling / saddle
    numeric: str  # num-attracting / num-indifferent / num-repelling
    multiplier: Fraction
    directions: list = field(default_factory=list)


def _numeric(m: Fraction) -> str:
    return "num-repelling" if m > 1 else ("num-attracting" if m < 1 else "num-indifferent")


def _classify_multipliers(ms: list[Fraction]) -> str:
    lo = any(m < 1 for m in ms)
    hi = any(m > 1 for m in ms)
    if lo and hi:
        return "saddle"
    if lo:
        return "attracting"
    if hi:
        return "repelling"
    return "indifferent"


def classify_fixed_hyperbolic(phi: SkewProduct, cyc: CycleReport) -> HyperbolicClass:
    z0 = cyc.points[0]
    Q = cyc.Q
    D = cyc.degree_product
    if z0.kind == "III":
        dirs = [
            DirectionMultiplier("inner", D, D * Q),
            DirectionMultiplier("outward", D, D * Q),
        ]
    elif z0.kind == "II":
        R = _compose_all(_cycle_maps(phi, cyc))
        dirs = [DirectionMultiplier("generic", 1, Q)]
        for p, e in ramification_places(R):
            dirs.append(DirectionMultiplier(_place_str(p), e, e * Q))
    else:
        raise TypeError("hyperbolic classification needs a Type II or III cycle")
    cls = _classify_multipliers([d.multiplier for d in dirs])
    return HyperbolicClass(cls, _numeric(D * Q), D * Q, dirs)


# ---------------------------------------------------------------------------
# the Julia/Fatou test


@dataclass
class JuliaVerdict:
    verdict: str  # "julia", "fatou" or "indeterminate"
    multiplier: Fraction
    reason: str


def _periodic_within(R: ReducedMap, p, bound: int) -> bool | None:
    cur = p
    for _ in range(bound):
        cur = _place_image(R, cur)
        if cur is None:
            return None
        if _place_key(cur) == _place_key(p):
            return True
    return None


def julia_test(phi: SkewProduct, cyc: CycleReport, bound: int = DEFAULT_BOUND) -> JuliaVerdict:
    m = cyc.multiplier
    kind = cyc.kind
    if kind == "I":
        raise TypeError("use classify_repelling_typeI for classical cycles")
    if m > 1:
        return JuliaVerdict("julia", m, "numerically repelling")
    if kind in ("III", "IV"):
        return JuliaVerdict("fatou", m, f"Type {kind} cycle, numerically non-repelling")
    maps = _cycle_maps(phi, cyc)
    n = len(maps)
    R = _compose_all(maps)
    bad = [_bad_places(phi, z) for z in cyc.points]
    if R.degree >= 2:
        E = exceptional_places(R)
        if not E:
            return JuliaVerdict("julia", m, "no exceptional direction")
        # exceptional places seen at each point of the cycle
        Ei = [E]
        for i in range(n - 1):
            Ei.append([_place_image(maps[i], p) for p in Ei[-1]])
        for i, places in enumerate(bad):
            keys = {_place_key(p) for p in Ei[i] if p is not None}
            for p in places:
                if _place_key(p) not in keys:
                    return JuliaVerdict("julia", m, f"bad direction ({_place_str(p)}) is not exceptional")
        return JuliaVerdict("fatou", m, "exceptional direction exists and every bad direction is exceptional")
    # degree one: every periodic direction is exceptional, and a fixed
    # direction always exists over the algebraic closure.  A Moebius map over
    # Q with a point of exact period n >= 2 has finite order n in {2, 3, 4, 6},
    # so a search up to 12 steps decides periodicity.
    for i, places in enumerate(bad):
        rot = _compose_all(maps[i:] + maps[:i])
        for p in places:
            if _periodic_within(rot, p, bound):
                continue
            if bound >= MOEBIUS_PERIOD_BOUND:
                return JuliaVerdict("julia", m, f"bad direction ({_place_str(p)}) is not periodic")
            return JuliaVerdict(
                "indeterminate", m, f"bad direction ({_place_str(p)}) not periodic within {bound}"
            )
    return JuliaVerdict("fatou", m, "degree one and every bad direction is periodic")


# ---------------------------------------------------------------------------
# attractors


@dataclass
class AttractorResult:
    point: BerkPoint
    steps: int
    exact: bool
    prefix: list = field(default_factory=list)


def contraction_attractor(
    phi: SkewProduct, tol_exp=Fraction(1, 10**6), max_n: int = 200, start: BerkPoint = GAUSS
) -> AttractorResult:
    """Attracting fixed point of a hyperbolic contraction (rdeg * q < 1)."""
    if phi.rdeg * phi.q >= 1:
        raise NotContracting(f"rdeg*q = {fmt_q(phi.rdeg * phi.q)} is not below 1")
    tol = ValExp.coerce(tol_exp)
    pts = [start]
    for k in range(max_n):
        nxt = apply_point(phi, pts[-1])
        if nxt == pts[-1]:
            return AttractorResult(nxt, k, True, pts)
        pts.append(nxt)
        if hyp_dist(pts[-2], nxt) < tol:
            break
    return AttractorResult(pts[-1], len(pts) - 1, False, pts)


def attracting_typeI_from_disk(phi: SkewProduct, D: Disk, max_iter: int = 1000) -> PuiseuxSeries:
    """The attracting classical fixed point inside a disk mapped strictly into itself."""
    if phi.q < 1:
        raise HypothesisFailed("needs q >= 1")
    a, rho = D.center, D.radius_exp
    f = phi.phi2
    const = f.constant_value()
    if const is not None:
        c = push_phi1(phi, const)
        inside = (c - a).val_lower_bound() >= rho
        if not inside:
            raise HypothesisFailed("image point lies outside the disk")
        return c
    img, _ = image_of_disk(f, D)
    c = push_phi1(phi, img.center)
    s = img.radius_exp * phi.q
    contained = (c - a).val_lower_bound() >= rho and (s > rho if D.closed else s >= rho)
    if not contained:
        raise HypothesisFailed("phi_*(D) is not strictly inside D")
    cur = a
    for _ in range(max_iter):
        nxt = apply_typeI(phi, cur)
        if nxt is oo:
            raise HypothesisFailed("orbit reached infinity")
        if (nxt - cur).is_zero_mod_order() and not nxt.is_exact_zero() or nxt == cur:
            return nxt
        cur = nxt
    raise PrecisionLoss("fixed point iteration did not stabilise")


# ---------------------------------------------------------------------------
# exceptional classical points


@dataclass
class ExceptionalSet:
    points: list
    indeterminate: bool = False
    note: str = ""


def exceptional_typeI(phi: SkewProduct, order=None) -> ExceptionalSet:
    """Classical points with finite grand orbit."""
    d = phi.rdeg
    if d < 2:
        raise ValueError("needs rdeg >= 2")
    f = phi.phi2
    order = Fraction(order if order is not None else default_order())
    W = f.num.derivative() * f.den - f.num * f.den.derivative()
    cands = []
    notes = []
    indeterminate = False
    if not W.is_zero() and W.degree >= 1:
        roots = newton_puiseux_roots(W, order)
        for r, mult in roots.roots:
            if mult < d - 1:
                continue
            if mult == 1:
                # a simple root of W is a critical point of index exactly 2 = d
                cands.append(r)
                continue
            try:
                if _typeI_degree(f, r) == d:
                    cands.append(r)
            except SkewBerkError:
                indeterminate = True
        if roots.unresolved:
            big = [u for u in roots.unresolved if u["multiplicity"] >= d - 1]
            if big:
                indeterminate = True
                notes.append("critical points outside Q-coefficient series")
    if _typeI_degree(f, oo) == d:
        cands.append(oo)

    def same(u, v):
        if u is oo or v is oo:
            return u is v
        return u.equal_to_order(v)

    found = []
    for c in cands:
        cur = c
        for _ in range(len(cands)):
            cur = apply_typeI(phi, cur)
            if not any(same(cur, o) for o in cands):
                break
            if same(cur, c):
                found.append(c)
                break
    return ExceptionalSet([TypeI(c) for c in found], indeterminate, "; ".join(notes))
