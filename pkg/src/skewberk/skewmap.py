"""Skew products ``phi = (phi1, phi2)`` acting on the Berkovich line.

A skew product acts on a point in two steps: the rational map ``phi2`` in y,
then the substitution ``x -> phi1^{-1}(x)`` in the coefficients.  The second
step is a homeomorphism that scales radius exponents by ``q = 1/val(phi1)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache

from .berktree import (
    BerkPoint,
    Direction,
    DiskPoint,
    TypeI,
    TypeIV,
    direction_from_coordinate,
)
from .errors import InvalidPhi1, PrecisionLoss, TypeIUnsupported
from .ratcalc import (
    RationalFunc,
    YPoly,
    _first_nonzero,
    gauss_norm,
    image_of_disk,
    Disk,
    laurent_centre,
    newton_polygon,
    oo,
    rf_eval,
)
from .residue import ReducedMap, poly_from_coeffs, rational_roots
from .valcore import (
    INF,
    PuiseuxSeries,
    ValExp,
    default_order,
    ps_compose,
    ps_inv,
    ps_pow_rational,
    rational_root,
)

_ZERO = PuiseuxSeries()
_ONE = PuiseuxSeries.const(1)


@dataclass(frozen=True)
class SkewProduct:
    phi1: PuiseuxSeries
    phi2: RationalFunc
    q: Fraction
    phi1_inv: PuiseuxSeries
    inverse_certified_to: object = field(default=INF, compare=False)

    @property
    def rdeg(self) -> int:
        return self.phi2.rdeg

    def is_simple(self) -> bool:
        return self.phi1 == PuiseuxSeries.x()

    def render(self) -> str:
        from .valcore import render_series

        return f"({render_series(self.phi1)}, {self.phi2.render()})"

    def __str__(self) -> str:
        return self.render()


def _invert_phi1(phi1: PuiseuxSeries) -> PuiseuxSeries:
    """Compositional inverse psi with phi1(psi(x)) = x, on the real branch."""
    nu = phi1.valuation()
    q = 1 / nu
    lam = phi1.leading_coeff()
    kappa = rational_root(lam, q)
    xq = PuiseuxSeries.monomial(1 / kappa, q)
    if len(phi1.terms) == 1 and phi1.is_exact():
        return xq
    unit = phi1 * PuiseuxSeries.monomial(1 / lam, -nu)
    w = ps_pow_rational(unit, q)  # phi1^(1/nu) = kappa x w
    target = q + default_order()
    psi = xq
    for _ in range(4 * int(default_order()) + 16):
        nxt = (xq * ps_inv(ps_compose(w, psi))).truncate(target)
        if nxt == psi:
            return psi
        psi = nxt
    raise PrecisionLoss("inverse of phi1 did not stabilise")


def mk_skew(phi1, phi2) -> SkewProduct:
    """Build and validate a skew product; the inverse of phi1 is computed eagerly."""
    phi1 = PuiseuxSeries.coerce(phi1)
    phi2 = RationalFunc.coerce(phi2)
    if phi1.is_zero_mod_order():
        raise InvalidPhi1("phi1 must be nonzero")
    nu = phi1.valuation()
    if nu <= 0:
        raise InvalidPhi1(f"val(phi1) = {nu} must be positive")
    psi = _invert_phi1(phi1)
    check = ps_compose(psi, phi1) - PuiseuxSeries.x()
    certified = check.val_lower_bound()
    if certified <= 1:
        raise PrecisionLoss("inverse of phi1 is not certified")
    return SkewProduct(phi1, phi2, 1 / nu, psi, certified)


def compose_skew(psi: SkewProduct, phi: SkewProduct) -> SkewProduct:
    """``psi o phi`` as maps on points: apply phi first."""
    phi1 = ps_compose(psi.phi1, phi.phi1)
    # psi2's coefficients are read at phi1(x) before feeding in phi2
    p2 = psi.phi2.map_coeffs(lambda c: ps_compose(c, phi.phi1) if not c.is_constant() else c)
    return mk_skew(phi1, p2.compose(phi.phi2))


def _cap(s: PuiseuxSeries) -> PuiseuxSeries:
    """Keep orbits from growing without bound: relative order at most the default."""
    if not s.terms:
        return s
    bound = s.terms[0][0] + default_order()
    if s.is_exact() and s.terms[-1][0] < bound:
        return s
    return s.truncate(bound)


def push_phi1(phi: SkewProduct, c: PuiseuxSeries) -> PuiseuxSeries:
    """The substitution x -> phi1^{-1}(x) applied to a series."""
    if c.is_exact_zero():
        return c
    if c.is_constant():
        return c
    return ps_compose(c, phi.phi1_inv)


def apply_typeI(phi: SkewProduct, a):
    """Image of a classical point (``oo`` allowed)."""
    b = rf_eval(phi.phi2, a)
    if b is oo:
        return oo
    return _cap(push_phi1(phi, b))


# ---------------------------------------------------------------------------
# images of disk points


@dataclass(frozen=True)
class DiskImage:
    """phi2 sends zeta(a, rho) to zeta(c, s); phi then lands on ``target``."""

    c: PuiseuxSeries  # normalised modulo s
    s: ValExp
    target: BerkPoint
    dprime: int | None = None  # Type III: dominant Laurent index of phi2 - c


def _pole_free_representative(phi2: RationalFunc, a: PuiseuxSeries, rho) -> PuiseuxSeries:
    """A point a' in the closed disk whose open residue class has no pole."""
    rho_f = rho.as_fraction()
    den = phi2.den
    if den.degree <= 0:
        return a
    for k in range(2 * den.degree + 2):
        t = (k + 1) // 2 * (1 if k % 2 else -1)
        cand = a + PuiseuxSeries.monomial(t, rho_f) if t else a
        if newton_polygon(den.shift(cand)).count(rho, closed=False) == 0:
            return cand
    raise PrecisionLoss("no pole-free residue class found")


def _image(phi: SkewProduct, z: DiskPoint) -> DiskImage:
    return _image_cached(phi, z, default_order())


@lru_cache(maxsize=4096)
def _image_cached(phi: SkewProduct, z: DiskPoint, _order) -> DiskImage:
    a, rho = z.center, z.radius_exp
    f = phi.phi2
    if f.is_constant():
        raise TypeIUnsupported("constant phi2 maps every point to a classical point")
    if rho.is_rational():
        a1 = _pole_free_representative(f, a, rho)
        c = rf_eval(f, a1)
        s = gauss_norm(f - RationalFunc.const(c), a, rho)
        dprime = None
    else:
        c, s, dprime = laurent_centre(f, a, rho)
    zc = DiskPoint(c, s)
    centre = push_phi1(phi, zc.center)
    target = DiskPoint(centre, s * phi.q)
    return DiskImage(zc.center, s, target, dprime)


def apply_point(phi: SkewProduct, z: BerkPoint) -> BerkPoint:
    if isinstance(z, TypeI):
        return TypeI(apply_typeI(phi, z.value))
    if isinstance(z, DiskPoint):
        c = phi.phi2.constant_value()
        if c is not None:
            return TypeI(push_phi1(phi, c))
        return _image(phi, z).target
    if isinstance(z, TypeIV):
        imgs = [apply_point(phi, p) for p in z.prefix]
        # keep the tail along which the images are strictly nested
        keep = [imgs[-1]]
        for p in reversed(imgs[:-1]):
            head = keep[0]
            if p.radius_exp < head.radius_exp and (head.center - p.center).val_lower_bound() >= p.radius_exp:
                keep.insert(0, p)
            else:
                break
        return TypeIV(tuple(keep))
    raise TypeError(f"not a point: {z!r}")


# ---------------------------------------------------------------------------
# reductions


def _conjugated(f: RationalFunc, a, rho, c, s) -> tuple[YPoly, YPoly]:
    """Numerator and denominator of (f(a + x^rho Y) - c) / x^s."""
    rho_f = ValExp.coerce(rho).as_fraction()
    s_f = ValExp.coerce(s).as_fraction()
    N = f.num.shift(a).scale_y(rho_f)
    D = f.den.shift(a).scale_y(rho_f)
    G = N - D * PuiseuxSeries.coerce(c)
    H = D * PuiseuxSeries.monomial(1, s_f)
    return G, H


def _min_val(polys) -> Fraction:
    m = None
    for p in polys:
        for co in p.coeffs:
            if co.terms:
                v = co.terms[0][0]
                m = v if m is None or v < m else m
    if m is None:
        raise PrecisionLoss("no certified coefficient to reduce")
    return m


def _residues(p: YPoly, m: Fraction) -> list[Fraction]:
    return [co.coeff(m) for co in p.coeffs]


def reduce_pair(G: YPoly, H: YPoly) -> ReducedMap:
    """Coefficientwise reduction of [G : H] after joint normalisation."""
    m = _min_val([G, H])
    return ReducedMap(poly_from_coeffs(_residues(G, m)), poly_from_coeffs(_residues(H, m)))


def _own_reduction(p: YPoly):
    m = _min_val([p])
    return poly_from_coeffs(_residues(p, m))


def _require_type_ii(z) -> DiskPoint:
    if not isinstance(z, DiskPoint) or z.kind != "II":
        raise TypeError("reduction needs a Type II point")
    return z


def reduction_at(phi: SkewProduct, z: DiskPoint, target: DiskPoint | None = None) -> ReducedMap:
    """Reduction of phi2 conjugated by y = a + x^rho Y on the domain side and
    by ``target``'s coordinates on the range side (default: z's own)."""
    z = _require_type_ii(z)
    tgt = target if target is not None else z
    G, H = _conjugated(phi.phi2, z.center, z.radius_exp, tgt.center, tgt.radius_exp)
    return reduce_pair(G, H)


class TangentData:
    """Residue-coordinate form of the tangent map at a Type II point.

    ``phi2_reduced`` is phi2 alone in image coordinates; ``reduced`` adds the
    phi1 part, which may need a root the residue field lacks.
    """

    def __init__(self, phi2_reduced: ReducedMap, image: DiskImage, phi: SkewProduct):
        self.phi2_reduced = phi2_reduced
        self.image = image
        self._phi = phi

    @cached_property
    def reduced(self) -> ReducedMap:
        s = self.image.s.as_fraction()
        phi = self._phi
        mu = phi.phi1_inv.leading_coeff()
        scale = rational_root(mu, s) if s else Fraction(1)
        pushed = push_phi1(phi, self.image.c)
        kappa = pushed.coeff(s * phi.q) if not pushed.is_exact_zero() else Fraction(0)
        if scale == 1 and kappa == 0:
            return self.phi2_reduced
        return self.phi2_reduced.affine(scale, kappa)


def tangent_data(phi: SkewProduct, z: DiskPoint) -> TangentData:
    return _tangent_cached(phi, _require_type_ii(z), default_order())


@lru_cache(maxsize=4096)
def _tangent_cached(phi: SkewProduct, z: DiskPoint, _order) -> TangentData:
    img = _image(phi, z)
    G, H = _conjugated(phi.phi2, z.center, z.radius_exp, img.c, img.s)
    return TangentData(reduce_pair(G, H), img, phi)


def _coordinate(v: Direction):
    return oo if v.is_outward() else v.residue_coordinate()


def tangent_map(phi: SkewProduct, z: DiskPoint, v: Direction) -> Direction:
    """phi_#(v) as a direction at phi_*(z)."""
    if z.kind == "III":
        img = _image(phi, z)
        T = img.target
        inner = not v.is_outward()
        if img.dprime < 0:
            inner = not inner
        return Direction.residue(T, T.center) if inner else Direction.outward(T)
    td = tangent_data(phi, z)
    T = td.image.target
    u = td.reduced(_coordinate(v))
    if u is oo:
        return Direction.outward(T)
    return direction_from_coordinate(T, u)


def directional_degree(phi: SkewProduct, z: DiskPoint, v: Direction) -> int:
    if z.kind == "III":
        return abs(_image(phi, z).dprime)
    td = tangent_data(phi, z)
    return td.phi2_reduced.multiplicity(_coordinate(v))


def _typeI_degree(f: RationalFunc, a) -> int:
    if a is oo:
        return _typeI_degree(f.inverted(), _ZERO)
    g = f.num.shift(a).coeffs
    h = f.den.shift(a).coeffs
    kh = _first_nonzero(h)
    if kh == 0:
        c = g[0] / h[0] if g else _ZERO
        diff = [gk - c * hk for gk, hk in zip(_pad(g, len(h)), _pad(h, len(g)))]
        k = _first_nonzero(diff[1:])
        if k is None:
            raise ValueError("constant function")
        return k + 1
    kg = _first_nonzero(g)
    if kg is None:
        raise ValueError("zero function")
    if kg != kh:
        return abs(kg - kh)
    c = g[kg] / h[kh]
    diff = [gk - c * hk for gk, hk in zip(_pad(g, len(h)), _pad(h, len(g)))]
    k = _first_nonzero(diff[kh + 1 :])
    if k is None:
        raise ValueError("constant function")
    return k + 1


def _pad(cs, n):
    cs = list(cs)
    return cs + [_ZERO] * (n - len(cs))


def local_degree(phi: SkewProduct, z: BerkPoint) -> int:
    if isinstance(z, TypeI):
        return _typeI_degree(phi.phi2, z.value)
    if isinstance(z, DiskPoint):
        if z.kind == "III":
            return abs(_image(phi, z).dprime)
        return tangent_data(phi, z).phi2_reduced.degree
    if isinstance(z, TypeIV):
        for p in reversed(z.prefix):
            try:
                _, deg = image_of_disk(phi.phi2, Disk(p.center, p.radius_exp, closed=True))
            except Exception:
                continue
            if deg == 1:
                return 1
        raise PrecisionLoss("no prefix disk certifies injectivity")
    raise TypeError(f"not a point: {z!r}")


# ---------------------------------------------------------------------------
# bad directions and good reduction


@dataclass(frozen=True)
class BadDirections:
    directions: tuple
    unresolved: tuple = ()  # irreducible residue polynomials of degree > 1

    @property
    def indeterminate(self) -> bool:
        return bool(self.unresolved)


def bad_directions(phi: SkewProduct, z: DiskPoint) -> BadDirections:
    """Directions at a Type II point whose disks hold a zero and a pole of the
    conjugated phi2."""
    z = _require_type_ii(z)
    img = _image(phi, z)
    G, H = _conjugated(phi.phi2, z.center, z.radius_exp, img.c, img.s)
    Gb, Hb = _own_reduction(G), _own_reduction(H)
    common = Gb.gcd(Hb)
    roots, rest = rational_roots(common)
    dirs = [direction_from_coordinate(z, r) for r, _ in roots]
    zinf = (G.degree - Gb.degree()) + max(0, H.degree - G.degree)
    pinf = (H.degree - Hb.degree()) + max(0, G.degree - H.degree)
    if zinf > 0 and pinf > 0:
        dirs.append(Direction.outward(z))
    return BadDirections(tuple(dirs), tuple(str(f.as_expr()) for f, _ in rest))


def good_reduction_test(phi: SkewProduct) -> bool:
    """True iff the reduction at the Gauss point has full degree rdeg."""
    from .berktree import GAUSS

    r = reduction_at(phi, GAUSS)
    return not r.is_constant() and r.degree == phi.rdeg
