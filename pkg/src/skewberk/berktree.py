"""Points of the Berkovich projective line and the tree structure on them.

Radii are valuation exponents: ``zeta(a, rho)`` is the closed disk
``{b : val(b - a) >= rho}``, so a larger exponent is a smaller disk.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import PrecisionLoss, SamePoint, TypeIUnsupported
from .ratcalc import RationalFunc, oo
from .valcore import INF, PuiseuxSeries, ValExp, render_series

_ZERO = PuiseuxSeries()


def val_at_least(d: PuiseuxSeries, rho) -> bool:
    """Decide ``val(d) >= rho`` from the certified part of d."""
    if d.terms:
        return d.terms[0][0] >= rho
    if d.order >= rho:
        return True
    raise PrecisionLoss(f"difference known only to x^{d.order}, cannot compare with {rho}")


def val_greater(d: PuiseuxSeries, rho) -> bool:
    if d.terms:
        return d.terms[0][0] > rho
    if d.order > rho:
        return True
    raise PrecisionLoss(f"difference known only to x^{d.order}, cannot compare with {rho}")


def _val_capped(d: PuiseuxSeries, cap):
    """min(val(d), cap), certified."""
    if d.terms:
        v = ValExp.coerce(d.terms[0][0])
        return v if cap == INF or v < cap else cap
    if cap != INF and d.order >= cap:
        return cap
    if d.is_exact_zero():
        return cap
    raise PrecisionLoss("difference of centres not certified")


# ---------------------------------------------------------------------------
# points


class BerkPoint:
    """Base class; concrete points are TypeI, DiskPoint and TypeIV."""

    kind = "?"

    def render(self) -> str:
        raise NotImplementedError

    def __str__(self) -> str:
        return self.render()


@dataclass(frozen=True, eq=True)
class TypeI(BerkPoint):
    value: object  # PuiseuxSeries or oo

    def __post_init__(self):
        if self.value is not oo:
            object.__setattr__(self, "value", PuiseuxSeries.coerce(self.value))

    @property
    def kind(self) -> str:
        return "I"

    def is_infinity(self) -> bool:
        return self.value is oo

    def render(self) -> str:
        return "infty" if self.value is oo else f"typeI({render_series(self.value)})"

    def to_json(self) -> dict:
        return {"type": "I", "value": "infty" if self.value is oo else render_series(self.value)}


INFTY = TypeI(oo)


class DiskPoint(BerkPoint):
    """zeta(a, rho); Type II for rational rho, Type III otherwise."""

    __slots__ = ("center", "radius_exp")

    def __init__(self, center, radius_exp):
        rho = ValExp.coerce(radius_exp)
        c = PuiseuxSeries.coerce(center)
        # centres are only meaningful modulo the radius
        object.__setattr__(self, "center", c.head(rho))
        object.__setattr__(self, "radius_exp", rho)

    def __setattr__(self, name, value):
        raise AttributeError("DiskPoint is immutable")

    @property
    def kind(self) -> str:
        return "II" if self.radius_exp.is_rational() else "III"

    @property
    def rho(self) -> ValExp:
        return self.radius_exp

    def __eq__(self, other):
        return (
            isinstance(other, DiskPoint)
            and self.radius_exp == other.radius_exp
            and self.center == other.center
        )

    def __hash__(self):
        return hash((self.center, self.radius_exp))

    def __repr__(self) -> str:
        return f"DiskPoint({self.render()})"

    def render(self) -> str:
        return f"zeta({render_series(self.center)}, {self.radius_exp})"

    def to_json(self) -> dict:
        return {"type": self.kind, "center": render_series(self.center), "radius_exp": str(self.radius_exp)}


GAUSS = DiskPoint(_ZERO, 0)


@dataclass(frozen=True)
class TypeIV(BerkPoint):
    """Finite prefix of a strictly nested sequence of disks with empty intersection.

    ``limit_exp`` is the limit of the radius exponents when it is known.
    """

    prefix: tuple
    limit_exp: object = None

    def __post_init__(self):
        pts = tuple(
            p if isinstance(p, DiskPoint) else DiskPoint(*p) for p in self.prefix
        )
        if not pts:
            raise ValueError("empty Type IV prefix")
        for big, small in zip(pts, pts[1:]):
            if not (small.radius_exp > big.radius_exp and val_at_least(small.center - big.center, big.radius_exp)):
                raise ValueError("Type IV prefix disks must be strictly nested")
        object.__setattr__(self, "prefix", pts)
        if self.limit_exp is not None:
            object.__setattr__(self, "limit_exp", ValExp.coerce(self.limit_exp))

    @property
    def kind(self) -> str:
        return "IV"

    @property
    def last(self) -> DiskPoint:
        return self.prefix[-1]

    def render(self) -> str:
        inner = ", ".join(p.render() for p in self.prefix)
        return f"typeIV([{inner}])"

    def to_json(self) -> dict:
        return {"type": "IV", "prefix": [p.to_json() for p in self.prefix]}


def typeiv_compare(a: TypeIV, b: TypeIV) -> str:
    """'distinct', 'equal so far' or 'unknown', decided from the prefixes."""
    unknown = False
    checks = [(p, b) for p in a.prefix] + [(p, a) for p in b.prefix]
    for disk, other in checks:
        try:
            if not _disk_contains_point(disk, other):
                return "distinct"
        except PrecisionLoss:
            unknown = True
    return "unknown" if unknown else "equal so far"


def _disk_contains_point(d: DiskPoint, z: TypeIV) -> bool:
    """Is the Type IV point below d?  Decided from the prefix when possible."""
    for p in z.prefix:
        if p.radius_exp >= d.radius_exp:
            return val_at_least(p.center - d.center, d.radius_exp)
    last = z.last
    if not val_at_least(last.center - d.center, last.radius_exp):
        return False
    raise PrecisionLoss("Type IV prefix too short to decide containment")


# ---------------------------------------------------------------------------
# order, join, metric


def _as_disk(z: BerkPoint) -> tuple[PuiseuxSeries, object]:
    if isinstance(z, TypeI):
        return z.value, INF
    if isinstance(z, DiskPoint):
        return z.center, z.radius_exp
    raise TypeError("expected a Type I or disk point")


def leq(z: BerkPoint, w: BerkPoint) -> bool:
    """z below w: every seminorm bound of w dominates z, i.e. z lies in w's disk."""
    if isinstance(w, TypeI) and w.is_infinity():
        return True
    if isinstance(z, TypeI) and z.is_infinity():
        return False
    if isinstance(w, TypeIV):
        if isinstance(z, TypeIV):
            verdict = typeiv_compare(z, w)
            if verdict == "distinct":
                return False
            raise PrecisionLoss("Type IV equality is only semi-decidable from prefixes")
        return False
    if isinstance(w, TypeI):
        if isinstance(z, TypeI):
            d = z.value - w.value
            if d.is_exact_zero():
                return True
            if d.terms:
                return False
            raise PrecisionLoss("classical points agree to the known order")
        return False
    # w is a disk point
    if isinstance(z, TypeIV):
        return _disk_contains_point(w, z)
    a, rho = _as_disk(z)
    if rho != INF and rho < w.radius_exp:
        return False
    return val_at_least(a - w.center, w.radius_exp)


def points_equal(z: BerkPoint, w: BerkPoint) -> bool:
    if isinstance(z, DiskPoint) and isinstance(w, DiskPoint):
        return z == w
    return leq(z, w) and leq(w, z)


def join(z: BerkPoint, w: BerkPoint) -> BerkPoint:
    """Least upper bound of two points."""
    for p in (z, w):
        if isinstance(p, TypeI) and p.is_infinity():
            return INFTY
    if isinstance(z, TypeIV):
        z, w = w, z
    if isinstance(w, TypeIV):
        if leq(z, w.last):
            raise PrecisionLoss("Type IV prefix too short to locate the join")
        return join(z, w.last)
    a, rho = _as_disk(z)
    b, sigma = _as_disk(w)
    cap = rho if sigma == INF else (sigma if rho == INF else min(rho, sigma))
    r = _val_capped(a - b, cap)
    if r == INF:
        return z  # equal classical points
    return DiskPoint(a, r)


def diam(z: BerkPoint):
    """Radius exponent (valuation of the diameter); INF for classical points."""
    if isinstance(z, TypeI):
        if z.is_infinity():
            raise TypeIUnsupported("the point at infinity has no diameter in this chart")
        return INF
    if isinstance(z, DiskPoint):
        return z.radius_exp
    if z.limit_exp is not None:
        return z.limit_exp
    err = PrecisionLoss(f"Type IV diameter exponent is only known to exceed {z.last.radius_exp}")
    err.bound = z.last.radius_exp
    raise err


def hyp_dist(z: BerkPoint, w: BerkPoint) -> ValExp:
    """Hyperbolic distance in units of log(1/eps)."""
    if isinstance(z, TypeI) or isinstance(w, TypeI):
        raise TypeIUnsupported("hyperbolic distance is infinite at classical points")
    j = join(z, w)
    return diam(z) + diam(w) - diam(j) * 2


# ---------------------------------------------------------------------------
# directions


@dataclass(frozen=True)
class Direction:
    """Tangent direction at a disk point: a residue class or the outward one."""

    at: DiskPoint
    kind: str  # "residue" or "outward"
    b: PuiseuxSeries | None = None

    def __post_init__(self):
        if self.kind == "residue":
            b = PuiseuxSeries.coerce(self.b)
            rho = self.at.radius_exp
            if not val_at_least(b - self.at.center, rho):
                raise ValueError("residue representative lies outside the disk")
            # classes of D(b, rho) inside the closed disk are fixed by terms up to x^rho
            object.__setattr__(self, "b", b.head_le(rho) if rho.is_rational() else self.at.center)
        elif self.kind == "outward":
            object.__setattr__(self, "b", None)
        else:
            raise ValueError(f"unknown direction kind {self.kind!r}")

    @classmethod
    def residue(cls, at: DiskPoint, b) -> "Direction":
        return cls(at, "residue", b)

    @classmethod
    def outward(cls, at: DiskPoint) -> "Direction":
        return cls(at, "outward")

    def is_outward(self) -> bool:
        return self.kind == "outward"

    def residue_coordinate(self) -> Fraction:
        """The coefficient t of x^rho in b - a, identifying the class with t in Q."""
        if self.is_outward():
            raise ValueError("outward direction has no residue coordinate")
        rho = self.at.radius_exp
        if not rho.is_rational():
            return Fraction(0)
        return (self.b - self.at.center).coeff(rho.as_fraction())

    def render(self) -> str:
        if self.is_outward():
            return "outward"
        return f"residue({render_series(self.b)})"

    def __str__(self) -> str:
        return self.render()


def direction_from_coordinate(at: DiskPoint, t) -> Direction:
    return Direction.residue(at, at.center + PuiseuxSeries.monomial(t, at.radius_exp.as_fraction()))


def direction_at(z: DiskPoint, xi: BerkPoint) -> Direction:
    """The direction at z containing xi."""
    if not isinstance(z, DiskPoint):
        raise TypeError("directions live at Type II and III points")
    if points_equal(z, xi):
        raise SamePoint("a point has no direction towards itself")
    if not leq(xi, z):
        return Direction.outward(z)
    if isinstance(xi, TypeIV):
        for p in xi.prefix:
            if p.radius_exp > z.radius_exp:
                return Direction.residue(z, p.center)
        raise PrecisionLoss("Type IV prefix does not yet leave the disk point")
    a, _ = _as_disk(xi)
    return Direction.residue(z, a)


def directions_type_iii(z: DiskPoint) -> list[Direction]:
    if z.kind != "III":
        raise ValueError("only Type III points have exactly two directions")
    return [Direction.residue(z, z.center), Direction.outward(z)]


def point_in_direction(v: Direction, step) -> DiskPoint:
    """A disk point at hyperbolic distance ``step`` from v.at inside v."""
    z = v.at
    step = ValExp.coerce(step)
    if v.is_outward():
        # move towards infinity through the centre's chain of disks
        return DiskPoint(z.center, z.radius_exp - step)
    return DiskPoint(v.b, z.radius_exp + step)


# ---------------------------------------------------------------------------
# the involution y -> 1/y


def invert_point(z: BerkPoint) -> BerkPoint:
    if isinstance(z, TypeI):
        if z.is_infinity():
            return TypeI(_ZERO)
        if z.value.is_exact_zero():
            return INFTY
        return TypeI(1 / z.value)
    if isinstance(z, DiskPoint):
        a, rho = z.center, z.radius_exp
        if val_at_least(a, rho):
            return DiskPoint(_ZERO, -rho)
        va = a.valuation()
        return DiskPoint(1 / a, rho - 2 * va)
    kept = [p for p in z.prefix if not val_at_least(p.center, p.radius_exp)]
    if not kept:
        raise PrecisionLoss("every prefix disk contains 0")
    lim = None
    if z.limit_exp is not None:
        va = kept[0].center.valuation()
        lim = z.limit_exp - 2 * va
    return TypeIV(tuple(invert_point(p) for p in kept), lim)


def invert_function(f: RationalFunc) -> RationalFunc:
    """Conjugate f by y -> 1/y."""
    return f.inverted()


def render_point(z: BerkPoint) -> str:
    return z.render()
