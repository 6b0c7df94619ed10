"""Rational functions in ``y`` with Puiseux-series coefficients.

Newton polygon convention: a segment of slope ``-s`` and horizontal length
``L`` certifies ``L`` roots (with multiplicity) of valuation ``s``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, comb, floor
from typing import Iterable, Sequence

from sympy import Poly, Rational as SRational, symbols

from .errors import (
    InfiniteWdeg,
    PoleAtCenter,
    PoleInAnnulus,
    PoleInDisk,
    PrecisionLoss,
)
from .valcore import (
    INF,
    PuiseuxSeries,
    ValExp,
    default_order,
    fmt_q,
    rational_between,
    render_series,
)

_ZERO = PuiseuxSeries()
_ONE = PuiseuxSeries.const(1)


class _ProjectiveInfinity:
    """The point at infinity of the projective line."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "oo"

    def __str__(self) -> str:
        return "infty"

    def __reduce__(self):
        return (_ProjectiveInfinity, ())


oo = _ProjectiveInfinity()


# ---------------------------------------------------------------------------
# polynomials in y


class YPoly:
    """Polynomial in y; ``coeffs[k]`` multiplies ``y**k``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [PuiseuxSeries.coerce(c) for c in coeffs]
        while cs and cs[-1].is_exact_zero():
            cs.pop()
        self.coeffs = tuple(cs)

    @classmethod
    def y(cls) -> "YPoly":
        return cls([_ZERO, _ONE])

    @classmethod
    def const(cls, c) -> "YPoly":
        return cls([c])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def lc(self) -> PuiseuxSeries:
        return self.coeffs[-1] if self.coeffs else _ZERO

    def coeff(self, k: int) -> PuiseuxSeries:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else _ZERO

    def __add__(self, other: "YPoly") -> "YPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        return YPoly(self.coeff(k) + other.coeff(k) for k in range(n))

    def __neg__(self) -> "YPoly":
        return YPoly(-c for c in self.coeffs)

    def __sub__(self, other: "YPoly") -> "YPoly":
        return self + (-other)

    def __mul__(self, other) -> "YPoly":
        if not isinstance(other, YPoly):
            c = PuiseuxSeries.coerce(other)
            return YPoly(a * c for a in self.coeffs)
        if self.is_zero() or other.is_zero():
            return YPoly()
        out = [_ZERO] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a.is_exact_zero():
                continue
            for j, b in enumerate(other.coeffs):
                if not b.is_exact_zero():
                    out[i + j] = out[i + j] + a * b
        return YPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "YPoly":
        result = YPoly([_ONE])
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other):
        return isinstance(other, YPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __call__(self, a: PuiseuxSeries) -> PuiseuxSeries:
        acc = _ZERO
        for c in reversed(self.coeffs):
            acc = acc * a + c
        return acc

    def shift(self, a: PuiseuxSeries) -> "YPoly":
        """Taylor shift: the polynomial ``p(y + a)``."""
        a = PuiseuxSeries.coerce(a)
        if a.is_exact_zero():
            return self
        d = self.degree
        if d <= 0:
            return self
        powers = [_ONE]
        for _ in range(d):
            powers.append(powers[-1] * a)
        out = []
        for j in range(d + 1):
            acc = _ZERO
            for k in range(j, d + 1):
                c = self.coeffs[k]
                if not c.is_exact_zero():
                    acc = acc + c * powers[k - j] * comb(k, j)
            out.append(acc)
        return YPoly(out)

    def scale_y(self, s) -> "YPoly":
        """The polynomial ``p(x^s * y)``."""
        s = Fraction(s)
        return YPoly(c * PuiseuxSeries.monomial(1, k * s) for k, c in enumerate(self.coeffs))

    def map_coeffs(self, fn) -> "YPoly":
        return YPoly(fn(c) for c in self.coeffs)

    def derivative(self) -> "YPoly":
        return YPoly(c * k for k, c in enumerate(self.coeffs) if k > 0)

    def reversed_to(self, n: int) -> "YPoly":
        """``y^n p(1/y)`` for n >= degree."""
        cs = list(self.coeffs) + [_ZERO] * (n + 1 - len(self.coeffs))
        return YPoly(reversed(cs))

    def compose(self, num: "YPoly", den: "YPoly", n: int) -> "YPoly":
        """Homogenised substitution: ``den^n * p(num/den)`` for n >= degree."""
        out = YPoly()
        num_pows = [YPoly([_ONE])]
        den_pows = [YPoly([_ONE])]
        for _ in range(n):
            num_pows.append(num_pows[-1] * num)
            den_pows.append(den_pows[-1] * den)
        for k, c in enumerate(self.coeffs):
            if c.is_exact_zero():
                continue
            out = out + num_pows[k] * den_pows[n - k] * c
        return out

    def render(self) -> str:
        return render_ypoly(self)

    def __str__(self) -> str:
        return self.render()

    def __repr__(self) -> str:
        return f"YPoly({self.render()})"


def _ymono(k: int) -> str:
    return "" if k == 0 else ("y" if k == 1 else f"y^{k}")


def render_ypoly(p: YPoly) -> str:
    """Descending powers of y; monomial coefficients inline, others in parentheses."""
    pieces: list[tuple[int, str]] = []
    for k in range(p.degree, -1, -1):
        c = p.coeffs[k]
        if c.is_exact_zero():
            continue
        if len(c.terms) == 1 and c.is_exact():
            e, q = c.terms[0]
            sign = -1 if q < 0 else 1
            mag = abs(q)
            parts = []
            if mag != 1 or (e == 0 and k == 0):
                parts.append(fmt_q(mag))
            if e != 0:
                parts.append(f"x^({fmt_q(e)})")
            if k:
                parts.append(_ymono(k))
            pieces.append((sign, "*".join(parts)))
        else:
            body = f"({render_series(c)})"
            if k:
                body += "*" + _ymono(k)
            pieces.append((1, body))
    if not pieces:
        return "0"
    out = []
    for i, (sign, body) in enumerate(pieces):
        if i == 0:
            out.append(("-" if sign < 0 else "") + body)
        else:
            out.append(("- " if sign < 0 else "+ ") + body)
    if len(out) > 1 and pieces[0][0] < 0:
        out[0] = f"({out[0]})"
    return " ".join(out)


# ---------------------------------------------------------------------------
# rational functions


class RationalFunc:
    """``num/den``; not required to be in lowest terms."""

    __slots__ = ("num", "den")

    def __init__(self, num: YPoly, den: YPoly | None = None):
        den = den if den is not None else YPoly([_ONE])
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            den = YPoly([_ONE])
        self.num = num
        self.den = den

    @classmethod
    def y(cls) -> "RationalFunc":
        return cls(YPoly.y())

    @classmethod
    def const(cls, c) -> "RationalFunc":
        return cls(YPoly.const(c))

    @classmethod
    def coerce(cls, value) -> "RationalFunc":
        if isinstance(value, RationalFunc):
            return value
        if isinstance(value, YPoly):
            return cls(value)
        return cls.const(value)

    @property
    def rdeg(self) -> int:
        return max(self.num.degree, self.den.degree, 0)

    def is_polynomial(self) -> bool:
        return self.den.degree == 0

    def constant_value(self):
        """The value of f when f is exactly constant in y, else None."""
        if self.num.is_zero():
            return PuiseuxSeries()
        k = next((i for i, c in enumerate(self.den.coeffs) if c.is_exact() and not c.is_exact_zero()), None)
        if k is None or k >= len(self.num.coeffs):
            return None
        c = self.num.coeffs[k] / self.den.coeffs[k]
        if not c.is_exact():
            return None
        diff = self.num - self.den * c
        return c if diff.is_zero() and all(x.is_exact() for x in diff.coeffs) else None

    def is_constant(self) -> bool:
        return self.constant_value() is not None

    def __add__(self, other):
        o = RationalFunc.coerce(other)
        if self.den == o.den:
            return RationalFunc(self.num + o.num, self.den)
        return RationalFunc(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunc(-self.num, self.den)

    def __sub__(self, other):
        return self + (-RationalFunc.coerce(other))

    def __rsub__(self, other):
        return RationalFunc.coerce(other) - self

    def __mul__(self, other):
        o = RationalFunc.coerce(other)
        return RationalFunc(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = RationalFunc.coerce(other)
        if o.num.is_zero():
            raise ZeroDivisionError("division by the zero function")
        return RationalFunc(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        return RationalFunc.coerce(other) / self

    def __pow__(self, k: int):
        if k < 0:
            return RationalFunc(self.den ** (-k), self.num ** (-k))
        return RationalFunc(self.num**k, self.den**k)

    def __eq__(self, other):
        return (
            isinstance(other, RationalFunc) and self.num == other.num and self.den == other.den
        )

    def __hash__(self):
        return hash((self.num, self.den))

    def compose(self, inner: "RationalFunc") -> "RationalFunc":
        """``self(inner(y))``."""
        n = self.rdeg
        return RationalFunc(
            self.num.compose(inner.num, inner.den, n), self.den.compose(inner.num, inner.den, n)
        )

    def map_coeffs(self, fn) -> "RationalFunc":
        return RationalFunc(self.num.map_coeffs(fn), self.den.map_coeffs(fn))

    def inverted(self) -> "RationalFunc":
        """Conjugate by the involution y -> 1/y: the map ``1/f(1/y)``."""
        n = self.rdeg
        return RationalFunc(self.den.reversed_to(n), self.num.reversed_to(n))

    def render(self) -> str:
        num = render_ypoly(self.num)
        if self.den == YPoly([_ONE]):
            return num
        return f"({num})/({render_ypoly(self.den)})"

    def __str__(self) -> str:
        return self.render()

    def __repr__(self) -> str:
        return f"RationalFunc({self.render()})"


# ---------------------------------------------------------------------------
# evaluation and expansion


def _first_nonzero(coeffs: Sequence[PuiseuxSeries]) -> int | None:
    """Index of the first certified nonzero coefficient; None if all exact zero."""
    for k, c in enumerate(coeffs):
        if c.terms:
            return k
        if not c.is_exact_zero():
            raise PrecisionLoss(f"coefficient {k} vanishes only modulo x^{fmt_q(c.order)}")
    return None


def rf_eval(f: RationalFunc, a):
    """Value of f at a classical point; ``oo`` for poles."""
    if a is oo:
        dn, dd = f.num.degree, f.den.degree
        if f.num.is_zero():
            return _ZERO
        if dn > dd:
            return oo
        if dn < dd:
            return _ZERO
        return f.num.lc() / f.den.lc()
    a = PuiseuxSeries.coerce(a)
    n_val, d_val = f.num(a), f.den(a)
    if d_val.terms:
        return n_val / d_val if not n_val.is_exact_zero() else _ZERO
    if not d_val.is_exact_zero():
        raise PrecisionLoss("denominator vanishes modulo the known order")
    # a is an exact root of the denominator: compare vanishing orders
    g, h = f.num.shift(a).coeffs, f.den.shift(a).coeffs
    kh = _first_nonzero(h)
    kg = _first_nonzero(g)
    if kg is None:
        return _ZERO
    if kg < kh:
        return oo
    if kg > kh:
        return _ZERO
    return g[kg] / h[kh]


def _series_div(g: Sequence[PuiseuxSeries], h: Sequence[PuiseuxSeries], count: int):
    h0 = h[0] if h else _ZERO
    if not h0.terms:
        if h0.is_exact_zero():
            raise PoleAtCenter("denominator vanishes at the expansion point")
        raise PrecisionLoss("denominator constant term is not certified")
    inv0 = 1 / h0
    out: list[PuiseuxSeries] = []
    for n in range(count):
        acc = g[n] if n < len(g) else _ZERO
        for k in range(1, min(n, len(h) - 1) + 1):
            if not h[k].is_exact_zero():
                acc = acc - h[k] * out[n - k]
        out.append(acc * inv0)
    return out


def taylor_expand(f: RationalFunc, a, count: int) -> list[PuiseuxSeries]:
    """Taylor coefficients c_0..c_{count-1} of f about a."""
    a = PuiseuxSeries.coerce(a)
    return _series_div(f.num.shift(a).coeffs, f.den.shift(a).coeffs, count)


# ---------------------------------------------------------------------------
# Newton polygons


@dataclass(frozen=True)
class NewtonPolygon:
    segments: tuple[tuple[Fraction, int], ...]
    vanishing: int = 0
    vertices: tuple[tuple[int, Fraction], ...] = ()

    def root_valuations(self) -> list[tuple[Fraction, int]]:
        """(valuation, count) pairs, excluding the roots at 0."""
        return [(-s, L) for s, L in self.segments]

    def count(self, rho, closed: bool) -> int:
        rho = ValExp.coerce(rho)
        n = self.vanishing
        for s, L in self.segments:
            v = -s
            if (v >= rho) if closed else (v > rho):
                n += L
        return n


def _lower_hull(points: list[tuple[int, Fraction]]) -> list[tuple[int, Fraction]]:
    hull: list[tuple[int, Fraction]] = []
    for p in points:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop the middle point if it is on or above the chord
            if (y2 - y1) * (p[0] - x1) >= (p[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(p)
    return hull


def newton_polygon(p: YPoly) -> NewtonPolygon:
    """Lower convex hull of the points ``(k, val(c_k))``."""
    if p.is_zero():
        raise ValueError("Newton polygon of the zero polynomial")
    pts: list[tuple[int, Fraction]] = []
    loose: list[tuple[int, Fraction]] = []
    for k, c in enumerate(p.coeffs):
        if c.terms:
            pts.append((k, c.terms[0][0]))
        elif not c.is_exact_zero():
            loose.append((k, c.order))
    if not pts:
        raise PrecisionLoss("no coefficient is certified nonzero")
    first = pts[0][0]
    for k, _ in loose:
        if k < first or k > pts[-1][0]:
            raise PrecisionLoss(f"coefficient {k} is not certified")
    hull = _lower_hull(pts)
    # an uncertified coefficient must sit strictly above the hull
    for k, bound in loose:
        for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
            if x1 <= k <= x2:
                yk = y1 + (y2 - y1) * Fraction(k - x1, x2 - x1)
                if bound <= yk:
                    raise PrecisionLoss(f"coefficient {k} may touch the Newton polygon")
                break
    segs = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        segs.append((Fraction(y2 - y1, x2 - x1), x2 - x1))
    return NewtonPolygon(tuple(segs), first, tuple(hull))


# ---------------------------------------------------------------------------
# Gauss norms and Weierstrass degrees


def _dominant(coeffs: Sequence[PuiseuxSeries], rho) -> tuple[object, int, int]:
    """(min_k val(c_k) + k rho, smallest index, largest index)."""
    rho = ValExp.coerce(rho)
    best = None
    lo = hi = -1
    loose = []
    for k, c in enumerate(coeffs):
        if c.terms:
            v = c.terms[0][0] + rho * k
            if best is None or v < best:
                best, lo, hi = v, k, k
            elif v == best:
                hi = k
        elif not c.is_exact_zero():
            loose.append((k, c.order + rho * k))
    if best is None:
        if loose:
            raise PrecisionLoss("no coefficient is certified nonzero")
        return INF, -1, -1
    for k, bound in loose:
        if bound <= best:
            raise PrecisionLoss(f"coefficient {k} is not certified at this radius")
    return best, lo, hi


def _shifted(f: RationalFunc, a) -> tuple[YPoly, YPoly]:
    a = PuiseuxSeries.coerce(a)
    return f.num.shift(a), f.den.shift(a)


def gauss_norm(f: RationalFunc, a, rho) -> ValExp:
    """Valuation of f at the disk point of centre a and radius exponent rho."""
    g, h = _shifted(f, a)
    vg = _dominant(g.coeffs, rho)[0]
    vh = _dominant(h.coeffs, rho)[0]
    if vg == INF:
        return INF
    return ValExp.coerce(vg) - vh


def count_zeros_poles(f: RationalFunc, a, rho, closed: bool) -> tuple[int, int]:
    """Zeros and poles of f (with multiplicity) in the disk about a."""
    g, h = _shifted(f, a)
    n0 = newton_polygon(g).count(rho, closed) if not g.is_zero() else 0
    ninf = newton_polygon(h).count(rho, closed)
    return n0, ninf


def wdeg(f: RationalFunc, a, rho, side: str) -> int:
    """Outer (open disk) or inner (closed disk) Weierstrass degree."""
    g, h = _shifted(f, a)
    if g.is_zero():
        raise InfiniteWdeg("Weierstrass degree of the zero function")
    _, glo, ghi = _dominant(g.coeffs, rho)
    _, hlo, hhi = _dominant(h.coeffs, rho)
    if side == "outer":
        return glo - hlo
    if side == "inner":
        return ghi - hhi
    raise ValueError("side must be 'inner' or 'outer'")


# ---------------------------------------------------------------------------
# images of disks and annuli


@dataclass(frozen=True)
class Disk:
    center: PuiseuxSeries
    radius_exp: ValExp
    closed: bool = True
    complemented: bool = False

    def __post_init__(self):
        object.__setattr__(self, "radius_exp", ValExp.coerce(self.radius_exp))

    def is_rational(self) -> bool:
        return self.radius_exp.is_rational()

    def contains(self, b: PuiseuxSeries) -> bool:
        d = b - self.center
        v = d.valuation() if not d.is_zero_mod_order() or d.is_exact() else None
        if v is None:
            if d.order >= self.radius_exp and (self.closed or d.order > self.radius_exp):
                inside = True
            else:
                raise PrecisionLoss("membership not certified")
        else:
            inside = v >= self.radius_exp if self.closed else v > self.radius_exp
        return inside != self.complemented

    def __str__(self) -> str:
        kind = "Dbar" if self.closed else "D"
        core = f"{kind}({render_series(self.center)}, {self.radius_exp})"
        return f"P1 \\ {core}" if self.complemented else core


def image_of_disk(f: RationalFunc, D: Disk) -> tuple[Disk, int]:
    """Image disk and covering degree for a pole-free disk."""
    if D.complemented:
        raise ValueError("image_of_disk expects an affine disk")
    a, rho = D.center, D.radius_exp
    closed = D.closed or not rho.is_rational()
    _, poles = count_zeros_poles(f, a, rho, closed)
    if poles:
        raise PoleInDisk(f"{poles} pole(s) of f lie in {D}")
    c0 = rf_eval(f, a)
    F = f - RationalFunc.const(c0)
    if F.num.is_zero():
        raise InfiniteWdeg("f is constant on the disk")
    radius = gauss_norm(F, a, rho)
    deg = wdeg(F, a, rho, "inner" if closed else "outer")
    if deg <= 0:
        raise InfiniteWdeg("non-positive Weierstrass degree")
    return Disk(c0, radius, D.closed), deg


def _pick_interior(lo, hi, avoid: Iterable[Fraction]) -> tuple[Fraction, Fraction]:
    """Two rationals r1 < r2 spread across the widest pole-free annulus
    containing (lo, hi); the Laurent expansion is the same on all of it."""
    avoid = list(avoid)
    if any(lo < v < hi for v in avoid):
        raise PoleInAnnulus("a pole lies inside the annulus")
    lo = max([v for v in avoid if v <= lo], default=-INF)
    hi = min([v for v in avoid if v >= hi], default=INF)
    if lo == -INF and hi == INF:
        return Fraction(-1), Fraction(1)
    if lo == -INF:
        return hi - 4, hi - 1
    if hi == INF:
        return lo + 1, lo + 4
    width = hi - lo
    return lo + width / 4, hi - width / 4


def laurent_constant(f: RationalFunc, a, lo, hi, precision) -> PuiseuxSeries:
    """Constant term of the Laurent expansion of f on {lo < val(y - a) < hi}.

    The result is exact modulo ``x^precision`` (or a coarser propagated order).
    """
    g, h = _shifted(f, a)
    if h.degree == 0:
        if g.is_zero():
            return _ZERO
        return g.coeffs[0] / h.coeffs[0]
    poly_h = newton_polygon(h)
    r1, r2 = _pick_interior(lo, hi, [v for v, _ in poly_h.root_valuations()])
    norms = []
    for r in (r1, r2):
        vg = _dominant(g.coeffs, r)[0]
        vh = _dominant(h.coeffs, r)[0]
        norms.append(INF if vg == INF else vg - vh)
    if norms[0] == INF:
        return _ZERO
    _, j, j2 = _dominant(h.coeffs, r1)
    if j != j2 or _dominant(h.coeffs, r2)[1] != j:
        raise PoleInAnnulus("denominator changes dominant term inside the annulus")
    hj = h.coeffs[j]
    inv_hj = 1 / hj
    E = {}
    for k, c in enumerate(h.coeffs):
        if k == j or c.is_exact_zero():
            continue
        if not c.terms:
            raise PrecisionLoss("denominator coefficient is not certified")
        E[k - j] = c * inv_hj
    bounds = [precision - ValExp.coerce(nv).rat for nv in norms]
    radii = (r1, r2)

    def pruned(m: int, c: PuiseuxSeries) -> bool:
        if c.is_zero_mod_order():
            return True
        v = c.terms[0][0]
        return any(v + m * r >= b for r, b in zip(radii, bounds))

    total: dict[int, PuiseuxSeries] = {0: _ONE}
    term: dict[int, PuiseuxSeries] = {0: _ONE}
    while term:
        nxt: dict[int, PuiseuxSeries] = {}
        for m, c in term.items():
            for k, e in E.items():
                key = m + k
                nxt[key] = nxt.get(key, _ZERO) - c * e
        term = {m: c for m, c in nxt.items() if not pruned(m, c)}
        for m, c in term.items():
            total[m] = total.get(m, _ZERO) + c
    c0 = _ZERO
    for m, s in total.items():
        k = j - m
        if 0 <= k < len(g.coeffs) and not g.coeffs[k].is_exact_zero():
            c0 = c0 + s * g.coeffs[k]
    c0 = c0 * inv_hj
    return c0.truncate(Fraction(precision))


@dataclass(frozen=True)
class AnnulusImage:
    case: str  # "M<N", "M=N>=1" or "M=N<=-1"
    center: PuiseuxSeries
    inner_exp: object  # valuation bound on the side of the centre
    outer_exp: object
    degree: int
    M: int
    N: int
    disk: Disk | None = None

    def __str__(self) -> str:
        if self.disk is not None:
            return f"{self.case}: {self.disk}"
        return (
            f"{self.case}: {{{self.outer_exp} < val(z - {render_series(self.center)}) "
            f"< {self.inner_exp}}}, {self.degree}-to-1"
        )


def image_of_annulus(f: RationalFunc, a, rho_out, rho_in, precision=None) -> AnnulusImage:
    """Image of {rho_out < val(y - a) < rho_in} in one of the three annulus cases.

    Here ``rho_out < rho_in``: the outer boundary has the smaller exponent.
    """
    a = PuiseuxSeries.coerce(a)
    if not rho_out < rho_in:
        raise ValueError("need rho_out < rho_in")
    g, h = _shifted(f, a)
    for v, _ in newton_polygon(h).root_valuations():
        if rho_out < v < rho_in:
            raise PoleInAnnulus(f"pole of valuation {fmt_q(v)} inside the annulus")
    base = precision if precision is not None else default_order()
    extra = Fraction(base)
    while True:
        anchor = max(
            _finite(gauss_norm(f, a, r)) for r in (rho_out, rho_in) if r not in (INF, -INF)
        )
        P = anchor + extra
        c0 = laurent_constant(f, a, rho_out, rho_in, P)
        F = f - RationalFunc.const(c0)
        if F.num.is_zero():
            raise InfiniteWdeg("f is constant on the annulus")
        s = gauss_norm(F, a, rho_in)
        t = gauss_norm(F, a, rho_out)
        if s < P and t < P:
            break
        extra *= 2
        if extra > 64 * base:
            raise PrecisionLoss("Laurent constant not certified to the needed order")
    M = wdeg(F, a, rho_in, "inner")
    N = wdeg(F, a, rho_out, "outer")
    if M < N:
        r = min(s, t)
        centre = c0.head_le(r)
        disk = Disk(centre, r, closed=False)
        return AnnulusImage("M<N", centre, INF, r, 0, M, N, disk)
    if M >= 1:
        return AnnulusImage("M=N>=1", c0.head(s), s, t, M, M, N)
    if M <= -1:
        return AnnulusImage("M=N<=-1", c0.head(t), t, s, -M, M, N)
    raise InfiniteWdeg("Weierstrass degree zero on the annulus")


def laurent_centre(f: RationalFunc, a, rho, precision=None):
    """For irrational rho: (c0, s, d) with c0 the Laurent constant on a thin
    annulus around rho, s the valuation of f - c0 there and d its wdeg."""
    rho = ValExp.coerce(rho)
    a = PuiseuxSeries.coerce(a)
    _, h = _shifted(f, a)
    vals = [v for v, _ in newton_polygon(h).root_valuations()]
    lo_b, hi_b = rho.bounds()
    lo = max([v for v in vals if v < rho] + [Fraction(floor(lo_b) - 1)])
    hi = min([v for v in vals if v > rho] + [Fraction(ceil(hi_b) + 1)])
    base = Fraction(precision if precision is not None else default_order())
    anchor = _finite(gauss_norm(f, a, rho))
    extra = base
    while True:
        P = anchor + extra
        c0 = laurent_constant(f, a, lo, hi, P)
        F = f - RationalFunc.const(c0)
        if F.num.is_zero():
            raise InfiniteWdeg("f is constant")
        s = gauss_norm(F, a, rho)
        if s < P:
            return c0, s, wdeg(F, a, rho, "inner")
        extra *= 2
        if extra > 64 * base:
            raise PrecisionLoss("Laurent constant not certified to the needed order")


def _finite(v) -> Fraction:
    if v == INF:
        return Fraction(0)
    return ValExp.coerce(v).bounds()[1]


# ---------------------------------------------------------------------------
# Newton-Puiseux


@dataclass
class PuiseuxRoots:
    roots: list[tuple[PuiseuxSeries, int]] = field(default_factory=list)
    unresolved: list[dict] = field(default_factory=list)

    @property
    def complete(self) -> bool:
        return not self.unresolved


_T = symbols("T")


def rational_roots_and_rest(coeffs: Sequence[Fraction]) -> tuple[list[tuple[Fraction, int]], list[tuple[Poly, int]]]:
    """Factor a polynomial over Q: rational roots with multiplicity, plus the
    irreducible factors of degree > 1.  ``coeffs[k]`` multiplies T**k."""
    poly = Poly([SRational(c.numerator, c.denominator) for c in reversed(coeffs)], _T, domain="QQ")
    roots: list[tuple[Fraction, int]] = []
    rest: list[tuple[Poly, int]] = []
    if poly.degree() <= 0:
        return roots, rest
    _, factors = poly.factor_list()
    for fac, mult in factors:
        if fac.degree() == 1:
            c1, c0 = fac.all_coeffs()
            r = -SRational(c0) / SRational(c1)
            roots.append((Fraction(int(r.p), int(r.q)), mult))
        else:
            rest.append((fac, mult))
    return roots, rest


def newton_puiseux_roots(p: YPoly, order, max_depth: int = 200) -> PuiseuxRoots:
    """Expand the roots of p as Puiseux series until ``val(p(root)) >= order``.

    Roots whose residue equation has no rational solution are reported in
    ``unresolved`` with their valuation and residual degree.
    """
    if p.is_zero() or p.degree < 1:
        raise ValueError("need a non-constant polynomial")
    order = Fraction(order)
    out = PuiseuxRoots()

    def certified(prefix: PuiseuxSeries) -> bool:
        r = p(prefix)
        return r.val_lower_bound() >= order

    def branch(q: YPoly, prefix: PuiseuxSeries, last, mult: int, depth: int):
        if last is not None and certified(prefix):
            out.roots.append((_with_root_precision(p, prefix, mult, order), mult))
            return
        if depth > max_depth:
            raise PrecisionLoss("Newton-Puiseux expansion did not converge")
        poly = newton_polygon(q)
        if poly.vanishing:
            out.roots.append((prefix, poly.vanishing))
        verts = poly.vertices
        for (x1, y1), (x2, _) in zip(verts, verts[1:]):
            s = -poly_slope(verts, x1)
            if last is not None and s <= last:
                continue
            level = y1 + x1 * s
            res = []
            for k in range(x1, x2 + 1):
                c = q.coeffs[k]
                if c.terms and c.terms[0][0] + k * s == level:
                    res.append(c.terms[0][1])
                else:
                    res.append(Fraction(0))
            roots, rest = rational_roots_and_rest(res)
            for fac, m in rest:
                out.unresolved.append(
                    {
                        "prefix": prefix,
                        "valuation": s,
                        "degree": fac.degree() * m,
                        "multiplicity": m,
                        "residue_poly": str(fac.as_expr()),
                    }
                )
            for c, m in roots:
                term = PuiseuxSeries.monomial(c, s)
                branch(q.shift(term), prefix + term, s, m, depth + 1)

    branch(p, PuiseuxSeries(), None, p.degree, 0)
    return out


def _with_root_precision(p: YPoly, prefix: PuiseuxSeries, m: int, order) -> PuiseuxSeries:
    # the m roots near prefix differ from it by at least (order - val c_m) / m
    if p(prefix).is_exact_zero():
        return prefix
    c = p.shift(prefix).coeff(m)
    try:
        prec = (Fraction(order) - Fraction(c.val_lower_bound())) / m
    except (TypeError, ValueError, OverflowError):
        return prefix
    if prefix.terms and prec <= prefix.terms[-1][0]:
        prec = order
    return prefix.truncate(prec)


def poly_slope(verts, x1: int) -> Fraction:
    for (a1, b1), (a2, b2) in zip(verts, verts[1:]):
        if a1 == x1:
            return Fraction(b2 - b1, a2 - a1)
    raise KeyError(x1)
