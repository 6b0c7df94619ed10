"""Rational maps over the residue field Q, used for reductions and tangent maps."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from sympy import Poly, QQ, Rational as SRational, symbols

from .ratcalc import oo

t = symbols("t")


def to_sym(c) -> SRational:
    c = Fraction(c)
    return SRational(c.numerator, c.denominator)


def to_frac(c) -> Fraction:
    c = SRational(c)
    return Fraction(int(c.p), int(c.q))


def poly_from_coeffs(coeffs: Sequence) -> Poly:
    """``coeffs[k]`` multiplies ``t**k``."""
    if not coeffs:
        return Poly(0, t, domain=QQ)
    return Poly([to_sym(c) for c in reversed(list(coeffs))], t, domain=QQ)


def order_at(p: Poly, t0) -> int:
    """Multiplicity of t0 as a root of p (p must be nonzero)."""
    if p.is_zero:
        raise ValueError("order of the zero polynomial")
    lin = Poly(t - to_sym(t0), t, domain=QQ)
    k = 0
    while True:
        q, r = p.div(lin)
        if not r.is_zero:
            return k
        p, k = q, k + 1


def reverse_to(p: Poly, d: int) -> Poly:
    """``t^d p(1/t)``."""
    cs = list(reversed(p.all_coeffs())) if not p.is_zero else []
    cs = cs + [0] * (d + 1 - len(cs))
    return Poly(list(cs), t, domain=QQ)


class ReducedMap:
    """A rational map num/den over Q with coprime parts and monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly):
        if den.is_zero:
            # the constant map to infinity, [1 : 0]
            if num.is_zero:
                raise ZeroDivisionError("the reduction [0 : 0] is undefined")
            self.num = Poly(1, t, domain=QQ)
            self.den = den
            return
        if not num.is_zero:
            g = num.gcd(den)
            if g.degree() > 0:
                num = num.exquo(g)
                den = den.exquo(g)
        lc = den.LC()
        self.num = num.quo_ground(lc) if lc != 1 else num
        self.den = den.monic()

    @classmethod
    def from_coeffs(cls, num: Sequence, den: Sequence) -> "ReducedMap":
        return cls(poly_from_coeffs(num), poly_from_coeffs(den))

    @classmethod
    def identity(cls) -> "ReducedMap":
        return cls(Poly(t, t, domain=QQ), Poly(1, t, domain=QQ))

    def is_infinity(self) -> bool:
        return self.den.is_zero

    @property
    def degree(self) -> int:
        if self.den.is_zero:
            return 0
        dn = 0 if self.num.is_zero else self.num.degree()
        return max(dn, self.den.degree())

    def is_constant(self) -> bool:
        return self.degree == 0

    def __eq__(self, other):
        return isinstance(other, ReducedMap) and self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((tuple(self.num.all_coeffs()), tuple(self.den.all_coeffs())))

    def __call__(self, x):
        if self.den.is_zero:
            return oo
        if x is oo:
            dn = -1 if self.num.is_zero else self.num.degree()
            dd = self.den.degree()
            if dn > dd:
                return oo
            if dn < dd:
                return Fraction(0)
            return to_frac(self.num.LC() / self.den.LC())
        xs = to_sym(x)
        d = self.den.eval(xs)
        if d == 0:
            return oo
        return to_frac(self.num.eval(xs) / d)

    def affine(self, mu, kappa) -> "ReducedMap":
        """``mu * R + kappa``."""
        m, k = to_sym(mu), to_sym(kappa)
        return ReducedMap(self.num.mul_ground(m) + self.den.mul_ground(k), self.den)

    def compose(self, inner: "ReducedMap") -> "ReducedMap":
        """``self(inner(t))``."""
        d = self.degree
        num = Poly(0, t, domain=QQ)
        den = Poly(0, t, domain=QQ)
        ncs = list(reversed(self.num.all_coeffs()))
        dcs = list(reversed(self.den.all_coeffs()))
        for k in range(d + 1):
            term = inner.num**k * inner.den ** (d - k)
            if k < len(ncs) and ncs[k] != 0:
                num += term.mul_ground(ncs[k])
            if k < len(dcs) and dcs[k] != 0:
                den += term.mul_ground(dcs[k])
        return ReducedMap(num, den)

    def at_infinity_chart(self) -> "ReducedMap":
        """The map t -> R(1/t)."""
        d = self.degree
        return ReducedMap(reverse_to(self.num, d), reverse_to(self.den, d))

    def multiplicity(self, x) -> int:
        """Local degree of R at x in P^1(Q)."""
        if self.is_constant():
            raise ValueError("constant reduction has no local degrees")
        if x is oo:
            return self.at_infinity_chart().multiplicity(Fraction(0))
        v = self(x)
        if v is oo:
            return order_at(self.den, x)
        return order_at(self.num - self.den.mul_ground(to_sym(v)), x)

    def wronskian(self) -> Poly:
        """``N' D - N D'``; its roots are the finite critical points."""
        return self.num.diff(t) * self.den - self.num * self.den.diff(t)

    def ramification(self) -> tuple[list[tuple[Poly, int]], int]:
        """Irreducible factors p of the Wronskian with e - 1 (e the ramification
        index at each root of p), and e at infinity."""
        w = self.wronskian()
        d = self.degree
        if w.is_zero:
            raise ValueError("constant map")
        _, facs = w.factor_list()
        e_inf = 2 * d - 1 - w.degree()
        return [(f.monic(), k) for f, k in facs], e_inf

    def preimage_poly(self, y) -> Poly:
        """Polynomial whose roots are the finite preimages of y."""
        if y is oo:
            return self.den
        return self.num - self.den.mul_ground(to_sym(y))

    def render(self, var: str = "y") -> str:
        if self.den.is_zero:
            return "infty"
        num = _render_poly(self.num, var)
        if self.den.degree() == 0:
            return num
        return f"({num})/({_render_poly(self.den, var)})"

    def __str__(self) -> str:
        return self.render()

    def __repr__(self) -> str:
        return f"ReducedMap({self.render()})"


def _render_poly(p: Poly, var: str) -> str:
    if p.is_zero:
        return "0"
    cs = list(reversed(p.all_coeffs()))
    parts: list[tuple[int, str]] = []
    for k in range(len(cs) - 1, -1, -1):
        c = to_frac(cs[k])
        if c == 0:
            continue
        mag = abs(c)
        mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
        if not mono:
            body = str(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{mag}*{mono}"
        parts.append((-1 if c < 0 else 1, body))
    out = []
    for i, (sg, body) in enumerate(parts):
        if i == 0:
            out.append(("-" if sg < 0 else "") + body)
        else:
            out.append(("- " if sg < 0 else "+ ") + body)
    if len(out) > 1 and parts[0][0] < 0:
        out[0] = f"({out[0]})"
    return " ".join(out)


def rational_roots(p: Poly) -> tuple[list[tuple[Fraction, int]], list[tuple[Poly, int]]]:
    """Rational roots with multiplicity, plus irreducible factors of degree > 1."""
    roots, rest = [], []
    if p.is_zero or p.degree() <= 0:
        return roots, rest
    _, facs = p.factor_list()
    for f, k in facs:
        if f.degree() == 1:
            a, b = f.all_coeffs()
            roots.append((to_frac(-b / a), k))
        else:
            rest.append((f.monic(), k))
    return roots, rest
