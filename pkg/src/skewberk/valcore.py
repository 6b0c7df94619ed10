"""Exact arithmetic for the valued field.

Two objects live here: ``ValExp``, an exponent ``rat + irr*sqrt2`` used for
valuations and disk radii, and ``PuiseuxSeries``, a truncated series in ``x``
with rational exponents and exact rational coefficients.

Absolute values are never materialised.  Everything is stored additively as a
valuation, so a larger exponent means a smaller element.
"""

from __future__ import annotations

import contextlib
import contextvars
import math
from fractions import Fraction
from typing import Iterable, Iterator, Union

from sympy import integer_nthroot

from .errors import CoeffRootUnavailable, PrecisionLoss

INF = math.inf

Rational = Union[int, Fraction]

_default_order: contextvars.ContextVar[Fraction] = contextvars.ContextVar(
    "default_order", default=Fraction(24)
)


def default_order() -> Fraction:
    """Relative precision given to series produced by infinite expansions."""
    return _default_order.get()


def set_default_order(order: Rational) -> None:
    _default_order.set(Fraction(order))


@contextlib.contextmanager
def working_order(order: Rational) -> Iterator[None]:
    token = _default_order.set(Fraction(order))
    try:
        yield
    finally:
        _default_order.reset(token)


def fmt_q(q: Rational) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


# ---------------------------------------------------------------------------
# ValExp


def _sign_qsqrt2(r: Fraction, s: Fraction) -> int:
    """Sign of r + s*sqrt2, decided with one squaring."""
    if s == 0:
        return (r > 0) - (r < 0)
    if r == 0:
        return (s > 0) - (s < 0)
    if r > 0 and s > 0:
        return 1
    if r < 0 and s < 0:
        return -1
    # opposite signs: compare r^2 with 2 s^2
    lhs, rhs = r * r, 2 * s * s
    if lhs == rhs:
        return 0
    if r > 0:
        return 1 if lhs > rhs else -1
    return -1 if lhs > rhs else 1


class ValExp:
    """Exponent ``rat + irr*sqrt2`` with exact ordering."""

    __slots__ = ("rat", "irr")

    def __init__(self, rat: Rational = 0, irr: Rational = 0):
        self.rat = Fraction(rat)
        self.irr = Fraction(irr)

    @staticmethod
    def coerce(value: "ValExp | Rational") -> "ValExp":
        if isinstance(value, ValExp):
            return value
        if isinstance(value, (int, Fraction)):
            return ValExp(value)
        raise TypeError(f"cannot interpret {value!r} as an exponent")

    def is_rational(self) -> bool:
        return self.irr == 0

    def as_fraction(self) -> Fraction:
        if self.irr:
            raise ValueError(f"{self} is irrational")
        return self.rat

    def sign(self) -> int:
        return _sign_qsqrt2(self.rat, self.irr)

    def bounds(self, digits: int = 30) -> tuple[Fraction, Fraction]:
        """Rational lower and upper bounds, tight to about 10**-digits."""
        if not self.irr:
            return self.rat, self.rat
        scale = 10**digits
        root = math.isqrt(2 * scale * scale)
        lo_sqrt, hi_sqrt = Fraction(root, scale), Fraction(root + 1, scale)
        a, b = self.rat + self.irr * lo_sqrt, self.rat + self.irr * hi_sqrt
        return (a, b) if a <= b else (b, a)

    def __float__(self) -> float:
        return float(self.rat) + float(self.irr) * math.sqrt(2)

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, float):
            return other
        o = ValExp.coerce(other)
        return ValExp(self.rat + o.rat, self.irr + o.irr)

    __radd__ = __add__

    def __neg__(self):
        return ValExp(-self.rat, -self.irr)

    def __sub__(self, other):
        if isinstance(other, float):
            return -other
        o = ValExp.coerce(other)
        return ValExp(self.rat - o.rat, self.irr - o.irr)

    def __rsub__(self, other):
        return ValExp.coerce(other) - self

    def __mul__(self, k):
        if isinstance(k, ValExp):
            if k.irr and self.irr:
                raise ValueError("product of two irrational exponents leaves Q+Q*sqrt2")
            if k.irr:
                return k * self.rat
            k = k.rat
        k = Fraction(k)
        return ValExp(self.rat * k, self.irr * k)

    __rmul__ = __mul__

    def __truediv__(self, k):
        k = Fraction(k)
        return ValExp(self.rat / k, self.irr / k)

    # ordering ----------------------------------------------------------------
    def _cmp(self, other) -> int:
        if isinstance(other, float):
            if other == INF:
                return -1
            if other == -INF:
                return 1
            raise TypeError("only infinite floats compare with ValExp")
        d = self - ValExp.coerce(other)
        return d.sign()

    def __eq__(self, other):
        try:
            return self._cmp(other) == 0
        except TypeError:
            return NotImplemented

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __hash__(self):
        if not self.irr:
            return hash(self.rat)
        return hash((self.rat, self.irr))

    def __str__(self) -> str:
        if not self.irr:
            return fmt_q(self.rat)
        sign = "-" if self.irr < 0 else "+"
        return f"{fmt_q(self.rat)}{sign}{fmt_q(abs(self.irr))}*sqrt2"

    def __repr__(self) -> str:
        return f"ValExp({self})"


THETA = ValExp(0, 1)


def exp_compare(a: "ValExp | Rational", b: "ValExp | Rational") -> str:
    """Return ``"<"``, ``"="`` or ``">"`` for the real values of a and b."""
    s = (ValExp.coerce(a) - ValExp.coerce(b)).sign()
    return "<" if s < 0 else ("=" if s == 0 else ">")


def rational_between(lo, hi) -> Fraction:
    """A rational strictly between two exponents (lo < hi; either may be infinite)."""
    if lo == -INF and hi == INF:
        return Fraction(0)
    if hi == INF:
        return ValExp.coerce(lo).bounds()[1] + 1
    if lo == -INF:
        return ValExp.coerce(hi).bounds()[0] - 1
    lo, hi = ValExp.coerce(lo), ValExp.coerce(hi)
    if not lo < hi:
        raise ValueError("empty interval")
    digits = 10
    while True:
        llo, lhi = lo.bounds(digits)
        hlo, hhi = hi.bounds(digits)
        if lhi < hlo:
            # prefer a short rational
            mid = (lhi + hlo) / 2
            for den in range(1, 10_000):
                cand = Fraction(round(mid * den), den)
                if lo < cand < hi:
                    return cand
            return mid
        digits *= 2


# ---------------------------------------------------------------------------
# rational roots


def rational_root(c: Rational, e: Rational) -> Fraction:
    """Exact ``c**e`` for rational e, or CoeffRootUnavailable."""
    c, e = Fraction(c), Fraction(e)
    if e.denominator == 1:
        return c ** e.numerator
    if c == 0:
        if e > 0:
            return Fraction(0)
        raise ZeroDivisionError("0 to a negative power")
    k = e.denominator
    neg = c < 0
    if neg and k % 2 == 0:
        raise CoeffRootUnavailable(f"no rational {k}-th root of {fmt_q(c)}")
    a = abs(c)
    rn, exact_n = integer_nthroot(a.numerator, k)
    rd, exact_d = integer_nthroot(a.denominator, k)
    if not (exact_n and exact_d):
        raise CoeffRootUnavailable(f"no rational {k}-th root of {fmt_q(c)}")
    root = Fraction(int(rn), int(rd))
    if neg:
        root = -root
    return root ** e.numerator


# ---------------------------------------------------------------------------
# PuiseuxSeries


def _lcm_denominator(exps: Iterable[Fraction]) -> int:
    n = 1
    for e in exps:
        n = n * e.denominator // math.gcd(n, e.denominator)
    return n


class PuiseuxSeries:
    """Truncated Puiseux series ``sum c_e x^e + O(x^order)``.

    ``order`` is ``math.inf`` for exact (finite) series.  Terms are kept sorted
    by exponent, with nonzero coefficients, all below ``order``.
    """

    __slots__ = ("terms", "order", "_hash")

    def __init__(self, terms: Iterable[tuple] = (), order=INF):
        order = order if order == INF else Fraction(order)
        acc: dict[Fraction, Fraction] = {}
        for e, c in terms:
            e, c = Fraction(e), Fraction(c)
            if e >= order:
                continue
            acc[e] = acc.get(e, Fraction(0)) + c
        self.terms = tuple(sorted((e, c) for e, c in acc.items() if c != 0))
        self.order = order
        self._hash = None

    @classmethod
    def _raw(cls, terms: tuple, order) -> "PuiseuxSeries":
        obj = cls.__new__(cls)
        obj.terms = terms
        obj.order = order
        obj._hash = None
        return obj

    # constructors -----------------------------------------------------------
    @classmethod
    def const(cls, c: Rational) -> "PuiseuxSeries":
        return cls([(0, c)])

    @classmethod
    def monomial(cls, c: Rational, e: Rational) -> "PuiseuxSeries":
        return cls([(e, c)])

    @classmethod
    def x(cls) -> "PuiseuxSeries":
        return cls([(1, 1)])

    @classmethod
    def coerce(cls, value) -> "PuiseuxSeries":
        if isinstance(value, PuiseuxSeries):
            return value
        if isinstance(value, (int, Fraction)):
            return cls.const(value)
        raise TypeError(f"cannot interpret {value!r} as a series")

    # inspection -----------------------------------------------------------
    def is_exact(self) -> bool:
        return self.order == INF

    def is_exact_zero(self) -> bool:
        return not self.terms and self.order == INF

    def is_zero_mod_order(self) -> bool:
        """No certified terms; the series is zero as far as it is known."""
        return not self.terms

    def valuation(self):
        """Exponent of the first term, ``INF`` for exact zero."""
        if self.terms:
            return self.terms[0][0]
        if self.order == INF:
            return INF
        raise PrecisionLoss(f"series is zero modulo x^{fmt_q(self.order)}")

    def val_lower_bound(self):
        """Certified lower bound on the valuation, never raising."""
        if self.terms:
            return self.terms[0][0]
        return self.order

    def leading_coeff(self) -> Fraction:
        if not self.terms:
            if self.order == INF:
                return Fraction(0)
            raise PrecisionLoss("leading coefficient lies beyond the known order")
        return self.terms[0][1]

    def coeff(self, e: Rational) -> Fraction:
        e = Fraction(e)
        if e >= self.order:
            raise PrecisionLoss(f"coefficient of x^{fmt_q(e)} is not certified")
        for te, tc in self.terms:
            if te == e:
                return tc
            if te > e:
                break
        return Fraction(0)

    def ramification(self) -> int:
        return _lcm_denominator(e for e, _ in self.terms)

    def is_constant(self) -> bool:
        return self.is_exact() and all(e == 0 for e, _ in self.terms)

    def truncate(self, order) -> "PuiseuxSeries":
        """Forget terms of exponent >= order."""
        if order == INF:
            return self
        order = Fraction(order)
        if order >= self.order:
            return self
        return PuiseuxSeries._raw(tuple(t for t in self.terms if t[0] < order), order)

    def head(self, bound) -> "PuiseuxSeries":
        """Exact series made of the terms with exponent < bound."""
        if bound != INF and self.order < bound:
            raise PrecisionLoss(
                f"series known only to x^{fmt_q(self.order)}, needed below x^{bound}"
            )
        return PuiseuxSeries._raw(tuple(t for t in self.terms if t[0] < bound), INF)

    def head_le(self, bound) -> "PuiseuxSeries":
        """Exact series made of the terms with exponent <= bound."""
        if self.order <= bound:
            raise PrecisionLoss(f"series known only to x^{fmt_q(self.order)}")
        return PuiseuxSeries._raw(tuple(t for t in self.terms if t[0] <= bound), INF)

    def equal_to_order(self, other: "PuiseuxSeries") -> bool:
        """Equality as far as both series are known."""
        return (self - PuiseuxSeries.coerce(other)).is_zero_mod_order()

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, PuiseuxSeries):
            if isinstance(other, (int, Fraction)):
                other = PuiseuxSeries.const(other)
            else:
                return NotImplemented
        order = min(self.order, other.order)
        acc = dict(self.terms)
        for e, c in other.terms:
            acc[e] = acc.get(e, 0) + c
        terms = tuple(sorted((e, c) for e, c in acc.items() if c != 0 and e < order))
        return PuiseuxSeries._raw(terms, order)

    __radd__ = __add__

    def __neg__(self):
        return PuiseuxSeries._raw(tuple((e, -c) for e, c in self.terms), self.order)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = PuiseuxSeries.const(other)
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        if not isinstance(other, (int, Fraction)):
            return NotImplemented
        return PuiseuxSeries.const(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            k = Fraction(other)
            if k == 0:
                return PuiseuxSeries()
            return PuiseuxSeries._raw(tuple((e, c * k) for e, c in self.terms), self.order)
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        if self.is_exact_zero() or other.is_exact_zero():
            return PuiseuxSeries()
        order = min(self.order + other.val_lower_bound(), other.order + self.val_lower_bound())
        acc: dict[Fraction, Fraction] = {}
        for e1, c1 in self.terms:
            if e1 + (other.terms[0][0] if other.terms else other.order) >= order:
                break
            for e2, c2 in other.terms:
                e = e1 + e2
                if e >= order:
                    break
                acc[e] = acc.get(e, 0) + c1 * c2
        terms = tuple(sorted((e, c) for e, c in acc.items() if c != 0))
        return PuiseuxSeries._raw(terms, order)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        return self * ps_inv(other)

    def __rtruediv__(self, other):
        if not isinstance(other, (int, Fraction)):
            return NotImplemented
        return PuiseuxSeries.const(other) * ps_inv(self)

    def __pow__(self, e):
        return ps_pow_rational(self, e)

    def derivative(self) -> "PuiseuxSeries":
        order = self.order - 1 if self.order != INF else INF
        return PuiseuxSeries([(e - 1, c * e) for e, c in self.terms if e != 0], order)

    # comparison -----------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = PuiseuxSeries.const(other)
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        return self.terms == other.terms and self.order == other.order

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.terms, self.order))
        return self._hash

    # rendering ------------------------------------------------------------
    def __str__(self) -> str:
        return render_series(self)

    def __repr__(self) -> str:
        return f"PuiseuxSeries({render_series(self)})"


def _render_term(e: Fraction, c: Fraction) -> str:
    if e == 0:
        return fmt_q(c)
    mono = f"x^({fmt_q(e)})"
    if c == 1:
        return mono
    if c == -1:
        return "-" + mono
    return f"{fmt_q(c)}*{mono}"


def render_series(s: PuiseuxSeries) -> str:
    """Canonical text: increasing exponents, ``x^(p/q)``, optional ``O(x^(T))``.

    A leading negative term is parenthesised when more terms follow, because the
    spec-file grammar gives unary minus the lowest precedence.
    """
    parts: list[str] = []
    for i, (e, c) in enumerate(s.terms):
        if i == 0:
            parts.append(_render_term(e, c))
        else:
            parts.append(("- " if c < 0 else "+ ") + _render_term(e, abs(c)))
    if s.order != INF:
        big_o = f"O(x^({fmt_q(s.order)}))"
        parts.append(("+ " if parts else "") + big_o)
    if not parts:
        return "0"
    if len(parts) > 1 and s.terms and s.terms[0][1] < 0:
        parts[0] = f"({parts[0]})"
    return " ".join(parts)


# ---------------------------------------------------------------------------
# operations


def ps_arith(op: str, a: PuiseuxSeries, b: PuiseuxSeries | None = None) -> PuiseuxSeries:
    if op == "add":
        return a + b
    if op == "neg":
        return -a
    if op == "mul":
        return a * b
    if op == "sub":
        return a - b
    raise ValueError(f"unknown operation {op!r}")


def ps_val(a: PuiseuxSeries):
    return a.valuation()


def _unit_part(a: PuiseuxSeries) -> tuple[Fraction, Fraction, int, dict[int, Fraction], object]:
    """Split a = c x^v (1 + u): returns v, c, n, {k: coeff of t^k in 1+u}, rel order.

    Here t = x^(1/n) and the relative order is a.order - v.
    """
    v = a.valuation()
    if v == INF:
        raise ZeroDivisionError("zero series")
    c = a.terms[0][1]
    n = a.ramification()
    if a.order != INF:
        n = n * Fraction(a.order - v).denominator // math.gcd(n, Fraction(a.order - v).denominator)
    f = {int((e - v) * n): cc / c for e, cc in a.terms}
    rel = a.order - v if a.order != INF else INF
    return v, c, n, f, rel


def _dense_count(rel, n: int) -> int:
    """Number of t-coefficients below the relative order ``rel`` (t = x^(1/n))."""
    return math.ceil(rel * n)


def ps_inv(a: PuiseuxSeries) -> PuiseuxSeries:
    """Multiplicative inverse to the propagated (or default) relative order."""
    if a.is_exact_zero():
        raise ZeroDivisionError("inverse of the zero series")
    if not a.terms:
        raise PrecisionLoss("inverse of a series that is zero modulo its order")
    v, c, n, f, rel = _unit_part(a)
    if len(a.terms) == 1 and a.order == INF:
        return PuiseuxSeries._raw(((-v, 1 / c),), INF)
    rel = min(rel, default_order())
    K = _dense_count(rel, n)
    sparse = sorted((k, fk) for k, fk in f.items() if k > 0)
    g = [Fraction(0)] * K
    g[0] = Fraction(1)
    for k in range(1, K):
        s = Fraction(0)
        for j, fj in sparse:
            if j > k:
                break
            s += fj * g[k - j]
        g[k] = -s
    terms = tuple((Fraction(k, n) - v, gk / c) for k, gk in enumerate(g) if gk)
    return PuiseuxSeries._raw(terms, rel - v)


def ps_pow_rational(a: PuiseuxSeries, e: Rational) -> PuiseuxSeries:
    """``a**e`` for rational e; fractional powers need a rational root of the
    leading coefficient."""
    e = Fraction(e)
    if e.denominator == 1:
        k = e.numerator
        if k < 0:
            return ps_pow_rational(ps_inv(a), -k)
        result = PuiseuxSeries.const(1)
        base = a
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result
    if a.is_exact_zero():
        if e > 0:
            return PuiseuxSeries()
        raise ZeroDivisionError("zero to a negative power")
    if not a.terms:
        raise PrecisionLoss("power of a series that is zero modulo its order")
    v, c, n, f, rel = _unit_part(a)
    lead = rational_root(c, e)
    if len(a.terms) == 1 and a.order == INF:
        return PuiseuxSeries._raw(((v * e, lead),), INF)
    rel = min(rel, default_order())
    K = _dense_count(rel, n)
    sparse = sorted((k, fk) for k, fk in f.items() if k > 0)
    g = [Fraction(0)] * K
    g[0] = Fraction(1)
    for m in range(1, K):
        s = Fraction(0)
        for k, fk in sparse:
            if k > m:
                break
            s += ((e + 1) * k - m) * fk * g[m - k]
        g[m] = s / m
    terms = tuple((v * e + Fraction(k, n), gk * lead) for k, gk in enumerate(g) if gk)
    return PuiseuxSeries._raw(terms, v * e + rel)


def ps_compose(a: PuiseuxSeries, g: PuiseuxSeries) -> PuiseuxSeries:
    """Substitute ``x -> g(x)`` into a; requires val(g) > 0."""
    w = g.valuation()
    if w == INF or w <= 0:
        raise ValueError("substituted series must have positive valuation")
    if a.is_exact_zero():
        return PuiseuxSeries()
    if not a.terms:
        return PuiseuxSeries([], order=a.order * w)
    n = a.ramification()
    G = g if n == 1 else ps_pow_rational(g, Fraction(1, n))
    target = a.order * w if a.order != INF else INF
    exps = [(int(e * n), c) for e, c in a.terms]
    kmin = min(k for k, _ in exps)
    kmax = max(k for k, _ in exps)

    def trunc(s: PuiseuxSeries) -> PuiseuxSeries:
        return s.truncate(target) if target != INF else s

    result = PuiseuxSeries._raw((), target)
    powers: dict[int, PuiseuxSeries] = {}
    if kmax >= 0:
        p = PuiseuxSeries.const(1)
        for k in range(0, kmax + 1):
            if k > 0:
                p = trunc(p * G)
            powers[k] = p
    if kmin < 0:
        Ginv = ps_inv(G)
        p = PuiseuxSeries.const(1)
        for k in range(1, -kmin + 1):
            p = trunc(p * Ginv)
            powers[-k] = p
    for k, c in exps:
        result = result + powers[k] * c
    return result
