"""Map-spec files and point literals.

Map spec grammar::

    spec   := "phi1" "=" expr ";" "phi2" "=" expr ";" option*
    option := name "=" value ";"
    expr   := "-" expr | sum
    sum    := prod (("+" | "-") (prod | "-" expr))*
    prod   := power (("*" | "/") power)*
    power  := atom ("^" exponent)?
    atom   := number | "x" | "y" | "(" expr ")" | "O" "(" "x" "^" exponent ")"

Unary minus binds loosest: ``-x + 1`` means ``-(x + 1)``.  ``#`` starts a
comment that runs to the end of the line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .berktree import INFTY, DiskPoint, Direction, TypeI, TypeIV
from .errors import SpecSyntaxError
from .ratcalc import RationalFunc, YPoly
from .skewmap import SkewProduct, mk_skew
from .valcore import INF, PuiseuxSeries, ValExp, fmt_q, ps_pow_rational

OPTIONS = {"order": int, "bound": int, "theta": bool}

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^();=,\[\]]))"
)


@dataclass(frozen=True)
class Tok:
    kind: str
    text: str
    pos: int


def tokenize(text: str) -> list[Tok]:
    toks, i = [], 0
    while i < len(text):
        if text[i].isspace():
            i += 1
            continue
        if text[i] == "#":
            nl = text.find("\n", i)
            i = len(text) if nl < 0 else nl
            continue
        m = _TOKEN.match(text, i)
        if not m or m.end() == i:
            raise _err(text, i, f"unexpected character {text[i]!r}")
        kind = m.lastgroup
        toks.append(Tok(kind, m.group(kind), m.start(kind)))
        i = m.end()
    toks.append(Tok("eof", "", len(text)))
    return toks


def _err(text: str, pos: int, msg: str) -> SpecSyntaxError:
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return SpecSyntaxError(msg, line, col)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0

    # token helpers
    @property
    def cur(self) -> Tok:
        return self.toks[self.i]

    def error(self, msg: str, tok: Tok | None = None) -> SpecSyntaxError:
        tok = tok or self.cur
        return _err(self.text, tok.pos, msg)

    def accept(self, text: str) -> Tok | None:
        if self.cur.text == text and self.cur.kind != "eof":
            tok = self.cur
            self.i += 1
            return tok
        return None

    def expect(self, text: str) -> Tok:
        tok = self.accept(text)
        if tok is None:
            got = self.cur.text or "end of input"
            raise self.error(f"expected {text!r}, found {got!r}")
        return tok

    def at_eof(self) -> bool:
        return self.cur.kind == "eof"

    # expressions
    def expr(self):
        if self.accept("-"):
            return _neg(self.expr())
        return self.sum()

    def sum(self):
        val = self.prod()
        while self.cur.text in ("+", "-"):
            op = self.cur.text
            self.i += 1
            rhs = _neg(self.expr()) if self.accept("-") else self.prod()
            val = val + rhs if op == "+" else val - rhs
        return val

    def prod(self):
        val = self.power()
        while self.cur.text in ("*", "/"):
            op = self.cur
            self.i += 1
            rhs = self.power()
            if op.text == "*":
                val = _mul(val, rhs)
            else:
                try:
                    val = _div(val, rhs)
                except ZeroDivisionError:
                    raise self.error("division by zero", op) from None
        return val

    def power(self):
        start = self.cur
        base = self.atom()
        if not self.accept("^"):
            return base
        etok = self.cur
        e = self.exponent()
        try:
            return _pow(base, e)
        except ValueError as exc:
            raise self.error(str(exc), etok) from None
        except ZeroDivisionError:
            raise self.error("zero to a negative power", start) from None

    def exponent(self) -> Fraction:
        if self.accept("("):
            neg = bool(self.accept("-"))
            e = self.rational()
            self.expect(")")
            return -e if neg else e
        if self.cur.kind != "num":
            raise self.error("expected an exponent")
        return Fraction(int(self.advance().text))

    def rational(self) -> Fraction:
        if self.cur.kind != "num":
            raise self.error("expected a number")
        r = Fraction(int(self.advance().text))
        if self.accept("/"):
            if self.cur.kind != "num":
                raise self.error("expected a denominator")
            d = int(self.advance().text)
            if d == 0:
                raise self.error("zero denominator")
            r /= d
        return r

    def advance(self) -> Tok:
        tok = self.cur
        self.i += 1
        return tok

    def atom(self):
        tok = self.cur
        if tok.kind == "num":
            self.i += 1
            return PuiseuxSeries.const(int(tok.text))
        if tok.text == "x":
            self.i += 1
            return PuiseuxSeries.x()
        if tok.text == "y":
            self.i += 1
            return RationalFunc.y()
        if tok.text == "O":
            self.i += 1
            self.expect("(")
            self.expect("x")
            self.expect("^")
            e = self.exponent()
            self.expect(")")
            return PuiseuxSeries([], order=e)
        if self.accept("("):
            val = self.expr()
            self.expect(")")
            return val
        raise self.error(f"unexpected {tok.text or 'end of input'!r}")


# arithmetic on PuiseuxSeries | RationalFunc, staying in series where possible


def _neg(a):
    return -a


def _mul(a, b):
    if isinstance(a, PuiseuxSeries) and isinstance(b, RationalFunc):
        return b * a
    return a * b


def _monomial(s: PuiseuxSeries) -> bool:
    return s.is_exact() and len(s.terms) == 1


def _div(a, b):
    if isinstance(b, PuiseuxSeries):
        if b.is_exact_zero():
            raise ZeroDivisionError
        if not _monomial(b):
            # keep the quotient exact instead of expanding 1/b
            return RationalFunc.coerce(a) / RationalFunc.const(b)
        if isinstance(a, PuiseuxSeries):
            return a / b
        return a * (1 / b)
    if isinstance(a, PuiseuxSeries):
        a = RationalFunc.const(a)
    if b.num.is_zero():
        raise ZeroDivisionError
    return a / b


def _pow(base, e: Fraction):
    if isinstance(base, RationalFunc) and base.num.degree <= 0 and base.den.degree == 0:
        base = _y_free(base)
    if isinstance(base, RationalFunc):
        if e.denominator != 1:
            raise ValueError("only integer powers of expressions in y")
        n = e.numerator
        if n < 0:
            if base.num.is_zero():
                raise ZeroDivisionError
            return RationalFunc(base.den, base.num) ** (-n)
        return base**n
    if base.is_exact_zero() and e <= 0:
        raise ZeroDivisionError
    if e < 0 and e.denominator == 1 and not _monomial(base):
        return 1 / RationalFunc.const(base) ** (-e.numerator)
    return ps_pow_rational(base, e)


def _as_function(v) -> RationalFunc:
    return v if isinstance(v, RationalFunc) else RationalFunc.const(v)


def _y_free(f: RationalFunc) -> PuiseuxSeries:
    if f.num.is_zero():
        return PuiseuxSeries()
    return f.num.coeffs[0] / f.den.coeffs[0]


def _as_series(v, p: _Parser, tok: Tok) -> PuiseuxSeries:
    if isinstance(v, PuiseuxSeries):
        return v
    if v.num.degree <= 0 and v.den.degree == 0:
        return _y_free(v)
    c = v.constant_value()
    if c is None:
        raise p.error("expected an expression in x only", tok)
    return c


# ---------------------------------------------------------------------------
# map specs


@dataclass
class MapSpec:
    phi1_src: str
    phi2_src: str
    phi1: PuiseuxSeries
    phi2: RationalFunc
    options: dict = field(default_factory=dict)

    def skew(self) -> SkewProduct:
        return mk_skew(self.phi1, self.phi2)


def parse_spec_text(text: str) -> MapSpec:
    """Parse a map spec without building the skew product."""
    p = _Parser(text)
    srcs, vals = {}, {}
    for name in ("phi1", "phi2"):
        p.expect(name)
        p.expect("=")
        start = p.cur
        v = p.expr()
        end = p.cur
        srcs[name] = text[start.pos : end.pos].strip()
        vals[name] = _as_series(v, p, start) if name == "phi1" else _as_function(v)
        p.expect(";")
    options = {}
    while not p.at_eof():
        tok = p.cur
        if tok.kind != "name" or tok.text not in OPTIONS:
            raise p.error(f"unknown option {tok.text!r}")
        p.i += 1
        p.expect("=")
        val = p.advance()
        kind = OPTIONS[tok.text]
        if kind is bool:
            if val.text not in ("true", "false", "on", "off"):
                raise p.error("expected true or false", val)
            options[tok.text] = val.text in ("true", "on")
        else:
            if val.kind != "num":
                raise p.error("expected an integer", val)
            options[tok.text] = int(val.text)
        p.expect(";")
    return MapSpec(srcs["phi1"], srcs["phi2"], vals["phi1"], vals["phi2"], options)


def parse_spec(text: str) -> tuple[MapSpec, SkewProduct]:
    spec = parse_spec_text(text)
    return spec, spec.skew()


def render_spec(spec: MapSpec) -> str:
    lines = [
        f"phi1 = {RationalFunc.const(spec.phi1).render()};",
        f"phi2 = {spec.phi2.render()};",
    ]
    for k in OPTIONS:
        if k in spec.options:
            v = spec.options[k]
            lines.append(f"{k} = {str(v).lower() if isinstance(v, bool) else v};")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# points and directions


class _PointParser(_Parser):
    def series(self) -> PuiseuxSeries:
        tok = self.cur
        return _as_series(self.expr(), self, tok)

    def valexp(self) -> ValExp:
        """``r``, ``r+s*sqrt2``, ``r-s*sqrt2`` or ``theta`` multiples."""
        neg = bool(self.accept("-"))
        if self.cur.text in ("sqrt2", "theta"):
            self.i += 1
            return ValExp(0, -1 if neg else 1)
        rat = self.rational()
        rat = -rat if neg else rat
        irr = Fraction(0)
        if self.cur.text in ("+", "-"):
            sign = -1 if self.advance().text == "-" else 1
            if self.cur.text in ("sqrt2", "theta"):
                self.i += 1
                irr = Fraction(sign)
            else:
                irr = sign * self.rational()
                self.expect("*")
                if not (self.accept("sqrt2") or self.accept("theta")):
                    raise self.error("expected sqrt2")
        elif self.accept("*"):
            if not (self.accept("sqrt2") or self.accept("theta")):
                raise self.error("expected sqrt2")
            rat, irr = Fraction(0), rat
        return ValExp(rat, irr)

    def disk(self) -> DiskPoint:
        self.expect("zeta")
        self.expect("(")
        c = self.series()
        self.expect(",")
        r = self.valexp()
        self.expect(")")
        return DiskPoint(c, r)

    def point(self):
        tok = self.cur
        if self.accept("infty"):
            return INFTY
        if tok.text == "zeta":
            return self.disk()
        if self.accept("typeI"):
            self.expect("(")
            c = self.series()
            self.expect(")")
            return TypeI(c)
        if self.accept("typeIV"):
            self.expect("(")
            self.expect("[")
            disks = [self.disk()]
            while self.accept(","):
                disks.append(self.disk())
            self.expect("]")
            self.expect(")")
            try:
                return TypeIV(tuple(disks))
            except ValueError as exc:
                raise self.error(str(exc), tok) from None
        raise self.error("expected zeta(...), typeI(...), typeIV([...]) or infty")

    def finish(self):
        if not self.at_eof():
            raise self.error(f"trailing input {self.cur.text!r}")


def parse_point(text: str):
    p = _PointParser(text)
    z = p.point()
    p.finish()
    return z


def parse_points(text: str) -> list:
    p = _PointParser(text)
    pts = [p.point()]
    while p.accept(","):
        pts.append(p.point())
    p.finish()
    return pts


def parse_function(text: str) -> RationalFunc:
    p = _Parser(text)
    v = p.expr()
    if not p.at_eof():
        raise p.error(f"trailing input {p.cur.text!r}")
    return _as_function(v)


def parse_direction(text: str, at: DiskPoint) -> Direction:
    p = _PointParser(text)
    if p.accept("outward"):
        p.finish()
        return Direction.outward(at)
    p.expect("residue")
    p.expect("(")
    b = p.series()
    p.expect(")")
    p.finish()
    try:
        return Direction.residue(at, b)
    except ValueError as exc:
        raise _err(text, 0, str(exc)) from None


def render_exp(e) -> str:
    if e == INF:
        return "inf"
    return str(ValExp.coerce(e)) if not isinstance(e, ValExp) else str(e)


__all__ = [
    "MapSpec",
    "parse_spec",
    "parse_spec_text",
    "render_spec",
    "parse_point",
    "parse_points",
    "parse_function",
    "parse_direction",
    "render_exp",
    "fmt_q",
]
