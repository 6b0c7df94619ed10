"""Command-line front end: ``skewberk <command> --map FILE ...`` prints one JSON object."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import dynclass
from .berktree import DiskPoint, TypeI, diam, hyp_dist, join, leq, render_point
from .errors import Indeterminate, PrecisionLoss, SkewBerkError, SpecSyntaxError
from .parser import parse_direction, parse_function, parse_point, parse_points, parse_spec_text, render_exp
from .ratcalc import Disk, gauss_norm, oo
from .skewmap import (
    apply_point,
    bad_directions,
    good_reduction_test,
    local_degree,
    reduction_at,
    tangent_map,
)
from .valcore import default_order, fmt_q, render_series, set_default_order

EXIT_OK, EXIT_ERROR, EXIT_INDETERMINATE = 0, 1, 2


class Undecided(Exception):
    """Carries a partial result whose verdict could not be certified."""

    def __init__(self, reason: str, result: dict | None = None):
        super().__init__(reason)
        self.result = result or {}


def q_str(v) -> str:
    return fmt_q(Fraction(v))


def series_str(s) -> str:
    return "infty" if s is oo else render_series(s)


# ---------------------------------------------------------------------------
# DOT output


def _closure(points: list) -> list:
    nodes = {}
    for p in points:
        nodes[render_point(p)] = p
    changed = True
    while changed:
        changed = False
        cur = list(nodes.values())
        for i, a in enumerate(cur):
            for b in cur[i + 1 :]:
                j = join(a, b)
                key = render_point(j)
                if key not in nodes:
                    nodes[key] = j
                    changed = True
    return [nodes[k] for k in sorted(nodes)]


def emit_dot(points: list) -> str:
    """The finite subtree spanned by the points, as an undirected DOT graph."""
    if not points:
        raise ValueError("need at least one point")
    nodes = _closure(points)
    names = {render_point(p): f"n{i}" for i, p in enumerate(nodes)}
    lines = ["graph hull {"]
    for p in nodes:
        lines.append(f'  {names[render_point(p)]} [label="{render_point(p)}"];')
    for p in nodes:
        ups = [u for u in nodes if u is not p and leq(p, u) and not leq(u, p)]
        if not ups:
            continue
        parent = next(u for u in ups if all(leq(u, w) for w in ups))
        if isinstance(p, TypeI) or isinstance(parent, TypeI):
            label = "inf"
        else:
            label = render_exp(hyp_dist(p, parent))
        lines.append(f'  {names[render_point(parent)]} -- {names[render_point(p)]} [label="{label}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# commands


def _point(a, text: str):
    z = parse_point(text)
    _check_theta(a, [z])
    return z


def _check_theta(a, pts):
    if getattr(a, "theta", True):
        return
    for z in pts:
        r = getattr(z, "radius_exp", None)
        if r is not None and not r.is_rational():
            raise SkewBerkError("irrational radii are disabled by theta = false")


def _need_disk(z):
    if not isinstance(z, DiskPoint):
        raise SkewBerkError("this command needs a zeta(...) point")
    return z


def _cycle(phi, z, max_n):
    rep = dynclass.detect_cycle(phi, z, max_n)
    if isinstance(rep, dynclass.NotPeriodicWithin):
        raise Undecided(f"not periodic within {max_n} steps", {"periodic": False, "bound": max_n})
    if rep.preperiod:
        raise SkewBerkError(f"point is strictly preperiodic (preperiod {rep.preperiod})")
    return rep


def cmd_eval(a, phi):
    return {"image": render_point(apply_point(phi, _point(a, a.point)))}


def cmd_orbit(a, phi):
    orb = dynclass.orbit(phi, _point(a, a.point), a.steps)
    out = {"orbit": [render_point(p) for p in orb.points]}
    if orb.stopped:
        raise Undecided(orb.stopped, out)
    return out


def cmd_cycle(a, phi):
    rep = dynclass.detect_cycle(phi, _point(a, a.point), a.max)
    if isinstance(rep, dynclass.NotPeriodicWithin):
        return {"periodic": False, "bound": a.max}
    return {
        "periodic": True,
        "period": rep.period,
        "preperiod": rep.preperiod,
        "points": [render_point(p) for p in rep.points],
        "degree_product": rep.degree_product,
        "multiplier": q_str(rep.multiplier),
    }


def cmd_classify(a, phi):
    z = _point(a, a.point)
    if isinstance(z, TypeI):
        c = dynclass.classify_fixed_typeI(phi, z.value)
        out = {"class": c.cls, "dq": q_str(c.dq)}
        if c.multiplier_exp is not None:
            out["multiplier_exp"] = q_str(c.multiplier_exp)
        return out
    rep = _cycle(phi, z, a.max)
    h = dynclass.classify_fixed_hyperbolic(phi, rep)
    return {
        "class": h.cls,
        "numeric": h.numeric,
        "multiplier": q_str(h.multiplier),
        "period": rep.period,
        "directions": [
            {"direction": d.where, "degree": d.degree, "multiplier": q_str(d.multiplier)} for d in h.directions
        ],
    }


def cmd_julia_test(a, phi):
    z = _point(a, a.point)
    if isinstance(z, TypeI):
        r = dynclass.classify_repelling_typeI(phi, z.value)
        out = {"verdict": r.verdict, "class": r.cls.cls}
        if r.caveat:
            out["caveat"] = r.caveat
        return out
    rep = _cycle(phi, z, a.max)
    v = dynclass.julia_test(phi, rep, bound=a.bound)
    out = {"verdict": v.verdict, "multiplier": q_str(v.multiplier)}
    if a.explain:
        out["reason"] = v.reason
    if v.verdict == "indeterminate":
        raise Undecided(v.reason, out)
    return out


def cmd_local_degree(a, phi):
    return {"degree": local_degree(phi, _point(a, a.point))}


def cmd_tangent(a, phi):
    z = _need_disk(_point(a, a.point))
    v = parse_direction(a.dir, z)
    w = tangent_map(phi, z, v)
    return {"image": w.render(), "at": render_point(w.at)}


def cmd_reduction(a, phi):
    z = _need_disk(_point(a, a.point))
    return {"reduction": reduction_at(phi, z).render()}


def cmd_bad_dirs(a, phi):
    bd = bad_directions(phi, _need_disk(_point(a, a.point)))
    out = {"bad_directions": [v.render() for v in bd.directions], "unresolved": list(bd.unresolved)}
    if bd.indeterminate:
        raise Undecided("some bad directions have irrational residues", out)
    return out


def cmd_good_reduction(a, phi):
    return {"good_reduction": good_reduction_test(phi)}


def cmd_attractor(a, phi):
    if a.disk:
        z = _need_disk(_point(a, a.disk))
        fixed = dynclass.attracting_typeI_from_disk(phi, Disk(z.center, z.radius_exp, closed=True))
        return {"fixed_point": series_str(fixed)}
    r = dynclass.contraction_attractor(phi, Fraction(a.tol), a.max)
    return {"point": render_point(r.point), "exact": r.exact, "steps": r.steps}


def cmd_exceptional(a, phi):
    ex = dynclass.exceptional_typeI(phi)
    out = {"exceptional": [render_point(p) for p in ex.points]}
    if ex.indeterminate:
        raise Undecided(ex.note or "unresolved candidates", out)
    return out


def cmd_norm(a, phi):
    f = parse_function(a.func)
    z = _need_disk(_point(a, a.point))
    return {"norm_exp": render_exp(gauss_norm(f, z.center, z.radius_exp))}


def cmd_dist(a, phi):
    return {"distance": render_exp(hyp_dist(_point(a, a.p1), _point(a, a.p2)))}


def cmd_diam(a, phi):
    return {"diam_exp": render_exp(diam(_point(a, a.point)))}


def _checked_points(a):
    pts = parse_points(a.points)
    _check_theta(a, pts)
    return pts


def cmd_tree_dot(a, phi):
    return {"dot": emit_dot(_checked_points(a))}


# commands that do not read a map
NO_MAP = {"norm", "dist", "diam", "tree-dot"}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="skewberk", description="Skew products on the Berkovich projective line.")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, *opts):
        p = sub.add_parser(name)
        p.set_defaults(handler=fn)
        p.add_argument("--map", help="map spec file, or - for standard input")
        p.add_argument("--order", type=int, help="truncation order (overrides the map file)")
        for o in opts:
            o(p)
        return p

    point = lambda p: p.add_argument("--point", required=True)
    maxn = lambda p: p.add_argument("--max", type=int, default=64)
    add("eval", cmd_eval, point)
    add("orbit", cmd_orbit, point, lambda p: p.add_argument("--steps", type=int, default=10))
    add("cycle", cmd_cycle, point, maxn)
    add("classify", cmd_classify, point, maxn)
    add(
        "julia-test",
        cmd_julia_test,
        point,
        maxn,
        lambda p: p.add_argument("--bound", type=int),
        lambda p: p.add_argument("--explain", action="store_true"),
    )
    add("local-degree", cmd_local_degree, point)
    add("tangent", cmd_tangent, point, lambda p: p.add_argument("--dir", required=True))
    add("reduction", cmd_reduction, point)
    add("bad-dirs", cmd_bad_dirs, point)
    add("good-reduction", cmd_good_reduction)
    add(
        "attractor",
        cmd_attractor,
        lambda p: p.add_argument("--disk"),
        lambda p: p.add_argument("--tol", default="1/1000000"),
        lambda p: p.add_argument("--max", type=int, default=200),
    )
    add("exceptional", cmd_exceptional)
    add("norm", cmd_norm, point, lambda p: p.add_argument("--func", required=True))
    add("dist", cmd_dist, lambda p: p.add_argument("--p1", required=True), lambda p: p.add_argument("--p2", required=True))
    add("diam", cmd_diam, point)
    tree = add("tree-dot", cmd_tree_dot, lambda p: p.add_argument("--points", required=True))
    tree.add_argument("--raw", action="store_true", help="print the DOT text instead of JSON")
    return ap


def _read_map(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _order_json():
    t = Fraction(default_order())
    return t.numerator if t.denominator == 1 else fmt_q(t)


def _dump(doc: dict) -> str:
    return json.dumps(doc, separators=(",", ":"))


def run_command(argv: list[str]) -> tuple[int, str]:
    """Run one command; returns (exit code, output text)."""
    args = build_parser().parse_args(argv)
    prev = default_order()
    try:
        spec, phi = None, None
        if args.map:
            spec = parse_spec_text(_read_map(args.map))
        elif args.command not in NO_MAP:
            raise SkewBerkError("--map is required for this command")
        opts = spec.options if spec else {}
        order = args.order or opts.get("order")
        if order:
            set_default_order(order)
        if spec:
            phi = spec.skew()
        args.theta = opts.get("theta", True)
        if getattr(args, "bound", "absent") is None:
            args.bound = opts.get("bound", dynclass.DEFAULT_BOUND)
        try:
            result = args.handler(args, phi)
            status, code = "ok", EXIT_OK
        except (Undecided, Indeterminate, PrecisionLoss) as exc:
            result = dict(getattr(exc, "result", {}) or {})
            result["reason"] = str(exc)
            status, code = "indeterminate", EXIT_INDETERMINATE
        if args.command == "tree-dot" and args.raw and status == "ok":
            return code, result["dot"]
        doc = dict(result)
        doc["status"] = status
        doc["precision_order"] = _order_json()
        return code, _dump(doc) + "\n"
    except SpecSyntaxError as exc:
        err = {"type": "SyntaxError", "message": exc.msg_text, "line": exc.line, "column": exc.column}
        return EXIT_ERROR, _dump({"error": err, "status": "error", "precision_order": _order_json()}) + "\n"
    except (SkewBerkError, ValueError, TypeError, ZeroDivisionError, OSError) as exc:
        err = {"type": type(exc).__name__, "message": str(exc)}
        return EXIT_ERROR, _dump({"error": err, "status": "error", "precision_order": _order_json()}) + "\n"
    finally:
        set_default_order(prev)


def main(argv: list[str] | None = None) -> int:
    code, text = run_command(sys.argv[1:] if argv is None else argv)
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
