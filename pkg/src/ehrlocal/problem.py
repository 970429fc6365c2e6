"""Problem files and result serialization (JSON, rationals as "p/q" strings).

Problem schema::

    {
      "dim": 2,
      "vertices": [["0", "0"], ["1", "0"], ["1", "1"], ["0", "1"]],
      "basis": [[1, 0], [0, 1]],                       optional
      "gram": [[1, 0], [0, 1]]  or  {"group": [[[0, 1], [-1, -1]]]},   optional
      "policy": "voronoi"  or  {"kind": "box", "shift": ["1/4", "0"]},  optional
      "options": {"t": 4, "t_max": 8, "seed": 0}      optional
    }
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from gmpy2 import mpq

from .domains import DomainPolicy
from .linalg import GeometryContext, Q, fmt, identity
from .mu import LocalFormulaReport, gram_from_group
from .polyhedra import Polytope

__all__ = ["ProblemError", "Problem", "parse_problem", "load_problem",
           "dump_report", "load_report", "parse_rational"]


class ProblemError(ValueError):
    """Invalid problem file; the message names the offending field."""


@dataclass
class Problem:
    ctx: GeometryContext
    polytope: Polytope
    policy: DomainPolicy
    options: dict = field(default_factory=dict)
    group: list = None


def parse_rational(s, where="value"):
    if isinstance(s, bool) or isinstance(s, float):
        raise ProblemError("%s: expected an integer or a rational string, got %r" % (where, s))
    if isinstance(s, int):
        return mpq(s)
    if not isinstance(s, str):
        raise ProblemError("%s: expected an integer or a rational string, got %r" % (where, s))
    try:
        return mpq(s.strip())
    except (ValueError, ZeroDivisionError):
        raise ProblemError("%s: malformed rational %r" % (where, s)) from None


def _matrix(M, n, where):
    if not isinstance(M, list) or len(M) != n:
        raise ProblemError("%s: expected a %dx%d matrix" % (where, n, n))
    out = []
    for i, row in enumerate(M):
        if not isinstance(row, list) or len(row) != n:
            raise ProblemError("%s[%d]: expected %d entries" % (where, i, n))
        out.append(tuple(parse_rational(x, "%s[%d][%d]" % (where, i, j)) for j, x in enumerate(row)))
    return tuple(out)


def parse_problem(data) -> Problem:
    """Validate a decoded problem dictionary."""
    if not isinstance(data, dict):
        raise ProblemError("top level: expected an object")
    verts = data.get("vertices")
    if not isinstance(verts, list) or not verts:
        raise ProblemError("vertices: expected a nonempty list")
    n = data.get("dim", len(verts[0]) if isinstance(verts[0], list) else None)
    if not isinstance(n, int) or n < 1:
        raise ProblemError("dim: expected a positive integer")
    pts = []
    for i, v in enumerate(verts):
        if isinstance(v, str):
            v = [x for x in v.split(",")]
        if not isinstance(v, list) or len(v) != n:
            raise ProblemError("vertices[%d]: expected %d coordinates" % (i, n))
        pts.append(tuple(parse_rational(x, "vertices[%d][%d]" % (i, j)) for j, x in enumerate(v)))

    basis = identity(n)
    if data.get("basis") is not None:
        basis = _matrix(data["basis"], n, "basis")
    group = None
    gram = identity(n)
    g = data.get("gram")
    if isinstance(g, dict):
        group = g.get("group")
        if not isinstance(group, list):
            raise ProblemError("gram.group: expected a list of integer matrices")
        try:
            mats = [_matrix(A, n, "gram.group[%d]" % k) for k, A in enumerate(group)]
            if any(x.denominator != 1 for A in mats for row in A for x in row):
                raise ProblemError("gram.group: matrices must be integral")
            group = [tuple(tuple(int(x) for x in row) for row in A) for A in mats]
            gram = gram_from_group(group, n)
        except ProblemError:
            raise
        except ValueError as exc:
            raise ProblemError("gram.group: %s" % exc) from None
    elif g is not None:
        gram = _matrix(g, n, "gram")
    try:
        ctx = GeometryContext(gram, basis)
    except ValueError as exc:
        raise ProblemError("gram/basis: %s" % exc) from None

    for i, p in enumerate(pts):
        c = ctx.to_lattice_coords(p)
        if any(x.denominator != 1 for x in c):
            raise ProblemError("vertices[%d]: %s is not a lattice point"
                               % (i, ", ".join(fmt(x) for x in p)))
    P = Polytope(pts)

    pol = data.get("policy", "voronoi")
    try:
        if isinstance(pol, str):
            policy = DomainPolicy(pol)
        elif isinstance(pol, dict):
            shift = pol.get("shift")
            if shift is not None:
                if not isinstance(shift, list) or len(shift) != n:
                    raise ProblemError("policy.shift: expected %d coordinates" % n)
                shift = tuple(parse_rational(x, "policy.shift[%d]" % j) for j, x in enumerate(shift))
            policy = DomainPolicy(pol.get("kind", "voronoi"), shift)
        else:
            raise ProblemError("policy: expected a string or an object")
    except ProblemError:
        raise
    except ValueError as exc:
        raise ProblemError("policy: %s" % exc) from None

    options = dict(data.get("options") or {})
    for k in ("t", "t_max", "seed"):
        if k in options and not isinstance(options[k], int):
            raise ProblemError("options.%s: expected an integer" % k)
    return Problem(ctx, P, policy, options, group)


def load_problem(path) -> Problem:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ProblemError("%s: %s" % (path, exc.strerror)) from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemError("%s: line %d column %d: %s" % (path, exc.lineno, exc.colno, exc.msg)) from None
    return parse_problem(data)


def dump_report(report: LocalFormulaReport, **extra) -> str:
    d = report.to_dict()
    d.update(extra)
    return json.dumps(d, indent=2)


def load_report(text):
    """Decode a report, turning every rational field back into mpq."""
    d = json.loads(text)
    for f in d["faces"]:
        f["vertices"] = [tuple(mpq(x) for x in v) for v in f["vertices"]]
        for k in ("mu", "vol", "contribution"):
            f[k] = mpq(f[k])
    d["coefficients"] = [mpq(c) for c in d["coefficients"]]
    d["gram"] = [[mpq(x) for x in row] for row in d["gram"]]
    if d["policy"].get("shift") is not None:
        d["policy"]["shift"] = [mpq(x) for x in d["policy"]["shift"]]
    return d
