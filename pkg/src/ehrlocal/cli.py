"""Command line entry point ``ehrlocal``.

Exit codes: 0 success, 1 verification mismatch, 2 bad input,
3 window or resource failure.
"""
from __future__ import annotations

import argparse
import json
import sys

from .linalg import fmt
from .problem import ProblemError, dump_report, load_problem
from .regions import WindowError

EXIT_OK, EXIT_MISMATCH, EXIT_INPUT, EXIT_RESOURCE = 0, 1, 2, 3


def _emit(text, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def cmd_mu(prob, args):
    from .mu import local_formula
    rep = local_formula(prob.ctx, prob.policy, prob.polytope)
    _emit(dump_report(rep), args.out)
    return EXIT_OK


def cmd_ehrhart(prob, args):
    from .verify import count_points, ehrhart_interpolate
    E = ehrhart_interpolate(prob.ctx, prob.polytope)
    d = {"coefficients": [fmt(c) for c in reversed(E.coefficients)],
         "counts": [count_points(prob.ctx, prob.polytope, t) for t in range(E.degree + 1)]}
    _emit(json.dumps(d, indent=2), args.out)
    return EXIT_OK


def cmd_verify(prob, args):
    from .verify import verify_local_formula
    ok, rep, E = verify_local_formula(prob.ctx, prob.policy, prob.polytope)
    d = {"match": ok,
         "local_formula": [fmt(c) for c in reversed(rep.coefficients)],
         "ehrhart": [fmt(c) for c in reversed(E.coefficients)]}
    if not ok:
        d["diff"] = [{"degree": i, "local_formula": fmt(a), "ehrhart": fmt(b)}
                     for i, (a, b) in enumerate(zip(rep.coefficients, E.coefficients)) if a != b]
    _emit(json.dumps(d, indent=2), None)
    return EXIT_OK if ok else EXIT_MISMATCH


def cmd_tiling(prob, args):
    from .verify import verify_global_tiling
    t_max = args.tmax if args.tmax is not None else prob.options.get("t_max", 8)
    t = args.t if args.t is not None else prob.options.get("t")
    tried = []
    ts = [t] if t is not None else range(1, t_max + 1)
    ok, witness, used = False, None, None
    for s in ts:
        ok, witness = verify_global_tiling(prob.ctx, prob.policy, prob.polytope, s)
        tried.append(s)
        used = s
        if ok:
            break
    verdict = {"tiling": ok, "t": used, "tried": tried,
               "witness": None if witness is None else [fmt(x) for x in witness]}
    if prob.ctx.n == 2:
        from .svg import tiling_svg
        svg = tiling_svg(prob.ctx, prob.policy, prob.polytope, used)
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(svg)
            verdict["svg"] = args.out
    elif args.out:
        from .verify import _lattice_polytope, _tiling_pieces
        sctx, P = _lattice_polytope(prob.ctx, prob.polytope)
        _, X, pieces = _tiling_pieces(sctx, prob.policy, P, used)
        with open(args.out, "w") as fh:
            for z in sorted(pieces):
                for i, cells in pieces[z]:
                    for c in cells:
                        fh.write("%s face=%d %s\n" % (z, i, c.translate(z).dump()))
        verdict["listing"] = args.out
    _emit(json.dumps(verdict, indent=2), None)
    return EXIT_OK if ok else EXIT_MISMATCH


COMMANDS = {"mu": cmd_mu, "ehrhart": cmd_ehrhart, "verify": cmd_verify, "tiling": cmd_tiling}


def build_parser():
    p = argparse.ArgumentParser(prog="ehrlocal",
                                description="local formulas for Ehrhart coefficients from lattice regions")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("problem", help="problem JSON file")
    p.add_argument("--t", type=int, default=None, help="dilation factor for the tiling check")
    p.add_argument("--tmax", type=int, default=None, help="largest dilation tried when searching")
    p.add_argument("--out", default=None, help="output file (report JSON, SVG or listing)")
    p.add_argument("--seed", type=int, default=None,
                   help="accepted for reproducible scripting; all commands are deterministic")
    return p


def main(argv=None):
    if argv is None:
        argv = sys.argv[1:]
    args = build_parser().parse_args(argv)
    try:
        prob = load_problem(args.problem)
        return COMMANDS[args.command](prob, args)
    except ProblemError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_INPUT
    except (WindowError, MemoryError, RecursionError) as exc:
        print("resource failure: %s" % exc, file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
