"""Command-line front end: ``symschro <subcommand> [options]``.

Exit codes: 0 success, 1 a verification verdict failed, 2 usage error,
3 runtime error (one line on standard error).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from typing import List, Optional, Sequence

from .algebra import EtaElement, mul
from .errors import SymSchroError
from .families import FAMILIES, MODES, build_solution, energy_relation
from .formatting import dumps, fmt
from .ode import compare_with_closed_form, ivp_from_solution, solve_from_closed_form
from .residuals import (DEFAULT_TOLERANCE, DERIVATIVE_SOURCES, SYSTEMS, Grid, VerifyConfig,
                        all_passed, sol_support, verify)
from .trig import cs_eval

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2, 3


class UsageError(Exception):
    """Raised for malformed option values; reported like an argparse error."""


def _span(text: str):
    parts = text.split(":")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"span must look like x0:x1, got {text!r}")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError:
        raise argparse.ArgumentTypeError(f"span must look like x0:x1, got {text!r}") from None


def _element(text: str) -> EtaElement:
    parts = text.split(",")
    if len(parts) != 4:
        raise UsageError(f"an element is four comma-separated numbers, got {text!r}")
    try:
        return EtaElement(*(float(p) for p in parts))
    except ValueError:
        raise UsageError(f"an element is four comma-separated numbers, got {text!r}") from None


def _load_json(text: str, what: str):
    try:
        if text.startswith("@"):
            with open(text[1:], encoding="utf-8") as fh:
                return json.load(fh)
        return json.loads(text)
    except OSError as exc:
        raise UsageError(f"cannot read {what} file {text[1:]!r}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{what} is not valid JSON: {exc.msg}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", choices=("json", "csv"), default=None,
                        help="output format (default json)")
    common.add_argument("--out", metavar="PATH", help="write output to PATH instead of stdout")
    common.add_argument("--config", metavar="PATH",
                        help="JSON file with default tolerance, grid, rel_tol, derivatives, output")

    solution = argparse.ArgumentParser(add_help=False)
    solution.add_argument("--family", "--name", dest="family", required=True, choices=FAMILIES)
    solution.add_argument("--params", required=True, help="family parameters as JSON or @file")
    solution.add_argument("--delta", type=float, help="mixed-unit delta (overrides params)")
    solution.add_argument("--sigma", type=float, help="mixed-unit sigma (overrides params)")
    solution.add_argument("--mode", choices=MODES, help="paper or corrected reading")

    parser = argparse.ArgumentParser(
        prog="symschro",
        description="Mixed-unit Schroedinger solutions: evaluation, residual checks and ODE oracles.")
    sub = parser.add_subparsers(dest="command", metavar="subcommand", required=True)

    p = sub.add_parser("trig", parents=[common], help="generalized cosine/sine pair")
    p.add_argument("--S", type=float, required=True)
    p.add_argument("--eta", type=float, required=True)
    p.add_argument("--method", choices=("closed", "series"), default="closed")

    p = sub.add_parser("algebra", parents=[common], help="multiply two algebra elements")
    p.add_argument("--mul", required=True, metavar='"a,b,c,d x a,b,c,d"')

    p = sub.add_parser("energy", parents=[common], help="free-particle energy relation")
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--p", type=float, required=True)

    p = sub.add_parser("family", parents=[common, solution], help="evaluate a family on a grid")
    p.add_argument("--eval-grid", required=True, metavar="lo:hi:n")
    p.add_argument("--t", type=float, default=0.0)

    p = sub.add_parser("verify", parents=[common, solution], help="residual check of a family")
    p.add_argument("--grid", metavar="lo:hi:n")
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--system", choices=SYSTEMS, action="append",
                   help="system to check (repeatable; default: the family's own)")
    p.add_argument("--tol", type=float)
    p.add_argument("--derivatives", choices=DERIVATIVE_SOURCES)

    p = sub.add_parser("solve", parents=[common, solution], help="integrate the amplitude equation")
    p.add_argument("--span", type=_span, metavar="x0:x1")
    p.add_argument("--tol", type=float, help="relative tolerance (default 1e-9)")
    p.add_argument("--compare", action="store_true", help="report deviation from the closed form")
    return parser


_RANGE_FLAGS = ("--grid", "--eval-grid", "--span")


def _join_ranges(argv: Sequence[str]) -> List[str]:
    """Turn ``--grid -1:1:9`` into ``--grid=-1:1:9``.

    argparse would otherwise read a range with a negative lower end as an
    option flag.
    """
    out: List[str] = []
    it = iter(argv)
    for arg in it:
        if arg in _RANGE_FLAGS:
            value = next(it, None)
            out.append(arg if value is None else f"{arg}={value}")
        else:
            out.append(arg)
    return out


def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    argv = sys.argv[1:] if argv is None else argv
    return build_parser().parse_args(_join_ranges(argv))


# ------------------------------------------------------------ subcommands

def _solution(args):
    params = _load_json(args.params, "--params")
    if not isinstance(params, dict):
        raise UsageError("--params must be a JSON object")
    doc = {"family": args.family}
    if "params" in params:  # a full solution document
        doc.update(params)
        doc["family"] = args.family
    else:
        params = dict(params)
        for key in ("domain", "base", "mode", "plane"):
            if key in params:
                doc[key] = params.pop(key)
        doc["params"] = params
    plane = dict(doc.get("plane") or {})
    if args.delta is not None:
        plane["delta"] = args.delta
    if args.sigma is not None:
        plane["sigma"] = args.sigma
    if plane:
        doc["plane"] = plane
    if args.mode is not None:
        doc["mode"] = args.mode
    return build_solution(doc)


def _run_trig(args, cfg):
    pair = cs_eval(args.S, args.eta, args.method)
    row = {"S": args.S, "eta": args.eta, "c": pair.c, "s": pair.s,
           "identity_residual": pair.identity_residual()}
    return EXIT_OK, row, _csv(["S", "eta", "c", "s", "identity_residual"], [list(row.values())])


def _run_algebra(args, cfg):
    halves = args.mul.replace("X", "x").split("x")
    if len(halves) != 2:
        raise UsageError('--mul must look like "a,b,c,d x a,b,c,d"')
    x, y = (_element(h.strip()) for h in halves)
    z = mul(x, y)
    doc = {"x": list(x.components()), "y": list(y.components()), "product": list(z.components())}
    return EXIT_OK, doc, _csv(["a", "b", "c", "d"], [list(z.components())])


def _run_energy(args, cfg):
    rel = energy_relation(args.delta, args.sigma, args.mu, args.p)
    doc = {"E": rel.E, "branch": rel.branch}
    return EXIT_OK, doc, f"E,branch\n{fmt(rel.E)},{rel.branch}\n"


def _run_family(args, cfg):
    sol = _solution(args)
    grid = Grid.parse(args.eval_grid)
    grid.check_inside(sol_support(sol))
    rows = []
    for x in grid.points():
        rows.append([x, sol.A(x), sol.dA(x), sol.S(x, args.t), sol.V(x)])
    header = ["x", "A", "Aprime", "S", "V"]
    doc = {"solution": sol.to_dict(), "t": args.t, "systems": list(sol.systems),
           "points": [dict(zip(header, r)) for r in rows]}
    return EXIT_OK, doc, _csv(header, rows)


def _run_verify(args, cfg):
    sol = _solution(args)
    grid_text = args.grid or cfg.get("grid")
    config = VerifyConfig(
        tolerance=args.tol if args.tol is not None else float(cfg.get("tolerance", DEFAULT_TOLERANCE)),
        grid=Grid.parse(grid_text) if grid_text else None,
        systems=args.system,
        t=args.t,
        derivative_source=args.derivatives or cfg.get("derivatives", "analytic"),
    )
    reports = verify(sol, config)
    passed = all_passed(reports)
    doc = {"family": sol.family, "tolerance": config.tolerance,
           "derivatives": config.derivative_source, "verdict": "pass" if passed else "fail",
           "reports": [r.to_dict() for r in reports]}
    csv = "".join(f"# {r.system} {r.verdict}\n" + r.to_csv() for r in reports)
    return (EXIT_OK if passed else EXIT_FAIL), doc, csv


def _run_solve(args, cfg):
    sol = _solution(args)
    rel_tol = args.tol if args.tol is not None else float(cfg.get("rel_tol", 1e-9))
    span = args.span or sol.domain
    equation = ivp_from_solution(sol, span, rel_tol).equation
    num = solve_from_closed_form(sol, span, rel_tol=rel_tol)
    doc = {"family": sol.family, "equation": equation, "span": [float(span[0]), float(span[1])],
           "rel_tol": rel_tol, "steps": num.steps, "rejected": num.rejected}
    if args.compare:
        doc["max_rel_deviation"] = compare_with_closed_form(num, sol, Grid(span[0], span[1]).points())
    doc["nodes"] = [list(n) for n in num.nodes()]
    return EXIT_OK, doc, num.to_csv()


def _csv(header: List[str], rows) -> str:
    out = [",".join(header)]
    out += [",".join(fmt(v) for v in row) for row in rows]
    return "\n".join(out) + "\n"


_DISPATCH = {"trig": _run_trig, "algebra": _run_algebra, "energy": _run_energy,
             "family": _run_family, "verify": _run_verify, "solve": _run_solve}


def execute(args: argparse.Namespace) -> int:
    cfg = {}
    if args.config:
        cfg = _load_json("@" + args.config, "--config")
        if not isinstance(cfg, dict):
            raise UsageError("--config must hold a JSON object")
    code, doc, csv = _DISPATCH[args.command](args, cfg)
    text = csv if (args.output or cfg.get("output", "json")) == "csv" else dumps(doc) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else argv
    args = parser.parse_args(_join_ranges(argv))
    try:
        return execute(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"symschro: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BrokenPipeError:
        # reader went away (e.g. piped into head); silence the flush at exit
        sys.stdout = open(os.devnull, "w")
        return EXIT_OK
    except (SymSchroError, OSError) as exc:
        message = " ".join(str(exc).split())
        print(f"symschro: {type(exc).__name__}: {message}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
