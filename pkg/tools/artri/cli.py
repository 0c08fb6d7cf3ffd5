"""
artri command line
==================
Batch front end over a problem file: every command loads the file, runs one
computation and prints exact results (fractions as p/q).

Usage:
  python -m tools.artri data/fixtures/gamma_a5.artri info
  python -m tools.artri data/fixtures/gamma_a5.artri resolve tau-inv P1
  python -m tools.artri data/fixtures/gamma_a5.artri classify f_smonic
  python -m tools.artri data/fixtures/a3.artri knit --slice P1 P2 P3 --fwd 2 --bwd 1 --dot out/a3.dot
  python -m tools.artri data/fixtures/a3.artri run        # every line of [tasks]

Exit codes: 0 success, 1 domain error (ArtriError), 2 usage error
(bad flags, unknown command, unknown object name).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, TextIO, Union

from . import config
from .complexes import ChainMap, ProjComplex, cone, hom_K, minimize, signature
from .dot_report import component_table, emit_dot, save_json, save_text, write_reports
from .errors import ArtriError, InfiniteGlobalDimensionError, ShapeViolation, UsageError
from .knitting import Slice, ar_triangle_ending, completed_triangle, knit_component, tau_K, verify_ar
from .linalg import Field
from .problem_file import ProblemFile, load_problem, serialize_complex
from .quiver_rep import global_dimension, min_proj_resolution
from .shapes import classify, reduced_cone, standard_form, support_checks, theorem2_shape

logger = logging.getLogger("artri.cli")

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE = 0, 1, 2


def _sig(x: ProjComplex) -> str:
    return signature(x if x.is_minimal() else minimize(x).complex)


def _chain_map(pf: ProblemFile, name: str) -> ChainMap:
    f = pf.map(name)
    if f.degree != 0:
        raise UsageError(f"{name} has degree {f.degree}; a chain map is required")
    return f


# ═══════════════════════════════════════════════════════════════
# Commands
# ═══════════════════════════════════════════════════════════════

def cmd_info(pf: ProblemFile, args, out: TextIO) -> int:
    alg = pf.algebra
    print(f"field: {alg.field.name}", file=out)
    print(f"quiver: {alg.quiver.describe()}", file=out)
    print(f"relations: {len(alg.relations)}", file=out)
    print(f"dimension: {alg.dimension}", file=out)
    print(f"nilpotency bound: {alg.nilpotency}", file=out)
    print(f"fingerprint: {alg.fingerprint()}", file=out)
    try:
        print(f"global dimension: {global_dimension(alg)}", file=out)
    except InfiniteGlobalDimensionError as exc:
        print(f"global dimension: not certified ({exc})", file=out)
    print(f"modules: {' '.join(pf.modules) or '-'}", file=out)
    print(f"complexes: {' '.join(pf.complexes) or '-'}", file=out)
    print(f"maps: {' '.join(pf.maps) or '-'}", file=out)
    return EXIT_OK


def cmd_resolve(pf: ProblemFile, args, out: TextIO) -> int:
    x = min_proj_resolution(pf.module(args.module))
    print(signature(x), file=out)
    if args.show:
        print(serialize_complex(x, "R"), end="", file=out)
    return EXIT_OK


def cmd_classify(pf: ProblemFile, args, out: TextIO) -> int:
    f = _chain_map(pf, args.map)
    cls = classify(f)
    print(str(cls), file=out)
    if args.pattern and cls.pattern is not None:
        for n, flag in cls.pattern.to_dict().items():
            print(f"  {n}: {flag}", file=out)
    if args.support:
        for clause in support_checks(f, cls).clauses:
            state = "n/a" if not clause.applicable else ("pass" if clause.passed else "FAIL")
            print(f"  {clause.name}: {state} {clause.detail}".rstrip(), file=out)
    return EXIT_OK


def cmd_cone(pf: ProblemFile, args, out: TextIO) -> int:
    f = _chain_map(pf, args.map)
    if args.reduced:
        rc = reduced_cone(standard_form(f))
        z = rc.Z
        if args.verify:
            print(json.dumps(rc.verify(), sort_keys=True), file=out)
    else:
        z = minimize(cone(f)[0]).complex
    print(_sig(z), file=out)
    if args.show:
        print(serialize_complex(z, "Z"), end="", file=out)
    return EXIT_OK


def cmd_minimize(pf: ProblemFile, args, out: TextIO) -> int:
    z = minimize(pf.complex(args.complex)).complex
    print(signature(z), file=out)
    if args.show:
        print(serialize_complex(z, args.complex), end="", file=out)
    return EXIT_OK


def cmd_hom(pf: ProblemFile, args, out: TextIO) -> int:
    print(hom_K(pf.complex(args.source), pf.complex(args.target)).dimension, file=out)
    return EXIT_OK


def cmd_tau(pf: ProblemFile, args, out: TextIO) -> int:
    x = tau_K(pf.complex(args.complex), "tau_inv" if args.inverse else "tau")
    print(signature(x), file=out)
    if args.show:
        print(serialize_complex(x, "T"), end="", file=out)
    return EXIT_OK


def cmd_knit(pf: ProblemFile, args, out: TextIO) -> int:
    if pf.experimental and not args.experimental:
        raise UsageError(f"{pf.name} is marked experimental; pass --experimental to knit it")
    names = args.slice
    sl = Slice.build({n: pf.complex(n) for n in names}, pf.slice_arrows(names))
    comp = knit_component(sl, args.fwd, args.bwd, cross_check=not args.no_cross_check)
    text = emit_dot(comp)
    if args.dot == "-":
        print(text, end="", file=out)
    else:
        for pos in comp.positions():
            print(f"{pos[1]}@{pos[0]}\t{comp.names[pos]}", file=out)
        if args.dot:
            save_text(Path(args.dot), text)
            logger.info("wrote %s", args.dot)
    if args.csv:
        path = Path(args.csv)
        path.parent.mkdir(parents=True, exist_ok=True)
        component_table(comp).to_csv(path, index=False)
    if args.out_dir:
        write_reports(comp, Path(args.out_dir), pf.name)
    return EXIT_OK


def cmd_verify_ar(pf: ProblemFile, args, out: TextIO) -> int:
    """A map name checks its completed triangle; a complex name builds the AR triangle ending there."""
    others = list(pf.complexes.values())
    if args.triangle in pf.maps:
        t = completed_triangle(_chain_map(pf, args.triangle))
        report = verify_ar(t, others)
        u_class, v_class = classify(t.u), classify(t.v)
        try:
            template = theorem2_shape(u_class, t, v_class).template
        except ShapeViolation as exc:
            template = None
            logger.warning("%s", exc)
        record = {"start": _sig(t.X), "middle": _sig(t.Y), "end": _sig(t.Z), "u": str(u_class),
                  "v": str(v_class), "template": template, "report": report.to_dict()}
    else:
        rec = ar_triangle_ending(pf.complex(args.triangle), others=others)
        report = rec.report
        record = rec.to_dict()
    print(json.dumps(record, indent=2, ensure_ascii=False), file=out)
    if args.json:
        save_json(Path(args.json), record)
    if not report.ok:
        print(f"not an AR triangle: {', '.join(report.failures)}", file=sys.stderr)
        return EXIT_DOMAIN
    return EXIT_OK


def cmd_run(pf: ProblemFile, args, out: TextIO) -> int:
    if not pf.tasks:
        print("no [tasks] in the problem file", file=out)
        return EXIT_OK
    for task in pf.tasks:
        if task.argv and task.argv[0] == "run":
            raise UsageError(f"line {task.line}: 'run' cannot be nested")
        print(f"$ {task}", file=out)
        code = run(pf, task.argv, out)
        if code != EXIT_OK:
            return code
    return EXIT_OK


COMMANDS: Dict[str, Callable] = {
    "info": cmd_info,
    "resolve": cmd_resolve,
    "classify": cmd_classify,
    "cone": cmd_cone,
    "minimize": cmd_minimize,
    "hom": cmd_hom,
    "tau": cmd_tau,
    "knit": cmd_knit,
    "verify-ar": cmd_verify_ar,
    "run": cmd_run,
}


# ═══════════════════════════════════════════════════════════════
# Argument parsing and dispatch
# ═══════════════════════════════════════════════════════════════

def _add_commands(parser: argparse.ArgumentParser) -> None:
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    sub.add_parser("info", help="algebra dimension, quiver, global dimension")

    p = sub.add_parser("resolve", help="minimal projective resolution of a module")
    p.add_argument("module", nargs="+", help="module name or expression, e.g. tau-inv P1")
    p.add_argument("--show", action="store_true", help="print the complex")

    p = sub.add_parser("classify", help="smonic / sepic / sirreducible class of a map")
    p.add_argument("map")
    p.add_argument("--pattern", action="store_true", help="print the split pattern per degree")
    p.add_argument("--support", action="store_true", help="print the support clauses")

    p = sub.add_parser("cone", help="minimal mapping cone")
    p.add_argument("map")
    p.add_argument("--reduced", action="store_true", help="use the reduced cone of the standard form")
    p.add_argument("--verify", action="store_true", help="print the reduced-cone witness checks")
    p.add_argument("--show", action="store_true")

    p = sub.add_parser("minimize", help="minimal model of a complex")
    p.add_argument("complex")
    p.add_argument("--show", action="store_true")

    p = sub.add_parser("hom", help="dim Hom in the homotopy category")
    p.add_argument("source")
    p.add_argument("target")

    p = sub.add_parser("tau", help="AR translate of an indecomposable complex")
    p.add_argument("complex")
    p.add_argument("--inverse", action="store_true")
    p.add_argument("--show", action="store_true")

    p = sub.add_parser("knit", help="knit the AR component of a slice")
    p.add_argument("--slice", nargs="+", required=True, metavar="NAME")
    p.add_argument("--fwd", type=int, default=1)
    p.add_argument("--bwd", type=int, default=0)
    p.add_argument("--dot", default="", help="DOT output path, '-' for stdout")
    p.add_argument("--csv", default="", help="arrow table CSV path")
    p.add_argument("--out-dir", default="", help="write DOT, CSV and JSON reports here")
    p.add_argument("--no-cross-check", action="store_true", help="skip the Nakayama cross-check per mesh")
    p.add_argument("--experimental", action="store_true", help="allow fixtures marked experimental")

    p = sub.add_parser("verify-ar", help="verify an AR triangle")
    p.add_argument("triangle", help="map name (its completed triangle) or complex name (triangle ending there)")
    p.add_argument("--json", default="")

    sub.add_parser("run", help="run every line of [tasks]")


def build_parser(with_problem: bool = True) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="artri", description="Computations in the homotopy category "
                                     "of projective complexes over a quiver algebra.")
    if with_problem:
        parser.add_argument("problem", help="problem file (.artri)")
        parser.add_argument("--field", default="", help="override the field: rational | prime:<p>")
        parser.add_argument("--log-level", default=config.LOG_LEVEL)
    _add_commands(parser)
    return parser


def _dispatch(pf: ProblemFile, args, out: TextIO) -> int:
    try:
        return COMMANDS[args.command](pf, args, out)
    except UsageError as exc:
        print(f"artri: usage: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ArtriError as exc:
        print(f"artri: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


def run(problem: Union[ProblemFile, str, Path], argv: Sequence[str], out: Optional[TextIO] = None) -> int:
    """Run one command (argv without the problem path) against a loaded or on-disk problem file."""
    out = out or sys.stdout
    try:
        args = build_parser(with_problem=False).parse_args(list(argv))
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if not isinstance(problem, ProblemFile):
        try:
            problem = load_problem(problem)
        except OSError as exc:
            print(f"artri: usage: {exc}", file=sys.stderr)
            return EXIT_USAGE
        except ArtriError as exc:
            print(f"artri: {type(exc).__name__}: {exc}", file=sys.stderr)
            return EXIT_DOMAIN
    return _dispatch(problem, args, out)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    config.setup_logging(args.log_level)
    try:
        fld = Field.parse(args.field) if args.field else None
    except ValueError as exc:
        print(f"artri: usage: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        pf = load_problem(args.problem, field=fld)
    except OSError as exc:
        print(f"artri: usage: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ArtriError as exc:
        print(f"artri: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    return _dispatch(pf, args, sys.stdout)
