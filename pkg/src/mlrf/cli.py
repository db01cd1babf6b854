"""Command line front end.

Exit codes: 0 ranking function found or verification passed, 1 loop is
nonterminating, 2 unknown (or a failed verification), 3 input error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .analysis import ENGINES, MODES, analyze_loop, witness_checks
from .displacement import depth_decision
from .engine import MLRF_FOUND, NONTERMINATING, Limits, Verdict, dellrf_membership
from .loop import build_transition_polyhedron
from .parser import LoopFile, LoopParseError, parse_loop_file
from .polyhedron import format_linear
from .serialize import VerdictDocument, q
from .verification import NondeterministicLoop, simulate

EXIT_OK, EXIT_NONTERM, EXIT_UNKNOWN, EXIT_INPUT = 0, 1, 2, 3

log = logging.getLogger("mlrf")


class InputError(Exception):
    pass


def _read_loop(path: str) -> LoopFile:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(f"{path}: {exc}") from None
    try:
        return parse_loop_file(text)
    except LoopParseError as exc:
        raise InputError(f"{path}: {exc}") from None
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None


def _limits(args, lf: LoopFile) -> Limits:
    depth = args.depth_bound if args.depth_bound is not None else (lf.depth_bound or 10)
    iters = args.max_iters if args.max_iters is not None else (lf.max_iters or 50)
    try:
        return Limits(depth, iters)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _describe(doc: VerdictDocument, label: str) -> list:
    names = doc.names
    lines = [f"{label}: {doc.kind}"]
    if doc.kind == MLRF_FOUND:
        lines[0] += f" depth {doc.depth}"
        for i, f in enumerate(doc.mlrf_value().components, start=1):
            lines.append(f"  rho{i} = {f.format(names)}")
    rec = doc.recurrent_value()
    if rec is not None:
        lines.append("  recurrent states:")
        lines += [f"    {r}" for r in rec.states.format(names)]
        lines.append("  recurrent transitions:")
        lines += [f"    {r}" for r in rec.transitions.format(names + [f"{v}'" for v in names])]
    if doc.integer_witness is not None:
        lines.append("  integer witness: (" + ", ".join(doc.integer_witness) + ")")
    if doc.reason:
        lines.append(f"  reason: {doc.reason}")
    lines.append(f"  iterations: {doc.iterations}")
    if doc.cross_check is not None:
        lines.append(f"  displacement cross-check: {'agrees' if doc.cross_check else 'DISAGREES'}")
    if doc.checks:
        lines.append("  checks: " + ", ".join(f"{k}={'ok' if v else 'FAILED'}" for k, v in sorted(doc.checks.items())))
    return lines


def _analyze_one(path: str, args):
    lf = _read_loop(path)
    mode = args.mode or lf.mode or "rational"
    analysis = analyze_loop(lf.loop, _limits(args, lf), mode, args.engine)
    doc = VerdictDocument.from_analysis(analysis, source=Path(path).name, seed=args.seed)
    if args.report:
        from .report import write_depth_profile, write_trace

        out = Path(args.report)
        if getattr(args, "_batch", False):
            out = out / Path(path).stem
        write_trace(out, doc.trace, f"{Path(path).name}: refinement trace")
        write_depth_profile(out, doc.depth_profile, f"{Path(path).name}: depth profile")
    return doc, analysis.exit_code


def cmd_analyze(args) -> int:
    target = Path(args.loop)
    if target.is_dir():
        files = sorted(str(p) for p in target.iterdir() if p.suffix == ".slc")
        if not files:
            raise InputError(f"{target}: no .slc files")
        args._batch = True
        worst = EXIT_OK
        for f in files:
            try:
                doc, code = _analyze_one(f, args)
                print(doc.to_json())
            except InputError as exc:
                print(json.dumps({"source": Path(f).name, "error": str(exc)}, sort_keys=True))
                code = EXIT_INPUT
            worst = max(worst, code)
        return worst
    doc, code = _analyze_one(args.loop, args)
    if args.json:
        print(doc.to_json(indent=2))
    else:
        print("\n".join(_describe(doc, target.name)))
    return code


def cmd_depth(args) -> int:
    lf = _read_loop(args.loop)
    Q = build_transition_polyhedron(lf.loop)
    profile = []
    found = None
    for d in range(args.max_depth + 1):
        ranked = depth_decision(Q, d)
        profile.append(ranked)
        if ranked and found is None:
            found = d
            if not args.full:
                break
    if args.json:
        print(json.dumps({"source": Path(args.loop).name, "profile": profile, "min_depth": found}, sort_keys=True))
    else:
        print("depth\tranked")
        for d, b in enumerate(profile):
            print(f"{d}\t{int(b)}")
        print(f"# minimal depth: {found if found is not None else 'none up to ' + str(args.max_depth)}")
    if args.report:
        from .report import write_depth_profile

        write_depth_profile(args.report, profile, f"{Path(args.loop).name}: depth profile")
    return EXIT_OK if found is not None else EXIT_UNKNOWN


def cmd_dellrf(args) -> int:
    lf = _read_loop(args.loop)
    if args.b < 1:
        raise InputError("--b must be positive")
    Q = build_transition_polyhedron(lf.loop)
    rho = dellrf_membership(Q, args.b)
    if args.json:
        out = None if rho is None else {"coeffs": [q(c) for c in rho.coeffs], "const": q(rho.const)}
        print(json.dumps({"source": Path(args.loop).name, "b": args.b, "lrf": out}, sort_keys=True))
    elif rho is None:
        print(f"no linear ranking function after restricting to traces of length {args.b}")
    else:
        print(f"rho = {rho.format(lf.loop.names)}")
    return EXIT_OK if rho is not None else EXIT_UNKNOWN


def verify_document(lf: LoopFile, doc: VerdictDocument) -> dict:
    """Re-check every witness in ``doc`` against the loop."""
    if list(doc.names) != list(lf.loop.names):
        raise InputError("document variables do not match the loop")
    Q = build_transition_polyhedron(lf.loop)
    v = Verdict(
        doc.kind,
        mlrf=doc.mlrf_value(),
        recurrent=doc.recurrent_value(),
        integer_witness=None if doc.integer_witness is None else tuple(Fraction(s) for s in doc.integer_witness),
    )
    checks = witness_checks(Q, v)
    if doc.kind == MLRF_FOUND:
        checks["witness_present"] = v.mlrf is not None and v.mlrf.depth == doc.depth
    elif doc.kind == NONTERMINATING:
        checks["witness_present"] = v.recurrent is not None and (doc.mode != "integer" or v.integer_witness is not None)
    return checks


def cmd_verify(args) -> int:
    lf = _read_loop(args.loop)
    try:
        doc = VerdictDocument.from_json(Path(args.document).read_text(encoding="utf-8"))
    except (OSError, ValueError, TypeError, KeyError) as exc:
        raise InputError(f"{args.document}: {exc}") from None
    checks = verify_document(lf, doc)
    ok = all(checks.values())
    if args.json:
        print(json.dumps({"kind": doc.kind, "checks": checks, "verified": ok}, sort_keys=True))
    else:
        if not checks:
            print(f"{doc.kind}: no witness to check")
        for k, v in sorted(checks.items()):
            print(f"{k}\t{'ok' if v else 'FAILED'}")
        print("verified" if ok else "verification FAILED")
    return EXIT_OK if ok else EXIT_UNKNOWN


def _parse_state(text: str, n: int):
    try:
        vals = tuple(Fraction(t.strip()) for t in text.split(","))
    except (ValueError, ZeroDivisionError):
        raise InputError(f"bad state {text!r}") from None
    if len(vals) != n:
        raise InputError(f"state has {len(vals)} entries, loop has {n} variables")
    return vals


def cmd_simulate(args) -> int:
    lf = _read_loop(args.loop)
    Q = build_transition_polyhedron(lf.loop)
    x0 = _parse_state(args.start, lf.loop.n)
    if args.steps < 0:
        raise InputError("--steps must be nonnegative")
    try:
        sim = simulate(Q, x0, args.steps)
    except NondeterministicLoop as exc:
        raise InputError(str(exc)) from None
    print("step\t" + "\t".join(lf.loop.names))
    for i, s in enumerate(sim.states):
        print(f"{i}\t" + "\t".join(q(v) for v in s))
    print("# terminated" if sim.terminated else f"# still running after {len(sim.states) - 1} steps")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mlrf", description="Multiphase ranking functions and recurrent sets for linear loops.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log refinement iterations")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="find a ranking function or a recurrent set")
    a.add_argument("loop", help=".slc file, or a directory for a JSON-lines batch report")
    a.add_argument("--depth-bound", type=int, default=None, help="largest depth tried (default 10)")
    a.add_argument("--max-iters", type=int, default=None, help="refinement iteration cap (default 50)")
    a.add_argument("--mode", choices=MODES, default=None)
    a.add_argument("--engine", choices=ENGINES, default="both")
    a.add_argument("--json", action="store_true")
    a.add_argument("--seed", type=int, default=None, help="recorded in the output; the analysis is deterministic")
    a.add_argument("--report", metavar="DIR", help="write trace and depth-profile tables and figures")
    a.set_defaults(func=cmd_analyze)

    d = sub.add_parser("depth", help="displacement depth profile")
    d.add_argument("loop")
    d.add_argument("--max-depth", type=int, default=10)
    d.add_argument("--full", action="store_true", help="do not stop at the first ranked depth")
    d.add_argument("--json", action="store_true")
    d.add_argument("--report", metavar="DIR")
    d.set_defaults(func=cmd_depth)

    m = sub.add_parser("dellrf", help="linear ranking function on states with traces of length b")
    m.add_argument("loop")
    m.add_argument("--b", type=int, required=True)
    m.add_argument("--json", action="store_true")
    m.set_defaults(func=cmd_dellrf)

    v = sub.add_parser("verify", help="re-check a JSON verdict against a loop")
    v.add_argument("loop")
    v.add_argument("document")
    v.add_argument("--json", action="store_true")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("simulate", help="run a deterministic loop")
    s.add_argument("loop")
    s.add_argument("--from", dest="start", required=True, help="comma-separated initial state")
    s.add_argument("--steps", type=int, default=10)
    s.set_defaults(func=cmd_simulate)
    return p


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    for opt in ("depth_bound", "max_iters", "max_depth"):
        val = getattr(args, opt, None)
        if val is not None and val < 0:
            print(f"error: --{opt.replace('_', '-')} must be nonnegative", file=sys.stderr)
            return EXIT_INPUT
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())
