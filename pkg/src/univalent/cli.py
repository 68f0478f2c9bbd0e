"""Command line front door.

Exit status: 0 pass, 1 verdict failure, 2 usage, input or scope error.
Reports go to stdout as text or JSON (``--format`` or ``UNIVALENT_FORMAT``).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .fincat import DomainError
from .textio import FormatError

PASS, FAIL, SCOPE = 0, 1, 2


class UsageError(Exception):
    """Bad input or a question outside what a command can decide (exit 2)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(SCOPE)


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


# -- commands ------------------------------------------------------------------
# Each returns (exit status, report dict, text lines).


def cmd_check(args):
    from .kernel.checker import Checker, KernelError
    from .kernel.parser import ParseError, parse_file

    text = _read(args.file)
    try:
        decls = parse_file(text)
    except ParseError as exc:
        raise UsageError(f"{args.file}:{exc}") from None
    checker = Checker()
    checked = []
    for d in decls:
        try:
            checker.add_decl(d)
        except KernelError as exc:
            diag = exc.as_dict()
            diag["declaration"] = d.name
            lines = [f"{n}: ok" for n in checked]
            lines.append(f"{d.name}: error at {exc.line}:{exc.col}: {exc.message}")
            if "expected" in diag:
                lines.append(f"  expected: {diag['expected']}")
                lines.append(f"  actual:   {diag['actual']}")
            lines.append("verdict: fail")
            return FAIL, {"verdict": "fail", "checked": checked, "error": diag}, lines
        checked.append(d.name)
    lines = [f"{n}: ok" for n in checked] + [f"verdict: pass ({len(checked)} declarations)"]
    return PASS, {"verdict": "pass", "checked": checked}, lines


def cmd_library(args):
    from .kernel.library import AXIOMS, library_source, load_library
    from .kernel.parser import pretty

    checker = load_library()
    entries = []
    lines = []
    for e in checker.glob.entries.values():
        kind = "axiom" if e.value is None else "def"
        entries.append({"name": e.name, "kind": kind, "type": pretty(e.type)})
        lines.append(f"{kind} {e.name} : {pretty(e.type)}")
    missing = [a for a in AXIOMS if a not in checker.glob]
    verdict = "fail" if missing else "pass"
    lines.append(f"verdict: {verdict} ({len(entries)} entries checked)")
    report = {"verdict": verdict, "entries": entries}
    if args.emit:
        report["source"] = library_source()
        lines = library_source().rstrip("\n").split("\n") + lines
    return (FAIL if missing else PASS), report, lines


def _load_model(path):
    from . import modelfile

    try:
        return modelfile.loads(_read(path), source=path)
    except FormatError as exc:
        raise UsageError(str(exc)) from None


def cmd_cc_axioms(args):
    from .cc.contextual import check_cc_axioms
    from .cc.universe_cc import build_cc

    model = _load_model(args.model)
    if model.universe is None:
        raise UsageError(f"{args.model}: no universe declared")
    report = check_cc_axioms(build_cc(model.universe), args.depth)
    return (PASS if report.passed else FAIL), report.as_dict(), report.lines()


def cmd_kan(args):
    from .sset import io as sset_io
    from .sset.lifting import is_kan_complex

    try:
        x = sset_io.loads(_read(args.file), source=args.file)
    except FormatError as exc:
        raise UsageError(str(exc)) from None
    if args.dim > x.N:
        raise UsageError(f"--dim {args.dim} exceeds the truncation level {x.N} of {args.file}")
    report = is_kan_complex(x, args.dim)
    return (PASS if report.passed else FAIL), report.as_dict(), report.lines()


def cmd_univalence(args):
    from .sset.homotopy import ScopeError
    from .sset.universe import disjoint_copies_fibration, nerve_universe, univalence_check

    if args.trunc < 2:
        raise UsageError("--trunc must be at least 2")
    if args.counterexample:
        p = disjoint_copies_fibration(args.trunc)
    else:
        _, p = nerve_universe(args.fiber_bound, args.trunc)
    try:
        report = univalence_check(p, args.trunc)
    except ScopeError as exc:
        raise UsageError(f"scope: {exc}") from None
    return (PASS if report.passed else FAIL), report.as_dict(), report.lines()


def cmd_interpret(args):
    from .cc.structures import StructureError
    from .kernel.checker import Checker, KernelError
    from .kernel.interpret import AxiomBlocked, InterpretError, Interpreter, ModelConstants
    from .kernel.parser import ParseError, parse_file
    from .kernel.syntax import Const

    model = _load_model(args.model)
    if model.structured is None:
        raise UsageError(f"{args.model}: interpretation needs a 'setmodel' universe with verified structures")
    try:
        decls = parse_file(_read(args.file))
    except ParseError as exc:
        raise UsageError(f"{args.file}:{exc}") from None
    checker = Checker()
    try:
        for d in decls:
            checker.add_decl(d)
    except KernelError as exc:
        raise UsageError(f"{args.file}: does not check: {exc}") from None
    constants = ModelConstants(dict(model.types), dict(model.points))
    for name in list(constants.types) + list(constants.points):
        if name not in checker.glob or checker.glob.entries[name].value is not None:
            raise UsageError(f"{args.model}: {name} is not an axiom of {args.file}")
    interp = Interpreter(checker, model.structured, constants, max_depth=args.depth)
    results = []
    unsound = False
    for d in decls:
        entry = {"name": d.name}
        if d.value is None:
            known = d.name in constants.types or d.name in constants.points
            entry["status"] = "model value" if known else "axiom"
            results.append(entry)
            continue
        try:
            scope = interp.empty()
            cls = interp.type(scope, d.type)
            direct = interp.term(scope, d.value, d.type)
            normal = interp.term(scope, checker.normalize([], Const(d.name)), d.type)
        except InterpretError as exc:
            entry["status"] = "blocked" if isinstance(exc, AxiomBlocked) else "unsupported"
            entry["reason"] = str(exc)
            results.append(entry)
            continue
        except (StructureError, DomainError) as exc:
            entry["status"] = "unsupported"
            entry["reason"] = f"outside the model window: {exc}"
            results.append(entry)
            continue
        pt_level = {j: next(iter(xs)) for j, xs in scope.total.at.items()}
        entry["fiber_size"] = {
            str(j): len(interp.u.fiber(j, cls.comp[j][w])) for j, w in sorted(pt_level.items(), key=str)
        }
        entry["value"] = {str(j): repr(direct.comp[j][w]) for j, w in sorted(pt_level.items(), key=str)}
        entry["status"] = "sound" if direct == normal else "unsound"
        unsound |= direct != normal
        results.append(entry)
    lines = []
    for r in results:
        line = f"{r['name']}: {r['status']}"
        if "fiber_size" in r:
            sizes = ", ".join(f"{v}" for v in r["fiber_size"].values())
            values = ", ".join(r["value"].values())
            line += f" (type fiber size {sizes}, value {values})"
        if "reason" in r:
            line += f" ({r['reason']})"
        lines.append(line)
    verdict = "fail" if unsound else "pass"
    lines.append(f"verdict: {verdict}")
    return (FAIL if unsound else PASS), {"verdict": verdict, "model": model.structured.name, "results": results}, lines


# -- entry point -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="univalent", description="Type theory kernel, universe models and simplicial checks.")
    parser.add_argument("--format", choices=("text", "json"), default=None, help="report format (default: text)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("check", help="typecheck a source file")
    p.add_argument("file")
    p.set_defaults(run=cmd_check)

    p = sub.add_parser("interpret", help="interpret the definitions of a file in a model")
    p.add_argument("file")
    p.add_argument("--model", required=True)
    p.add_argument("--depth", type=_positive, default=8, help="longest context the interpreter may build")
    p.set_defaults(run=cmd_interpret)

    p = sub.add_parser("cc-axioms", help="check the contextual category axioms of a model")
    p.add_argument("model")
    p.add_argument("--depth", type=_positive, default=2)
    p.set_defaults(run=cmd_cc_axioms)

    p = sub.add_parser("kan", help="horn-filling check for a simplicial set")
    p.add_argument("file")
    p.add_argument("--dim", type=_positive, default=2)
    p.set_defaults(run=cmd_kan)

    p = sub.add_parser("univalence", help="univalence check for the finite universe")
    p.add_argument("--fiber-bound", type=_positive, default=3)
    p.add_argument("--trunc", type=_positive, default=3)
    p.add_argument("--counterexample", action="store_true", help="check the non-univalent two-copies fibration")
    p.set_defaults(run=cmd_univalence)

    p = sub.add_parser("library", help="check the bundled univalence library")
    p.add_argument("--emit", action="store_true", help="also print the library source")
    p.set_defaults(run=cmd_library)
    return parser


def _format(args) -> str:
    fmt = args.format or os.environ.get("UNIVALENT_FORMAT", "text")
    if fmt not in ("text", "json"):
        raise UsageError(f"unknown report format {fmt!r}")
    return fmt


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        fmt = _format(args)
        status, report, lines = args.run(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return SCOPE
    if fmt == "json":
        report = dict(report, command=args.command, exit=status)
        sys.stdout.write(json.dumps(report, indent=2, sort_keys=True, default=repr) + "\n")
    else:
        sys.stdout.write("\n".join(lines) + "\n")
    return status


if __name__ == "__main__":
    raise SystemExit(main())
