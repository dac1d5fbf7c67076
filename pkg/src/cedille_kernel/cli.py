"""Command-line interface: `cedk <command> ...`.

Exit status: 0 success, 1 rejected program (type error, or `eq` answering
distinct), 2 usage or file error, 3 fuel exhausted (including `eq`
answering undecided).
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
import threading
from pathlib import Path
from typing import Optional, Sequence

from .checker import CheckOptions, ErrorKind, TypeCheckError
from .delta import NotSeparableError, OpenTermError, SeparationFuelError, bohm_discriminate
from .modules import CheckedModule, ModuleError, Workspace
from .parser import ParseError
from .pure import PVar, pretty_pure
from .reduce import DEFAULT_FUEL, Verdict, beta_eta_equal, normalize
from .runner import corpus_root, run_corpus
from .syntax import ErasureError, erase

OK, REJECTED, USAGE, FUEL = 0, 1, 2, 3

_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_']*$")


class _Usage(Exception):
    pass


def _fuel(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text}") from None
    if n <= 0:
        raise argparse.ArgumentTypeError("fuel must be positive")
    return n


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--fuel", type=_fuel, default=DEFAULT_FUEL, help="maximum β-contractions per normalization")
    common.add_argument("--delta", choices=("bohm", "strict"), default="bohm", help="δ side condition")
    common.add_argument("--strict-intersection", action="store_true", help="require syntactically equal erasures in [t1, t2]")
    common.add_argument("--json", action="store_true", help="machine-readable output")

    p = argparse.ArgumentParser(prog="cedk", description="Checker and evaluator for a CDLE fragment.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", parents=[common], help="type-check files and their imports")
    c.add_argument("paths", nargs="+", type=Path)

    for name, what in (("erase", "print the erasure of a term"), ("norm", "print the normal form of a term")):
        c = sub.add_parser(name, parents=[common], help=what)
        c.add_argument("path", type=Path)
        c.add_argument("term", help="a definition name or a term in the module's scope")

    c = sub.add_parser("eq", parents=[common], help="decide beta-eta equality of two terms")
    c.add_argument("path", type=Path)
    c.add_argument("lhs")
    c.add_argument("rhs")

    c = sub.add_parser("steps", parents=[common], help="count β-contractions to normalize a term")
    c.add_argument("path", type=Path)
    c.add_argument("term")

    c = sub.add_parser("bohm", parents=[common], help="build a context separating two terms")
    c.add_argument("path", type=Path)
    c.add_argument("lhs")
    c.add_argument("rhs")

    c = sub.add_parser("corpus", parents=[common], help="check the embedded corpus")
    c.add_argument("--root", type=Path, default=None, help="corpus directory (default: $CEDK_CORPUS or the packaged one)")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    result: list[int] = [USAGE]

    def run():
        result[0] = _dispatch(args)

    # deep terms recurse deeply; give the work a roomy stack
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 50_000))
    threading.stack_size(256 * 1024 * 1024)
    t = threading.Thread(target=run)
    t.start()
    t.join()
    return result[0]


def _dispatch(args) -> int:
    opts = CheckOptions(delta_mode=args.delta, strict_intersection=args.strict_intersection, fuel=args.fuel)
    try:
        match args.command:
            case "check":
                return cmd_check(args.paths, opts, args.json)
            case "erase" | "norm" | "steps":
                return cmd_term(args.command, args.path, args.term, opts, args.json)
            case "eq":
                return cmd_eq(args.path, args.lhs, args.rhs, opts, args.json)
            case "bohm":
                return cmd_bohm(args.path, args.lhs, args.rhs, opts, args.json)
            case "corpus":
                return cmd_corpus(args.root, opts, args.json)
    except _Usage as exc:
        print(f"cedk: {exc}", file=sys.stderr)
        return USAGE
    return USAGE


# ----------------------------------------------------------------------


def _display(path: str | None) -> str | None:
    if not path:
        return path
    try:
        rel = os.path.relpath(path)
    except ValueError:
        return path
    return path if rel.startswith("..") else rel


def _error_json(err: TypeCheckError | ModuleError) -> dict:
    span = err.span or (None, None)
    return {
        "kind": str(err.kind.value if isinstance(err.kind, ErrorKind) else err.kind),
        "message": err.message,
        "file": _display(err.file),
        "line": span[0],
        "col": span[1],
        "definition": getattr(err, "definition", None),
    }


def _report(err: TypeCheckError | ModuleError) -> None:
    err.file = _display(err.file)
    print(str(err), file=sys.stderr)


def _emit(as_json: bool, payload: dict, text: str) -> None:
    print(json.dumps(payload, ensure_ascii=False, indent=2) if as_json else text)


def cmd_check(paths: Sequence[Path], opts: CheckOptions, as_json: bool) -> int:
    ws = Workspace(opts, search=[corpus_root()])
    status = OK
    entries = []
    for path in paths:
        entry = {"file": str(path), "outcome": "accept", "errors": [], "warnings": []}
        if not path.is_file():
            print(f"cedk: no such file: {path}", file=sys.stderr)
            entry.update(outcome="error", errors=[{"kind": "missing", "message": "no such file"}])
            entries.append(entry)
            status = USAGE
            continue
        try:
            mod = ws.load(path)
            for w in mod.warnings:
                line, col = w.span or (0, 0)
                print(f"{path}:{line}:{col}: warning [{w.kind}] {w.message}", file=sys.stderr)
                entry["warnings"].append({"kind": str(w.kind), "message": w.message, "line": line, "col": col})
        except (TypeCheckError, ModuleError) as err:
            _report(err)
            entry.update(outcome="reject", errors=[_error_json(err)])
            code = USAGE if isinstance(err, ModuleError) and err.kind == "missing" else REJECTED
            status = max(status, code)
        entries.append(entry)
        if not as_json and entry["outcome"] == "accept":
            print(f"{path}: ok")
    if as_json:
        print(json.dumps({"ok": status == OK, "files": entries}, ensure_ascii=False, indent=2))
    return status


def _load(path: Path, opts: CheckOptions) -> tuple[Workspace, CheckedModule]:
    if not path.is_file():
        raise _Usage(f"no such file: {path}")
    ws = Workspace(opts, search=[corpus_root()])
    return ws, ws.load(path)


def _erased(ws: Workspace, mod: CheckedModule, term: str, expand: str):
    """Erase a name or term; bare names must be bound, terms may have free variables."""
    if _NAME.match(term) and term not in mod.exports:
        raise TypeCheckError(ErrorKind.UNBOUND, f"unbound name: {term}")
    if expand == "none":
        try:
            e = ws.resolve(mod, term, free_ok=True)
            head = erase(e)
            if _NAME.match(term) and isinstance(head, PVar) and head.name in ws.env:
                # a definition name: show what its body erases to
                return erase(ws.env.get(head.name).body)
            return head
        except ErasureError as exc:
            raise TypeCheckError(ErrorKind.KIND_MISMATCH, str(exc)) from None
    return ws.erased(mod, term, expand)


def _guard(fn):
    """Run a term command, mapping failures to exit codes."""

    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ParseError as exc:
            print(f"cedk: cannot parse term: {exc}", file=sys.stderr)
            return USAGE
        except (TypeCheckError, ModuleError) as err:
            _report(err)
            if isinstance(err, ModuleError) and err.kind == "missing":
                return USAGE
            return REJECTED

    return wrapper


@_guard
def cmd_term(command: str, path: Path, term: str, opts: CheckOptions, as_json: bool) -> int:
    ws, mod = _load(path, opts)
    if command == "erase":
        t = _erased(ws, mod, term, "none")
        _emit(as_json, {"term": term, "erasure": pretty_pure(t, True)}, pretty_pure(t, True))
        return OK
    t = _erased(ws, mod, term, "normal" if command == "norm" else "raw")
    tr = normalize(t, opts.fuel)
    nf = pretty_pure(tr.result, True)
    payload = {"term": term, "normal_form": nf, "steps": tr.steps, "fuel_exhausted": tr.fuel_exhausted}
    if command == "norm":
        _emit(as_json, payload, nf)
    else:
        _emit(as_json, payload, str(tr.steps))
    if tr.fuel_exhausted:
        print(f"cedk: fuel exhausted after {tr.steps} steps", file=sys.stderr)
        return FUEL
    return OK


@_guard
def cmd_eq(path: Path, lhs: str, rhs: str, opts: CheckOptions, as_json: bool) -> int:
    ws, mod = _load(path, opts)
    a, b = _erased(ws, mod, lhs, "normal"), _erased(ws, mod, rhs, "normal")
    verdict = beta_eta_equal(a, b, opts.fuel)
    _emit(as_json, {"lhs": lhs, "rhs": rhs, "verdict": verdict.value}, verdict.value)
    return {Verdict.EQUAL: OK, Verdict.DISTINCT: REJECTED, Verdict.UNDECIDED: FUEL}[verdict]


@_guard
def cmd_bohm(path: Path, lhs: str, rhs: str, opts: CheckOptions, as_json: bool) -> int:
    ws, mod = _load(path, opts)
    a, b = _erased(ws, mod, lhs, "normal"), _erased(ws, mod, rhs, "normal")
    try:
        d = bohm_discriminate(a, b, opts.fuel)
    except SeparationFuelError as exc:
        print(f"cedk: {exc}", file=sys.stderr)
        return FUEL
    except (NotSeparableError, OpenTermError) as exc:
        print(f"cedk: {exc}", file=sys.stderr)
        return REJECTED
    ctx = pretty_pure(d.context, True)
    ta, tb = d.certificate
    payload = {
        "context": ctx,
        "certificate": [
            {"term": lhs, "result": pretty_pure(ta.result, True), "steps": ta.steps},
            {"term": rhs, "result": pretty_pure(tb.result, True), "steps": tb.steps},
        ],
    }
    text = "\n".join(
        [
            f"context: {ctx}",
            f"{lhs} ⟶ {pretty_pure(ta.result, True)} ({ta.steps} steps)",
            f"{rhs} ⟶ {pretty_pure(tb.result, True)} ({tb.steps} steps)",
        ]
    )
    _emit(as_json, payload, text)
    return OK


def cmd_corpus(root: Optional[Path], opts: CheckOptions, as_json: bool) -> int:
    root = root or corpus_root()
    if not (root / "manifest.json").is_file():
        print(f"cedk: no corpus manifest in {root}", file=sys.stderr)
        return USAGE
    report = run_corpus(root, opts)
    if as_json:
        print(json.dumps(report.to_json(), ensure_ascii=False, indent=2))
    else:
        print("\n".join(report.lines()))
    return OK if report.ok else REJECTED


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
