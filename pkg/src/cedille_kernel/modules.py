"""Module loading, import instantiation and global definitions.

Each definition is checked once, in a context holding its module's
parameters, and then stored closed: lifted over those parameters. Inside a
module every name maps to an expression, the global applied to the module
parameters (own definitions) or to the import arguments (instantiated
imports). Instantiation is therefore plain substitution.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from .checker import CheckOptions, Checker, Context, Env, ErrorKind, TypeCheckError, Warning_
from .parser import ParseError, param_mode, parse_expr, parse_module
from .pure import PureTerm, substitute_many
from .syntax import (
    All,
    App,
    EApp,
    ELam,
    ErasureError,
    Expr,
    Import,
    Lam,
    ModuleUnit,
    Param,
    Pi,
    TApp,
    Var,
    erase,
    is_kind,
    subst_many,
)


class ModuleError(Exception):
    """Failure to assemble the module graph (not a typing failure)."""

    def __init__(self, kind: str, message: str, file: Optional[str] = None, span=None):
        super().__init__(message)
        self.kind = kind  # cycle | missing | instantiation | parse
        self.message = message
        self.file = file
        self.span = span

    def __str__(self) -> str:
        where = self.file or ""
        if self.span:
            where += f":{self.span[0]}:{self.span[1]}"
        return f"{where}: [{self.kind}] {self.message}" if where else f"[{self.kind}] {self.message}"


@dataclass
class CheckedDef:
    name: str
    gid: Optional[str]  # None for anonymous definitions
    classifier: Expr  # as written, with names resolved (module parameters free)
    body: Expr


@dataclass
class CheckedModule:
    path: Path
    unit: ModuleUnit
    key: str
    defs: list[CheckedDef] = field(default_factory=list)
    exports: dict[str, Expr] = field(default_factory=dict)
    own: dict[str, str] = field(default_factory=dict)  # name -> gid
    imports: list[Path] = field(default_factory=list)
    param_classifiers: dict[str, Expr] = field(default_factory=dict)
    warnings: list[Warning_] = field(default_factory=list)

    @property
    def param_names(self) -> frozenset[str]:
        return frozenset(p.name for p in self.unit.params)

    def gid(self, name: str) -> str:
        return self.own[name]


def resolve_import(path: str, importer: Path, search: Sequence[Path] = ()) -> Optional[Path]:
    """Find `path.ced` next to the importer, in its ancestors, then in `search`."""
    rel = Path(*path.split("/")).with_suffix(".ced")
    candidates = [d / rel for d in [importer.parent, *importer.parent.parents]]
    candidates += [Path(s) / rel for s in search]
    for c in candidates:
        if c.is_file():
            return c.resolve()
    return None


def read_unit(path: Path) -> ModuleUnit:
    try:
        src = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ModuleError("missing", f"cannot read {path}: {exc.strerror}", str(path)) from None
    try:
        return parse_module(src)
    except ParseError as exc:
        raise ModuleError("parse", exc.message, str(path), (exc.line, exc.col)) from None


def check_instantiation(imp: Import, params: Sequence[Param], file: str) -> None:
    """Arity and argument modes must match the imported module's parameters."""
    if not imp.args:
        return
    if len(imp.args) != len(params):
        raise ModuleError(
            "instantiation",
            f"import {imp.path} expects {len(params)} argument(s), got {len(imp.args)}",
            file,
            imp.span,
        )
    sigil = {"type": "·", "erased": "-", "relevant": "(no prefix)"}
    for a, p in zip(imp.args, params):
        want = param_mode(p)
        if a.mode != want:
            raise ModuleError(
                "instantiation",
                f"argument for parameter {p.name} of {imp.path} must be written with {sigil[want]}",
                file,
                imp.span,
            )


def load_graph(root: Path | str, search: Sequence[Path] = ()) -> list[tuple[Path, ModuleUnit]]:
    """Parse `root` and everything it imports; dependencies come first."""
    order: list[tuple[Path, ModuleUnit]] = []
    done: set[Path] = set()
    active: list[Path] = []

    def visit(p: Path):
        if p in done:
            return
        if p in active:
            cycle = " -> ".join(str(x.name) for x in active[active.index(p):] + [p])
            raise ModuleError("cycle", f"import cycle: {cycle}", str(p))
        active.append(p)
        unit = read_unit(p)
        for imp in unit.imports:
            target = resolve_import(imp.path, p, search)
            if target is None:
                raise ModuleError("missing", f"cannot find module {imp.path}", str(p), imp.span)
            visit(target)
            check_instantiation(imp, _units[target].params, str(p))
        active.pop()
        done.add(p)
        _units[p] = unit
        order.append((p, unit))

    _units: dict[Path, ModuleUnit] = {}
    root = Path(root).resolve()
    if not root.is_file():
        raise ModuleError("missing", f"no such file: {root}", str(root))
    visit(root)
    return order


class Workspace:
    """Loads and checks modules, sharing one global environment."""

    def __init__(self, options: Optional[CheckOptions] = None, search: Sequence[Path | str] = ()):
        self.options = options or CheckOptions()
        self.env = Env()
        self.checker = Checker(self.env, self.options)
        self.search = [Path(s) for s in search]
        self.modules: dict[Path, CheckedModule] = {}
        self._keys: set[str] = set()
        self._raw_cache: dict[str, PureTerm] = {}

    def load(self, path: Path | str) -> CheckedModule:
        """Check a file and its imports (memoized per file)."""
        root = Path(path).resolve()
        if not root.is_file():
            raise ModuleError("missing", f"no such file: {path}", str(path))
        for p, unit in load_graph(root, self.search):
            if p not in self.modules:
                self.modules[p] = self._check_unit(p, unit)
        return self.modules[root]

    # ------------------------------------------------------------------
    # terms in a module's scope

    def resolve(self, mod: CheckedModule, source: str | Expr, free_ok: bool = False) -> Expr:
        """Parse `source` (if needed) and bind its names as `mod` sees them.

        Names that are not in scope stay free when `free_ok` is set.
        """
        e = parse_expr(source) if isinstance(source, str) else source
        bound = {n: mod.exports[n] for n in e.fv if n in mod.exports}
        missing = sorted(n for n in e.fv if n not in bound and n not in mod.param_names)
        if missing and not free_ok:
            raise TypeCheckError(ErrorKind.UNBOUND, f"unbound name(s): {', '.join(missing)}")
        return subst_many(e, bound)

    def erased(self, mod: CheckedModule, source: str | Expr, expand: str = "normal", free_ok: bool = True) -> PureTerm:
        """Erasure of `source` with every global replaced by its definition.

        `expand="normal"` uses the cached normal forms (as conversion does);
        `expand="raw"` uses the erased bodies, so that normalizing the result
        performs, and counts, the whole computation.
        """
        try:
            t = erase(self.resolve(mod, source, free_ok))
        except ErasureError as exc:
            raise TypeCheckError(ErrorKind.KIND_MISMATCH, str(exc)) from None
        if expand == "normal":
            return self.checker.expand(Context(), t)
        return self._raw(t)

    def _raw(self, t: PureTerm) -> PureTerm:
        cache = self._raw_cache
        mapping = {}
        for v in t.fv:
            g = self.env.get(v)
            if g is None or g.is_type:
                continue
            if v not in cache:
                cache[v] = self._raw(erase(g.body))
            mapping[v] = cache[v]
        return substitute_many(t, mapping)

    def find(self, name: str) -> Optional[CheckedModule]:
        """The checked module whose unit or file stem is `name`."""
        for mod in self.modules.values():
            if mod.unit.name == name or mod.path.stem == name:
                return mod
        return None

    # ------------------------------------------------------------------

    def _key(self, unit: ModuleUnit) -> str:
        key, n = unit.name, 1
        while key in self._keys:
            n += 1
            key = f"{unit.name}#{n}"
        self._keys.add(key)
        return key

    def _check_unit(self, path: Path, unit: ModuleUnit) -> CheckedModule:
        mod = CheckedModule(path, unit, self._key(unit))
        checker = self.checker
        warn_start = len(checker.warnings)
        scope: dict[str, Expr] = {}
        params = unit.params
        pnames = {p.name for p in params}
        ctx = Context()

        def resolve(e: Expr) -> Expr:
            try:
                return subst_many(e, {n: scope[n] for n in e.fv if n in scope and n not in pnames})
            except ErasureError as exc:
                raise TypeCheckError(ErrorKind.KIND_MISMATCH, str(exc), e.span) from None

        def fail(err: TypeCheckError, what: str):
            err.file = str(path)
            err.definition = what
            raise err

        items = list(unit.items)
        order = items[: unit.header_at] + [None] + items[unit.header_at :]
        for item in order:
            if item is None:
                for p in params:
                    cls = resolve(p.classifier)
                    try:
                        sort = checker.classify(ctx, cls)
                    except TypeCheckError as err:
                        fail(err, f"parameter {p.name}")
                    mod.param_classifiers[p.name] = cls
                    if sort == "kind":
                        if p.erased:
                            fail(TypeCheckError(ErrorKind.KIND_MISMATCH, "type parameters are written in parentheses"), f"parameter {p.name}")
                        ctx = ctx.type(p.name, cls)
                    else:
                        ctx = ctx.term(p.name, cls, p.erased)
                continue
            if isinstance(item, Import):
                bindings = self._import(item, path, ctx, resolve, fail)
                scope.update(bindings)
                mod.exports.update(bindings)
                mod.imports.append(resolve_import(item.path, path, self.search))
                continue
            d = item
            try:
                cls = resolve(d.classifier)
                body = resolve(d.body)
                sort = checker.classify(ctx, cls)
                checker.check(ctx, body, cls)
                if sort == "type":
                    er = erase(body).fv
                    for p in params:
                        if p.erased and p.name in er:
                            raise TypeCheckError(
                                ErrorKind.ERASED_VAR_OCCURS,
                                f"erased parameter {p.name} occurs in the erasure of {d.name}",
                                d.span,
                            )
            except TypeCheckError as err:
                if err.span is None:
                    err.span = d.span
                fail(err, d.name)
            if d.name == "_":
                mod.defs.append(CheckedDef("_", None, cls, body))
                continue
            gid = f"{d.name}@{mod.key}"
            self.env.add(gid, d.name, mod.key, *_lift(ctx, params, cls, body, sort == "kind"), sort == "kind")
            ref = _reference(gid, ctx, params, sort == "kind")
            scope[d.name] = ref
            mod.exports[d.name] = ref
            mod.own[d.name] = gid
            mod.defs.append(CheckedDef(d.name, gid, cls, body))
        mod.warnings = checker.warnings[warn_start:]
        return mod

    def _import(self, imp: Import, path: Path, ctx: Context, resolve, fail) -> dict[str, Expr]:
        target = resolve_import(imp.path, path, self.search)
        dep = self.modules[target]
        mod_params = dep.unit.params
        if not imp.args:
            out = {}
            for name, e in dep.exports.items():
                if name in dep.own:
                    out[name] = Var(dep.own[name])
                elif not (e.fv & dep.param_names):
                    out[name] = e
            return out
        check_instantiation(imp, mod_params, str(path))
        mapping: dict[str, Expr] = {}
        for a, p in zip(imp.args, mod_params):
            arg = resolve(a.expr)
            expected = subst_many(dep.param_classifiers[p.name], mapping)
            try:
                self.checker.check(ctx, arg, expected)
            except TypeCheckError as err:
                if err.span is None:
                    err.span = imp.span
                fail(err, f"import {imp.path}")
            mapping[p.name] = arg
        return {name: subst_many(e, mapping) for name, e in dep.exports.items()}


def _lift(ctx: Context, params: Sequence[Param], cls: Expr, body: Expr, is_type: bool) -> tuple[Expr, Expr]:
    """Abstract a definition over its module's parameters."""
    for p in reversed(params):
        entry = ctx.lookup(p.name)
        dom = entry.classifier
        if is_type:
            cls = Pi(p.name, dom, cls)
            body = Lam(p.name, dom, body)
        elif entry.is_type or p.erased:
            cls = All(p.name, dom, cls)
            body = ELam(p.name, dom, body)
        else:
            cls = Pi(p.name, dom, cls)
            body = Lam(p.name, dom, body)
    return cls, body


def _reference(gid: str, ctx: Context, params: Sequence[Param], is_type: bool) -> Expr:
    """The global applied to the module's own parameters."""
    e: Expr = Var(gid)
    for p in params:
        entry = ctx.lookup(p.name)
        if entry.is_type:
            e = TApp(e, Var(p.name))
        elif p.erased and not is_type:
            e = EApp(e, Var(p.name))
        else:
            e = App(e, Var(p.name))
    return e
