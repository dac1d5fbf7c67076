"""Annotated syntax shared by terms, types and kinds.

One AST covers all three sorts; which sort a node belongs to is decided by
the checker. Equality types hold pure terms only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Optional, Union

from . import pure
from .pure import PApp, PLam, PureTerm, PVar, fresh_name

Span = Optional[tuple[int, int]]


class Expr:
    """Base class for annotated syntax."""

    @property
    def fv(self) -> frozenset[str]:
        raise NotImplementedError

    def __str__(self) -> str:
        return pretty(self)


def _span():
    return field(default=None, compare=False, repr=False)


@dataclass(frozen=True, eq=False)
class Var(Expr):
    name: str
    span: Span = _span()

    @cached_property
    def fv(self):
        return frozenset((self.name,))


@dataclass(frozen=True, eq=False)
class Star(Expr):
    span: Span = _span()

    fv = frozenset()


@dataclass(frozen=True, eq=False)
class Binder(Expr):
    """Common shape of every binding form with a domain and a body."""

    name: str
    dom: Optional[Expr]
    body: Expr
    span: Span = _span()

    @cached_property
    def fv(self):
        d = self.dom.fv if self.dom is not None else frozenset()
        return d | (self.body.fv - {self.name})


class Pi(Binder):
    """`Π x: A. B`, or `A ➔ B`."""


class All(Binder):
    """`∀ x: A. B`, or `A ➾ B`; binds a type or an erased term."""


class Iota(Binder):
    """Dependent intersection `ι x: A. B`."""


class Lam(Binder):
    """Relevant abstraction `λ x. t` (term or type level)."""


class ELam(Binder):
    """Erased abstraction `Λ x. t`."""


@dataclass(frozen=True, eq=False)
class Eq(Expr):
    lhs: PureTerm
    rhs: PureTerm
    span: Span = _span()

    @cached_property
    def fv(self):
        return self.lhs.fv | self.rhs.fv


@dataclass(frozen=True, eq=False)
class Apply(Expr):
    fun: Expr
    arg: Expr
    span: Span = _span()

    @cached_property
    def fv(self):
        return self.fun.fv | self.arg.fv


class App(Apply):
    """Relevant application `t t'`."""


class EApp(Apply):
    """Erased application `t -t'`."""


class TApp(Apply):
    """Type application `t ·T`."""


@dataclass(frozen=True, eq=False)
class Beta(Expr):
    erasure: Optional[Expr] = None
    span: Span = _span()

    @cached_property
    def fv(self):
        return self.erasure.fv if self.erasure is not None else frozenset()


@dataclass(frozen=True, eq=False)
class Rho(Expr):
    proof: Expr
    body: Expr
    span: Span = _span()

    @cached_property
    def fv(self):
        return self.proof.fv | self.body.fv


@dataclass(frozen=True, eq=False)
class Delta(Expr):
    type: Expr
    proof: Expr
    span: Span = _span()

    @cached_property
    def fv(self):
        return self.type.fv | self.proof.fv


@dataclass(frozen=True, eq=False)
class Phi(Expr):
    proof: Expr
    term: Expr
    erasure: Expr
    span: Span = _span()

    @cached_property
    def fv(self):
        return self.proof.fv | self.term.fv | self.erasure.fv


@dataclass(frozen=True, eq=False)
class IPair(Expr):
    first: Expr
    second: Expr
    span: Span = _span()

    @cached_property
    def fv(self):
        return self.first.fv | self.second.fv


@dataclass(frozen=True, eq=False)
class Proj(Expr):
    term: Expr
    index: int
    span: Span = _span()

    @cached_property
    def fv(self):
        return self.term.fv


@dataclass(frozen=True, eq=False)
class Let(Expr):
    name: str
    ann: Optional[Expr]
    defn: Expr
    body: Expr
    span: Span = _span()

    @cached_property
    def fv(self):
        a = self.ann.fv if self.ann is not None else frozenset()
        return a | self.defn.fv | (self.body.fv - {self.name})


AnyTerm = Union[Expr, PureTerm]


# ---------------------------------------------------------------------------
# modules


@dataclass(frozen=True, eq=False)
class Param:
    name: str
    classifier: Expr
    erased: bool


@dataclass(frozen=True, eq=False)
class ImportArg:
    mode: str  # "type" | "erased" | "relevant"
    expr: Expr


@dataclass(frozen=True, eq=False)
class Import:
    path: str
    args: tuple[ImportArg, ...]
    span: Span = _span()


@dataclass(frozen=True, eq=False)
class Definition:
    name: str  # "_" for anonymous
    classifier: Expr
    body: Expr
    span: Span = _span()


@dataclass(frozen=True, eq=False)
class ModuleUnit:
    name: str
    params: tuple[Param, ...]
    items: tuple[Union[Import, Definition], ...]
    header_at: int = 0  # number of items written before the module header

    @property
    def imports(self) -> list[Import]:
        return [i for i in self.items if isinstance(i, Import)]

    @property
    def defs(self) -> list[Definition]:
        return [d for d in self.items if isinstance(d, Definition)]


# ---------------------------------------------------------------------------
# kinds and spines


def is_kind(e: Expr) -> bool:
    """Kinds are ★ and Π-chains ending in ★."""
    while isinstance(e, Pi):
        e = e.body
    return isinstance(e, Star)


def spine(e: Expr) -> tuple[Expr, list[Apply]]:
    """Split an application spine into its head and the application nodes."""
    nodes = []
    while isinstance(e, Apply):
        nodes.append(e)
        e = e.fun
    nodes.reverse()
    return e, nodes


def rebuild(head: Expr, nodes: list[Apply]) -> Expr:
    for n in nodes:
        head = type(n)(head, n.arg)
    return head


# ---------------------------------------------------------------------------
# substitution


def subst(e: Expr, var: str, arg: Expr) -> Expr:
    return subst_many(e, {var: arg})


def subst_many(e: Expr, mapping: Mapping[str, Expr]) -> Expr:
    """Simultaneous capture-avoiding substitution of annotated expressions."""
    mapping = {k: v for k, v in mapping.items() if k in e.fv}
    if not mapping:
        return e
    return _Subst(mapping).go(e)


class _Subst:
    def __init__(self, mapping: Mapping[str, Expr]):
        self.mapping = dict(mapping)
        self.arg_fv: set[str] = set()
        for v in mapping.values():
            self.arg_fv |= v.fv
        self._erased: dict[str, PureTerm] = {}

    def erased(self, name: str) -> PureTerm:
        if name not in self._erased:
            self._erased[name] = erase(self.mapping[name])
        return self._erased[name]

    def go(self, e: Expr) -> Expr:
        m = self.mapping
        if not any(k in e.fv for k in m):
            return e
        match e:
            case Var(name):
                return m.get(name, e)
            case Binder(name, dom, body):
                dom2 = self.go(dom) if dom is not None else None
                body2 = self.under(name, body, lambda n, b: (n, b))
                return type(e)(body2[0], dom2, body2[1], e.span)
            case Apply(f, a):
                return type(e)(self.go(f), self.go(a), e.span)
            case Eq(l, r):
                pm = {k: self.erased(k) for k in m if k in e.fv}
                return Eq(pure.substitute_many(l, pm), pure.substitute_many(r, pm), e.span)
            case Beta(t):
                return Beta(self.go(t), e.span)
            case Rho(p, b):
                return Rho(self.go(p), self.go(b), e.span)
            case Delta(t, p):
                return Delta(self.go(t), self.go(p), e.span)
            case Phi(p, t, r):
                return Phi(self.go(p), self.go(t), self.go(r), e.span)
            case IPair(a, b):
                return IPair(self.go(a), self.go(b), e.span)
            case Proj(t, i):
                return Proj(self.go(t), i, e.span)
            case Let(name, ann, d, body):
                ann2 = self.go(ann) if ann is not None else None
                n, b = self.under(name, body, lambda n, b: (n, b))
                return Let(n, ann2, self.go(d), b, e.span)
        raise TypeError(f"unexpected node {e!r}")

    def under(self, name: str, body: Expr, k):
        """Substitute into `body` under binder `name`, renaming if needed."""
        saved = self.mapping, self._erased
        try:
            if name in self.mapping:
                self.mapping = {a: b for a, b in self.mapping.items() if a != name}
                self._erased = {a: b for a, b in self._erased.items() if a != name}
            if not any(a in body.fv for a in self.mapping):
                return k(name, body)
            if name in self.arg_fv:
                new = fresh_name(name, self.arg_fv | body.fv | set(self.mapping))
                self.mapping = {**self.mapping, name: Var(new)}
                self._erased = {a: b for a, b in self._erased.items() if a != name}
                self.arg_fv = self.arg_fv | {new}
                return k(new, self.go(body))
            return k(name, self.go(body))
        finally:
            self.mapping, self._erased = saved


def rename(e: Expr, old: str, new: str) -> Expr:
    return subst(e, old, Var(new))


# ---------------------------------------------------------------------------
# alpha equivalence


def alpha_eq(a: AnyTerm, b: AnyTerm) -> bool:
    return _alpha(a, b, {}, {}, [0])


def _lvl(env: dict, name: str):
    return env.get(name, name)


def _alpha(a, b, ea: dict, eb: dict, counter: list) -> bool:
    if type(a) is not type(b):
        return False
    match a:
        case Var(x) | PVar(x):
            lx, ly = ea.get(x), eb.get(b.name)
            if lx is None and ly is None:
                return x == b.name
            return lx == ly
        case Star():
            return True
        case Binder(x, dom, body):
            if (dom is None) != (b.dom is None):
                return False
            if dom is not None and not _alpha(dom, b.dom, ea, eb, counter):
                return False
            counter[0] += 1
            lvl = counter[0]
            return _alpha(body, b.body, {**ea, x: lvl}, {**eb, b.name: lvl}, counter)
        case PLam(x, body):
            counter[0] += 1
            lvl = counter[0]
            return _alpha(body, b.body, {**ea, x: lvl}, {**eb, b.name: lvl}, counter)
        case Apply(f, x) | PApp(f, x):
            return _alpha(f, b.fun, ea, eb, counter) and _alpha(x, b.arg, ea, eb, counter)
        case Eq(l, r):
            return _alpha(l, b.lhs, ea, eb, counter) and _alpha(r, b.rhs, ea, eb, counter)
        case Beta(t):
            if (t is None) != (b.erasure is None):
                return False
            return t is None or _alpha(t, b.erasure, ea, eb, counter)
        case Rho(p, t):
            return _alpha(p, b.proof, ea, eb, counter) and _alpha(t, b.body, ea, eb, counter)
        case Delta(t, p):
            return _alpha(t, b.type, ea, eb, counter) and _alpha(p, b.proof, ea, eb, counter)
        case Phi(p, t, r):
            return (
                _alpha(p, b.proof, ea, eb, counter)
                and _alpha(t, b.term, ea, eb, counter)
                and _alpha(r, b.erasure, ea, eb, counter)
            )
        case IPair(x, y):
            return _alpha(x, b.first, ea, eb, counter) and _alpha(y, b.second, ea, eb, counter)
        case Proj(t, i):
            return i == b.index and _alpha(t, b.term, ea, eb, counter)
        case Let(x, ann, d, body):
            if (ann is None) != (b.ann is None):
                return False
            if ann is not None and not _alpha(ann, b.ann, ea, eb, counter):
                return False
            if not _alpha(d, b.defn, ea, eb, counter):
                return False
            counter[0] += 1
            lvl = counter[0]
            return _alpha(body, b.body, {**ea, x: lvl}, {**eb, b.name: lvl}, counter)
    raise TypeError(f"unexpected node {a!r}")


def module_alpha_eq(a: ModuleUnit, b: ModuleUnit) -> bool:
    """Alpha-equivalence of modules: parameters and items compared in order."""
    if a.name != b.name or a.header_at != b.header_at:
        return False
    if len(a.params) != len(b.params) or len(a.items) != len(b.items):
        return False
    for p, q in zip(a.params, b.params):
        if p.name != q.name or p.erased != q.erased or not alpha_eq(p.classifier, q.classifier):
            return False
    for x, y in zip(a.items, b.items):
        match x:
            case Import(path, args):
                if not isinstance(y, Import) or path != y.path or len(args) != len(y.args):
                    return False
                if any(u.mode != v.mode or not alpha_eq(u.expr, v.expr) for u, v in zip(args, y.args)):
                    return False
            case Definition(name, cls, body):
                if not isinstance(y, Definition) or name != y.name:
                    return False
                if not (alpha_eq(cls, y.classifier) and alpha_eq(body, y.body)):
                    return False
    return True


# ---------------------------------------------------------------------------
# erasure


class ErasureError(ValueError):
    """Raised when a type-only construct is erased as if it were a term."""


def erase(t: Expr) -> PureTerm:
    """Map an annotated term to its pure untyped lambda term."""
    match t:
        case Var(x):
            return PVar(x)
        case Lam(x, _, body):
            return PLam(x, erase(body))
        case ELam(_, _, body):
            return erase(body)
        case App(f, a):
            return PApp(erase(f), erase(a))
        case EApp(f, _) | TApp(f, _):
            return erase(f)
        case Beta(None):
            return pure.IDENTITY
        case Beta(e):
            return erase(e)
        case Rho(_, body):
            return erase(body)
        case Delta():
            return pure.IDENTITY
        case Phi(_, _, e):
            return erase(e)
        case IPair(first, _):
            return erase(first)
        case Proj(inner, _):
            return erase(inner)
        case Let(x, _, d, body):
            b = erase(body)
            if x not in b.fv:
                return b
            return pure.substitute(b, x, erase(d))
    raise ErasureError(f"cannot erase type-level syntax: {pretty(t)}")


def try_erase(t: Expr) -> Optional[PureTerm]:
    try:
        return erase(t)
    except ErasureError:
        return None


def embed(t: PureTerm) -> Expr:
    """View a pure term as annotated syntax."""
    match t:
        case PVar(x):
            return Var(x)
        case PLam(x, body):
            return Lam(x, None, embed(body))
        case PApp(f, a):
            return App(embed(f), embed(a))
    raise TypeError(f"not a pure term: {t!r}")


# ---------------------------------------------------------------------------
# pretty printing

_TOP, _APP, _ATOM = 0, 1, 2


def pretty(t: AnyTerm | ModuleUnit, short_globals: bool = False) -> str:
    """Render annotated syntax, pure terms or whole modules in surface notation."""
    if isinstance(t, PureTerm):
        return pure.pretty_pure(t, short_globals)
    if isinstance(t, ModuleUnit):
        return _pretty_module(t, short_globals)
    return _Printer(short_globals).go(t, _TOP)


class _Printer:
    def __init__(self, short_globals: bool):
        self.short = short_globals

    def name(self, n: str) -> str:
        return n.split("@", 1)[0] if self.short else n

    def go(self, t: Expr, level: int) -> str:
        s, lv = self.render(t)
        return f"({s})" if lv < level else s

    def render(self, t: Expr) -> tuple[str, int]:
        match t:
            case Var(x):
                return self.name(x), _ATOM
            case Star():
                return "★", _ATOM
            case Pi(x, dom, body) | All(x, dom, body) if x == "_" or x not in body.fv:
                arrow = "➔" if isinstance(t, Pi) else "➾"
                return f"{self.go(dom, _APP)} {arrow} {self.go(body, _TOP)}", _TOP
            case Binder(x, dom, body):
                sym = {Pi: "Π", All: "∀", Iota: "ι", Lam: "λ", ELam: "Λ"}[type(t)]
                ann = f": {self.go(dom, _TOP)}" if dom is not None else ""
                return f"{sym} {self.name(x)}{ann}. {self.go(body, _TOP)}", _TOP
            case Eq(l, r):
                return f"{{{pure.pretty_pure(l, self.short)} ≃ {pure.pretty_pure(r, self.short)}}}", _ATOM
            case App(f, a):
                # `{` never starts a relevant argument, so equations need parentheses
                arg = self.go(a, _ATOM)
                if arg.startswith("{"):
                    arg = f"({arg})"
                return f"{self.go(f, _APP)} {arg}", _APP
            case EApp(f, a):
                return f"{self.go(f, _APP)} -{self.go(a, _ATOM)}", _APP
            case TApp(f, a):
                return f"{self.go(f, _APP)} ·{self.go(a, _ATOM)}", _APP
            case Beta(None):
                return "β", _ATOM
            case Beta(e):
                return f"β{{{self.go(e, _TOP)}}}", _ATOM
            case Rho(p, body):
                return f"ρ {self.go(p, _APP)} - {self.go(body, _TOP)}", _TOP
            case Delta(ty, p):
                return f"δ {self.go(ty, _APP)} - {self.go(p, _TOP)}", _TOP
            case Phi(p, term, e):
                return f"φ {self.go(p, _APP)} - {self.go(term, _APP)} {{{self.go(e, _TOP)}}}", _TOP
            case IPair(a, b):
                return f"[{self.go(a, _TOP)}, {self.go(b, _TOP)}]", _ATOM
            case Proj(inner, i):
                return f"{self.go(inner, _ATOM)}.{i}", _ATOM
            case Let(x, ann, d, body):
                a = f" : {self.go(ann, _TOP)}" if ann is not None else ""
                return f"[{self.name(x)}{a} = {self.go(d, _TOP)}] - {self.go(body, _TOP)}", _TOP
        raise TypeError(f"unexpected node {t!r}")


def _pretty_module(m: ModuleUnit, short: bool) -> str:
    pr = _Printer(short)
    params = "".join(
        f" {{{p.name}: {pr.go(p.classifier, _TOP)}}}" if p.erased else f" ({p.name}: {pr.go(p.classifier, _TOP)})"
        for p in m.params
    )
    lines = []
    for k, item in enumerate(m.items):
        if k == m.header_at:
            lines += [f"module {m.name}{params}.", ""]
        match item:
            case Import(path, args):
                prefix = {"type": " ·", "erased": " -", "relevant": " "}
                rendered = "".join(prefix[a.mode] + pr.go(a.expr, _ATOM) for a in args)
                lines.append(f"import {path}{rendered}.")
            case Definition(name, cls, body):
                lines.append(f"{name} : {pr.go(cls, _TOP)}\n  = {pr.go(body, _TOP)} .")
    if m.header_at >= len(m.items):
        lines += [f"module {m.name}{params}.", ""]
    return "\n".join(lines) + "\n"
