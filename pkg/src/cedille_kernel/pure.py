"""Pure (untyped) lambda terms: the image of erasure.

Variables are named; substitution is capture-avoiding and alpha-equivalence
is checked with de Bruijn levels assigned on the fly.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping


class PureTerm:
    """Base class for pure terms."""

    __slots__ = ()

    @property
    def fv(self) -> frozenset[str]:
        raise NotImplementedError

    def __str__(self) -> str:
        return pretty_pure(self)


@dataclass(frozen=True)
class PVar(PureTerm):
    name: str

    @cached_property
    def fv(self) -> frozenset[str]:
        return frozenset((self.name,))


@dataclass(frozen=True)
class PLam(PureTerm):
    name: str
    body: PureTerm

    @cached_property
    def fv(self) -> frozenset[str]:
        return self.body.fv - {self.name}


@dataclass(frozen=True)
class PApp(PureTerm):
    fun: PureTerm
    arg: PureTerm

    @cached_property
    def fv(self) -> frozenset[str]:
        return self.fun.fv | self.arg.fv


IDENTITY = PLam("x", PVar("x"))
TRUE = PLam("x", PLam("y", PVar("x")))
FALSE = PLam("x", PLam("y", PVar("y")))


def fresh_name(base: str, avoid: Iterable[str] | frozenset[str]) -> str:
    """Return `base` primed until it is not in `avoid`."""
    avoid = avoid if isinstance(avoid, (set, frozenset)) else set(avoid)
    name = base
    while name in avoid:
        name += "'"
    return name


def lams(names: Iterable[str], body: PureTerm) -> PureTerm:
    for n in reversed(list(names)):
        body = PLam(n, body)
    return body


def apps(head: PureTerm, args: Iterable[PureTerm]) -> PureTerm:
    for a in args:
        head = PApp(head, a)
    return head


def spine(t: PureTerm) -> tuple[PureTerm, list[PureTerm]]:
    args = []
    while isinstance(t, PApp):
        args.append(t.arg)
        t = t.fun
    args.reverse()
    return t, args


def substitute(body: PureTerm, var: str, arg: PureTerm) -> PureTerm:
    """Capture-avoiding `body[var := arg]`."""
    return substitute_many(body, {var: arg})


def substitute_many(body: PureTerm, mapping: Mapping[str, PureTerm]) -> PureTerm:
    """Simultaneous capture-avoiding substitution."""
    mapping = {k: v for k, v in mapping.items() if k in body.fv}
    if not mapping:
        return body
    arg_fv: set[str] = set()
    for v in mapping.values():
        arg_fv |= v.fv
    return _subst(body, mapping, frozenset(arg_fv))


def _subst(t: PureTerm, mapping: Mapping[str, PureTerm], arg_fv: frozenset[str]) -> PureTerm:
    if not any(k in t.fv for k in mapping):
        return t
    match t:
        case PVar(name):
            return mapping.get(name, t)
        case PApp(f, a):
            return PApp(_subst(f, mapping, arg_fv), _subst(a, mapping, arg_fv))
        case PLam(name, body):
            if name in mapping:
                mapping = {k: v for k, v in mapping.items() if k != name}
                if not any(k in body.fv for k in mapping):
                    return t
            if name in arg_fv:
                new = fresh_name(name, arg_fv | body.fv | set(mapping))
                mapping = dict(mapping)
                mapping[name] = PVar(new)
                return PLam(new, _subst(body, mapping, arg_fv | {new}))
            return PLam(name, _subst(body, mapping, arg_fv))
    raise TypeError(f"not a pure term: {t!r}")


def alpha_eq(a: PureTerm, b: PureTerm) -> bool:
    return _alpha(a, b, {}, {}, 0)


def _alpha(a: PureTerm, b: PureTerm, ea: dict, eb: dict, depth: int) -> bool:
    while True:
        match a, b:
            case PVar(x), PVar(y):
                lx, ly = ea.get(x), eb.get(y)
                if lx is None and ly is None:
                    return x == y
                return lx == ly
            case PLam(x, ba), PLam(y, bb):
                ea = {**ea, x: depth}
                eb = {**eb, y: depth}
                a, b, depth = ba, bb, depth + 1
            case PApp(fa, aa), PApp(fb, ab):
                if not _alpha(aa, ab, ea, eb, depth):
                    return False
                a, b = fa, fb
            case _:
                return False


def eta_reduce(t: PureTerm) -> PureTerm:
    """Contract every eta-redex, bottom up, giving the eta-short form."""
    match t:
        case PVar():
            return t
        case PApp(f, a):
            f2, a2 = eta_reduce(f), eta_reduce(a)
            return t if (f2 is f and a2 is a) else PApp(f2, a2)
        case PLam(x, body):
            b = eta_reduce(body)
            if isinstance(b, PApp) and b.arg == PVar(x) and x not in b.fun.fv:
                return b.fun
            return t if b is body else PLam(x, b)
    raise TypeError(f"not a pure term: {t!r}")


def size(t: PureTerm) -> int:
    n = 0
    stack = [t]
    while stack:
        u = stack.pop()
        n += 1
        match u:
            case PLam(_, b):
                stack.append(b)
            case PApp(f, a):
                stack.extend((f, a))
    return n


def pretty_pure(t: PureTerm, short_globals: bool = False) -> str:
    """Render with minimal parentheses: `λ x. x`, application left-nested."""

    def name(n: str) -> str:
        return n.split("@", 1)[0] if short_globals else n

    def go(t: PureTerm, ctx: str) -> str:
        # ctx: "top" (anything), "fun" (function position), "arg" (argument)
        match t:
            case PVar(n):
                return name(n)
            case PLam(x, body):
                s = f"λ {name(x)}. {go(body, 'top')}"
                return s if ctx == "top" else f"({s})"
            case PApp(f, a):
                s = f"{go(f, 'fun')} {go(a, 'arg')}"
                return f"({s})" if ctx == "arg" else s
        raise TypeError(f"not a pure term: {t!r}")

    return go(t, "top")
