"""Bidirectional type checker for the CDLE fragment.

Terms, types and kinds share one syntax. `infer` returns the classifier of
any expression (a type for terms, a kind for types); `check` pushes an
expected classifier inward where the form needs it (λ, Λ, β, ρ, φ, pairs).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

from . import pure
from .delta import DeltaVerdict, delta_applicable
from .pure import PApp, PLam, PureTerm, PVar, fresh_name
from .reduce import DEFAULT_FUEL, Verdict, beta_eta_equal, normalize
from .syntax import (
    All,
    App,
    Apply,
    Beta,
    Binder,
    Delta,
    EApp,
    ELam,
    Eq,
    ErasureError,
    Expr,
    IPair,
    Iota,
    Lam,
    Let,
    Phi,
    Pi,
    Proj,
    Rho,
    Span,
    Star,
    TApp,
    Var,
    alpha_eq,
    embed,
    erase,
    is_kind,
    pretty,
    rebuild,
    spine,
    subst,
    try_erase,
)


class ErrorKind(str, enum.Enum):
    MISMATCH = "mismatch"
    UNBOUND = "unbound"
    ERASED_VAR_OCCURS = "erased-var-occurs"
    DELTA_INAPPLICABLE = "delta-inapplicable"
    INTERSECTION_COMPONENTS_DIFFER = "intersection-components-differ"
    RHO_NO_OCCURRENCE = "rho-no-occurrence"
    KIND_MISMATCH = "kind-mismatch"
    FUEL = "fuel"
    CANNOT_INFER = "cannot-infer"

    def __str__(self) -> str:
        return self.value


class TypeCheckError(Exception):
    """A rejected judgment, with the innermost source position known."""

    def __init__(
        self,
        kind: ErrorKind,
        message: str,
        span: Span = None,
        expected: Optional[Expr] = None,
        actual: Optional[Expr] = None,
    ):
        super().__init__(message)
        self.kind = kind
        self.message = message
        self.span = span
        self.expected = expected
        self.actual = actual
        self.file: Optional[str] = None
        self.definition: Optional[str] = None

    def __str__(self) -> str:
        where = ""
        if self.file:
            where = self.file
        if self.span:
            where += f":{self.span[0]}:{self.span[1]}"
        parts = [f"{where}: " if where else "", f"[{self.kind}] "]
        if self.definition:
            parts.append(f"in {self.definition}: ")
        parts.append(self.message)
        if self.expected is not None:
            parts.append(f"\n  expected: {pretty(self.expected, short_globals=True)}")
        if self.actual is not None:
            parts.append(f"\n  actual:   {pretty(self.actual, short_globals=True)}")
        return "".join(parts)


@dataclass(frozen=True)
class Entry:
    name: str
    classifier: Expr
    is_type: bool  # a type variable (classifier is a kind)
    erased: bool = False
    value: Optional[Expr] = None


class Context:
    """Ordered telescope; later entries shadow earlier ones."""

    __slots__ = ("_entries", "_index")

    def __init__(self, entries: tuple[Entry, ...] = ()):
        self._entries = entries
        self._index = {e.name: e for e in entries}

    def extend(self, entry: Entry) -> "Context":
        ctx = Context.__new__(Context)
        ctx._entries = self._entries + (entry,)
        ctx._index = {**self._index, entry.name: entry}
        return ctx

    def term(self, name: str, ty: Expr, erased: bool = False) -> "Context":
        return self.extend(Entry(name, ty, False, erased))

    def type(self, name: str, kind: Expr) -> "Context":
        return self.extend(Entry(name, kind, True))

    def define(self, name: str, classifier: Expr, value: Expr) -> "Context":
        return self.extend(Entry(name, classifier, is_kind(classifier), False, value))

    def lookup(self, name: str) -> Optional[Entry]:
        return self._index.get(name)

    def __contains__(self, name: str) -> bool:
        return name in self._index

    @property
    def names(self) -> frozenset[str]:
        return frozenset(self._index)

    @property
    def entries(self) -> tuple[Entry, ...]:
        return self._entries


@dataclass
class GlobalDef:
    gid: str
    name: str
    module: str
    classifier: Expr
    body: Expr
    is_type: bool
    index: int


class Env:
    """Checked global definitions, stored closed (lifted over module parameters)."""

    def __init__(self):
        self.defs: dict[str, GlobalDef] = {}
        self._nf: dict[str, PureTerm] = {}

    def add(self, gid: str, name: str, module: str, classifier: Expr, body: Expr, is_type: bool) -> GlobalDef:
        g = GlobalDef(gid, name, module, classifier, body, is_type, len(self.defs))
        self.defs[gid] = g
        return g

    def __contains__(self, gid: str) -> bool:
        return gid in self.defs

    def get(self, gid: str) -> Optional[GlobalDef]:
        return self.defs.get(gid)


@dataclass
class CheckOptions:
    delta_mode: str = "bohm"  # "bohm" | "strict"
    strict_intersection: bool = False
    fuel: int = DEFAULT_FUEL
    rho_no_occurrence_is_error: bool = False


@dataclass
class Warning_:
    kind: ErrorKind
    message: str
    span: Span


class Checker:
    def __init__(self, env: Optional[Env] = None, options: Optional[CheckOptions] = None):
        self.env = env or Env()
        self.options = options or CheckOptions()
        self.warnings: list[Warning_] = []

    # ------------------------------------------------------------------
    # errors and binders

    def error(self, kind: ErrorKind, msg: str, expected=None, actual=None) -> TypeCheckError:
        return TypeCheckError(kind, msg, None, expected, actual)

    def bind(self, ctx: Context, name: str, dom: Expr, erased: bool, *bodies: Expr):
        """Extend `ctx` with a variable, renaming it away from names in scope."""
        new = name
        if name in ctx or name in self.env:
            new = fresh_name(name, ctx.names | set().union(*(b.fv for b in bodies)))
            bodies = tuple(subst(b, name, Var(new)) for b in bodies)
        if is_kind(dom):
            ctx = ctx.type(new, dom)
        else:
            ctx = ctx.term(new, dom, erased)
        return ctx, new, bodies

    def bind_def(self, ctx: Context, name: str, classifier: Expr, value: Expr, body: Expr):
        new = name
        if name in ctx or name in self.env:
            new = fresh_name(name, ctx.names | body.fv)
            body = subst(body, name, Var(new))
        return ctx.define(new, classifier, value), new, body

    # ------------------------------------------------------------------
    # sorts

    def classify(self, ctx: Context, c: Expr) -> str:
        """Validate a classifier; return "kind" or "type"."""
        if is_kind(c):
            self.check_kind(ctx, c)
            return "kind"
        k = self.infer(ctx, c)
        if not isinstance(k, Star):
            if is_kind(k):
                raise self.error(ErrorKind.KIND_MISMATCH, "expected a type of kind ★", Star(), k)
            raise self.error(ErrorKind.KIND_MISMATCH, "expected a type, found a term", actual=c)
        return "type"

    def check_kind(self, ctx: Context, k: Expr) -> None:
        match k:
            case Star():
                return
            case Pi(x, dom, body):
                self.classify(ctx, dom)
                ctx2, _, (body2,) = self.bind(ctx, x, dom, False, body)
                self.check_kind(ctx2, body2)
            case _:
                raise self.error(ErrorKind.KIND_MISMATCH, "not a kind", actual=k)

    def kind_of(self, ctx: Context, ty: Expr) -> Expr:
        k = self.infer(ctx, ty)
        if not is_kind(k):
            raise self.error(ErrorKind.KIND_MISMATCH, "expected a type, found a term", actual=ty)
        return k

    # ------------------------------------------------------------------
    # inference

    def infer(self, ctx: Context, e: Expr) -> Expr:
        try:
            return self._infer(ctx, e)
        except TypeCheckError as err:
            if err.span is None:
                err.span = e.span
            raise
        except ErasureError as exc:
            raise TypeCheckError(ErrorKind.KIND_MISMATCH, str(exc), e.span) from None

    def _infer(self, ctx: Context, e: Expr) -> Expr:
        match e:
            case Var(x):
                entry = ctx.lookup(x)
                if entry is not None:
                    return entry.classifier
                g = self.env.get(x)
                if g is not None:
                    return g.classifier
                raise self.error(ErrorKind.UNBOUND, f"unbound name {x}")
            case Star():
                raise self.error(ErrorKind.KIND_MISMATCH, "★ has no classifier")
            case Pi(x, dom, body) | All(x, dom, body) | Iota(x, dom, body):
                sort = self.classify(ctx, dom)
                if sort == "kind" and not isinstance(e, All):
                    raise self.error(ErrorKind.KIND_MISMATCH, "only ∀ may quantify over a kind in a type", actual=dom)
                ctx2, _, (body2,) = self.bind(ctx, x, dom, isinstance(e, All), body)
                k = self.infer(ctx2, body2)
                if not isinstance(k, Star):
                    raise self.error(ErrorKind.KIND_MISMATCH, "body of a product must be a type", Star(), k)
                return Star()
            case Eq(l, r):
                for v in sorted(l.fv | r.fv):
                    self.require_term_var(ctx, v)
                return Star()
            case Lam(x, None, _) | ELam(x, None, _):
                raise self.error(ErrorKind.CANNOT_INFER, f"cannot infer the type of an unannotated abstraction over {x}")
            case Lam(x, dom, body):
                sort = self.classify(ctx, dom)
                ctx2, x2, (body2,) = self.bind(ctx, x, dom, False, body)
                c = self.infer(ctx2, body2)
                if not is_kind(c) and sort == "kind":
                    raise self.error(ErrorKind.KIND_MISMATCH, "a term-level λ cannot bind a type; use Λ")
                return Pi(x2, dom, c)
            case ELam(x, dom, body):
                sort = self.classify(ctx, dom)
                ctx2, x2, (body2,) = self.bind(ctx, x, dom, True, body)
                c = self.infer(ctx2, body2)
                if is_kind(c):
                    raise self.error(ErrorKind.KIND_MISMATCH, "Λ abstracts terms, not types")
                if sort == "type":
                    self.require_erased(x2, body2)
                return All(x2, dom, c)
            case App(f, a):
                c = self.whnf(ctx, self.infer(ctx, f))
                match c:
                    case Pi(x, dom, cod) if not is_kind(dom):
                        self.check(ctx, a, dom)
                        return subst(cod, x, a)
                    case Pi() | All(_, Star() | Pi(), _):
                        raise self.error(ErrorKind.MISMATCH, "expected a type argument (write ·T)", actual=c)
                    case All():
                        raise self.error(ErrorKind.MISMATCH, "expected an erased argument (write -t)", actual=c)
                raise self.error(ErrorKind.MISMATCH, "applied expression is not a function", actual=c)
            case EApp(f, a):
                c = self.whnf(ctx, self.infer(ctx, f))
                match c:
                    case All(x, dom, cod) if not is_kind(dom):
                        self.check(ctx, a, dom)
                        return subst(cod, x, a)
                raise self.error(ErrorKind.MISMATCH, "erased application to an expression without ∀ over a term", actual=c)
            case TApp(f, t):
                c = self.whnf(ctx, self.infer(ctx, f))
                match c:
                    case All(x, dom, cod) | Pi(x, dom, cod) if is_kind(dom):
                        self.check(ctx, t, dom)
                        return subst(cod, x, t)
                raise self.error(ErrorKind.MISMATCH, "type application to an expression without ∀ over a type", actual=c)
            case Beta() | IPair():
                raise self.error(ErrorKind.CANNOT_INFER, f"cannot infer the type of {pretty(e, True)}; annotate it")
            case Rho(proof, body):
                lhs, rhs = self.equation(ctx, proof)
                ty = self.infer(ctx, body)
                rewritten, n = rewrite_with(ty, rhs, lhs)
                if n == 0:
                    self.no_occurrence(rhs, ty, e)
                return rewritten
            case Delta(ty, proof):
                self.require_type(ctx, ty)
                lhs, rhs = self.equation(ctx, proof)
                self.require_delta(ctx, lhs, rhs)
                return ty
            case Phi(proof, term, er):
                ty = self.infer(ctx, term)
                self.require_phi(ctx, proof, term, er)
                return ty
            case Proj(t, i):
                c = self.whnf(ctx, self.infer(ctx, t))
                if not isinstance(c, Iota):
                    raise self.error(ErrorKind.MISMATCH, "projection from a non-intersection", actual=c)
                return c.dom if i == 1 else subst(c.body, c.name, Proj(t, 1))
            case Let(x, ann, d, body):
                ann = self.let_classifier(ctx, ann, d)
                ctx2, x2, body2 = self.bind_def(ctx, x, ann, d, body)
                return subst(self.infer(ctx2, body2), x2, d)
        raise self.error(ErrorKind.MISMATCH, f"unexpected syntax {pretty(e)}")

    # ------------------------------------------------------------------
    # checking

    def check(self, ctx: Context, e: Expr, expected: Expr) -> None:
        try:
            self._check(ctx, e, expected)
        except TypeCheckError as err:
            if err.span is None:
                err.span = e.span
            raise
        except ErasureError as exc:
            raise TypeCheckError(ErrorKind.KIND_MISMATCH, str(exc), e.span) from None

    def _check(self, ctx: Context, e: Expr, expected: Expr) -> None:
        match e:
            case Lam(x, ann, body) | ELam(x, ann, body):
                want = Pi if isinstance(e, Lam) else All
                w = self.whnf(ctx, expected)
                if not isinstance(w, want) or (isinstance(e, Lam) and isinstance(w, All)):
                    what = "λ" if want is Pi else "Λ"
                    raise self.error(ErrorKind.MISMATCH, f"{what} checked against a non-matching classifier", actual=w)
                if ann is not None:
                    self.classify(ctx, ann)
                    if not self.conv(ctx, ann, w.dom):
                        raise self.error(ErrorKind.MISMATCH, f"annotation on {x} disagrees with the expected domain", w.dom, ann)
                ctx2, x2, (body2,) = self.bind(ctx, x, w.dom, want is All, body)
                self.check(ctx2, body2, subst(w.body, w.name, Var(x2)))
                if want is All and not is_kind(w.dom):
                    self.require_erased(x2, body2)
            case Beta(er):
                w = self.whnf(ctx, expected)
                if not isinstance(w, Eq):
                    raise self.error(ErrorKind.MISMATCH, "β checked against a non-equality", actual=w)
                for v in sorted(w.lhs.fv | w.rhs.fv):
                    self.require_term_var(ctx, v)
                if not self.conv_pure(ctx, w.lhs, w.rhs):
                    raise self.error(ErrorKind.MISMATCH, "β: the two sides are not convertible", actual=w)
                if er is not None:
                    self.require_scoped(ctx, er)
            case Rho(proof, body):
                lhs, rhs = self.equation(ctx, proof)
                w = self.whnf(ctx, expected)
                rewritten, n = rewrite_with(w, lhs, rhs)
                if n == 0:
                    self.no_occurrence(lhs, w, e)
                self.check(ctx, body, rewritten)
            case Phi(proof, term, er):
                self.check(ctx, term, expected)
                self.require_phi(ctx, proof, term, er)
            case IPair(a, b):
                w = self.whnf(ctx, expected)
                if not isinstance(w, Iota):
                    raise self.error(ErrorKind.MISMATCH, "pair checked against a non-intersection", actual=w)
                self.check(ctx, a, w.dom)
                self.check(ctx, b, subst(w.body, w.name, a))
                ea, eb = erase(a), erase(b)
                same = pure.alpha_eq(ea, eb) if self.options.strict_intersection else self.conv_pure(ctx, ea, eb)
                if not same:
                    raise TypeCheckError(
                        ErrorKind.INTERSECTION_COMPONENTS_DIFFER,
                        f"components erase to different terms: {pure.pretty_pure(ea, True)} vs {pure.pretty_pure(eb, True)}",
                    )
            case Let(x, ann, d, body):
                ann = self.let_classifier(ctx, ann, d)
                ctx2, _, body2 = self.bind_def(ctx, x, ann, d, body)
                self.check(ctx2, body2, expected)
            case _:
                actual = self.infer(ctx, e)
                if not self.conv(ctx, actual, expected):
                    raise self.error(ErrorKind.MISMATCH, "classifier mismatch", expected, actual)

    # ------------------------------------------------------------------
    # side conditions

    def let_classifier(self, ctx: Context, ann: Optional[Expr], d: Expr) -> Expr:
        if ann is None:
            return self.infer(ctx, d)
        self.classify(ctx, ann)
        self.check(ctx, d, ann)
        return ann

    def require_type(self, ctx: Context, ty: Expr) -> None:
        if self.classify(ctx, ty) != "type":
            raise self.error(ErrorKind.KIND_MISMATCH, "expected a type, found a kind", actual=ty)

    def require_term_var(self, ctx: Context, v: str) -> None:
        entry = ctx.lookup(v)
        if entry is not None:
            if entry.is_type:
                raise self.error(ErrorKind.KIND_MISMATCH, f"type variable {v} used inside an equation")
            return
        g = self.env.get(v)
        if g is None:
            raise self.error(ErrorKind.UNBOUND, f"unbound name {v}")
        if g.is_type:
            raise self.error(ErrorKind.KIND_MISMATCH, f"type {g.name} used inside an equation")

    def require_scoped(self, ctx: Context, e: Expr) -> None:
        for v in sorted(erase(e).fv):
            self.require_term_var(ctx, v)

    def require_erased(self, x: str, body: Expr) -> None:
        if x in erase(body).fv:
            raise self.error(ErrorKind.ERASED_VAR_OCCURS, f"erased variable {x} occurs in the erasure of the body")

    def equation(self, ctx: Context, proof: Expr) -> tuple[PureTerm, PureTerm]:
        w = self.whnf(ctx, self.infer(ctx, proof))
        if not isinstance(w, Eq):
            raise TypeCheckError(ErrorKind.MISMATCH, "expected a proof of an equation", proof.span, actual=w)
        return w.lhs, w.rhs

    def require_delta(self, ctx: Context, lhs: PureTerm, rhs: PureTerm) -> None:
        if self.options.delta_mode == "strict":
            ok = self.conv_pure(ctx, lhs, pure.TRUE) and self.conv_pure(ctx, rhs, pure.FALSE)
            if not ok:
                raise self.error(ErrorKind.DELTA_INAPPLICABLE, "δ (strict) requires a proof of {λ x. λ y. x ≃ λ x. λ y. y}")
            return
        a, b = self.expand(ctx, lhs), self.expand(ctx, rhs)
        if a.fv or b.fv:
            raise self.error(ErrorKind.DELTA_INAPPLICABLE, "δ requires closed equation sides")
        verdict = delta_applicable(a, b, self.options.fuel)
        if verdict is DeltaVerdict.UNDECIDED:
            raise self.error(ErrorKind.FUEL, "fuel exhausted deciding δ applicability")
        if verdict is not DeltaVerdict.YES:
            raise self.error(ErrorKind.DELTA_INAPPLICABLE, "δ: the equation sides are convertible")

    def require_phi(self, ctx: Context, proof: Expr, term: Expr, er: Expr) -> None:
        lhs, rhs = self.equation(ctx, proof)
        self.require_scoped(ctx, er)
        if not self.conv_pure(ctx, lhs, erase(term)):
            raise self.error(ErrorKind.MISMATCH, "φ: left side of the equation does not match the retyped term")
        if not self.conv_pure(ctx, rhs, erase(er)):
            raise self.error(ErrorKind.MISMATCH, "φ: right side of the equation does not match the erasure")

    def no_occurrence(self, pattern: PureTerm, ty: Expr, e: Expr) -> None:
        msg = f"ρ found no occurrence of {pure.pretty_pure(pattern, True)}"
        if self.options.rho_no_occurrence_is_error:
            raise self.error(ErrorKind.RHO_NO_OCCURRENCE, msg, actual=ty)
        self.warnings.append(Warning_(ErrorKind.RHO_NO_OCCURRENCE, msg, e.span))

    # ------------------------------------------------------------------
    # definitional equality

    def definition(self, ctx: Context, head: Expr) -> Optional[Expr]:
        if not isinstance(head, Var):
            return None
        entry = ctx.lookup(head.name)
        if entry is not None:
            return entry.value if entry.is_type else None
        g = self.env.get(head.name)
        if g is not None and g.is_type:
            return g.body
        return None

    def rank(self, ctx: Context, head: Expr) -> int:
        if isinstance(head, Var):
            if head.name in ctx:
                return 1 << 30
            g = self.env.get(head.name)
            if g is not None:
                return g.index
        return -1

    def whnf(self, ctx: Context, e: Expr, unfold: bool = True) -> Expr:
        """Type-level weak head normal form: β, let, and (optionally) δ-unfolding."""
        while True:
            if isinstance(e, Let):
                e = subst(e.body, e.name, e.defn)
                continue
            head, nodes = spine(e)
            if nodes:
                if isinstance(head, Lam):
                    e = rebuild(subst(head.body, head.name, nodes[0].arg), nodes[1:])
                    continue
                if isinstance(head, Let):
                    e = rebuild(subst(head.body, head.name, head.defn), nodes)
                    continue
            if unfold:
                d = self.definition(ctx, head)
                if d is not None:
                    e = rebuild(d, nodes)
                    continue
            return e

    def conv(self, ctx: Context, a: Expr, b: Expr) -> bool:
        """Definitional equality of classifiers."""
        if a is b or alpha_eq(a, b):
            return True
        a = self.whnf(ctx, a, unfold=False)
        b = self.whnf(ctx, b, unfold=False)
        ha, na = spine(a)
        hb, nb = spine(b)
        if (
            isinstance(ha, Var)
            and isinstance(hb, Var)
            and ha.name == hb.name
            and len(na) == len(nb)
            and all(type(x) is type(y) for x, y in zip(na, nb))
            and all(self.conv_arg(ctx, x, y) for x, y in zip(na, nb))
        ):
            return True
        da, db = self.definition(ctx, ha), self.definition(ctx, hb)
        if da is not None or db is not None:
            ra, rb = self.rank(ctx, ha), self.rank(ctx, hb)
            if da is not None and (db is None or ra >= rb):
                a = rebuild(da, na)
            if db is not None and (da is None or rb >= ra):
                b = rebuild(db, nb)
            return self.conv(ctx, a, b)
        match a, b:
            case Star(), Star():
                return True
            case (Pi(), Pi()) | (All(), All()) | (Iota(), Iota()):
                if not self.conv(ctx, a.dom, b.dom):
                    return False
                return self.conv_under(ctx, a, b, a.dom)
            case Lam(), Lam():
                dom = a.dom if a.dom is not None else b.dom
                return self.conv_under(ctx, a, b, dom if dom is not None else Star())
            case Eq(l1, r1), Eq(l2, r2):
                return self.conv_pure(ctx, l1, l2) and self.conv_pure(ctx, r1, r2)
        return False

    def conv_under(self, ctx: Context, a: Binder, b: Binder, dom: Expr) -> bool:
        z = fresh_name(a.name if a.name != "_" else "z", ctx.names | a.body.fv | b.body.fv)
        ctx2 = ctx.type(z, dom) if is_kind(dom) else ctx.term(z, dom)
        return self.conv(ctx2, subst(a.body, a.name, Var(z)), subst(b.body, b.name, Var(z)))

    def conv_arg(self, ctx: Context, x: Apply, y: Apply) -> bool:
        if isinstance(x, TApp):
            return self.conv(ctx, x.arg, y.arg)
        ea, eb = try_erase(x.arg), try_erase(y.arg)
        if ea is None or eb is None:
            return self.conv(ctx, x.arg, y.arg)
        return self.conv_pure(ctx, ea, eb)

    def conv_pure(self, ctx: Context, a: PureTerm, b: PureTerm) -> bool:
        if pure.alpha_eq(a, b):
            return True
        verdict = beta_eta_equal(self.expand(ctx, a), self.expand(ctx, b), self.options.fuel)
        if verdict is Verdict.UNDECIDED:
            raise self.error(ErrorKind.FUEL, "fuel exhausted while comparing terms")
        return verdict is Verdict.EQUAL

    def expand(self, ctx: Context, t: PureTerm) -> PureTerm:
        """Replace let-bound locals and globals by their (normalized) definitions."""
        mapping = {}
        for v in t.fv:
            entry = ctx.lookup(v)
            if entry is not None:
                if entry.value is not None and not entry.is_type:
                    mapping[v] = self.expand(ctx, erase(entry.value))
            elif v in self.env:
                mapping[v] = self.normal_form(v)
        return pure.substitute_many(t, mapping)

    def normal_form(self, gid: str) -> PureTerm:
        cache = self.env._nf
        if gid not in cache:
            g = self.env.defs[gid]
            if g.is_type:
                cache[gid] = PVar(gid)
            else:
                t = self.expand(Context(), erase(g.body))
                tr = normalize(t, self.options.fuel)
                cache[gid] = t if tr.fuel_exhausted else tr.result
        return cache[gid]

    # ------------------------------------------------------------------
    # definitions

    def check_definition(self, ctx: Context, name: str, classifier: Expr, body: Expr) -> Context:
        """Check `name : classifier = body` and return `ctx` with a transparent binding."""
        self.classify(ctx, classifier)
        self.check(ctx, body, classifier)
        if name == "_":
            return ctx
        return ctx.define(name, classifier, body)


# ----------------------------------------------------------------------
# ρ rewriting


def rewrite_with(ty: Expr, lhs: PureTerm, rhs: PureTerm) -> tuple[Expr, int]:
    """Replace every subterm of `ty` whose erasure is α-equivalent to `lhs` by `rhs`.

    Returns the rewritten expression and the number of replacements.
    """
    rw = _Rewriter(lhs, rhs)
    return rw.go(ty), rw.count


class _Rewriter:
    def __init__(self, lhs: PureTerm, rhs: PureTerm):
        self.lhs = lhs
        self.rhs = rhs
        self.rhs_expr = embed(rhs)
        self.avoid = lhs.fv | rhs.fv
        self.count = 0

    def matches(self, e: Expr) -> bool:
        if not self.lhs.fv <= e.fv:
            return False
        if isinstance(e, (Pi, All, Iota, Eq, Star)):
            return False
        er = try_erase(e)
        return er is not None and pure.alpha_eq(er, self.lhs)

    def go(self, e: Expr) -> Expr:
        if self.matches(e):
            self.count += 1
            return self.rhs_expr
        match e:
            case Var() | Star():
                return e
            case Binder(x, dom, body):
                dom2 = self.go(dom) if dom is not None else None
                if x in self.avoid:
                    new = fresh_name(x, self.avoid | body.fv)
                    body, x = subst(body, x, Var(new)), new
                return type(e)(x, dom2, self.go(body), e.span)
            case Apply(f, a):
                return type(e)(self.go(f), self.go(a), e.span)
            case Eq(l, r):
                return Eq(self.pure(l), self.pure(r), e.span)
            case Beta(t):
                return e if t is None else Beta(self.go(t), e.span)
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
            case Let(x, ann, d, body):
                ann2 = self.go(ann) if ann is not None else None
                d2 = self.go(d)
                if x in self.avoid:
                    new = fresh_name(x, self.avoid | body.fv)
                    body, x = subst(body, x, Var(new)), new
                return Let(x, ann2, d2, self.go(body), e.span)
        raise TypeError(f"unexpected node {e!r}")

    def pure(self, t: PureTerm) -> PureTerm:
        if pure.alpha_eq(t, self.lhs):
            self.count += 1
            return self.rhs
        match t:
            case PVar():
                return t
            case PApp(f, a):
                return PApp(self.pure(f), self.pure(a))
            case PLam(x, body):
                if x in self.avoid:
                    new = fresh_name(x, self.avoid | body.fv)
                    body, x = pure.substitute(body, x, PVar(new)), new
                return PLam(x, self.pure(body))
        raise TypeError(f"not a pure term: {t!r}")
