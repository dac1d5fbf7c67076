"""Separation of closed normalizing terms: the δ side condition and Böhm-out.

`delta_applicable` only needs beta-eta inconvertibility. `bohm_discriminate`
builds an explicit context sending one term to λ x. λ y. x and the other to
λ x. λ y. y, and re-runs the reducer to certify it.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .pure import (
    FALSE,
    IDENTITY,
    TRUE,
    PApp,
    PLam,
    PureTerm,
    PVar,
    alpha_eq,
    apps,
    eta_reduce,
    lams,
    spine,
    substitute_many,
)
from .reduce import DEFAULT_FUEL, ReductionTrace, Verdict, beta_eta_equal, normalize


class DeltaVerdict(str, enum.Enum):
    YES = "yes"
    NO = "no"
    UNDECIDED = "undecided"

    def __str__(self) -> str:
        return self.value


class OpenTermError(ValueError):
    """A separation query was given a term with free variables."""


class NotSeparableError(ValueError):
    """The two terms are beta-eta convertible."""


class SeparationFuelError(ValueError):
    """A term did not normalize within the given fuel."""


@dataclass(frozen=True)
class Discriminator:
    context: PureTerm  # λ hole. ..., applied to the plugged term
    certificate: tuple[ReductionTrace, ReductionTrace]


def _require_closed(*terms: PureTerm) -> None:
    for t in terms:
        if t.fv:
            raise OpenTermError(f"term has free variables: {', '.join(sorted(t.fv))}")


def delta_applicable(a: PureTerm, b: PureTerm, fuel: int = DEFAULT_FUEL) -> DeltaVerdict:
    _require_closed(a, b)
    match beta_eta_equal(a, b, fuel):
        case Verdict.DISTINCT:
            return DeltaVerdict.YES
        case Verdict.EQUAL:
            return DeltaVerdict.NO
    return DeltaVerdict.UNDECIDED


class _Separator:
    """Böhm-out on beta-normal forms.

    Fresh symbols stand for the arguments fed to both terms. Each round opens
    leading abstractions by applying symbols, then looks at the two head
    normal forms `h A1..Am` and `g B1..Bn`:
    - different heads: instantiate them as constant functions returning the
      two Booleans;
    - same head, different arity: instantiate the head to discard its
      arguments and return its next one, then feed extra arguments so the
      two sides land on different Booleans;
    - same head and arity: instantiate the head with a tupling term, select
      the first differing argument and continue on that pair.
    """

    def __init__(self, fuel: int, extra_arity: int):
        self.fuel = fuel
        self.extra = extra_arity
        self.counter = 0
        self.symbols: set[str] = set()
        self.inst: dict[str, PureTerm] = {}
        self.args: list[PureTerm] = []

    def fresh(self) -> str:
        self.counter += 1
        name = f"#s{self.counter}"
        self.symbols.add(name)
        return name

    def nf(self, t: PureTerm) -> PureTerm:
        tr = normalize(t, self.fuel)
        if tr.fuel_exhausted:
            raise SeparationFuelError("normalization did not finish within fuel")
        return tr.result

    def feed(self, p: PureTerm, q: PureTerm, extra: list[PureTerm]):
        self.args.extend(extra)
        return self.nf(apps(p, extra)), self.nf(apps(q, extra))

    def commit(self, sym: str, value: PureTerm, p: PureTerm, q: PureTerm):
        self.inst[sym] = value
        m = {sym: value}
        return self.nf(substitute_many(p, m)), self.nf(substitute_many(q, m))

    def run(self, p: PureTerm, q: PureTerm) -> PureTerm:
        for _ in range(10_000):
            while isinstance(p, PLam) or isinstance(q, PLam):
                p, q = self.feed(p, q, [PVar(self.fresh())])
            h, xs = spine(p)
            g, ys = spine(q)
            assert isinstance(h, PVar) and isinstance(g, PVar)
            if h.name != g.name:
                self.inst[h.name] = lams(_zs(len(xs)), TRUE)
                self.inst[g.name] = lams(_zs(len(ys)), FALSE)
                return self.context()
            m, n = len(xs), len(ys)
            if m != n:
                d = abs(m - n)
                self.inst[h.name] = lams(_zs(max(m, n)) + ["s"], PVar("s"))
                # the shorter side returns the last extra argument, the
                # longer side applies the first one to the rest
                short_val, long_val = (TRUE, FALSE) if m < n else (FALSE, TRUE)
                first = lams(_zs(d), long_val)
                extra = [first] + [IDENTITY] * (d - 1) + [short_val]
                self.args.extend(extra)
                return self.context()
            i = next(k for k in range(m) if not _eta_eq(xs[k], ys[k]))
            r = max(_max_arity(p, h.name), _max_arity(q, h.name)) + self.extra
            zs = _zs(r)
            tupler = lams(zs + ["s"], apps(PVar("s"), [PVar(z) for z in zs]))
            p, q = self.commit(h.name, tupler, p, q)
            selector = lams([f"w{k}" for k in range(r)], PVar(f"w{i}"))
            p, q = self.feed(p, q, [IDENTITY] * (r - m) + [selector])
            if _eta_eq(p, q):
                raise _Collapse()
        raise SeparationFuelError("separation did not converge")

    def context(self) -> PureTerm:
        fill = {s: self.inst.get(s, IDENTITY) for s in self.symbols}
        args = [substitute_many(a, fill) for a in self.args]
        return PLam("h", apps(PVar("h"), args))


class _Collapse(Exception):
    pass


def _zs(n: int) -> list[str]:
    return [f"z{k}" for k in range(n)]


def _eta_eq(a: PureTerm, b: PureTerm) -> bool:
    return alpha_eq(eta_reduce(a), eta_reduce(b))


def _max_arity(t: PureTerm, name: str) -> int:
    best = 0
    stack = [t]
    while stack:
        u = stack.pop()
        match u:
            case PLam(x, body):
                if x != name:
                    stack.append(body)
            case PApp():
                head, args = spine(u)
                if head == PVar(name):
                    best = max(best, len(args))
                else:
                    stack.append(head)
                stack.extend(args)
    return best


def bohm_discriminate(a: PureTerm, b: PureTerm, fuel: int = DEFAULT_FUEL) -> Discriminator:
    """Build and certify a context separating `a` (to true) from `b` (to false)."""
    _require_closed(a, b)
    na, nb = normalize(a, fuel), normalize(b, fuel)
    if na.fuel_exhausted or nb.fuel_exhausted:
        raise SeparationFuelError("a term did not normalize within fuel")
    if _eta_eq(na.result, nb.result):
        raise NotSeparableError("terms are beta-eta convertible")
    if alpha_eq(na.result, TRUE) and alpha_eq(nb.result, FALSE):
        context = PLam("h", PVar("h"))
    else:
        context = None
        for extra in range(4):
            try:
                context = _Separator(fuel, extra).run(na.result, nb.result)
                break
            except _Collapse:
                continue
        if context is None:
            raise NotSeparableError("separation failed")
    ta, tb = normalize(PApp(context, a), fuel), normalize(PApp(context, b), fuel)
    if not (alpha_eq(ta.result, TRUE) and alpha_eq(tb.result, FALSE)):
        raise AssertionError("discriminating context failed its certificate check")
    return Discriminator(context, (ta, tb))
