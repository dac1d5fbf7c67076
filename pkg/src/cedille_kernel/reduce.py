"""Normal-order beta reduction with step accounting, and beta-eta equality."""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .pure import PApp, PLam, PureTerm, alpha_eq, apps, eta_reduce, spine, substitute

DEFAULT_FUEL = 1_000_000


class Verdict(str, enum.Enum):
    EQUAL = "equal"
    DISTINCT = "distinct"
    UNDECIDED = "undecided"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class ReductionTrace:
    result: PureTerm
    steps: int
    fuel_exhausted: bool


class _Reducer:
    def __init__(self, fuel: int):
        if fuel <= 0:
            raise ValueError("fuel must be positive")
        self.fuel = fuel
        self.steps = 0

    @property
    def exhausted(self) -> bool:
        return self.steps >= self.fuel

    def whnf(self, t: PureTerm) -> PureTerm:
        head, args = spine(t)
        i = 0
        while isinstance(head, PLam) and i < len(args):
            if self.exhausted:
                break
            head = substitute(head.body, head.name, args[i])
            i += 1
            self.steps += 1
            if isinstance(head, PApp):
                head, more = spine(head)
                args = more + args[i:]
                i = 0
        return apps(head, args[i:])

    def normalize(self, t: PureTerm) -> PureTerm:
        t = self.whnf(t)
        if self.exhausted:
            return t
        if isinstance(t, PLam):
            body = self.normalize(t.body)
            return t if body is t.body else PLam(t.name, body)
        head, args = spine(t)
        out = []
        for a in args:
            out.append(a if self.exhausted else self.normalize(a))
        return apps(head, out)


def whnf(t: PureTerm, fuel: int = DEFAULT_FUEL) -> ReductionTrace:
    """Contract head redexes, leftmost-outermost, until none is left."""
    r = _Reducer(fuel)
    result = r.whnf(t)
    return ReductionTrace(result, r.steps, r.exhausted and _has_head_redex(result))


def normalize(t: PureTerm, fuel: int = DEFAULT_FUEL) -> ReductionTrace:
    """Full beta-normal form under normal order, within `fuel` contractions."""
    r = _Reducer(fuel)
    result = r.normalize(t)
    return ReductionTrace(result, r.steps, r.exhausted and has_redex(result))


def _has_head_redex(t: PureTerm) -> bool:
    head, args = spine(t)
    return isinstance(head, PLam) and bool(args)


def has_redex(t: PureTerm) -> bool:
    stack = [t]
    while stack:
        u = stack.pop()
        match u:
            case PApp(PLam(), _):
                return True
            case PApp(f, a):
                stack.extend((f, a))
            case PLam(_, b):
                stack.append(b)
    return False


def beta_eta_equal(a: PureTerm, b: PureTerm, fuel: int = DEFAULT_FUEL) -> Verdict:
    """Compare beta-normal forms up to alpha and eta; each side gets `fuel`."""
    na, nb = normalize(a, fuel), normalize(b, fuel)
    if na.fuel_exhausted or nb.fuel_exhausted:
        return Verdict.UNDECIDED
    if alpha_eq(eta_reduce(na.result), eta_reduce(nb.result)):
        return Verdict.EQUAL
    return Verdict.DISTINCT
