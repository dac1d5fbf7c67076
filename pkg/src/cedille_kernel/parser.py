"""Lexer and recursive-descent parser for the surface notation.

Hyphens: `-` directly followed by a non-blank character is erased
application; `-` followed by a blank is the separator used by ρ, δ, φ and
let; `--` starts a comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .syntax import (
    All,
    App,
    Beta,
    Definition,
    Delta,
    EApp,
    ELam,
    Eq,
    ErasureError,
    Expr,
    Import,
    ImportArg,
    IPair,
    Iota,
    Lam,
    Let,
    ModuleUnit,
    Param,
    Phi,
    Pi,
    Proj,
    Rho,
    Star,
    TApp,
    Var,
    erase,
    is_kind,
)


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int
    spaced: bool  # preceded by whitespace (or start of input)


_SYMBOLS = {
    "λ": "LAM", "Λ": "ELAM", "Π": "PI", "∀": "ALL", "ι": "IOTA", "β": "BETA",
    "ρ": "RHO", "δ": "DELTA", "φ": "PHI", "★": "STAR", "≃": "EQ", "➔": "ARROW",
    "➾": "EARROW", "·": "DOT_T", "(": "(", ")": ")", "{": "{", "}": "}",
    "[": "[", "]": "]", ",": ",", ":": ":", "=": "=", "/": "/",
}
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_']*")
_KEYWORDS = {"module", "import"}


def tokenize(src: str) -> list[Token]:
    toks: list[Token] = []
    i, line, col = 0, 1, 1
    spaced = True
    n = len(src)

    def adv(k: int):
        nonlocal i, line, col
        for _ in range(k):
            if src[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        c = src[i]
        if c.isspace():
            adv(1)
            spaced = True
            continue
        if src.startswith("--", i):
            while i < n and src[i] != "\n":
                adv(1)
            spaced = True
            continue
        start = (line, col)
        if c == "-":
            nxt = src[i + 1] if i + 1 < n else " "
            kind = "SEP" if nxt.isspace() else "EMINUS"
            toks.append(Token(kind, "-", *start, spaced))
            adv(1)
        elif c == ".":
            nxt = src[i + 1] if i + 1 < n else " "
            after = src[i + 2] if i + 2 < n else " "
            if nxt in "12" and not spaced and not (after.isalnum() or after in "_'"):
                toks.append(Token("PROJ", nxt, *start, spaced))
                adv(2)
            else:
                toks.append(Token("DOT", ".", *start, spaced))
                adv(1)
        elif c in _SYMBOLS:
            toks.append(Token(_SYMBOLS[c], c, *start, spaced))
            adv(1)
        else:
            m = _IDENT.match(src, i)
            if not m:
                raise ParseError(f"unexpected character {c!r}", *start)
            text = m.group()
            kind = text.upper() if text in _KEYWORDS else "IDENT"
            toks.append(Token(kind, text, *start, spaced))
            adv(len(text))
        spaced = False
    toks.append(Token("EOF", "", line, col, True))
    return toks


_ATOM_START = {"IDENT", "(", "STAR", "BETA", "{"}
_ARG_START = {"IDENT", "(", "STAR", "BETA"}


class Parser:
    def __init__(self, src: str):
        self.toks = tokenize(src)
        self.pos = 0

    # -- token helpers ----------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.tok
        self.pos += 1
        return t

    def expect(self, kind: str, what: str | None = None) -> Token:
        if self.tok.kind != kind:
            self.fail(f"expected {what or kind}, found {self.describe(self.tok)}")
        return self.next()

    def fail(self, msg: str, tok: Token | None = None):
        t = tok or self.tok
        raise ParseError(msg, t.line, t.col)

    @staticmethod
    def describe(t: Token) -> str:
        return "end of input" if t.kind == "EOF" else repr(t.text)

    def binder_name(self) -> str:
        t = self.expect("IDENT", "a binder name")
        return t.text

    # -- modules ----------------------------------------------------------

    def module(self) -> ModuleUnit:
        name = None
        params: tuple[Param, ...] = ()
        items = []
        header_at = 0
        while self.tok.kind != "EOF":
            match self.tok.kind:
                case "MODULE":
                    if name is not None:
                        self.fail("duplicate module header")
                    self.next()
                    header_at = len(items)
                    name = self.path()
                    params = self.params()
                    self.expect("DOT", "'.' after module header")
                case "IMPORT":
                    items.append(self.import_())
                case "IDENT":
                    items.append(self.definition())
                case _:
                    self.fail(f"expected a definition, found {self.describe(self.tok)}")
        return ModuleUnit(name or "main", params, tuple(items), header_at)

    def path(self) -> str:
        parts = [self.component()]
        while self.tok.kind == "/":
            self.next()
            parts.append(self.component())
        return "/".join(parts)

    def component(self) -> str:
        # file names may contain hyphens: `erased-use` lexes as IDENT EMINUS IDENT
        text = self.expect("IDENT", "a module path").text
        while self.tok.kind == "EMINUS" and not self.tok.spaced:
            nxt = self.peek()
            if nxt.spaced or nxt.kind not in ("IDENT", "MODULE", "IMPORT"):
                break
            self.next()
            text += "-" + self.next().text
        return text

    def params(self) -> tuple[Param, ...]:
        out = []
        while self.tok.kind in ("(", "{"):
            close = ")" if self.tok.kind == "(" else "}"
            erased = close == "}"
            self.next()
            name = self.binder_name()
            self.expect(":")
            cls = self.expr()
            self.expect(close)
            out.append(Param(name, cls, erased))
        return tuple(out)

    def import_(self) -> Import:
        start = self.next()
        path = self.path()
        args = []
        while self.tok.kind != "DOT":
            match self.tok.kind:
                case "DOT_T":
                    self.next()
                    args.append(ImportArg("type", self.atom()))
                case "EMINUS":
                    self.next()
                    args.append(ImportArg("erased", self.atom()))
                case k if k in _ARG_START or k == "[":
                    args.append(ImportArg("relevant", self.atom()))
                case _:
                    self.fail(f"expected an import argument or '.', found {self.describe(self.tok)}")
        self.next()
        return Import(path, tuple(args), (start.line, start.col))

    def definition(self) -> Definition:
        start = self.next()
        self.expect(":")
        if self.tok.kind == "=":
            self.fail("expected a classifier")
        cls = self.expr()
        self.expect("=")
        if self.tok.kind == "DOT":
            self.fail("expected a definition body")
        body = self.expr()
        self.expect("DOT", "'.' ending the definition")
        return Definition(start.text, cls, body, (start.line, start.col))

    # -- expressions ------------------------------------------------------

    def expr(self) -> Expr:
        t = self.tok
        span = (t.line, t.col)
        match t.kind:
            case "LAM" | "ELAM":
                self.next()
                name = self.binder_name()
                ann = None
                if self.tok.kind == ":":
                    self.next()
                    ann = self.expr()
                self.expect("DOT", "'.' after binder")
                body = self.expr()
                return (Lam if t.kind == "LAM" else ELam)(name, ann, body, span)
            case "PI" | "ALL" | "IOTA":
                self.next()
                name = self.binder_name()
                self.expect(":")
                dom = self.expr()
                self.expect("DOT", "'.' after binder")
                body = self.expr()
                return {"PI": Pi, "ALL": All, "IOTA": Iota}[t.kind](name, dom, body, span)
            case "RHO":
                self.next()
                proof = self.app()
                self.expect("SEP", "' - '")
                return Rho(proof, self.expr(), span)
            case "DELTA":
                self.next()
                ty = self.app()
                self.expect("SEP", "' - '")
                return Delta(ty, self.expr(), span)
            case "PHI":
                self.next()
                proof = self.app()
                self.expect("SEP", "' - '")
                term = self.app()
                self.expect("{")
                er = self.expr()
                self.expect("}")
                return Phi(proof, term, er, span)
            case "[" if self.is_let():
                self.next()
                name = self.binder_name()
                ann = None
                if self.tok.kind == ":":
                    self.next()
                    ann = self.expr()
                self.expect("=")
                d = self.expr()
                self.expect("]")
                self.expect("SEP", "' - ' after let binding")
                return Let(name, ann, d, self.expr(), span)
        lhs = self.app()
        if self.tok.kind in ("ARROW", "EARROW"):
            kind = self.next().kind
            rhs = self.expr()
            return (Pi if kind == "ARROW" else All)("_", lhs, rhs, span)
        return lhs

    def is_let(self) -> bool:
        return self.peek().kind == "IDENT" and self.peek(2).kind in (":", "=")

    def app(self) -> Expr:
        t = self.tok
        if t.kind not in _ATOM_START and t.kind != "[":
            self.fail(f"expected a term or type, found {self.describe(t)}")
        e = self.atom()
        while True:
            k = self.tok.kind
            span = (self.tok.line, self.tok.col)
            if k == "DOT_T":
                self.next()
                e = TApp(e, self.atom(), span)
            elif k == "EMINUS":
                self.next()
                e = EApp(e, self.atom(), span)
            elif k in _ARG_START or (k == "[" and not self.is_let()):
                e = App(e, self.atom(), span)
            else:
                return e

    def atom(self) -> Expr:
        t = self.tok
        span = (t.line, t.col)
        match t.kind:
            case "IDENT":
                self.next()
                if t.text == "_":
                    self.fail("'_' cannot be used as a variable", t)
                e = Var(t.text, span)
            case "STAR":
                self.next()
                e = Star(span)
            case "BETA":
                self.next()
                if self.tok.kind == "{" and not self.tok.spaced:
                    self.next()
                    inner = self.expr()
                    self.expect("}")
                    e = Beta(inner, span)
                else:
                    e = Beta(None, span)
            case "(":
                self.next()
                e = self.expr()
                self.expect(")")
            case "{":
                self.next()
                lhs = self.expr()
                self.expect("EQ", "'≃'")
                rhs = self.expr()
                self.expect("}")
                try:
                    e = Eq(erase(lhs), erase(rhs), span)
                except ErasureError as exc:
                    self.fail(str(exc), t)
            case "[":
                self.next()
                a = self.expr()
                self.expect(",")
                b = self.expr()
                self.expect("]")
                e = IPair(a, b, span)
            case _:
                self.fail(f"expected a term or type, found {self.describe(t)}")
        while self.tok.kind == "PROJ":
            p = self.next()
            e = Proj(e, int(p.text), (p.line, p.col))
        return e


def parse_module(source: str) -> ModuleUnit:
    """Parse one `.ced` file into a ModuleUnit."""
    return Parser(source).module()


def parse_expr(source: str) -> Expr:
    """Parse a single term, type or kind."""
    p = Parser(source)
    e = p.expr()
    if p.tok.kind == "DOT":
        p.next()
    if p.tok.kind != "EOF":
        p.fail(f"unexpected {p.describe(p.tok)} after expression")
    return e


def param_mode(p: Param) -> str:
    """How an argument for this parameter is written: `·T`, `-t` or `t`."""
    if is_kind(p.classifier):
        return "type"
    return "erased" if p.erased else "relevant"
