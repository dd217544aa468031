"""Parser for lamp program files.

Grammar (``#`` starts a line comment)::

    sequent := [decls] "|-" entry ("," entry)*
    decls   := IDENT ":" type ("," IDENT ":" type)*
    entry   := term [":" type]

    type    := lolli ("par" type)?          right associative, par loosest
    lolli   := tatom ("-o" lolli)?          right associative
    tatom   := "bot" | IDENT | "(" type ")"

    term    := seq ("|" term)?              right associative, | loosest
    seq     := "out" IDENT "." seq | "lam" IDENT "." seq
             | "out2" IDENT IDENT "." seq
             | IDENT "(" IDENT ")" "." seq  (sync-input sugar)
             | app
    app     := atom+                        left associative application
    atom    := "*" | IDENT | "close" "(" term ")"
             | "(" term ")" | "(" term ":" type ")"

``lam x. t`` requires x to occur free in t and desugars to Send(x, t);
``x(y). u`` desugars to App(Send(y, u), Var(x)) and likewise requires y in u.
``(t : T)`` attaches a type annotation to the subterm t; annotations guide
type reconstruction and are collected on the side, not stored in the tree.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .terms import (
    App, Atom, BOT, Close, DeltaEntry, Dist, Lolli, Par, ParT, Send, Sequent,
    Term, TypeExpr, UNIT, Var, is_free_in, subterms,
)


class ParseError(Exception):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {message}" if line else message)
        self.line = line
        self.col = col


class LamWithoutOccurrence(ParseError):
    pass


class DuplicateBinder(ParseError):
    pass


KEYWORDS = {"lam", "out", "out2", "close", "bot", "par"}

_TOKEN_RE = re.compile(
    r"""(?P<ws>\s+|\#[^\n]*)
      | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
      | (?P<op>\|\-|-o|[(),.:|*])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # "ident", "op", "eof"
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    toks: list[Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}",
                             line, pos - line_start + 1)
        if m.lastgroup == "ws":
            line += m.group().count("\n")
            if "\n" in m.group():
                line_start = m.start() + m.group().rindex("\n") + 1
        else:
            toks.append(Token(m.lastgroup, m.group(), line, m.start() - line_start + 1))
        pos = m.end()
    toks.append(Token("eof", "", line, len(text) - line_start + 1))
    return toks


@dataclass
class Program:
    """A parsed sequent plus any inline type annotations found in it."""

    sequent: Sequent
    annotations: list[tuple[Term, TypeExpr]] = field(default_factory=list)


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0
        self.annotations: list[tuple[Term, TypeExpr]] = []

    def peek(self, k: int = 0) -> Token:
        j = min(self.i + k, len(self.toks) - 1)
        return self.toks[j]

    def next(self) -> Token:
        t = self.peek()
        if t.kind != "eof":
            self.i += 1
        return t

    def fail(self, msg: str, tok: Token | None = None):
        tok = tok or self.peek()
        raise ParseError(msg, tok.line, tok.col)

    def expect(self, text: str) -> Token:
        t = self.peek()
        if t.text != text or t.kind == "eof":
            self.fail(f"expected {text!r}, found {t.text or 'end of input'!r}")
        return self.next()

    def ident(self) -> str:
        t = self.peek()
        if t.kind != "ident" or t.text in KEYWORDS:
            self.fail(f"expected identifier, found {t.text or 'end of input'!r}")
        return self.next().text

    # -- types ------------------------------------------------------------

    def type_(self) -> TypeExpr:
        left = self.lolli()
        if self.peek().text == "par":
            self.next()
            return ParT(left, self.type_())
        return left

    def lolli(self) -> TypeExpr:
        left = self.tatom()
        if self.peek().text == "-o":
            self.next()
            return Lolli(left, self.lolli())
        return left

    def tatom(self) -> TypeExpr:
        t = self.peek()
        if t.text == "bot":
            self.next()
            return BOT
        if t.text == "(":
            self.next()
            ty = self.type_()
            self.expect(")")
            return ty
        if t.kind == "ident":
            return Atom(self.next().text)
        self.fail(f"expected a type, found {t.text or 'end of input'!r}")

    # -- terms ------------------------------------------------------------

    def term(self) -> Term:
        left = self.seq()
        if self.peek().text == "|":
            self.next()
            return Par(left, self.term())
        return left

    def seq(self) -> Term:
        t = self.peek()
        if t.text == "out":
            self.next()
            x = self.ident()
            self.expect(".")
            return Send(x, self.seq())
        if t.text == "lam":
            self.next()
            x = self.ident()
            self.expect(".")
            body = self.seq()
            if not is_free_in(x, body):
                raise LamWithoutOccurrence(
                    f"lam-bound {x!r} does not occur in its body", t.line, t.col)
            return Send(x, body)
        if t.text == "out2":
            self.next()
            x = self.ident()
            y = self.ident()
            self.expect(".")
            return Dist(x, y, self.seq())
        # sync-input sugar x(y). u, distinguished from application by the dot
        if (t.kind == "ident" and t.text not in KEYWORDS
                and self.peek(1).text == "(" and self.peek(2).kind == "ident"
                and self.peek(2).text not in KEYWORDS
                and self.peek(3).text == ")" and self.peek(4).text == "."):
            chan = self.ident()
            self.expect("(")
            y = self.ident()
            self.expect(")")
            self.expect(".")
            body = self.seq()
            if not is_free_in(y, body):
                raise LamWithoutOccurrence(
                    f"input-bound {y!r} does not occur in its continuation",
                    t.line, t.col)
            return App(Send(y, body), Var(chan))
        return self.app()

    def app(self) -> Term:
        out = self.atom()
        while self._at_atom():
            out = App(out, self.atom())
        return out

    def _at_atom(self) -> bool:
        t = self.peek()
        return (t.text in ("*", "(", "close")
                or (t.kind == "ident" and t.text not in KEYWORDS))

    def atom(self) -> Term:
        t = self.peek()
        if t.text == "*":
            self.next()
            return UNIT
        if t.text == "close":
            self.next()
            self.expect("(")
            body = self.term()
            self.expect(")")
            return Close(body)
        if t.text == "(":
            self.next()
            inner = self.term()
            if self.peek().text == ":":
                self.next()
                self.annotations.append((inner, self.type_()))
            self.expect(")")
            return inner
        if t.kind == "ident" and t.text not in KEYWORDS:
            return Var(self.next().text)
        self.fail(f"expected a term, found {t.text or 'end of input'!r}")

    # -- sequents ----------------------------------------------------------

    def sequent(self) -> Sequent:
        gamma: list[tuple[str, TypeExpr]] = []
        if self.peek().text != "|-":
            while True:
                tok = self.peek()
                x = self.ident()
                self.expect(":")
                ty = self.type_()
                if any(x == y for y, _ in gamma):
                    self.fail(f"duplicate declaration of {x!r}", tok)
                gamma.append((x, ty))
                if self.peek().text == ",":
                    self.next()
                    continue
                break
        self.expect("|-")
        delta: list[DeltaEntry] = []
        while True:
            tok = self.peek()
            term = self.term()
            ty = None
            if self.peek().text == ":":
                self.next()
                ty = self.type_()
            if ty is None and not isinstance(term, Close):
                self.fail("untyped conclusion must have the form close(...)", tok)
            delta.append(DeltaEntry(term, ty))
            if self.peek().text == ",":
                self.next()
                continue
            break
        if self.peek().kind != "eof":
            self.fail(f"trailing input {self.peek().text!r}")
        return Sequent(tuple(gamma), tuple(delta))


def _check_binders_unique(s: Sequent) -> None:
    seen: set[str] = set()
    for e in s.delta:
        for _, sub in subterms(e.term):
            names = []
            if isinstance(sub, Send):
                names = [sub.chan]
            elif isinstance(sub, Dist):
                names = [sub.chan1, sub.chan2]
            for x in names:
                if x in seen:
                    raise DuplicateBinder(f"binder {x!r} is bound more than once")
                seen.add(x)


def parse_program(text: str) -> Program:
    p = _Parser(text)
    seq = p.sequent()
    _check_binders_unique(seq)
    return Program(seq, p.annotations)


def parse_term(text: str) -> Term:
    """Parse a bare term snippet (used by tests and the trace reader)."""
    p = _Parser(text)
    t = p.term()
    if p.peek().kind != "eof":
        p.fail(f"trailing input {p.peek().text!r}")
    return t


def parse_type(text: str) -> TypeExpr:
    p = _Parser(text)
    ty = p.type_()
    if p.peek().kind != "eof":
        p.fail(f"trailing input {p.peek().text!r}")
    return ty
