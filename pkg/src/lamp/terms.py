"""Core syntax of the lamp calculus: terms, types, sequents, and paths.

A lamp program is a parallel composition of processes built from a linear
lambda calculus plus communication primitives.  A single constructor, Send,
doubles as lambda abstraction and as an output channel: ``Send(x, b)`` is a
lambda when ``x`` occurs free in ``b`` and an output channel named ``x``
with continuation ``b`` otherwise.  The printer picks ``lam x.`` or
``out x.`` accordingly; the distinction is never stored.

Binder names are globally unique within a program and substitution performs
plain replacement with no renaming: when a substituted term moves under a
Send binder for one of its free names, the binder silently flips between
its channel and lambda readings, which is exactly the intended semantics.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional, Union

# ---------------------------------------------------------------------------
# Types

@dataclass(frozen=True)
class Atom:
    name: str


@dataclass(frozen=True)
class Bot:
    pass


@dataclass(frozen=True)
class Lolli:
    arg: "TypeExpr"
    res: "TypeExpr"


@dataclass(frozen=True)
class ParT:
    left: "TypeExpr"
    right: "TypeExpr"


TypeExpr = Union[Atom, Bot, Lolli, ParT]

BOT = Bot()


def subformulas(ty: TypeExpr) -> set:
    """All subformulas of ty, including ty itself."""
    out = {ty}
    match ty:
        case Lolli(a, b) | ParT(a, b):
            out |= subformulas(a)
            out |= subformulas(b)
    return out


# ---------------------------------------------------------------------------
# Terms

@dataclass(frozen=True)
class Unit:
    """The terminated process, printed ``*``."""


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class App:
    fun: "Term"
    arg: "Term"


@dataclass(frozen=True)
class Send:
    """Output channel with continuation; also the lambda binder."""

    chan: str
    body: "Term"


@dataclass(frozen=True)
class Dist:
    """Binary output channel without continuation, printed ``out2 x y.``"""

    chan1: str
    chan2: str
    body: "Term"


@dataclass(frozen=True)
class Par:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Close:
    body: "Term"


Term = Union[Unit, Var, App, Send, Dist, Par, Close]

UNIT = Unit()

Path = tuple[int, ...]


class InvalidPath(Exception):
    pass


def children(t: Term) -> tuple[Term, ...]:
    match t:
        case App(f, a):
            return (f, a)
        case Send(_, b) | Dist(_, _, b) | Close(b):
            return (b,)
        case Par(l, r):
            return (l, r)
        case _:
            return ()


def with_children(t: Term, kids: tuple[Term, ...]) -> Term:
    match t:
        case App():
            return App(kids[0], kids[1])
        case Send(x, _):
            return Send(x, kids[0])
        case Dist(x, y, _):
            return Dist(x, y, kids[0])
        case Par():
            return Par(kids[0], kids[1])
        case Close():
            return Close(kids[0])
        case _:
            return t


def subterm_at(t: Term, path: Path) -> Term:
    for i in path:
        kids = children(t)
        if i >= len(kids):
            raise InvalidPath(f"no child {i} at {type(t).__name__}")
        t = kids[i]
    return t


def replace_at(t: Term, path: Path, new: Term) -> Term:
    if not path:
        return new
    i = path[0]
    kids = children(t)
    if i >= len(kids):
        raise InvalidPath(f"no child {i} at {type(t).__name__}")
    kids = list(kids)
    kids[i] = replace_at(kids[i], path[1:], new)
    return with_children(t, tuple(kids))


def subterms(t: Term, prefix: Path = ()) -> Iterator[tuple[Path, Term]]:
    """All (path, subterm) pairs in preorder, leftmost-outermost first."""
    yield prefix, t
    for i, c in enumerate(children(t)):
        yield from subterms(c, prefix + (i,))


def binders(t: Term) -> set[str]:
    """Names bound by a Send or Dist anywhere in t."""
    out: set[str] = set()
    for _, s in subterms(t):
        match s:
            case Send(x, _):
                out.add(x)
            case Dist(x, y, _):
                out.add(x)
                out.add(y)
    return out


def var_names(t: Term) -> set[str]:
    """Every name occurring in t, as a variable or as a binder."""
    out: set[str] = set()
    for _, s in subterms(t):
        match s:
            case Var(x):
                out.add(x)
            case Send(x, _):
                out.add(x)
            case Dist(x, y, _):
                out.add(x)
                out.add(y)
    return out


def occurrences(t: Term, x: str) -> list[Path]:
    """Paths of the free occurrences of x in t.

    Occurrences under a Send or Dist binder for x itself are bound and
    skipped; binders for other names are transparent.
    """
    found: list[Path] = []

    def walk(s: Term, prefix: Path) -> None:
        match s:
            case Var(y) if y == x:
                found.append(prefix)
            case Send(y, b):
                if y != x:
                    walk(b, prefix + (0,))
            case Dist(y, z, b):
                if x not in (y, z):
                    walk(b, prefix + (0,))
            case _:
                for i, c in enumerate(children(s)):
                    walk(c, prefix + (i,))

    walk(t, ())
    return found


def is_free_in(x: str, t: Term) -> bool:
    return bool(occurrences(t, x))


def substitute(t: Term, x: str, s: Term) -> Term:
    """Replace every free occurrence of x in t by s.  No renaming, ever."""
    match t:
        case Var(y):
            return s if y == x else t
        case Send(y, b):
            return t if y == x else Send(y, substitute(b, x, s))
        case Dist(y, z, b):
            return t if x in (y, z) else Dist(y, z, substitute(b, x, s))
        case App(f, a):
            return App(substitute(f, x, s), substitute(a, x, s))
        case Par(l, r):
            return Par(substitute(l, x, s), substitute(r, x, s))
        case Close(b):
            return Close(substitute(b, x, s))
        case _:
            return t


def flatten_par(t: Term) -> list[Term]:
    """The maximal parallel spine of t, left to right."""
    if isinstance(t, Par):
        return flatten_par(t.left) + flatten_par(t.right)
    return [t]


def join_par(parts: list[Term]) -> Term:
    """Left-fold a component list back into one term."""
    if not parts:
        raise ValueError("empty component list")
    out = parts[0]
    for p in parts[1:]:
        out = Par(out, p)
    return out


def split_joined(t: Term, m: int) -> list[Term]:
    """Undo join_par for a known component count.  Reduction replaces proper
    subterms only, so the m-1 spine Par nodes of a joined term survive every
    step and the original entry boundaries stay recoverable."""
    out: list[Term] = []
    for _ in range(m - 1):
        if not isinstance(t, Par):
            raise ValueError("joined term lost its parallel spine")
        out.append(t.right)
        t = t.left
    out.append(t)
    out.reverse()
    return out


def is_simple(path: Path, root: Term) -> bool:
    """True iff no Par lies strictly between root and the hole at path.

    Punching a hole at such a position yields a context that is not a
    parallel composition of the hole with anything else.
    """
    t = root
    for i in path:
        if isinstance(t, Par):
            return False
        kids = children(t)
        if i >= len(kids):
            raise InvalidPath(f"no child {i} at {type(t).__name__}")
        t = kids[i]
    return True


# ---------------------------------------------------------------------------
# Sequents

@dataclass(frozen=True)
class DeltaEntry:
    term: Term
    type: Optional[TypeExpr]  # None only for close(...) processes


@dataclass(frozen=True)
class Sequent:
    gamma: tuple[tuple[str, TypeExpr], ...]
    delta: tuple[DeltaEntry, ...]

    def joined_term(self) -> Term:
        return join_par([e.term for e in self.delta])


def sequent_names(s: Sequent) -> set[str]:
    """All names used anywhere in a sequent: declarations, variables, binders."""
    out = {x for x, _ in s.gamma}
    for e in s.delta:
        out |= var_names(e.term)
    return out


# ---------------------------------------------------------------------------
# Printing.  print_term round-trips with the parser; Send prints as a
# lambda exactly when its bound name occurs free in the body.

_PAR_LVL, _SEQ_LVL, _APP_LVL, _ATOM_LVL = 0, 1, 2, 3


def _fmt_term(t: Term, lvl: int) -> str:
    match t:
        case Unit():
            s, mine = "*", _ATOM_LVL
        case Var(x):
            s, mine = x, _ATOM_LVL
        case App(f, a):
            s, mine = f"{_fmt_term(f, _APP_LVL)} {_fmt_term(a, _ATOM_LVL)}", _APP_LVL
        case Send(x, b):
            kw = "lam" if is_free_in(x, b) else "out"
            s, mine = f"{kw} {x}. {_fmt_term(b, _SEQ_LVL)}", _SEQ_LVL
        case Dist(x, y, b):
            s, mine = f"out2 {x} {y}. {_fmt_term(b, _SEQ_LVL)}", _SEQ_LVL
        case Par(l, r):
            s, mine = f"{_fmt_term(l, _SEQ_LVL)} | {_fmt_term(r, _PAR_LVL)}", _PAR_LVL
        case Close(b):
            s, mine = f"close({_fmt_term(b, _PAR_LVL)})", _ATOM_LVL
        case _:
            raise TypeError(f"not a term: {t!r}")
    return f"({s})" if mine < lvl else s


def print_term(t: Term) -> str:
    return _fmt_term(t, _PAR_LVL)


def _fmt_type(ty: TypeExpr, lvl: int) -> str:
    match ty:
        case Atom(n):
            s, mine = n, 2
        case Bot():
            s, mine = "bot", 2
        case Lolli(a, b):
            s, mine = f"{_fmt_type(a, 2)} -o {_fmt_type(b, 1)}", 1
        case ParT(a, b):
            s, mine = f"{_fmt_type(a, 1)} par {_fmt_type(b, 0)}", 0
        case _:
            raise TypeError(f"not a type: {ty!r}")
    return f"({s})" if mine < lvl else s


def print_type(ty: TypeExpr) -> str:
    return _fmt_type(ty, 0)


def print_sequent(s: Sequent) -> str:
    decls = ", ".join(f"{x} : {print_type(ty)}" for x, ty in s.gamma)
    ents = ", ".join(
        f"{print_term(e.term)} : {print_type(e.type)}" if e.type is not None
        else print_term(e.term)
        for e in s.delta
    )
    return f"{decls} |- {ents}" if decls else f"|- {ents}"
