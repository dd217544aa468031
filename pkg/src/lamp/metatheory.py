"""Metatheory operations on checked derivations: derivation grafting,
normal-term shape classification, and the subformula audit."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .derivations import Derivation, Rule, sequent_names
from .terms import (
    App, Bot, Close, DeltaEntry, Lolli, Par, ParT, Send, Sequent, Term,
    TypeExpr, Var, binders, is_simple, occurrences, print_term, print_type,
    subformulas, substitute, subterms,
)


class PreconditionViolation(Exception):
    pass


def subst_derivation(d1: Derivation, d2: Derivation, x: str,
                     entry_index: int = 0) -> Derivation:
    """Graft d1 (concluding  Sigma |- t : A, Theta  with t at entry_index)
    onto d2 (concluding  Gamma, x : A |- Delta), yielding a derivation of
    Gamma, Sigma |- Delta[t/x], Theta.

    The two derivations must not share any variable.  The construction
    replaces the axiom leaf for x by d1 and threads the substitution and
    d1's side entries through every node on the path down to the root.
    """
    s1, s2 = d1.conclusion, d2.conclusion
    shared = sequent_names(s1) & sequent_names(s2)
    if shared:
        raise PreconditionViolation(f"derivations share variables {sorted(shared)}")
    if entry_index >= len(s1.delta) or s1.delta[entry_index].type is None:
        raise PreconditionViolation("d1 has no typed entry at the given index")
    t = s1.delta[entry_index].term
    a = s1.delta[entry_index].type
    if dict(s2.gamma).get(x) != a:
        raise PreconditionViolation(
            f"{x!r} is not declared with the substituted entry's type in d2")
    theta = s1.delta[:entry_index] + s1.delta[entry_index + 1:]
    sigma = s1.gamma

    def transform(seq: Sequent) -> Sequent:
        gamma: list = []
        for y, ty in seq.gamma:
            if y == x:
                gamma.extend(sigma)
            else:
                gamma.append((y, ty))
        delta = tuple(DeltaEntry(substitute(e.term, x, t), e.type)
                      for e in seq.delta) + theta
        return Sequent(tuple(gamma), delta)

    def graft(node: Derivation) -> Derivation:
        if node.rule is Rule.AX:
            return d1
        new_premises = []
        hit = False
        for p in node.premises:
            if not hit and any(y == x for y, _ in p.conclusion.gamma):
                new_premises.append(graft(p))
                hit = True
            else:
                new_premises.append(p)
        if not hit:
            raise PreconditionViolation(
                f"{x!r} vanished from the premises; d2 is not well formed")
        return Derivation(node.rule, transform(node.conclusion),
                          tuple(new_premises))

    return graft(d2)


# ---------------------------------------------------------------------------
# Shapes of normal terms

@dataclass(frozen=True)
class ValueShape:
    kind: str  # "lambda-or-channel" | "parallel"


@dataclass(frozen=True)
class HeadVar:
    head: str
    stack: tuple[Term, ...]


@dataclass(frozen=True)
class BottomLike:
    pass


NormalShape = Union[ValueShape, HeadVar, BottomLike]


class ShapeViolation(Exception):
    pass


def classify_normal(t: Term, ty: Optional[TypeExpr]) -> NormalShape:
    """Classify a normal typed term: a value (Send at arrow type, Par at par
    type), a bottom-like process, or a head variable applied to a stack.
    Any other outcome signals a metatheory bug in the caller's pipeline."""
    match t:
        case Send(_, _):
            if not isinstance(ty, Lolli):
                raise ShapeViolation(
                    f"output/lambda value typed {print_type(ty) if ty else '?'}")
            return ValueShape("lambda-or-channel")
        case Par(_, _):
            if not isinstance(ty, ParT):
                raise ShapeViolation(
                    f"parallel value typed {print_type(ty) if ty else '?'}")
            return ValueShape("parallel")
    if ty == Bot() or ty is None or isinstance(t, Close):
        return BottomLike()
    stack: list[Term] = []
    head = t
    while isinstance(head, App):
        stack.append(head.arg)
        head = head.fun
    if isinstance(head, Var):
        return HeadVar(head.name, tuple(reversed(stack)))
    raise ShapeViolation(f"normal term {print_term(t)} at non-bottom type is "
                         f"neither a value nor a head-variable stack")


# ---------------------------------------------------------------------------
# Subformula audit

class SubformulaCounterexample(Exception):
    def __init__(self, node_path: tuple[int, ...], ty: TypeExpr):
        super().__init__(
            f"type {print_type(ty)} at node {list(node_path)} is not a "
            f"subformula of the end-sequent")
        self.node_path = node_path
        self.type = ty


def check_subformula(d: Derivation) -> None:
    """Every type anywhere in d must be a subformula of an end-sequent type
    or of bot.  Intended for derivations whose end-sequent term is normal."""
    allowed: set = {Bot()}
    root = d.conclusion
    for _, ty in root.gamma:
        allowed |= subformulas(ty)
    for e in root.delta:
        if e.type is not None:
            allowed |= subformulas(e.type)

    def walk(node: Derivation, path: tuple[int, ...]) -> None:
        for _, ty in node.conclusion.gamma:
            if ty not in allowed:
                raise SubformulaCounterexample(path, ty)
        for e in node.conclusion.delta:
            if e.type is not None and e.type not in allowed:
                raise SubformulaCounterexample(path, e.type)
        for k, p in enumerate(node.premises):
            walk(p, path + (k,))

    walk(d, ())


# ---------------------------------------------------------------------------
# Simple-context discipline

class FreakOccurrence(Exception):
    pass


def check_no_freaks(s: Sequent) -> None:
    """In a typable sequent, a channel bound inside a subterm that sits in a
    simple context never occurs free in that surrounding context: a process
    cannot hold both ends of a channel without a parallel in between."""
    for e in s.delta:
        root = e.term
        for path, sub in subterms(root):
            if not path or not is_simple(path, root):
                continue
            for z in binders(sub):
                for occ in occurrences(root, z):
                    if occ[:len(path)] != path:
                        raise FreakOccurrence(
                            f"channel {z!r} bound inside {print_term(sub)} "
                            f"occurs in its surrounding simple context")
