"""Annotation-driven typechecking by backward proof reconstruction.

The strategy is syntax directed.  Unary rules are inverted eagerly, left to
right over the conclusion entries: ``* : bot`` entries were introduced by
BotI, close entries by BotE, parallel entries by ParrI, Send entries by
LolliI.  Once only applications, binary outputs, and variables remain, a
branching rule is inverted.  Its context split is forced: declarations and
entries form a graph with an edge whenever they share a name, and every
connected component must follow the premise seed it touches, because
premises of a rule may not share variables.  Components touching no seed
go to the leftmost premise; components touching two seeds rule the
candidate out.

Unknown types (an unannotated application argument, the content types of a
binary output) become metavariables solved by first-order unification.
Metavariables still unconstrained at the end are instantiated to ``bot``;
a derivation is schematic in such types, so any instantiation checks, and
``bot`` is the one type always admitted by the subformula audit.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional

from .derivations import Derivation, LinearityError, Rule, check_channel_linearity
from .terms import (
    App, BOT, Close, DeltaEntry, Dist, Lolli, Par, ParT, Send, Sequent,
    Term, TypeExpr, Unit, Var, is_free_in, print_term, var_names,
)


class TypecheckError(Exception):
    pass


class UnsatisfiableSplit(TypecheckError):
    pass


class UnificationFailure(TypecheckError):
    pass


class MissingAnnotation(TypecheckError):
    pass


class LinearityViolation(TypecheckError):
    pass


@dataclass(frozen=True)
class MetaVar:
    """A type unknown, local to one reconstruction run."""

    name: str


class _Reconstructor:
    def __init__(self, annotations: Iterable[tuple[Term, TypeExpr]]):
        self.subst: dict[MetaVar, TypeExpr] = {}
        self.ann: dict[int, tuple[Term, TypeExpr]] = {
            id(node): (node, ty) for node, ty in annotations}
        self._ids = itertools.count()

    # -- unification -------------------------------------------------------

    def fresh(self) -> MetaVar:
        return MetaVar(f"?t{next(self._ids)}")

    def resolve(self, ty):
        while isinstance(ty, MetaVar) and ty in self.subst:
            ty = self.subst[ty]
        return ty

    def _occurs(self, m: MetaVar, ty) -> bool:
        ty = self.resolve(ty)
        match ty:
            case MetaVar():
                return ty == m
            case Lolli(a, b) | ParT(a, b):
                return self._occurs(m, a) or self._occurs(m, b)
            case _:
                return False

    def unify(self, a, b) -> None:
        a, b = self.resolve(a), self.resolve(b)
        if a == b:
            return
        if isinstance(a, MetaVar):
            if self._occurs(a, b):
                raise UnificationFailure(f"occurs check: {a.name} in {b}")
            self.subst[a] = b
            return
        if isinstance(b, MetaVar):
            self.unify(b, a)
            return
        match a, b:
            case (Lolli(a1, a2), Lolli(b1, b2)) | (ParT(a1, a2), ParT(b1, b2)):
                self.unify(a1, b1)
                self.unify(a2, b2)
            case _:
                raise UnificationFailure(f"cannot unify {a} with {b}")

    def deep_resolve(self, ty, default: Optional[TypeExpr] = None):
        ty = self.resolve(ty)
        match ty:
            case MetaVar():
                return default if default is not None else ty
            case Lolli(a, b):
                return Lolli(self.deep_resolve(a, default), self.deep_resolve(b, default))
            case ParT(a, b):
                return ParT(self.deep_resolve(a, default), self.deep_resolve(b, default))
            case _:
                return ty

    def _as_lolli(self, ty) -> tuple:
        ty = self.resolve(ty)
        if isinstance(ty, Lolli):
            return ty.arg, ty.res
        a, b = self.fresh(), self.fresh()
        self.unify(ty, Lolli(a, b))
        return a, b

    def _as_part(self, ty) -> tuple:
        ty = self.resolve(ty)
        if isinstance(ty, ParT):
            return ty.left, ty.right
        a, b = self.fresh(), self.fresh()
        self.unify(ty, ParT(a, b))
        return a, b

    def _apply_annotation(self, term: Term, ty) -> None:
        hit = self.ann.get(id(term))
        if hit is not None and hit[0] is term:
            self.unify(ty, hit[1])

    # -- context splitting ---------------------------------------------------

    def _split(self, gamma, entries, seeds: list[set[str]]):
        """Partition declarations and side entries among premises.

        Each premise k owns the connected component of seed k in the
        share-a-name graph; those assignments are forced.  Components that
        touch no seed can in principle go anywhere (their home premise must
        merely be able to absorb them), so they are returned separately for
        the caller to place, leftmost placement tried first.
        """
        n_seeds = len(seeds)
        items = [({x}, ("g", k)) for k, (x, _) in enumerate(gamma)]
        items += [(var_names(e.term), ("d", k)) for k, e in enumerate(entries)]

        parent = list(range(n_seeds + len(items)))

        def find(i: int) -> int:
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        def union(i: int, j: int) -> None:
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[ri] = rj

        by_name: dict[str, int] = {}
        for el, names in enumerate(seeds + [ns for ns, _ in items]):
            for name in names:
                if name in by_name:
                    union(el, by_name[name])
                else:
                    by_name[name] = el

        seed_root: dict[int, int] = {}
        for k in range(n_seeds):
            r = find(k)
            if r in seed_root:
                raise UnsatisfiableSplit(
                    "premise seeds share a variable; no disjoint split exists")
            seed_root[r] = k

        assign_g: dict[int, int] = {}
        assign_d: dict[int, int] = {}
        floating: dict[int, list[tuple[str, int]]] = {}
        for el, (_, tag) in enumerate(items, start=n_seeds):
            root = find(el)
            if root in seed_root:
                k = seed_root[root]
                if tag[0] == "g":
                    assign_g[tag[1]] = k
                else:
                    assign_d[tag[1]] = k
            else:
                floating.setdefault(root, []).append(tag)
        return assign_g, assign_d, list(floating.values())

    # -- main solver ---------------------------------------------------------

    def solve(self, seq: Sequent) -> Derivation:
        gamma, delta = seq.gamma, seq.delta

        for e in delta:
            if e.type is not None:
                self._apply_annotation(e.term, e.type)

        # axiom
        if len(delta) == 1 and isinstance(delta[0].term, Var) and len(gamma) == 1:
            (x, a) = gamma[0]
            if delta[0].term.name == x:
                self.unify(a, delta[0].type)
                return Derivation(Rule.AX, seq)

        # eager unary inversions
        for i, e in enumerate(delta):
            term, ty = e.term, e.type
            match term:
                case Unit():
                    self.unify(ty, BOT)
                    sub = self.solve(Sequent(gamma, delta[:i] + delta[i + 1:]))
                    return Derivation(Rule.BOT_I, seq, (sub,))
                case Close(body):
                    if ty is not None:
                        raise UnsatisfiableSplit(
                            f"close(...) entry carries a type: {print_term(term)}")
                    inner = delta[:i] + (DeltaEntry(body, BOT),) + delta[i + 1:]
                    sub = self.solve(Sequent(gamma, inner))
                    return Derivation(Rule.BOT_E, seq, (sub,))
                case Par(s, t):
                    a, b = self._as_part(ty)
                    inner = (delta[:i] + (DeltaEntry(s, a), DeltaEntry(t, b))
                             + delta[i + 1:])
                    sub = self.solve(Sequent(gamma, inner))
                    return Derivation(Rule.PARR_I, seq, (sub,))
                case Send(x, body):
                    if any(x == y for y, _ in gamma):
                        raise UnsatisfiableSplit(
                            f"binder {x!r} shadows a declaration")
                    self._apply_annotation(term, ty)
                    a, b = self._as_lolli(ty)
                    rest = delta[:i] + delta[i + 1:]
                    if not (is_free_in(x, body)
                            or any(is_free_in(x, r.term) for r in rest)):
                        raise LinearityViolation(
                            f"channel {x!r} of {print_term(term)} is never used")
                    inner = delta[:i] + (DeltaEntry(body, b),) + delta[i + 1:]
                    sub = self.solve(Sequent(gamma + ((x, a),), inner))
                    return Derivation(Rule.LOLLI_I, seq, (sub,))

        # branching inversions; try candidates left to right
        candidates = [i for i, e in enumerate(delta)
                      if isinstance(e.term, (App, Dist))]
        if not candidates:
            raise UnsatisfiableSplit(
                f"no rule applies to  {seq_text(seq)}")
        last_err: Optional[TypecheckError] = None
        for i in candidates:
            snapshot = dict(self.subst)
            try:
                return self._solve_branching(seq, i)
            except TypecheckError as err:
                self.subst = snapshot
                last_err = err
        raise last_err if last_err is not None else UnsatisfiableSplit("stuck")

    def _solve_branching(self, seq: Sequent, i: int) -> Derivation:
        gamma, delta = seq.gamma, seq.delta
        e = delta[i]
        rest = delta[:i] + delta[i + 1:]
        rest_idx = [j for j in range(len(delta)) if j != i]

        def premise_delta(assign_d, k, seed_entry=None):
            ents = []
            placed = seed_entry is None
            for pos, j in enumerate(rest_idx):
                if not placed and j > i:
                    ents.append(seed_entry)
                    placed = True
                if assign_d[pos] == k:
                    ents.append(rest[pos])
            if not placed:
                ents.append(seed_entry)
            return tuple(ents)

        def premise_gamma(assign_g, k):
            return tuple(g for pos, g in enumerate(gamma) if assign_g[pos] == k)

        def placements(floating, n_premises):
            # a component sharing no name with any seed can live in any
            # premise; try leftmost first, backtracking across the rest
            if len(floating) > 5:
                yield [0] * len(floating)
                return
            yield from itertools.product(range(n_premises),
                                         repeat=len(floating))

        def with_floating(base_g, base_d, floating, choice):
            ag, ad = dict(base_g), dict(base_d)
            for group, k in zip(floating, choice):
                for kind, idx in group:
                    if kind == "g":
                        ag[idx] = k
                    else:
                        ad[idx] = k
            return ag, ad

        match e.term:
            case App(fun, arg):
                self._apply_annotation(e.term, e.type)
                arg_ty = self.fresh()
                self._apply_annotation(arg, arg_ty)
                fun_ty = Lolli(arg_ty, e.type)
                base_g, base_d, floating = self._split(
                    gamma, rest, [var_names(fun), var_names(arg)])
                last: Optional[TypecheckError] = None
                for choice in placements(floating, 2):
                    snapshot = dict(self.subst)
                    assign_g, assign_d = with_floating(base_g, base_d,
                                                       floating, choice)
                    p1 = Sequent(premise_gamma(assign_g, 0),
                                 premise_delta(assign_d, 0,
                                               DeltaEntry(fun, fun_ty)))
                    p2 = Sequent(premise_gamma(assign_g, 1),
                                 premise_delta(assign_d, 1,
                                               DeltaEntry(arg, arg_ty)))
                    try:
                        d1 = self.solve(p1)
                        d2 = self.solve(p2)
                        return Derivation(Rule.LOLLI_E, seq, (d1, d2))
                    except TypecheckError as err:
                        self.subst = snapshot
                        last = err
                raise last if last is not None \
                    else UnsatisfiableSplit("no placement works")
            case Dist(x, y, body):
                self.unify(e.type, BOT)
                a, b = self.fresh(), self.fresh()
                self._apply_annotation(body, ParT(a, b))
                base_g, base_d, floating = self._split(
                    gamma, rest, [var_names(body), {x}, {y}])
                last = None
                for choice in placements(floating, 3):
                    snapshot = dict(self.subst)
                    assign_g, assign_d = with_floating(base_g, base_d,
                                                       floating, choice)
                    p1 = Sequent(premise_gamma(assign_g, 0),
                                 premise_delta(assign_d, 0,
                                               DeltaEntry(body, ParT(a, b))))
                    p2 = Sequent(premise_gamma(assign_g, 1) + ((x, a),),
                                 premise_delta(assign_d, 1))
                    p3 = Sequent(premise_gamma(assign_g, 2) + ((y, b),),
                                 premise_delta(assign_d, 2))
                    try:
                        d1 = self.solve(p1)
                        d2 = self.solve(p2)
                        d3 = self.solve(p3)
                        return Derivation(Rule.PARR_E, seq, (d1, d2, d3))
                    except TypecheckError as err:
                        self.subst = snapshot
                        last = err
                raise last if last is not None \
                    else UnsatisfiableSplit("no placement works")
        raise UnsatisfiableSplit("entry is neither an application nor a binary output")

    def finalize(self, d: Derivation) -> Derivation:
        def fix_seq(s: Sequent) -> Sequent:
            return Sequent(
                tuple((x, self.deep_resolve(ty, BOT)) for x, ty in s.gamma),
                tuple(DeltaEntry(e.term,
                                 None if e.type is None
                                 else self.deep_resolve(e.type, BOT))
                      for e in s.delta))

        def walk(node: Derivation) -> Derivation:
            return Derivation(node.rule, fix_seq(node.conclusion),
                              tuple(walk(p) for p in node.premises))

        return walk(d)


def seq_text(s: Sequent) -> str:
    # error rendering only: show unknowns as pseudo-atoms
    from .terms import Atom, print_sequent

    def scrub(ty):
        match ty:
            case MetaVar(name):
                return Atom(name)
            case Lolli(a, b):
                return Lolli(scrub(a), scrub(b))
            case ParT(a, b):
                return ParT(scrub(a), scrub(b))
            case _:
                return ty

    return print_sequent(Sequent(
        tuple((x, scrub(ty)) for x, ty in s.gamma),
        tuple(DeltaEntry(e.term, None if e.type is None else scrub(e.type))
              for e in s.delta)))


def reconstruct(goal: Sequent,
                annotations: Iterable[tuple[Term, TypeExpr]] = ()) -> Derivation:
    """Find a derivation of goal; raises a TypecheckError subclass if the
    sequent is not typable by the backward strategy."""
    try:
        check_channel_linearity(goal)
    except LinearityError as err:
        raise LinearityViolation(str(err)) from err
    for e in goal.delta:
        if e.type is None and not isinstance(e.term, Close):
            raise UnsatisfiableSplit(
                f"untyped entry must be close(...): {print_term(e.term)}")
    rec = _Reconstructor(annotations)
    d = rec.solve(goal)
    return rec.finalize(d)
