"""Two-sided sequent calculus for multiplicative linear logic and the
constructive translations to and from the natural deduction system.

Sequents here carry types only.  The checker matches contexts as multisets
(the calculus is considered up to exchange) while splits stay strictly
multiplicative.  Both translations are syntax directed and total on checked
input; each direction's output is validated by the opposite checker in the
test suite.

Type erasure keeps declaration types on the left and typed entry types on
the right, dropping untyped close entries.  Derivations produced by the
sequent-to-natural-deduction direction keep every typed entry before every
untyped one, so right-hand positions in the source sequent coincide with
entry indices; fresh term variables come from a deterministic counter
(c0, c1, ...) and translations are reproducible byte for byte.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Any

from .derivations import Derivation, Rule, match_rule
from .terms import (
    App, BOT, Close, DeltaEntry, Dist, Lolli, Par, ParT, Send, Sequent,
    TypeExpr, UNIT, Var, print_type,
)


class MllRule(Enum):
    AX_ID = "AxId"
    AX_BOT = "AxBot"
    BOT_R = "BotR"
    LOLLI_L = "LolliL"
    LOLLI_R = "LolliR"
    PARR_L = "ParrL"
    PARR_R = "ParrR"
    CUT = "Cut"


MLL_ARITY = {
    MllRule.AX_ID: 0,
    MllRule.AX_BOT: 0,
    MllRule.BOT_R: 1,
    MllRule.LOLLI_R: 1,
    MllRule.PARR_R: 1,
    MllRule.LOLLI_L: 2,
    MllRule.PARR_L: 2,
    MllRule.CUT: 2,
}


@dataclass(frozen=True)
class MllSequent:
    left: tuple[TypeExpr, ...]
    right: tuple[TypeExpr, ...]


@dataclass(frozen=True)
class MllDerivation:
    rule: MllRule
    conclusion: MllSequent
    premises: tuple["MllDerivation", ...] = ()


class MllRuleViolation(Exception):
    def __init__(self, path: tuple[int, ...], reason: str):
        super().__init__(f"at node {list(path)}: {reason}")
        self.path = path
        self.reason = reason


def print_mll_sequent(s: MllSequent) -> str:
    left = ", ".join(print_type(t) for t in s.left)
    right = ", ".join(print_type(t) for t in s.right)
    out = f"{left} |-" if left else "|-"
    return f"{out} {right}" if right else out


def _without(xs: tuple, i: int) -> tuple:
    return xs[:i] + xs[i + 1:]


def _same_multiset(a: tuple, *parts: tuple) -> bool:
    return Counter(a) == sum((Counter(p) for p in parts), Counter())


def match_mll(node: MllDerivation, path: tuple[int, ...] = ()) -> dict[str, Any]:
    """Verify one node against its rule schema; returns the matched
    principal positions and component types."""
    rule, con, prems = node.rule, node.conclusion, node.premises
    if len(prems) != MLL_ARITY[rule]:
        raise MllRuleViolation(path, f"{rule.value} expects {MLL_ARITY[rule]} "
                                     f"premises, got {len(prems)}")

    if rule is MllRule.AX_ID:
        if len(con.left) == 1 and con.left == con.right:
            return {"a": con.left[0]}
        raise MllRuleViolation(path, "identity axiom must be  A |- A")

    if rule is MllRule.AX_BOT:
        if con.left == (BOT,) and con.right == ():
            return {}
        raise MllRuleViolation(path, "bottom axiom must be  bot |-")

    if rule is MllRule.BOT_R:
        p = prems[0].conclusion
        if p.left == con.left:
            for i, ty in enumerate(con.right):
                if ty == BOT and _without(con.right, i) == p.right:
                    return {"i": i}
        raise MllRuleViolation(path, "bot-right must add one bot on the right")

    if rule is MllRule.LOLLI_R:
        p = prems[0].conclusion
        for i, ty in enumerate(con.right):
            match ty:
                case Lolli(a, b):
                    if p.right != con.right[:i] + (b,) + con.right[i + 1:]:
                        continue
                    for j, ty2 in enumerate(p.left):
                        if ty2 == a and _without(p.left, j) == con.left:
                            return {"i": i, "j": j, "a": a, "b": b}
        raise MllRuleViolation(path, "lolli-right must move the antecedent left")

    if rule is MllRule.PARR_R:
        p = prems[0].conclusion
        if p.left == con.left:
            for i, ty in enumerate(con.right):
                match ty:
                    case ParT(a, b):
                        if p.right == con.right[:i] + (a, b) + con.right[i + 1:]:
                            return {"i": i, "a": a, "b": b}
        raise MllRuleViolation(path, "par-right must split one par formula")

    # For the context-splitting rules, several principal positions can match
    # the same multisets; prefer the candidate whose left-to-right context
    # concatenation reproduces the conclusion lists exactly, so that the
    # term decoration erases back verbatim.

    if rule is MllRule.CUT:
        p1, p2 = prems[0].conclusion, prems[1].conclusion
        found = []
        for i, a in enumerate(p1.right):
            for j, b in enumerate(p2.left):
                if a == b \
                        and _same_multiset(con.left, p1.left, _without(p2.left, j)) \
                        and _same_multiset(con.right, _without(p1.right, i),
                                           p2.right):
                    exact = (con.left == p1.left + _without(p2.left, j)
                             and con.right == _without(p1.right, i) + p2.right)
                    found.append((not exact, {"i": i, "j": j, "a": a}))
        if found:
            return min(found, key=lambda f: f[0])[1]
        raise MllRuleViolation(path, "cut formulas do not match the contexts")

    if rule is MllRule.LOLLI_L:
        p1, p2 = prems[0].conclusion, prems[1].conclusion
        found = []
        for k, ty in enumerate(con.left):
            match ty:
                case Lolli(a, b):
                    for i, a1 in enumerate(p1.right):
                        if a1 != a:
                            continue
                        for j, b1 in enumerate(p2.left):
                            if b1 != b:
                                continue
                            if _same_multiset(_without(con.left, k),
                                              p1.left, _without(p2.left, j)) \
                                    and _same_multiset(con.right,
                                                       _without(p1.right, i),
                                                       p2.right):
                                exact = (con.left == p1.left + (ty,)
                                         + _without(p2.left, j)
                                         and con.right
                                         == _without(p1.right, i) + p2.right)
                                found.append((not exact,
                                              {"k": k, "i": i, "j": j,
                                               "a": a, "b": b}))
        if found:
            return min(found, key=lambda f: (f[0], f[1]["k"]))[1]
        raise MllRuleViolation(path, "lolli-left does not match its premises")

    if rule is MllRule.PARR_L:
        p1, p2 = prems[0].conclusion, prems[1].conclusion
        found = []
        for k, ty in enumerate(con.left):
            match ty:
                case ParT(a, b):
                    for i, a1 in enumerate(p1.left):
                        if a1 != a:
                            continue
                        for j, b1 in enumerate(p2.left):
                            if b1 != b:
                                continue
                            if _same_multiset(_without(con.left, k),
                                              _without(p1.left, i),
                                              _without(p2.left, j)) \
                                    and _same_multiset(con.right,
                                                       p1.right, p2.right):
                                exact = (con.left
                                         == _without(p1.left, i)
                                         + _without(p2.left, j) + (ty,)
                                         and con.right == p1.right + p2.right)
                                found.append((not exact,
                                              {"k": k, "i": i, "j": j,
                                               "a": a, "b": b}))
        if found:
            return min(found, key=lambda f: (f[0], f[1]["k"]))[1]
        raise MllRuleViolation(path, "par-left does not match its premises")

    raise MllRuleViolation(path, f"unknown rule {rule!r}")


def check_mll(d: MllDerivation) -> None:
    def walk(node: MllDerivation, path: tuple[int, ...]) -> None:
        match_mll(node, path)
        for k, p in enumerate(node.premises):
            walk(p, path + (k,))

    walk(d, ())


# ---------------------------------------------------------------------------
# Type erasure and the natural-deduction -> sequent-calculus direction

def type_erasure(s: Sequent) -> MllSequent:
    return MllSequent(tuple(ty for _, ty in s.gamma),
                      tuple(e.type for e in s.delta if e.type is not None))


def _typed_pos(s: Sequent, delta_index: int) -> int:
    """Position of a typed entry among the typed entries only."""
    return sum(1 for e in s.delta[:delta_index] if e.type is not None)


def nmll_to_mll(d: Derivation) -> MllDerivation:
    """Translate a checked natural deduction derivation; the result concludes
    the type erasure of d's conclusion and passes check_mll.

    Eliminations have no sequent-calculus namesake and become cuts: closing
    a bot entry cuts against the bottom axiom, an application routes through
    lolli-left via two cuts, and a binary output stacks bot-right over a cut
    over par-left."""
    inst = match_rule(d).data
    con = type_erasure(d.conclusion)
    rule = d.rule

    if rule is Rule.AX:
        return MllDerivation(MllRule.AX_ID, con)

    if rule is Rule.BOT_I:
        return MllDerivation(MllRule.BOT_R, con, (nmll_to_mll(d.premises[0]),))

    if rule is Rule.LOLLI_I:
        return MllDerivation(MllRule.LOLLI_R, con, (nmll_to_mll(d.premises[0]),))

    if rule is Rule.PARR_I:
        return MllDerivation(MllRule.PARR_R, con, (nmll_to_mll(d.premises[0]),))

    if rule is Rule.BOT_E:
        sub = nmll_to_mll(d.premises[0])
        axbot = MllDerivation(MllRule.AX_BOT, MllSequent((BOT,), ()))
        return MllDerivation(MllRule.CUT, con, (sub, axbot))

    if rule is Rule.LOLLI_E:
        a, b = inst["a"], inst["b"]
        fun_pos = _typed_pos(d.premises[0].conclusion, inst["j1"])
        sub1 = nmll_to_mll(d.premises[0])
        sub2 = nmll_to_mll(d.premises[1])
        e1 = sub1.conclusion
        ax_a = MllDerivation(MllRule.AX_ID, MllSequent((a,), (a,)))
        ax_b = MllDerivation(MllRule.AX_ID, MllSequent((b,), (b,)))
        lolli_l = MllDerivation(
            MllRule.LOLLI_L, MllSequent((a, Lolli(a, b)), (b,)), (ax_a, ax_b))
        cut1 = MllDerivation(
            MllRule.CUT,
            MllSequent(e1.left + (a,),
                       e1.right[:fun_pos] + (b,) + e1.right[fun_pos + 1:]),
            (sub1, lolli_l))
        return MllDerivation(MllRule.CUT, con, (sub2, cut1))

    if rule is Rule.PARR_E:
        a, b = inst["a"], inst["b"]
        par_pos = _typed_pos(d.premises[0].conclusion, inst["j"])
        gx, gy = inst["gamma_pos_x"], inst["gamma_pos_y"]
        sub1 = nmll_to_mll(d.premises[0])
        sub2 = nmll_to_mll(d.premises[1])
        sub3 = nmll_to_mll(d.premises[2])
        e1, e2, e3 = sub1.conclusion, sub2.conclusion, sub3.conclusion
        sides = _without(e2.left, gx) + _without(e3.left, gy)
        parr_l = MllDerivation(
            MllRule.PARR_L,
            MllSequent(sides + (ParT(a, b),), e2.right + e3.right),
            (sub2, sub3))
        cut = MllDerivation(
            MllRule.CUT,
            MllSequent(e1.left + sides,
                       _without(e1.right, par_pos) + e2.right + e3.right),
            (sub1, parr_l))
        return MllDerivation(MllRule.BOT_R, con, (cut,))

    raise AssertionError(f"unhandled rule {rule!r}")


# ---------------------------------------------------------------------------
# Sequent-calculus -> natural-deduction direction

def _typed(delta: tuple[DeltaEntry, ...]) -> tuple[DeltaEntry, ...]:
    return tuple(e for e in delta if e.type is not None)


def _untyped(delta: tuple[DeltaEntry, ...]) -> tuple[DeltaEntry, ...]:
    return tuple(e for e in delta if e.type is None)


class _Translator:
    def __init__(self):
        self._ids = itertools.count()

    def fresh(self) -> str:
        return f"c{next(self._ids)}"

    def translate(self, node: MllDerivation) -> Derivation:
        inst = match_mll(node)
        rule = node.rule
        con = node.conclusion

        if rule is MllRule.AX_ID:
            x = self.fresh()
            a = con.left[0]
            return Derivation(Rule.AX, Sequent(((x, a),),
                                               (DeltaEntry(Var(x), a),)))

        if rule is MllRule.AX_BOT:
            x = self.fresh()
            ax = Derivation(Rule.AX, Sequent(((x, BOT),),
                                             (DeltaEntry(Var(x), BOT),)))
            return Derivation(
                Rule.BOT_E,
                Sequent(((x, BOT),), (DeltaEntry(Close(Var(x)), None),)),
                (ax,))

        if rule is MllRule.BOT_R:
            sub = self.translate(node.premises[0])
            i = inst["i"]
            s = sub.conclusion
            delta = s.delta[:i] + (DeltaEntry(UNIT, BOT),) + s.delta[i:]
            return Derivation(Rule.BOT_I, Sequent(s.gamma, delta), (sub,))

        if rule is MllRule.LOLLI_R:
            sub = self.translate(node.premises[0])
            i, j, a, b = inst["i"], inst["j"], inst["a"], inst["b"]
            s = sub.conclusion
            x = s.gamma[j][0]
            gamma = s.gamma[:j] + s.gamma[j + 1:]
            entry = DeltaEntry(Send(x, s.delta[i].term), Lolli(a, b))
            delta = s.delta[:i] + (entry,) + s.delta[i + 1:]
            return Derivation(Rule.LOLLI_I, Sequent(gamma, delta), (sub,))

        if rule is MllRule.PARR_R:
            sub = self.translate(node.premises[0])
            i, a, b = inst["i"], inst["a"], inst["b"]
            s = sub.conclusion
            entry = DeltaEntry(Par(s.delta[i].term, s.delta[i + 1].term),
                               ParT(a, b))
            delta = s.delta[:i] + (entry,) + s.delta[i + 2:]
            return Derivation(Rule.PARR_I, Sequent(s.gamma, delta), (sub,))

        if rule is MllRule.CUT:
            d_left = self.translate(node.premises[0])
            d_right = self.translate(node.premises[1])
            return self._cut_encoding(d_left, d_right,
                                      inst["i"], inst["j"], inst["a"])

        if rule is MllRule.LOLLI_L:
            d_arg = self.translate(node.premises[0])
            d_right = self.translate(node.premises[1])
            i, j, a, b = inst["i"], inst["j"], inst["a"], inst["b"]
            f = self.fresh()
            ty = Lolli(a, b)
            ax = Derivation(Rule.AX, Sequent(((f, ty),),
                                             (DeltaEntry(Var(f), ty),)))
            s1 = d_arg.conclusion
            app_entry = DeltaEntry(App(Var(f), s1.delta[i].term), b)
            app = Derivation(
                Rule.LOLLI_E,
                Sequent(s1.gamma + ((f, ty),),
                        s1.delta[:i] + (app_entry,) + s1.delta[i + 1:]),
                (ax, d_arg))
            return self._cut_encoding(app, d_right, i, j, b)

        if rule is MllRule.PARR_L:
            d_a = self.translate(node.premises[0])
            d_b = self.translate(node.premises[1])
            i, j, a, b = inst["i"], inst["j"], inst["a"], inst["b"]
            p = self.fresh()
            ty = ParT(a, b)
            ax = Derivation(Rule.AX, Sequent(((p, ty),),
                                             (DeltaEntry(Var(p), ty),)))
            s1, s2 = d_a.conclusion, d_b.conclusion
            x, y = s1.gamma[i][0], s2.gamma[j][0]
            gamma = (s1.gamma[:i] + s1.gamma[i + 1:]
                     + s2.gamma[:j] + s2.gamma[j + 1:] + ((p, ty),))
            dist_entry = DeltaEntry(Dist(x, y, Var(p)), BOT)
            typed = _typed(s1.delta) + _typed(s2.delta)
            untyped = _untyped(s1.delta) + _untyped(s2.delta)
            dist = Derivation(Rule.PARR_E,
                              Sequent(gamma, typed + untyped + (dist_entry,)),
                              (ax, d_a, d_b))
            close_entry = DeltaEntry(Close(dist_entry.term), None)
            return Derivation(Rule.BOT_E,
                              Sequent(gamma, typed + untyped + (close_entry,)),
                              (dist,))

        raise AssertionError(f"unhandled rule {rule!r}")

    def _cut_encoding(self, d_left: Derivation, d_right: Derivation,
                      i: int, j: int, a: TypeExpr) -> Derivation:
        """Encode a cut on A: turn the right premise's A declaration into an
        output channel of type A -o bot and apply it to the left premise's
        A entry, then close the resulting bot."""
        s2 = d_right.conclusion
        x = s2.gamma[j][0]
        n2 = len(_typed(s2.delta))
        boti = Derivation(
            Rule.BOT_I,
            Sequent(s2.gamma,
                    _typed(s2.delta) + (DeltaEntry(UNIT, BOT),)
                    + _untyped(s2.delta)),
            (d_right,))
        send_entry = DeltaEntry(Send(x, UNIT), Lolli(a, BOT))
        lolli_i = Derivation(
            Rule.LOLLI_I,
            Sequent(s2.gamma[:j] + s2.gamma[j + 1:],
                    _typed(s2.delta) + (send_entry,) + _untyped(s2.delta)),
            (boti,))
        s1 = d_left.conclusion
        arg = s1.delta[i]
        app_entry = DeltaEntry(App(send_entry.term, arg.term), BOT)
        gamma = s1.gamma + lolli_i.conclusion.gamma
        typed = (_without(_typed(s1.delta), i) + _typed(s2.delta))
        untyped = _untyped(s1.delta) + _untyped(s2.delta)
        lolli_e = Derivation(
            Rule.LOLLI_E,
            Sequent(gamma, typed + untyped + (app_entry,)),
            (lolli_i, d_left))
        close_entry = DeltaEntry(Close(app_entry.term), None)
        return Derivation(Rule.BOT_E,
                          Sequent(gamma, typed + untyped + (close_entry,)),
                          (lolli_e,))


def mll_to_nmll(d: MllDerivation) -> Derivation:
    """Translate a checked sequent calculus derivation into natural
    deduction; the result's conclusion erases back to d's conclusion up to
    the order in which independent contexts were joined."""
    return _Translator().translate(d)
