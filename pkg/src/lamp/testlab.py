"""Random well-typed derivation generation and the metatheory property
suites.

Generation is forward: a pool of small derivations is grown from axioms by
randomly applying rules whose side conditions hold, with globally fresh
variable names so premises never share a variable.  Binary-output
eliminations only consume entries whose term is literally a parallel
composition; an output over an opaque variable of par type is derivable
but permanently inert, and the progress suite quantifies over generated
programs that can always fire.

Identical configurations reproduce identical derivations byte for byte.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable, Optional

from .derivations import Derivation, Rule
from .metatheory import check_no_freaks, check_subformula
from .mll import MllDerivation, MllRule, MllSequent
from .reconstruct import TypecheckError, reconstruct
from .reduction import (
    Redex, apply_redex, comm_size, enumerate_normal_forms, find_redexes,
)
from .runtime import DeadlockReport, run_concurrent
from .terms import (
    App, Atom, BOT, Close, DeltaEntry, Dist, Lolli, Par, ParT, Send, Sequent,
    Term, TypeExpr, UNIT, Var, flatten_par, print_term, split_joined, subterms,
)


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    max_nodes: int = 12
    atom_pool: tuple[str, ...] = ("A", "B")

    def __post_init__(self):
        if self.max_nodes < 1:
            raise ValueError("max_nodes must be at least 1")


def _node_count(d: Derivation) -> int:
    return 1 + sum(_node_count(p) for p in d.premises)


class _Gen:
    def __init__(self, cfg: GenConfig):
        self.cfg = cfg
        self.rng = random.Random(
            f"{cfg.seed}:{cfg.max_nodes}:{','.join(cfg.atom_pool)}")
        self._ids = itertools.count()
        self.pool: list[Derivation] = []

    def fresh(self) -> str:
        return f"v{next(self._ids)}"

    def atom(self) -> TypeExpr:
        return Atom(self.rng.choice(self.cfg.atom_pool))

    def leaf_type(self, depth: int = 0) -> TypeExpr:
        # axioms range over whole formulas, not just propositional atoms;
        # a sprinkling of bot and composite types feeds the eliminations
        r = self.rng.random()
        if r < 0.2:
            return BOT
        if depth == 0 and r < 0.3:
            return Lolli(self.leaf_type(1), self.leaf_type(1))
        if depth == 0 and r < 0.35:
            return ParT(self.leaf_type(1), self.leaf_type(1))
        return self.atom()

    # -- forward rule applications ----------------------------------------

    def _axiom(self) -> None:
        x, a = self.fresh(), self.leaf_type()
        self.pool.append(Derivation(
            Rule.AX, Sequent(((x, a),), (DeltaEntry(Var(x), a),))))

    def _fits(self, *parts: Derivation) -> bool:
        return sum(_node_count(p) for p in parts) + 1 <= self.cfg.max_nodes

    def _bot_i(self) -> bool:
        options = [k for k, d in enumerate(self.pool) if self._fits(d)]
        if not options:
            return False
        k = self.rng.choice(options)
        d = self.pool[k]
        s = d.conclusion
        con = Sequent(s.gamma, s.delta + (DeltaEntry(UNIT, BOT),))
        self.pool[k] = Derivation(Rule.BOT_I, con, (d,))
        return True

    def _bot_e(self) -> bool:
        options = [(k, i) for k, d in enumerate(self.pool)
                   if self._fits(d)
                   for i, e in enumerate(d.conclusion.delta) if e.type == BOT]
        if not options:
            return False
        k, i = self.rng.choice(options)
        d = self.pool[k]
        s = d.conclusion
        entry = DeltaEntry(Close(s.delta[i].term), None)
        con = Sequent(s.gamma, s.delta[:i] + (entry,) + s.delta[i + 1:])
        self.pool[k] = Derivation(Rule.BOT_E, con, (d,))
        return True

    def _lolli_i(self) -> bool:
        options = [(k, j, i) for k, d in enumerate(self.pool)
                   if self._fits(d)
                   for j in range(len(d.conclusion.gamma))
                   for i, e in enumerate(d.conclusion.delta)
                   if e.type is not None]
        if not options:
            return False
        k, j, i = self.rng.choice(options)
        d = self.pool[k]
        s = d.conclusion
        x, a = s.gamma[j]
        entry = DeltaEntry(Send(x, s.delta[i].term), Lolli(a, s.delta[i].type))
        con = Sequent(s.gamma[:j] + s.gamma[j + 1:],
                      s.delta[:i] + (entry,) + s.delta[i + 1:])
        self.pool[k] = Derivation(Rule.LOLLI_I, con, (d,))
        return True

    def _parr_i(self) -> bool:
        options = [(k, i) for k, d in enumerate(self.pool)
                   if self._fits(d)
                   for i in range(len(d.conclusion.delta) - 1)
                   if d.conclusion.delta[i].type is not None
                   and d.conclusion.delta[i + 1].type is not None]
        if not options:
            return False
        k, i = self.rng.choice(options)
        d = self.pool[k]
        s = d.conclusion
        e1, e2 = s.delta[i], s.delta[i + 1]
        entry = DeltaEntry(Par(e1.term, e2.term), ParT(e1.type, e2.type))
        con = Sequent(s.gamma, s.delta[:i] + (entry,) + s.delta[i + 2:])
        self.pool[k] = Derivation(Rule.PARR_I, con, (d,))
        return True

    def _lolli_e(self) -> bool:
        options = []
        for k1, d1 in enumerate(self.pool):
            for j1, e1 in enumerate(d1.conclusion.delta):
                if not isinstance(e1.type, Lolli):
                    continue
                for k2, d2 in enumerate(self.pool):
                    if k2 == k1 or not self._fits(d1, d2):
                        continue
                    for j2, e2 in enumerate(d2.conclusion.delta):
                        if e2.type == e1.type.arg:
                            options.append((k1, j1, k2, j2))
        if not options:
            return False
        k1, j1, k2, j2 = self.rng.choice(options)
        d1, d2 = self.pool[k1], self.pool[k2]
        s1, s2 = d1.conclusion, d2.conclusion
        fn, arg = s1.delta[j1], s2.delta[j2]
        entry = DeltaEntry(App(fn.term, arg.term), fn.type.res)
        delta = (s1.delta[:j1] + (entry,) + s1.delta[j1 + 1:]
                 + s2.delta[:j2] + s2.delta[j2 + 1:])
        con = Sequent(s1.gamma + s2.gamma, delta)
        node = Derivation(Rule.LOLLI_E, con, (d1, d2))
        self.pool[max(k1, k2)] = node
        del self.pool[min(k1, k2)]
        return True

    def _parr_e(self) -> bool:
        options = []
        for k1, d1 in enumerate(self.pool):
            for j, e in enumerate(d1.conclusion.delta):
                # only split entries that are literally parallel compositions,
                # so every generated binary output can eventually fire
                if not (isinstance(e.type, ParT) and isinstance(e.term, Par)):
                    continue
                for k2, d2 in enumerate(self.pool):
                    if k2 == k1:
                        continue
                    for g2, (x, a) in enumerate(d2.conclusion.gamma):
                        if a != e.type.left:
                            continue
                        for k3, d3 in enumerate(self.pool):
                            if k3 in (k1, k2) or not self._fits(d1, d2, d3):
                                continue
                            for g3, (y, b) in enumerate(d3.conclusion.gamma):
                                if b == e.type.right:
                                    options.append((k1, j, k2, g2, k3, g3))
        if not options:
            return False
        k1, j, k2, g2, k3, g3 = self.rng.choice(options)
        d1, d2, d3 = self.pool[k1], self.pool[k2], self.pool[k3]
        s1, s2, s3 = d1.conclusion, d2.conclusion, d3.conclusion
        x, y = s2.gamma[g2][0], s3.gamma[g3][0]
        entry = DeltaEntry(Dist(x, y, s1.delta[j].term), BOT)
        delta = (s1.delta[:j] + (entry,) + s1.delta[j + 1:]
                 + s2.delta + s3.delta)
        gamma = (s1.gamma + s2.gamma[:g2] + s2.gamma[g2 + 1:]
                 + s3.gamma[:g3] + s3.gamma[g3 + 1:])
        node = Derivation(Rule.PARR_E, Sequent(gamma, delta), (d1, d2, d3))
        keep = max(k1, k2, k3)
        self.pool[keep] = node
        for k in sorted({k1, k2, k3} - {keep}, reverse=True):
            del self.pool[k]
        return True

    def run(self) -> Derivation:
        actions: list[tuple[Callable, float]] = [
            (self._axiom, 2.0), (self._bot_i, 1.0), (self._bot_e, 0.7),
            (self._lolli_i, 2.2), (self._parr_i, 1.0),
            (self._lolli_e, 3.0), (self._parr_e, 1.2),
        ]
        self._axiom()
        fns, weights = zip(*actions)
        for _ in range(self.cfg.max_nodes * 4):
            if _node_count(max(self.pool, key=_node_count)) >= self.cfg.max_nodes:
                break
            self.rng.choices(fns, weights=weights, k=1)[0]()
        return max(self.pool, key=_node_count)


def gen_derivation(cfg: GenConfig) -> Derivation:
    """Generate a random checkable derivation of at most cfg.max_nodes rule
    applications."""
    return _Gen(cfg).run()


# ---------------------------------------------------------------------------
# Random sequent calculus derivations (for translation round-trips)

class _MllGen:
    def __init__(self, cfg: GenConfig):
        self.cfg = cfg
        self.rng = random.Random(f"mll:{cfg.seed}:{cfg.max_nodes}")
        self.pool: list[MllDerivation] = []

    def _type(self, depth: int = 0) -> TypeExpr:
        r = self.rng.random()
        if depth >= 2 or r < 0.55:
            return Atom(self.rng.choice(self.cfg.atom_pool))
        if r < 0.7:
            return BOT
        if r < 0.85:
            return Lolli(self._type(depth + 1), self._type(depth + 1))
        return ParT(self._type(depth + 1), self._type(depth + 1))

    def _ax_id(self) -> None:
        a = self._type()
        self.pool.append(MllDerivation(MllRule.AX_ID, MllSequent((a,), (a,))))

    def _ax_bot(self) -> None:
        self.pool.append(MllDerivation(MllRule.AX_BOT, MllSequent((BOT,), ())))

    def _mfits(self, *parts: MllDerivation) -> bool:
        return sum(_mll_node_count(p) for p in parts) + 1 <= self.cfg.max_nodes

    def _bot_r(self) -> bool:
        options = [k for k, d in enumerate(self.pool) if self._mfits(d)]
        if not options:
            return False
        k = self.rng.choice(options)
        d = self.pool[k]
        s = d.conclusion
        i = self.rng.randint(0, len(s.right))
        con = MllSequent(s.left, s.right[:i] + (BOT,) + s.right[i:])
        self.pool[k] = MllDerivation(MllRule.BOT_R, con, (d,))
        return True

    def _lolli_r(self) -> bool:
        options = [(k, i, j) for k, d in enumerate(self.pool)
                   if self._mfits(d)
                   for i in range(len(d.conclusion.right))
                   for j in range(len(d.conclusion.left))]
        if not options:
            return False
        k, i, j = self.rng.choice(options)
        d = self.pool[k]
        s = d.conclusion
        a, b = s.left[j], s.right[i]
        con = MllSequent(s.left[:j] + s.left[j + 1:],
                         s.right[:i] + (Lolli(a, b),) + s.right[i + 1:])
        self.pool[k] = MllDerivation(MllRule.LOLLI_R, con, (d,))
        return True

    def _parr_r(self) -> bool:
        options = [(k, i) for k, d in enumerate(self.pool)
                   if len(d.conclusion.right) >= 2 and self._mfits(d)
                   for i in range(len(d.conclusion.right) - 1)]
        if not options:
            return False
        k, i = self.rng.choice(options)
        d = self.pool[k]
        s = d.conclusion
        con = MllSequent(s.left, s.right[:i]
                         + (ParT(s.right[i], s.right[i + 1]),)
                         + s.right[i + 2:])
        self.pool[k] = MllDerivation(MllRule.PARR_R, con, (d,))
        return True

    def _binary(self, rule: MllRule) -> bool:
        options = []
        for k1, d1 in enumerate(self.pool):
            for k2, d2 in enumerate(self.pool):
                if k1 == k2 or not self._mfits(d1, d2):
                    continue
                s1, s2 = d1.conclusion, d2.conclusion
                if rule is MllRule.CUT:
                    for i, a in enumerate(s1.right):
                        for j, b in enumerate(s2.left):
                            if a == b:
                                options.append((k1, k2, i, j))
                elif rule is MllRule.LOLLI_L:
                    for i in range(len(s1.right)):
                        for j in range(len(s2.left)):
                            options.append((k1, k2, i, j))
                else:  # PARR_L
                    for i in range(len(s1.left)):
                        for j in range(len(s2.left)):
                            options.append((k1, k2, i, j))
        if not options:
            return False
        k1, k2, i, j = self.rng.choice(options)
        d1, d2 = self.pool[k1], self.pool[k2]
        s1, s2 = d1.conclusion, d2.conclusion
        if rule is MllRule.CUT:
            con = MllSequent(s1.left + s2.left[:j] + s2.left[j + 1:],
                             s1.right[:i] + s1.right[i + 1:] + s2.right)
        elif rule is MllRule.LOLLI_L:
            ty = Lolli(s1.right[i], s2.left[j])
            con = MllSequent(s1.left + (ty,) + s2.left[:j] + s2.left[j + 1:],
                             s1.right[:i] + s1.right[i + 1:] + s2.right)
        else:
            ty = ParT(s1.left[i], s2.left[j])
            con = MllSequent(s1.left[:i] + s1.left[i + 1:]
                             + s2.left[:j] + s2.left[j + 1:] + (ty,),
                             s1.right + s2.right)
        node = MllDerivation(rule, con, (d1, d2))
        self.pool[max(k1, k2)] = node
        del self.pool[min(k1, k2)]
        return True

    def run(self) -> MllDerivation:
        self._ax_id()
        for _ in range(self.cfg.max_nodes * 4):
            if _mll_node_count(max(self.pool, key=_mll_node_count)) \
                    >= self.cfg.max_nodes:
                break
            r = self.rng.random()
            if r < 0.22:
                self._ax_id()
            elif r < 0.3:
                self._ax_bot()
            elif r < 0.42:
                self._bot_r()
            elif r < 0.58:
                self._lolli_r()
            elif r < 0.68:
                self._parr_r()
            elif r < 0.8:
                self._binary(MllRule.CUT)
            elif r < 0.92:
                self._binary(MllRule.LOLLI_L)
            else:
                self._binary(MllRule.PARR_L)
        return max(self.pool, key=_mll_node_count)


def _mll_node_count(d: MllDerivation) -> int:
    return 1 + sum(_mll_node_count(p) for p in d.premises)


def gen_mll(cfg: GenConfig) -> MllDerivation:
    return _MllGen(cfg).run()


# ---------------------------------------------------------------------------
# Property suites

@dataclass
class PropertyResult:
    name: str
    cases: int = 0
    failures: int = 0
    failing_seeds: list[int] = field(default_factory=list)

    @property
    def first_failing_seed(self) -> Optional[int]:
        return self.failing_seeds[0] if self.failing_seeds else None

    def record(self, seed: int, ok: bool) -> None:
        self.cases += 1
        if not ok:
            self.failures += 1
            self.failing_seeds.append(seed)


@dataclass
class Report:
    results: list[PropertyResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.failures == 0 for r in self.results)

    def render(self) -> str:
        lines = []
        for r in self.results:
            line = f"{r.name}: cases={r.cases} failures={r.failures}"
            if r.first_failing_seed is not None:
                line += f" first-failing-seed={r.first_failing_seed}"
            lines.append(line)
        return "\n".join(lines)


CONFLUENCE_CS_LIMIT = 6
RUNTIME_SEEDS = 5


def _reduction_states(seq: Sequent, reducer) -> list[tuple[Sequent, list[Redex]]]:
    """Deterministic leftmost reduction over the joined term, re-split into
    entries after each step; collects (sequent, available redexes) states."""
    m = len(seq.delta)
    types = [e.type for e in seq.delta]
    states = []
    current = seq
    for _ in range(comm_size(seq.joined_term()) + 1):
        joined = current.joined_term()
        redexes = find_redexes(joined)
        states.append((current, redexes))
        if not redexes:
            break
        new = reducer(joined, redexes[0])
        parts = split_joined(new, m)
        current = Sequent(current.gamma,
                          tuple(DeltaEntry(t, ty)
                                for t, ty in zip(parts, types)))
    return states


def run_property_suite(n_cases: int, cfg: GenConfig,
                       reducer=apply_redex) -> Report:
    """Drive every metatheory suite over n_cases generated derivations.
    The reducer hook exists so tests can inject a corrupted engine and watch
    the suites catch it."""
    names = ["step-decrement", "subject-reduction", "progress", "confluence",
             "subformula", "no-freaks", "runtime-determinacy"]
    results = {n: PropertyResult(n) for n in names}

    for case in range(n_cases):
        case_seed = cfg.seed * 1_000_003 + case
        d = gen_derivation(GenConfig(case_seed, cfg.max_nodes, cfg.atom_pool))
        seq = d.conclusion
        joined = seq.joined_term()
        m = len(seq.delta)
        types = [e.type for e in seq.delta]

        states = _reduction_states(seq, reducer)

        # step-decrement: every fired step removes exactly one output node
        ok = True
        for (s, redexes) in states:
            base = comm_size(s.joined_term())
            for r in redexes:
                if comm_size(reducer(s.joined_term(), r)) != base - 1:
                    ok = False
        results["step-decrement"].record(case_seed, ok)

        # progress: an applied output or binary output always yields a redex
        ok = True
        for (s, redexes) in states:
            has_potential = any(
                isinstance(sub, Dist)
                or (isinstance(sub, App) and isinstance(sub.fun, Send))
                for _, sub in subterms(s.joined_term()))
            if has_potential and not redexes:
                ok = False
        results["progress"].record(case_seed, ok)

        # subject reduction: every one-step reduct re-typechecks identically
        ok = True
        for (s, redexes) in states:
            for r in redexes:
                parts = split_joined(reducer(s.joined_term(), r), m)
                reduct = Sequent(s.gamma,
                                 tuple(DeltaEntry(t, ty)
                                       for t, ty in zip(parts, types)))
                try:
                    d2 = reconstruct(reduct)
                except TypecheckError:
                    ok = False
                    continue
                if d2.conclusion.gamma != s.gamma \
                        or [e.type for e in d2.conclusion.delta] != types:
                    ok = False
        results["subject-reduction"].record(case_seed, ok)

        # confluence by exhaustive enumeration on small terms
        if comm_size(joined) <= CONFLUENCE_CS_LIMIT:
            forms = enumerate_normal_forms(joined)
            results["confluence"].record(case_seed, len(forms) == 1)

        # subformula property of the reconstructed normal form
        final_seq = states[-1][0]
        try:
            nd = reconstruct(final_seq)
            check_subformula(nd)
            ok = True
        except Exception:
            ok = False
        results["subformula"].record(case_seed, ok)

        # simple-context channel discipline on every reachable sequent
        ok = True
        for (s, _) in states:
            try:
                check_no_freaks(s)
            except Exception:
                ok = False
        results["no-freaks"].record(case_seed, ok)

        # runtime determinacy across schedules
        expected = sorted(print_term(t)
                          for t in _flatten(states[-1][0]))
        ok = True
        for rseed in range(RUNTIME_SEEDS):
            try:
                got = sorted(print_term(t)
                             for t in run_concurrent(seq, seed=rseed))
            except DeadlockReport:
                ok = False
                continue
            if got != expected:
                ok = False
        results["runtime-determinacy"].record(case_seed, ok)

    return Report([results[n] for n in names])


def _flatten(seq: Sequent) -> list[Term]:
    out: list[Term] = []
    for e in seq.delta:
        out.extend(flatten_par(e.term))
    return out
