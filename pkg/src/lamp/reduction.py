"""Reduction for lamp terms: redex discovery, firing, and normalization.

Three redex kinds cover all the reduction rules:

* beta      -- ``(lam x. u) v`` anywhere, with x free in u;
* comm      -- an applied output ``(out x. u) v`` whose unique free
               occurrence of x sits across a parallel composition: the
               least common ancestor of activator and receiver is a Par;
* dist      -- ``out2 x y. (s | t)`` whose free x and y occurrences each
               have a Par as least common ancestor with the activator.

The single LCA-is-Par condition realizes the left/right variants of the
communication rules and their closure under arbitrary contexts at once;
receivers inside the activator itself never qualify because the LCA is
then the activator node.  Every fired step removes exactly one Send or
Dist node and moves (never copies) the transmitted terms, so on linear
terms the communication size decreases by exactly one per step, which
bounds every reduction sequence.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

from .terms import (
    App, Close, Dist, Par, Path, Send, Term, UNIT, Var,
    is_free_in, occurrences, print_term, replace_at, substitute, subterm_at,
    subterms,
)


class StaleRedex(Exception):
    pass


class BudgetExceeded(Exception):
    def __init__(self, visited: int):
        super().__init__(f"state budget exceeded after {visited} states")
        self.visited = visited


@dataclass(frozen=True)
class Redex:
    kind: str  # "beta" | "comm" | "dist"
    activator: Path
    receivers: tuple[Path, ...] = ()

    def describe(self, root: Term) -> str:
        node = subterm_at(root, self.activator)
        if self.kind == "beta":
            return "Beta"
        if self.kind == "comm":
            assert isinstance(node, App) and isinstance(node.fun, Send)
            return f"Comm {node.fun.chan}"
        assert isinstance(node, Dist)
        return f"Dist {node.chan1} {node.chan2}"


@dataclass
class Trace:
    initial: Term
    steps: list[tuple[str, Term]]

    @property
    def final(self) -> Term:
        return self.steps[-1][1] if self.steps else self.initial

    def render(self) -> str:
        lines = [print_term(self.initial)]
        for k, (desc, term) in enumerate(self.steps, start=1):
            lines.append(f"step {k}: {desc} => {print_term(term)}")
        return "\n".join(lines)


def comm_size(t: Term) -> int:
    """Number of Send and Dist nodes in t."""
    return sum(1 for _, s in subterms(t) if isinstance(s, (Send, Dist)))


def _lca_is_par(root: Term, a: Path, b: Path) -> bool:
    n = 0
    while n < len(a) and n < len(b) and a[n] == b[n]:
        n += 1
    return isinstance(subterm_at(root, a[:n]), Par)


def find_redexes(t: Term) -> list[Redex]:
    """All redexes of t in leftmost-outermost activator order."""
    out: list[Redex] = []
    for path, node in subterms(t):
        match node:
            case App(Send(x, u), _):
                if is_free_in(x, u):
                    out.append(Redex("beta", path))
                else:
                    for occ in occurrences(t, x):
                        if _lca_is_par(t, path, occ):
                            out.append(Redex("comm", path, (occ,)))
            case Dist(x, y, Par(_, _)):
                for ox in occurrences(t, x):
                    if not _lca_is_par(t, path, ox):
                        continue
                    for oy in occurrences(t, y):
                        if _lca_is_par(t, path, oy):
                            out.append(Redex("dist", path, (ox, oy)))
    out.sort(key=lambda r: (r.activator, r.receivers))
    return out


def _check_receiver(root: Term, r: Redex, occ: Path, name: str) -> None:
    got = subterm_at(root, occ)
    if got != Var(name) or not _lca_is_par(root, r.activator, occ):
        raise StaleRedex(f"receiver for {name!r} no longer valid")


def apply_redex(t: Term, r: Redex) -> Term:
    """Fire one redex.  Raises StaleRedex if r does not match t anymore."""
    node = subterm_at(t, r.activator)
    if r.kind == "beta":
        match node:
            case App(Send(x, u), v) if is_free_in(x, u):
                return replace_at(t, r.activator, substitute(u, x, v))
        raise StaleRedex("activator is not a beta redex")
    if r.kind == "comm":
        match node:
            case App(Send(x, u), v) if not is_free_in(x, u):
                (occ,) = r.receivers
                _check_receiver(t, r, occ, x)
                t = replace_at(t, r.activator, u)
                return replace_at(t, occ, v)
        raise StaleRedex("activator is not an applied output")
    if r.kind == "dist":
        match node:
            case Dist(x, y, Par(s, u)):
                ox, oy = r.receivers
                _check_receiver(t, r, ox, x)
                _check_receiver(t, r, oy, y)
                t = replace_at(t, r.activator, UNIT)
                t = replace_at(t, ox, s)
                return replace_at(t, oy, u)
        raise StaleRedex("activator is not a binary output over a parallel")
    raise StaleRedex(f"unknown redex kind {r.kind!r}")


def normalize(t: Term) -> Trace:
    """Reduce t to normal form, always firing the first redex in
    leftmost-outermost order.  Terminates because every step removes one
    Send or Dist node."""
    trace = Trace(t, [])
    while True:
        redexes = find_redexes(t)
        if not redexes:
            return trace
        r = redexes[0]
        desc = r.describe(t)
        t = apply_redex(t, r)
        trace.steps.append((desc, t))


def enumerate_normal_forms(t: Term, max_states: int = 100_000) -> set[Term]:
    """Breadth-first exploration of every redex choice at every state.

    Returns the set of syntactically distinct normal forms reached.
    Raises BudgetExceeded once more than max_states states are visited.
    """
    seen: set[Term] = set()
    normal: set[Term] = set()
    frontier = [t]
    seen.add(t)
    while frontier:
        nxt: list[Term] = []
        for s in frontier:
            redexes = find_redexes(s)
            if not redexes:
                normal.add(s)
                continue
            for r in redexes:
                s2 = apply_redex(s, r)
                if s2 not in seen:
                    seen.add(s2)
                    if len(seen) > max_states:
                        raise BudgetExceeded(len(seen))
                    nxt.append(s2)
        frontier = nxt
    return normal


# ---------------------------------------------------------------------------
# Call-by-value evaluation.  Evaluation contexts:
#     E ::= [] | E u | V E | out2 x y. E | close(E)
# A component only reduces at E-positions, arguments must be values, and a
# transmission needs its receiver variable to sit at an E-position of some
# other top-level component.  This makes applied outputs and bare inputs
# blocking, which is what the synchronous-input encoding relies on.

def is_value(t: Term) -> bool:
    return isinstance(t, (Send, Par))


def _eval_positions(t: Term, prefix: Path = ()) -> Iterator[tuple[Path, Term]]:
    yield prefix, t
    match t:
        case App(f, a):
            yield from _eval_positions(f, prefix + (0,))
            if is_value(f):
                yield from _eval_positions(a, prefix + (1,))
        case Dist(_, _, b):
            yield from _eval_positions(b, prefix + (0,))
        case Close(b):
            yield from _eval_positions(b, prefix + (0,))


def spine_paths(m: int) -> list[Path]:
    """Paths of the m components of a left-folded parallel composition."""
    if m == 1:
        return [()]
    return [(0,) * (m - 1)] + [(0,) * (m - 1 - i) + (1,) for i in range(1, m)]


def cbv_step(components: list[Term]) -> Optional[tuple[list[Term], Redex]]:
    """One call-by-value step over top-level components, scanning left to
    right.  Returns the new component list and the fired redex (with paths
    into the joined term), or None when every component is cbv-stuck."""
    spine = spine_paths(len(components))
    recv_cache: dict[int, list[tuple[Path, str]]] = {}

    def receivers(j: int) -> list[tuple[Path, str]]:
        if j not in recv_cache:
            recv_cache[j] = [(p, n.name) for p, n in _eval_positions(components[j])
                             if isinstance(n, Var)]
        return recv_cache[j]

    for i, comp in enumerate(components):
        for pos, node in _eval_positions(comp):
            match node:
                case App(Send(x, u), v) if is_value(v):
                    if is_free_in(x, u):
                        out = list(components)
                        out[i] = replace_at(comp, pos, substitute(u, x, v))
                        return out, Redex("beta", spine[i] + pos)
                    for j in range(len(components)):
                        if j == i:
                            continue
                        for rpos, rname in receivers(j):
                            if rname == x:
                                out = list(components)
                                out[i] = replace_at(comp, pos, u)
                                out[j] = replace_at(components[j], rpos, v)
                                return out, Redex("comm", spine[i] + pos,
                                                  (spine[j] + rpos,))
    return None


def cbv_trace(components: list[Term]) -> list[tuple[str, list[Term]]]:
    """Run cbv_step to exhaustion, collecting (description, state) pairs."""
    from .terms import join_par
    steps: list[tuple[str, list[Term]]] = []
    while True:
        nxt = cbv_step(components)
        if nxt is None:
            return steps
        desc = nxt[1].describe(join_par(components))
        components = nxt[0]
        steps.append((desc, components))
