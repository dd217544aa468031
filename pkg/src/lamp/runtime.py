"""Concurrent execution of a typed program over one-shot channels.

Each top-level parallel component runs as a worker.  A worker repeatedly:

1. fires a redex local to its own term (beta steps and communications whose
   sender and receiver both live inside the component);
2. otherwise transmits on an applied output or binary output whose receiver
   variable lives in another component, by filling that channel's cell;
3. otherwise consumes a filled cell for any channel occurring free in its
   term, substituting the delivered value.

Linearity makes every channel single use, so a cell is filled exactly once
and consumed exactly once; any second fill or consume aborts the run.  The
scheduler is a seeded simulation: worker order is reshuffled every round,
and any interleaving must produce the same final component multiset as the
sequential normalizer, which the test suite checks across many seeds.
Workers transmit asynchronously, exactly like the term-level rules: a
strictly blocking discipline could not run programs whose messages are
inert applications such as a pending function call.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from typing import Optional

from .reduction import _lca_is_par, apply_redex, find_redexes
from .terms import (
    App, Dist, Par, Send, Sequent, Term, UNIT, flatten_par, occurrences,
    replace_at, substitute, subterms,
)


class ChannelProtocolError(Exception):
    pass


@dataclass
class ChannelCell:
    name: str
    state: str = "empty"  # empty -> filled -> consumed
    value: Optional[Term] = None

    def fill(self, value: Term) -> None:
        if self.state != "empty":
            raise ChannelProtocolError(f"channel {self.name!r} filled twice")
        self.state = "filled"
        self.value = value

    def consume(self) -> Term:
        if self.state != "filled":
            raise ChannelProtocolError(
                f"channel {self.name!r} consumed while {self.state}")
        self.state = "consumed"
        value = self.value
        self.value = None
        return value


@dataclass
class DeadlockReport(Exception):
    blocked_workers: list[int]
    pending_channels: list[str]
    timed_out: bool = False

    def __str__(self) -> str:
        how = "timed out" if self.timed_out else "stuck"
        return (f"{how}: workers {self.blocked_workers} blocked, "
                f"channels {self.pending_channels} undelivered")


@dataclass
class _Worker:
    index: int
    term: Term

    def local_step(self) -> bool:
        redexes = find_redexes(self.term)
        if redexes:
            self.term = apply_redex(self.term, redexes[0])
            return True
        return False

    def send_step(self, cells: dict[str, ChannelCell]) -> bool:
        for path, node in subterms(self.term):
            match node:
                case App(Send(x, u), v):
                    if occurrences(self.term, x):
                        continue  # receiver is local; handled as a redex
                    cells.setdefault(x, ChannelCell(x)).fill(v)
                    self.term = replace_at(self.term, path, u)
                    return True
                case Dist(x, y, Par(s, t)):
                    if self._fire_dist(path, x, y, s, t, cells):
                        return True
        return False

    def _fire_dist(self, path, x, y, s, t, cells) -> bool:
        local_x = occurrences(self.term, x)
        local_y = occurrences(self.term, y)
        if local_x and local_y:
            return False  # fully local; find_redexes owns it
        if (local_x and not _lca_is_par(self.term, path, local_x[0])) \
                or (local_y and not _lca_is_par(self.term, path, local_y[0])):
            return False
        term = replace_at(self.term, path, UNIT)
        if local_x:
            term = replace_at(term, local_x[0], s)
        else:
            cells.setdefault(x, ChannelCell(x)).fill(s)
        if local_y:
            term = replace_at(term, local_y[0], t)
        else:
            cells.setdefault(y, ChannelCell(y)).fill(t)
        self.term = term
        return True

    def receive_step(self, cells: dict[str, ChannelCell]) -> bool:
        for name in sorted(cells):
            cell = cells[name]
            if cell.state == "filled" and occurrences(self.term, name):
                self.term = substitute(self.term, name, cell.consume())
                return True
        return False


def run_concurrent(program: Sequent, timeout_ms: int = 5000,
                   seed: int = 0) -> list[Term]:
    """Run the program's top-level components concurrently and return the
    final component list (parallel spines flattened, worker order).

    The caller is expected to have typechecked the program; on typed input
    a DeadlockReport is unreachable and signals a bug."""
    components = flatten_par(program.joined_term())
    workers = [_Worker(i, t) for i, t in enumerate(components)]
    cells: dict[str, ChannelCell] = {}
    rng = random.Random(seed)
    deadline = time.monotonic() + timeout_ms / 1000.0

    while True:
        order = list(range(len(workers)))
        rng.shuffle(order)
        progressed = False
        for i in order:
            w = workers[i]
            if w.local_step() or w.send_step(cells) or w.receive_step(cells):
                progressed = True
            if time.monotonic() > deadline:
                raise DeadlockReport(
                    blocked_workers=[w.index for w in workers
                                     if find_redexes(w.term)],
                    pending_channels=[c.name for c in cells.values()
                                      if c.state == "filled"],
                    timed_out=True)
        if not progressed:
            break

    pending = [c.name for c in cells.values() if c.state == "filled"]
    stuck = [w.index for w in workers if find_redexes(w.term)]
    if pending or stuck:
        raise DeadlockReport(blocked_workers=stuck, pending_channels=pending)
    out: list[Term] = []
    for w in workers:
        out.extend(flatten_par(w.term))
    return out
