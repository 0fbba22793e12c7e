"""Executing processes: exhaustive state graphs, seeded random runs and interactive stepping."""
from __future__ import annotations

import random
import re
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Optional

from .patterns import Bind, Comp, Prot, Var, pattern_names, show as show_pattern, show_subst
from .process import (
    Process, Step, _base, _pick, _surface, canonical, canonical_key, canonicalize, show, steps,
)


@dataclass(frozen=True)
class TraceEvent:
    index: int
    left: object            # the two unified patterns
    right: object
    sigma: dict
    rho: dict
    state: str              # canonical key of the resulting state

    def readable(self) -> tuple:
        """Patterns and substitutions with machine-made names replaced by short ones."""
        names = pattern_names(self.left) | pattern_names(self.right)
        for s in (self.sigma, self.rho):
            names |= set(s) | {n for p in s.values() for n in pattern_names(p)}
        taken = {n for n in names if _surface(n)}
        ren = readable_names(names, taken)
        sub = lambda s: {ren.get(x, x): _rename(p, ren) for x, p in s.items()}
        return _rename(self.left, ren), _rename(self.right, ren), sub(self.sigma), sub(self.rho)

    def describe(self, unicode: bool = False) -> str:
        l, r, s, t = self.readable()
        return (f"{show_pattern(l, unicode)}  <>  {show_pattern(r, unicode)}"
                f"  {show_subst(s, unicode)} {show_subst(t, unicode)}")

    def as_dict(self) -> dict:
        l, r, s, t = self.readable()
        return {
            "step": self.index,
            "left": show_pattern(l),
            "right": show_pattern(r),
            "sigma": show_subst(s),
            "rho": show_subst(t),
            "state": self.state,
        }


def readable_names(names, taken: set) -> dict:
    """Short names for machine-made ones: restricted or extruded become ``n``, binders ``x``."""
    out = {}
    for n in sorted(names):
        if not _surface(n):
            default = "n" if re.match(r"@?\d+r|\^e", n) else "x"
            out[n] = _pick(_base(n, default), taken)
    return out


def _rename(p, ren: dict):
    match p:
        case Bind(x):
            return Bind(ren.get(x, x))
        case Var(x):
            return Var(ren.get(x, x))
        case Prot(x):
            return Prot(ren.get(x, x))
        case Comp(l, r):
            return Comp(_rename(l, ren), _rename(r, ren))
    raise TypeError(p)


def redexes(P: Process) -> list[tuple[Step, Process]]:
    """Distinct one-step interactions (up to the resulting state), in a stable order."""
    seen: dict = {}
    for st in steps(P):
        cf = canonicalize(st.result)
        desc = (show_pattern(st.left), show_pattern(st.right), cf.key)
        seen.setdefault(desc, (st, cf.process()))
    return [seen[k] for k in sorted(seen)]


@dataclass
class Run:
    states: list                     # processes visited, in order
    events: list                     # TraceEvents
    outcome: str                     # "deadlock" or "step-bound"

    @property
    def final(self) -> Process:
        return self.states[-1]


def _event(i: int, st: Step, Q: Process) -> TraceEvent:
    return TraceEvent(i, st.left, st.right, dict(st.sigma), dict(st.rho), canonical_key(Q))


def run_random(P: Process, steps_bound: int, seed: int) -> Run:
    rng = random.Random(seed)
    state = canonical(P)
    states, events = [state], []
    for i in range(steps_bound):
        options = redexes(state)
        if not options:
            return Run(states, events, "deadlock")
        st, state = options[rng.randrange(len(options))]
        states.append(state)
        events.append(_event(i + 1, st, state))
    return Run(states, events, "deadlock" if not redexes(state) else "step-bound")


def run_interactive(P: Process, steps_bound: int, ask: Callable[[list[str]], Optional[int]],
                    emit: Callable[[str], None], unicode: bool = False) -> Run:
    """Offer every redex, apply the chosen one; ``ask`` returns an index or ``None`` to stop."""
    state = canonical(P)
    states, events = [state], []
    for i in range(steps_bound):
        emit(f"state {i}: {show(state, unicode)}")
        options = redexes(state)
        if not options:
            return Run(states, events, "deadlock")
        labels = [_event(i + 1, st, Q).describe(unicode) for st, Q in options]
        choice = ask(labels)
        if choice is None:
            return Run(states, events, "stopped")
        st, state = options[choice]
        states.append(state)
        events.append(_event(i + 1, st, state))
    emit(f"state {steps_bound}: {show(state, unicode)}")
    return Run(states, events, "deadlock" if not redexes(state) else "step-bound")


@dataclass
class Graph:
    root: str
    nodes: dict = field(default_factory=dict)       # key -> Process
    depth: dict = field(default_factory=dict)       # key -> distance from root
    edges: list = field(default_factory=list)       # (src, TraceEvent-like dict, dst)
    deadlocks: set = field(default_factory=set)
    frontier: set = field(default_factory=set)      # cut off by the step bound

    @property
    def complete(self) -> bool:
        return not self.frontier

    def successors(self, key: str) -> list[str]:
        return sorted({d for s, _, d in self.edges if s == key})

    def maximal_traces(self, limit: int = 10_000) -> list[list[str]]:
        """Paths from the root to a deadlock or to the step bound (cycles cut at revisits)."""
        succ: dict = {}
        for s, _, d in self.edges:
            succ.setdefault(s, set()).add(d)
        out: list = []

        def go(path):
            if len(out) >= limit:
                return
            k = path[-1]
            nxt = [d for d in sorted(succ.get(k, ())) if d not in path]
            if k in self.deadlocks or k in self.frontier or not nxt:
                out.append(list(path))
                return
            for d in nxt:
                go(path + [d])

        go([self.root])
        return out

    def as_dict(self, unicode: bool = False) -> dict:
        ids = {k: i for i, k in enumerate(sorted(self.nodes, key=lambda k: (self.depth[k], k)))}
        return {
            "root": ids[self.root],
            "complete": self.complete,
            "states": [{"id": ids[k], "depth": self.depth[k], "process": show(self.nodes[k], unicode),
                        "deadlock": k in self.deadlocks, "bound": k in self.frontier}
                       for k in sorted(ids, key=ids.get)],
            "edges": sorted(({"from": ids[s], "to": ids[d], **e} for s, e, d in self.edges),
                            key=lambda e: (e["from"], e["to"], e["left"], e["right"])),
        }


def explore(P: Process, steps_bound: int) -> Graph:
    """Breadth-first reachable-state graph up to ``steps_bound`` reductions."""
    start = canonical(P)
    root = canonical_key(start)
    g = Graph(root, {root: start}, {root: 0})
    queue = deque([root])
    while queue:
        k = queue.popleft()
        options = redexes(g.nodes[k])
        if not options:
            g.deadlocks.add(k)
            continue
        if g.depth[k] == steps_bound:
            g.frontier.add(k)
            continue
        for st, Q in options:
            q = canonical_key(Q)
            e = _event(0, st, Q).as_dict()
            e.pop("step"), e.pop("state")
            g.edges.append((k, e, q))
            if q not in g.nodes:
                g.nodes[q] = Q
                g.depth[q] = g.depth[k] + 1
                queue.append(q)
    return g
