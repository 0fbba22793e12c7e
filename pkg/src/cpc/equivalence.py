"""Bounded bisimulation and the characteristic-process gadgets.

The bisimulation game answers a visible challenge ``(ν ñ)p`` instantiated
by ``σ`` with any reply ``(ν ñ)q`` such that ``(p, σ) ◁ (q, ρ)``, then
continues with ``(σP', ρQ')``.  Substitution closure is approximated by
one initial round of name identifications.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .lts import Out, Tau, Transition, label_key, transitions
from .patterns import (
    Bind, Comp, Name, Pattern, Prot, Var, apply_subst, binding_list, compat_reply,
    free_names, fresh, identity, is_communicable, rename_free, show_subst, variable_names,
)
from .process import (
    NIL, Case, Process, barbs, canonical_key, free_names_proc, par, reachable,
    reductions, rename_proc, restrict, show, subst_proc, flatten, expose,
)


# -- specification and tests -------------------------------------------------

@dataclass(frozen=True)
class Specification:
    complementary: Pattern
    free_expect: tuple        # ((binder, name), ...)
    rest_expect: tuple


def spec(N: Iterable[Name], p: Pattern) -> Specification:
    """Complementary pattern plus the expected bindings of its fresh binders."""
    N = set(N)
    F: list = []
    R: list = []

    def go(q: Pattern) -> Pattern:
        match q:
            case Bind(x):
                return Var(x)
            case Var(n):
                x = fresh("x")
                (F if n in N else R).append((x, n))
                return Bind(x)
            case Prot(n):
                return q
            case Comp(l, r):
                return Comp(go(l), go(r))
        raise TypeError(q)

    return Specification(go(p), tuple(F), tuple(R))


def build_check(x: Name, m: Name, y: Name, n: Name, w: Name, f: Name) -> Process:
    """Succeeds (barb on ``w``) iff ``m = n`` agrees with ``x = y`` after instantiation."""
    z = fresh("z")
    left = Case(Comp(Prot(z), Prot(x)), NIL)
    if m == n:
        return restrict([z], par(left, Case(Comp(Prot(z), Prot(y)), Case(Prot(w), NIL))))
    fail = Case(Comp(Prot(f), Bind(fresh("z"))), NIL)
    return par(Case(Prot(w), NIL),
               restrict([z], par(left, Case(Comp(Prot(z), Prot(y)), fail))))


def build_free_test(x: Name, n: Name, w: Name) -> Process:
    m = fresh("m")
    return restrict([m], par(Case(Comp(Prot(m), Prot(n)), Case(Prot(w), NIL)),
                             Case(Comp(Prot(m), Prot(x)), NIL)))


def build_rest_test(N: Iterable[Name], x: Name, w: Name, f: Name) -> Process:
    m, z = fresh("m"), fresh("z")

    def fail() -> Process:
        return Case(Comp(Prot(f), Bind(fresh("z"))), NIL)

    threads = [
        Case(Comp(Comp(Prot(m), Var(x)), Var(z)), NIL),
        Case(Comp(Comp(Prot(m), Comp(Bind(fresh("y")), Bind(fresh("y")))), Bind(fresh("z"))), fail()),
    ]
    for n in sorted(N):
        threads.append(Case(Comp(Comp(Prot(m), Prot(n)), Bind(fresh("z"))), fail()))
    return par(Case(Prot(w), NIL), restrict([m, z], par(*threads)))


def _chain(names: list, last: Process) -> Process:
    out = last
    for n in reversed(names):
        out = Case(Prot(n), out)
    return out


def build_equality_test(R: Iterable[tuple], x: Name, m: Name, w: Name, f: Name) -> Process:
    R = list(R)
    ws = [fresh("w") for _ in R]
    checks = [build_check(x, m, y, n, wy, f) for (y, n), wy in zip(R, ws)]
    return restrict(ws, par(_chain(ws, Case(Prot(w), NIL)), *checks))


@dataclass(frozen=True)
class Characteristic:
    process: Process
    spec: Specification
    success: Name
    failure: Name
    steps: int                # reductions of the instantiated tests to success


def tests_steps(F, R) -> int:
    """Reductions for the instantiated tests to become successful."""
    k = len(R) + len(F) + len(R)         # success chain
    k += len(F)                           # free tests
    for _, m in R:                        # equality tests
        k += len(R) + sum(1 for _, n in R if n == m)
    return k


def char_proc(N: Iterable[Name], p: Pattern, w: Optional[Name] = None,
              f: Optional[Name] = None) -> Characteristic:
    """``p' -> tests`` for ``spec(N, p) = (p', F, R)``."""
    N = set(N)
    w = w or fresh("w")
    f = f or fresh("f")
    sp = spec(N, p)
    F, R = list(sp.free_expect), list(sp.rest_expect)
    wx = [fresh("wx") for _ in R]
    wy = [fresh("wy") for _ in F + R]
    final = Case(Comp(Prot(w), _tuple([x for x, _ in R])) if R else Prot(w), NIL)
    parts = [_chain(wx + wy, final)]
    parts += [build_equality_test(R, x, n, wxi, f) for (x, n), wxi in zip(R, wx)]
    parts += [build_free_test(y, n, wyi) for (y, n), wyi in zip(F, wy)]
    parts += [build_rest_test(N, y, wyi, f) for (y, _), wyi in zip(R, wy[len(F):])]
    tests = restrict(wx + wy, par(*parts))
    return Characteristic(Case(sp.complementary, tests), sp, w, f, tests_steps(F, R))


def _tuple(names: list) -> Pattern:
    out: Pattern = Var(names[0])
    for n in names[1:]:
        out = Comp(out, Var(n))
    return out


def reply_context(N: Iterable[Name], p: Pattern, Q: Process) -> tuple[Process, Characteristic]:
    ch = char_proc(N, p)
    return par(ch.process, Q), ch


@dataclass
class Outcome:
    succeeds: bool
    reaches_success: bool
    reaches_failure: bool
    first_success: Optional[int]     # fewest reductions to a successful state
    states: int


def _has_barb(P: Process, name: Name, protected: bool) -> bool:
    res, threads = flatten(P)
    for t in threads:
        for e in expose(t):
            hidden = set(res) | set(e.res)
            p = e.case.pattern
            if name in hidden:
                continue
            from .patterns import protected_names
            if protected_names(p) & hidden:
                continue
            names = protected_names(p) if protected else free_names(p)
            if name in names:
                return True
    return False


def run_gadget(P: Process, w: Name, f: Name, limit: int = 200_000) -> Outcome:
    """Explore every reachable state; report success and failure reachability."""
    first = None
    fail = False
    states = 0
    for d, S in reachable(P, limit):
        states += 1
        if _has_barb(S, f, False):
            fail = True
        if first is None and _has_barb(S, w, True):
            first = d
        if states > limit:
            raise RuntimeError("state space too large")
    hit = first is not None
    return Outcome(hit and not fail, hit, fail, first if not fail else None, states)


# -- bounded bisimulation ----------------------------------------------------

@dataclass(frozen=True)
class BisimConfig:
    depth: int = 3
    name_pool: Optional[frozenset] = None
    instantiation_depth: int = 1
    fresh_names: int = 2
    pre_round: bool = True


@dataclass
class Reply:
    label: object
    rho: dict
    target: Process
    failure: Optional["Witness"]


@dataclass
class Witness:
    """A challenge that no reply can match to the remaining depth."""
    challenger: str                  # "left" or "right"
    left: Process
    right: Process
    depth: int
    label: object
    sigma: Optional[dict]
    target: Process                  # challenger's derivative (instantiated)
    replies: list = field(default_factory=list)
    pre_subst: Optional[dict] = None

    @property
    def verdict(self) -> str:
        if not self.replies:
            return "no proper reply exists"
        return f"all {len(self.replies)} proper replies are distinguished later"

    @property
    def trace(self) -> list:
        """Main path: (challenger, label, σ) steps down the first reply."""
        out = [(self.challenger, self.label, self.sigma)]
        if self.replies and self.replies[0].failure:
            out += self.replies[0].failure.trace
        return out

    def lines(self, indent: int = 0) -> list[str]:
        pad = "  " * indent
        out = []
        if self.pre_subst:
            out.append(pad + "instantiate free names " + show_subst(self.pre_subst))
        lab, sig = _readable(self.label, self.sigma)
        sig = f" with {sig}" if self.sigma else ""
        out.append(f"{pad}{self.challenger} challenges {lab}{sig} -> {show(self.target)}")
        if not self.replies:
            out.append(pad + "  no proper reply")
        for r in self.replies:
            lab, rho = _readable(r.label, r.rho)
            rho = f" with {rho}" if r.rho else ""
            out.append(f"{pad}  reply {lab}{rho} -> {show(r.target)}")
            out += r.failure.lines(indent + 2)
        return out

    def show(self) -> str:
        return "\n".join(self.lines())


def _readable(label, sigma) -> tuple[str, str]:
    from .explore import _rename, readable_names
    from .patterns import pattern_names
    if isinstance(label, Tau):
        return label.show(), ""
    names = pattern_names(label.pattern) | set(label.extruded) | set(sigma or ())
    ren = readable_names(names, {n for n in names if "^" not in n})
    lab = Out(tuple(ren.get(n, n) for n in label.extruded), _rename(label.pattern, ren))
    sig = {ren.get(x, x): p for x, p in (sigma or {}).items()}
    return lab.show(), show_subst(sig)


class BisimChecker:
    def __init__(self, cfg: BisimConfig, pool: frozenset):
        self.cfg = cfg
        self.pool = pool
        self.memo: dict = {}
        self._inst_cache: dict = {}

    def instantiations(self, binders: list, names: frozenset) -> list[dict]:
        key = (tuple(binders), names)
        if key not in self._inst_cache:
            pats = _communicable_patterns(sorted(names), self.cfg.instantiation_depth)
            self._inst_cache[key] = [dict(zip(binders, combo))
                                     for combo in itertools.product(pats, repeat=len(binders))]
        return self._inst_cache[key]

    def check(self, P: Process, Q: Process, depth: int) -> Optional[Witness]:
        if depth <= 0:
            return None
        key = (canonical_key(P), canonical_key(Q), depth)
        if key in self.memo:
            return self.memo[key]
        self.memo[key] = None        # provisional; depth strictly decreases
        w = self._challenge(P, Q, depth, "left") or self._challenge(Q, P, depth, "right")
        self.memo[key] = w
        return w

    def _pair(self, side: str, challenger: Process, responder: Process):
        return (challenger, responder) if side == "left" else (responder, challenger)

    def _recurse(self, side, c_next, r_next, depth):
        left, right = self._pair(side, c_next, r_next)
        return self.check(left, right, depth - 1)

    def _challenge(self, P: Process, Q: Process, depth: int, side: str) -> Optional[Witness]:
        avoid = free_names_proc(P) | free_names_proc(Q) | self.pool
        tp = transitions(P, avoid)
        tq = transitions(Q, avoid)
        left, right = self._pair(side, P, Q)
        for t in tp:
            if isinstance(t.label, Tau):
                replies = []
                for u in tq:
                    if isinstance(u.label, Tau):
                        sub = self._recurse(side, t.target, u.target, depth)
                        if sub is None:
                            break
                        replies.append(Reply(u.label, {}, u.target, sub))
                else:
                    return Witness(side, left, right, depth, t.label, None, t.target, replies)
                continue
            ext = set(t.label.extruded)
            names = (self.pool | free_names_proc(P) | free_names_proc(Q)) - ext
            binders = binding_list(t.label.pattern)
            for sigma in self.instantiations(binders, frozenset(names)):
                p_target = subst_proc(sigma, t.target)
                replies = []
                answered = False
                for u, rho, q_target in self._replies(t.label, sigma, tq):
                    sub = self._recurse(side, p_target, q_target, depth)
                    if sub is None:
                        answered = True
                        break
                    replies.append(Reply(u.label, rho, q_target, sub))
                if not answered:
                    return Witness(side, left, right, depth, t.label, sigma, p_target, replies)
        return None

    def _replies(self, label: Out, sigma: dict, tq: list):
        """Proper replies: ``(transition, ρ, ρQ')`` with extruded names aligned."""
        k = len(label.extruded)
        for u in tq:
            if isinstance(u.label, Tau) or len(u.label.extruded) != k:
                continue
            for perm in itertools.permutations(label.extruded):
                zeta = dict(zip(u.label.extruded, perm))
                q = rename_free(u.label.pattern, zeta)
                rho = compat_reply(label.pattern, sigma, q)
                if rho is None:
                    continue
                target = subst_proc(rho, rename_proc(u.target, zeta))
                yield u, rho, target


def _communicable_patterns(names: list, depth: int) -> list[Pattern]:
    level = [Var(n) for n in names]
    out = list(level)
    for _ in range(depth):
        level = [Comp(a, b) for a in out for b in out]
        seen = set(out)
        out += [p for p in level if p not in seen]
    return out


def _fresh_pool(avoid: set, k: int) -> list[Name]:
    out = []
    for i in itertools.count():
        cand = "k" if i == 0 else f"k{i}"
        if cand not in avoid:
            out.append(cand)
        if len(out) == k:
            return out


def default_pool(P: Process, Q: Process, extra: int = 2) -> frozenset:
    fn = free_names_proc(P) | free_names_proc(Q)
    return frozenset(fn) | frozenset(_fresh_pool(set(fn), extra))


def _identifications(names: list) -> Iterable[dict]:
    """Every way of merging free names (set partitions, each block sent to its least name)."""
    def partitions(items):
        if not items:
            yield []
            return
        first, rest = items[0], items[1:]
        for part in partitions(rest):
            yield [[first]] + part
            for i in range(len(part)):
                yield part[:i] + [[first] + part[i]] + part[i + 1:]

    for part in partitions(sorted(names)):
        s = {}
        for block in part:
            rep = min(block)
            for n in block:
                if n != rep:
                    s[n] = Var(rep)
        yield s


@dataclass
class BisimResult:
    bisimilar: bool
    depth: int
    pool: frozenset
    witness: Optional[Witness] = None
    pairs_checked: int = 0


def bounded_bisim(P: Process, Q: Process, cfg: BisimConfig = BisimConfig()) -> BisimResult:
    """Play the bisimulation game to ``cfg.depth`` rounds."""
    pool = frozenset(cfg.name_pool) if cfg.name_pool is not None else default_pool(P, Q, cfg.fresh_names)
    checker = BisimChecker(cfg, pool)
    fn = sorted(free_names_proc(P) | free_names_proc(Q))
    substs = list(_identifications(fn)) if cfg.pre_round else [{}]
    for theta in substs:
        w = checker.check(subst_proc(theta, P), subst_proc(theta, Q), cfg.depth)
        if w is not None:
            w.pre_subst = theta or None
            return BisimResult(False, cfg.depth, pool, w, len(checker.memo))
    return BisimResult(True, cfg.depth, pool, None, len(checker.memo))


def replay(w: Witness, cfg: BisimConfig = BisimConfig(), pool: Optional[frozenset] = None) -> bool:
    """Re-check a witness from scratch: the challenge exists and every proper reply fails."""
    pool = pool if pool is not None else default_pool(w.left, w.right, cfg.fresh_names)
    checker = BisimChecker(cfg, pool)
    return _replay(checker, w)


def _replay(checker: BisimChecker, w: Witness) -> bool:
    P, Q = (w.left, w.right) if w.challenger == "left" else (w.right, w.left)
    avoid = free_names_proc(P) | free_names_proc(Q) | checker.pool
    tp = transitions(P, avoid)
    tq = transitions(Q, avoid)
    match = [t for t in tp if label_key(t.label) == label_key(w.label)
             and canonical_key(subst_proc(w.sigma or {}, t.target)) == canonical_key(w.target)]
    if not match:
        return False
    if isinstance(w.label, Tau):
        proper = [(u, {}, u.target) for u in tq if isinstance(u.label, Tau)]
    else:
        proper = list(checker._replies(w.label, w.sigma, tq))
    recorded = {canonical_key(r.target) for r in w.replies}
    if {canonical_key(t) for _, _, t in proper} != recorded:
        return False
    for r in w.replies:
        sub = r.failure
        if sub is None or sub.depth != w.depth - 1:
            return False
        want = (w.target, r.target) if w.challenger == "left" else (r.target, w.target)
        if (canonical_key(sub.left), canonical_key(sub.right)) != tuple(map(canonical_key, want)):
            return False
        if not _replay(checker, sub):
            return False
    return True
