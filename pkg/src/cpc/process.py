"""CPC processes: terms, substitution, structural congruence and reduction."""
from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, NamedTuple, Optional

from .patterns import (
    Bind, Comp, Name, Pattern, PatternError, Prot, Subst, Var,
    binding_list, binding_names, check_well_formed, fresh, free_names,
    apply_subst, protected_names, rename_binders, subst_free_names,
    unify_unchecked,
)
from . import patterns as pat


class _Node:
    __slots__ = ()

    def __hash__(self):
        return self._h


@dataclass(frozen=True, slots=True, eq=True)
class Nil(_Node):
    _h: int = field(default=hash("Nil"), init=False, repr=False, compare=False)

    def __hash__(self):
        return self._h


@dataclass(frozen=True, slots=True, eq=True)
class Ok(_Node):
    _h: int = field(default=hash("Ok"), init=False, repr=False, compare=False)

    def __hash__(self):
        return self._h


@dataclass(frozen=True, slots=True, eq=True)
class Case(_Node):
    pattern: Pattern
    body: "Process"
    _h: int = field(default=0, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_h", hash(("Case", self.pattern, self.body)))

    def __hash__(self):
        return self._h


@dataclass(frozen=True, slots=True, eq=True)
class Par(_Node):
    left: "Process"
    right: "Process"
    _h: int = field(default=0, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_h", hash(("Par", self.left, self.right)))

    def __hash__(self):
        return self._h


@dataclass(frozen=True, slots=True, eq=True)
class Rep(_Node):
    body: "Process"
    _h: int = field(default=0, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_h", hash(("Rep", self.body)))

    def __hash__(self):
        return self._h


@dataclass(frozen=True, slots=True, eq=True)
class Res(_Node):
    name: Name
    body: "Process"
    _h: int = field(default=0, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_h", hash(("Res", self.name, self.body)))

    def __hash__(self):
        return self._h


Process = Nil | Ok | Case | Par | Rep | Res

NIL = Nil()
OK = Ok()


def case(p: Pattern, body: Process = NIL) -> Case:
    """Build a case, rejecting ill-formed patterns."""
    check_well_formed(p)
    return Case(p, body)


def par(*ps: Process) -> Process:
    ps = [p for p in ps if not isinstance(p, Nil)]
    if not ps:
        return NIL
    out = ps[0]
    for p in ps[1:]:
        out = Par(out, p)
    return out


def restrict(names: Iterable[Name], body: Process) -> Process:
    for n in reversed(list(names)):
        body = Res(n, body)
    return body


def size(P: Process) -> int:
    match P:
        case Case(_, b) | Rep(b) | Res(_, b):
            return 1 + size(b)
        case Par(l, r):
            return 1 + size(l) + size(r)
    return 1


# -- names -----------------------------------------------------------------

@lru_cache(maxsize=200_000)
def free_names_proc(P: Process) -> frozenset:
    match P:
        case Nil() | Ok():
            return frozenset()
        case Case(p, body):
            return frozenset(free_names(p) | (free_names_proc(body) - binding_names(p)))
        case Par(l, r):
            return free_names_proc(l) | free_names_proc(r)
        case Rep(b):
            return free_names_proc(b)
        case Res(n, b):
            return free_names_proc(b) - {n}
    raise TypeError(P)


def all_names(P: Process) -> set[Name]:
    match P:
        case Nil() | Ok():
            return set()
        case Case(p, body):
            return pat.pattern_names(p) | all_names(body)
        case Par(l, r):
            return all_names(l) | all_names(r)
        case Rep(b):
            return all_names(b)
        case Res(n, b):
            return {n} | all_names(b)
    raise TypeError(P)


# -- substitution ----------------------------------------------------------

def subst_proc(s: Mapping[Name, Pattern], P: Process) -> Process:
    """Capture-avoiding application of ``s`` to the free names of ``P``."""
    if not s:
        return P
    return _subst(dict(s), P)


def rename_proc(P: Process, ren: Mapping[Name, Name]) -> Process:
    """Capture-avoiding renaming of free names."""
    return subst_proc({a: Var(b) for a, b in ren.items() if a != b}, P)


def _subst(s: Subst, P: Process) -> Process:
    fn = free_names_proc(P)
    s = {x: q for x, q in s.items() if x in fn}
    if not s:
        return P
    match P:
        case Par(l, r):
            return Par(_subst(s, l), _subst(s, r))
        case Rep(b):
            return Rep(_subst(s, b))
        case Res(n, b):
            if n in subst_free_names(s):
                m = fresh(n)
                b = _subst({n: Var(m)}, b)
                n = m
            return Res(n, _subst(s, b))
        case Case(p, body):
            images = subst_free_names(s)
            clash = [x for x in binding_list(p) if x in images]
            if clash:
                ren = {x: fresh(x) for x in clash}
                p = rename_binders(p, ren)
                body = _subst({x: Var(y) for x, y in ren.items()}, body)
            inner = {x: q for x, q in s.items() if x not in binding_names(p)}
            return Case(apply_subst(s, p), _subst(inner, body) if inner else body)
    return P


def alpha_rename(P: Process) -> Process:
    """Rename every bound name (restrictions and pattern binders) to a fresh one."""
    match P:
        case Par(l, r):
            return Par(alpha_rename(l), alpha_rename(r))
        case Rep(b):
            return Rep(alpha_rename(b))
        case Res(n, b):
            m = fresh(n)
            return Res(m, alpha_rename(_subst({n: Var(m)}, b)))
        case Case(p, body):
            ren = {x: fresh(x) for x in binding_list(p)}
            body = _subst({x: Var(y) for x, y in ren.items()}, body)
            return Case(rename_binders(p, ren), alpha_rename(body))
    return P


# -- canonical forms -------------------------------------------------------

_PERMUTATION_CAP = 720


@dataclass(frozen=True)
class CanonicalForm:
    """A representative of the structural-congruence class of a process.

    ``restricted`` are the hoisted restriction names, ``threads`` the
    top-level cases, replications and ``ok`` leaves in sorted order, and
    ``key`` a string that identifies the class.
    """
    restricted: tuple
    threads: tuple
    key: str

    def process(self) -> Process:
        return restrict(self.restricted, par(*self.threads))


def _pkey(p: Pattern) -> str:
    match p:
        case Bind(x):
            return "\\" + x
        case Var(x):
            return x
        case Prot(x):
            return "#" + x
        case Comp(l, r):
            return "(" + _pkey(l) + "." + _pkey(r) + ")"
    raise TypeError(p)


def _collect(P: Process, env: dict, res: list, threads: list) -> None:
    match P:
        case Nil():
            return
        case Par(l, r):
            _collect(l, env, res, threads)
            _collect(r, env, res, threads)
        case Res(n, b):
            t = fresh(n)
            res.append(t)
            _collect(b, {**env, n: t}, res, threads)
        case _:
            threads.append((P, env))


def _thread_free(T: Process, env: dict) -> set:
    return {env.get(x, x) for x in free_names_proc(T)}


def _relevant_env(T: Process, env: Mapping) -> tuple:
    fn = free_names_proc(T)
    return tuple(sorted((k, v) for k, v in env.items() if k in fn))


def _canon_thread(T: Process, env: Mapping, level: int) -> tuple[Process, str]:
    return _canon_thread_cached(T, _relevant_env(T, env), level)


@lru_cache(maxsize=100_000)
def _canon_thread_cached(T: Process, env_items: tuple, level: int) -> tuple[Process, str]:
    env = dict(env_items)
    match T:
        case Ok():
            return OK, "ok"
        case Rep(b):
            cb, kb = _canon_proc(b, env, level + 1)
            return Rep(cb), "!(" + kb + ")"
        case Case(p, body):
            bmap = {x: f"@{level}b{i}" for i, x in enumerate(binding_list(p))}
            cp = rename_binders(pat.rename_free(p, env), bmap) if bmap else pat.rename_free(p, env)
            # binder renaming must not be confused by free renaming: binders
            # are never free in a well-formed pattern, so the order is harmless
            cb, kb = _canon_proc(body, {**env, **bmap}, level + 1)
            return Case(cp, cb), "(" + _pkey(cp) + "->" + kb + ")"
    raise TypeError(T)


def _canon_proc(P: Process, env: Mapping, level: int) -> tuple[Process, str]:
    cf = _canon_form(P, env, level)
    return cf.process(), cf.key


def _remap(e: dict, m: Mapping) -> dict:
    return {k: m.get(v, v) for k, v in e.items()}


def _canon_form(P: Process, env: Mapping, level: int) -> CanonicalForm:
    res: list = []
    collected: list = []
    _collect(P, dict(env), res, collected)
    threads = []
    for T, e in collected:
        fn = free_names_proc(T)
        threads.append((T, {k: v for k, v in e.items() if k in fn}))
    frees = [_thread_free(T, e) for T, e in threads]
    used = set().union(*frees) if frees else set()
    temps = [t for t in res if t in used]
    if not temps:
        done = sorted((_canon_thread(T, e, level) for T, e in threads), key=lambda x: x[1])
        key = "|".join(k for _, k in done) or "0"
        return CanonicalForm((), tuple(t for t, _ in done), key)

    # restricted names that never meet are ordered independently, and
    # isomorphic components are then ordered by their keys
    parent = {t: t for t in temps}

    def find(t):
        while parent[t] != t:
            parent[t] = parent[parent[t]]
            t = parent[t]
        return t

    for f in frees:
        ts = [t for t in f if t in parent]
        for t in ts[1:]:
            parent[find(t)] = find(ts[0])
    comps: dict = {}
    for t in temps:
        comps.setdefault(find(t), ([], []))[1].append(t)
    for i, f in enumerate(frees):
        ts = [t for t in f if t in parent]
        if ts:
            comps[find(ts[0])][0].append(i)
    blocks = sorted(_order_component([threads[i] for i in idx], [frees[i] for i in idx], ts, level)
                    for idx, ts in comps.values())
    order = [t for _, ts in blocks for t in ts]
    names = [f"@{level}r{i}" for i in range(len(order))]
    m = dict(zip(order, names))
    done = sorted((_canon_thread(T, _remap(e, m), level) for T, e in threads), key=lambda x: x[1])
    key = "new " + ",".join(names) + ";" + "|".join(k for _, k in done)
    return CanonicalForm(tuple(names), tuple(t for t, _ in done), key)


def _order_component(threads: list, frees: list, temps: list, level: int) -> tuple[tuple, list]:
    """The least key of a connected component and the name order achieving it.

    Names are coloured by the shapes of the threads they occur in and the
    colouring is refined to a fixpoint; remaining ties are broken by
    individualizing each candidate in turn (capped at ``_PERMUTATION_CAP``
    leaves, after which the first leaf is used).
    """
    occurs = {t: [(T, e) for (T, e), f in zip(threads, frees) if t in f] for t in temps}
    names = [f"@{level}r{i}" for i in range(len(temps))]

    def rank(labels: dict) -> dict:
        ranks = {v: i for i, v in enumerate(sorted(set(labels.values())))}
        return {t: ranks[labels[t]] for t in temps}

    def refine(colour: dict) -> dict:
        n = len(set(colour.values()))
        while True:
            shown = {o: f"?{colour[o]}" for o in temps}
            labels = {}
            for t in temps:
                m = {**shown, t: "!"}
                labels[t] = (colour[t], tuple(sorted(
                    _canon_thread(T, _remap(e, m), level)[1] for T, e in occurs[t])))
            colour = rank(labels)
            k = len(set(colour.values()))
            if k == n:
                return colour
            n = k

    best = None
    leaves = 0

    def search(colour: dict) -> None:
        nonlocal best, leaves
        if leaves >= _PERMUTATION_CAP and best is not None:
            return
        cells: dict = {}
        for t in temps:
            cells.setdefault(colour[t], []).append(t)
        tied = [c for _, c in sorted(cells.items()) if len(c) > 1]
        if not tied:
            leaves += 1
            order = sorted(temps, key=colour.get)
            m = dict(zip(order, names))
            keys = tuple(sorted(_canon_thread(T, _remap(e, m), level)[1] for T, e in threads))
            if best is None or keys < best[0]:
                best = (keys, order)
            return
        for t in tied[0]:
            split = {o: (colour[o], 0 if o == t else 1) for o in temps}
            search(refine(rank(split)))

    search(refine({t: 0 for t in temps}))
    return best


@lru_cache(maxsize=100_000)
def canonicalize(P: Process) -> CanonicalForm:
    """Canonical form modulo the structural axioms except replication unfolding."""
    return _canon_form(P, {}, 0)


def canonical_key(P: Process) -> str:
    return canonicalize(P).key


def canonical(P: Process) -> Process:
    return canonicalize(P).process()


def struct_eq(P: Process, Q: Process) -> bool:
    return canonicalize(P).key == canonicalize(Q).key


# -- flattening and exposure -----------------------------------------------

def flatten(P: Process) -> tuple[list, list]:
    """``P ≡ (ν res)(t1 | ... | tk)`` with fresh restricted names.

    Threads are cases, replications and ``ok`` leaves.
    """
    res: list = []
    threads: list = []
    _flatten(P, res, threads)
    return res, threads


def _flatten(P: Process, res: list, threads: list) -> None:
    match P:
        case Nil():
            return
        case Par(l, r):
            _flatten(l, res, threads)
            _flatten(r, res, threads)
        case Res(n, b):
            m = fresh(n)
            res.append(m)
            _flatten(_subst({n: Var(m)}, b), res, threads)
        case _:
            threads.append(P)


class Exposure(NamedTuple):
    """A thread seen as ``(ν res)(case | rest)``."""
    case: Case
    res: list
    rest: list


def expose(T: Process) -> list[Exposure]:
    """Every case reachable in ``T`` by unfolding replication once per level."""
    match T:
        case Case():
            return [Exposure(T, [], [])]
        case Rep(b):
            r, ts = flatten(b)
            out = []
            for i, t in enumerate(ts):
                others = ts[:i] + ts[i + 1:]
                for e in expose(t):
                    out.append(Exposure(e.case, r + e.res, others + e.rest + [T]))
            return out
    return []


class Step(NamedTuple):
    """One interaction: the two cases, their unifiers and the reduct."""
    left: Pattern
    right: Pattern
    sigma: Subst
    rho: Subst
    result: Process


def _fire(e1: Exposure, e2: Exposure, res: list, others: list) -> Optional[Step]:
    u = unify_unchecked(e1.case.pattern, e2.case.pattern)
    if u is None:
        return None
    sigma, rho = u
    body = par(*others, *e1.rest, *e2.rest,
               subst_proc(sigma, e1.case.body), subst_proc(rho, e2.case.body))
    return Step(e1.case.pattern, e2.case.pattern, sigma, rho,
                restrict(res + e1.res + e2.res, body))


def _internal_steps(T: Process, res: list, others: list) -> Iterator[Step]:
    """Interactions that happen inside a single replicated thread."""
    if not isinstance(T, Rep):
        return
    r, ts = flatten(T.body)
    base = res + r
    for i, j in itertools.combinations(range(len(ts)), 2):
        rest = [t for k, t in enumerate(ts) if k not in (i, j)] + [T]
        for e1 in expose(ts[i]):
            for e2 in expose(ts[j]):
                st = _fire(e1, e2, base, others + rest)
                if st:
                    yield st
    for i, t in enumerate(ts):
        rest = ts[:i] + ts[i + 1:] + [T]
        yield from _internal_steps(t, base, others + rest)
        for e1 in expose(t):
            for e2 in expose(T):
                # second copy: T itself stays in e2.rest
                st = _fire(e1, e2, base, others + ts[:i] + ts[i + 1:])
                if st:
                    yield st


def steps(P: Process) -> Iterator[Step]:
    """Every one-step interaction of ``P`` (not deduplicated)."""
    res, threads = flatten(P)
    for i, j in itertools.combinations(range(len(threads)), 2):
        others = [t for k, t in enumerate(threads) if k not in (i, j)]
        for e1 in expose(threads[i]):
            for e2 in expose(threads[j]):
                st = _fire(e1, e2, res, others)
                if st:
                    yield st
    for i, t in enumerate(threads):
        yield from _internal_steps(t, res, threads[:i] + threads[i + 1:])


def reductions(P: Process) -> list[Process]:
    """One-step reducts of ``P`` up to structural congruence, in canonical form."""
    seen = {}
    for st in steps(P):
        cf = canonicalize(st.result)
        seen.setdefault(cf.key, cf)
    return [seen[k].process() for k in sorted(seen)]


# -- observation -----------------------------------------------------------

def barbs(P: Process) -> set[frozenset]:
    """Name sets ``m`` with ``P ↓ m``."""
    res, threads = flatten(P)
    out = set()
    for t in threads:
        for e in expose(t):
            hidden = set(res) | set(e.res)
            p = e.case.pattern
            if protected_names(p) & hidden:
                continue
            out.add(frozenset(free_names(p) - hidden))
    return out


def has_success(P: Process) -> bool:
    """``P ≡ P' | ok``."""
    _, threads = flatten(P)
    return any(_thread_has_ok(t) for t in threads)


def _thread_has_ok(T: Process) -> bool:
    if isinstance(T, Ok):
        return True
    if isinstance(T, Rep):
        return any(_thread_has_ok(t) for t in flatten(T.body)[1])
    return False


def reachable(P: Process, depth: int) -> Iterator[tuple[int, Process]]:
    """Breadth-first states reachable in at most ``depth`` steps, deduplicated."""
    start = canonical(P)
    seen = {canonical_key(start)}
    frontier = deque([(0, start)])
    while frontier:
        d, Q = frontier.popleft()
        yield d, Q
        if d == depth:
            continue
        for R in reductions(Q):
            k = canonical_key(R)
            if k not in seen:
                seen.add(k)
                frontier.append((d + 1, R))


def succeeds(P: Process, depth: int) -> bool:
    """Some sequence of at most ``depth`` reductions reaches ``P' | ok``."""
    return any(has_success(Q) for _, Q in reachable(P, depth))


def reaches_barb(P: Process, name: Name, depth: Optional[int] = None) -> bool:
    """Some reachable state has a barb mentioning ``name``."""
    bound = depth if depth is not None else 10 ** 6
    return any(any(name in b for b in barbs(Q)) for _, Q in reachable(P, bound))


# -- dead code -------------------------------------------------------------

def prune_dead(P: Process) -> Process:
    """Drop restricted groups of cases that can never interact.

    A group is every thread mentioning a restricted name ``n``; it is dead
    when all of them are cases with ``n`` protected in the pattern and no
    two of them unify.
    """
    res, threads = flatten(P)
    changed = True
    while changed:
        changed = False
        for n in list(res):
            group = [t for t in threads if n in free_names_proc(t)]
            if not group:
                res.remove(n)
                changed = True
                continue
            if not all(isinstance(t, Case) and n in protected_names(t.pattern) for t in group):
                continue
            if any(unify_unchecked(a.pattern, b.pattern) is not None
                   for a, b in itertools.combinations(group, 2)):
                continue
            threads = [t for t in threads if t not in group]
            res.remove(n)
            changed = True
    return canonical(restrict(res, par(*threads)))


# -- printing --------------------------------------------------------------

def _surface(name: Name) -> bool:
    return not any(c in name for c in "%@^?!")


def show(P: Process, unicode: bool = False, readable: bool = True) -> str:
    """Surface syntax.  With ``readable``, machine-made bound names get short names."""
    taken = set(all_names(P)) if readable else set()
    return _show(P, {}, taken, unicode, readable)


def _pick(base: str, taken: set) -> str:
    if base not in taken:
        taken.add(base)
        return base
    for i in itertools.count(1):
        cand = f"{base}{i}"
        if cand not in taken:
            taken.add(cand)
            return cand


def _base(name: Name, default: str) -> str:
    b = name.split("%", 1)[0]
    if b and _surface(b) and b[0].isalpha():
        return b
    return default


def _show(P, env, taken, uni, readable, ctx="top") -> str:
    match P:
        case Nil():
            return "0"
        case Ok():
            return "ok"
        case Par(l, r):
            return _show(l, env, taken, uni, readable, "par") + " | " + _show(r, env, taken, uni, readable, "par")
        case Rep(b):
            return "!" + _wrap(_show(b, env, taken, uni, readable, "unary"), b)
        case Res(n, b):
            if readable and not _surface(n):
                m = _pick(_base(n, "n"), taken)
                env = {**env, n: m}
            else:
                m = n
            head = f"(ν{m})" if uni else f"(new {m}) "
            return head + _wrap(_show(b, env, taken, uni, readable, "unary"), b)
        case Case(p, body):
            benv = dict(env)
            if readable:
                for x in binding_list(p):
                    if not _surface(x):
                        benv[x] = _pick(_base(x, "x"), taken)
                    else:
                        benv.pop(x, None)
            q = rename_binders(pat.rename_free(p, env), {x: benv.get(x, x) for x in binding_list(p)})
            arrow = " → " if uni else " -> "
            b = _show(body, benv, taken, uni, readable, "unary")
            if isinstance(body, Nil):
                return pat.show(q, uni)
            return pat.show(q, uni) + arrow + (f"({b})" if isinstance(body, Par) else b)
    raise TypeError(P)


def _wrap(s: str, P: Process) -> str:
    if isinstance(P, (Par, Case)):
        return f"({s})"
    return s
