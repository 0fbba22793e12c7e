"""Seeded random generators for patterns and processes."""
from __future__ import annotations

import random

from cpc.patterns import Bind, Comp, Prot, Var, atoms, binding_list, free_names, fresh, is_well_formed
from cpc.process import NIL, OK, Case, Par, Rep, Res

NAMES = ("a", "b", "c")


def pattern(rng: random.Random, depth: int = 4, names=NAMES, binders=("x", "y", "z", "u", "v", "w")):
    """A well-formed pattern: binders are drawn without repetition."""
    pool = list(binders)
    rng.shuffle(pool)

    def go(d):
        if d > 0 and rng.random() < 0.45:
            return Comp(go(d - 1), go(d - 1))
        r = rng.random()
        if r < 0.3 and pool:
            return Bind(pool.pop())
        if r < 0.65:
            return Var(rng.choice(names))
        return Prot(rng.choice(names))

    while True:
        p = go(depth)
        if is_well_formed(p):
            return p


def communicable(rng: random.Random, depth: int = 2, names=NAMES):
    if depth > 0 and rng.random() < 0.35:
        return Comp(communicable(rng, depth - 1, names), communicable(rng, depth - 1, names))
    return Var(rng.choice(names))


def process(rng: random.Random, size: int = 6, names=NAMES):
    """A random process with at most ``size`` constructors."""
    def go(budget, scope):
        if budget <= 1:
            return rng.choice([NIL, OK, Case(pattern(rng, 1, scope), NIL)])
        r = rng.random()
        if r < 0.35:
            p = pattern(rng, 2, scope)
            inner = tuple(scope) + tuple(binding_list(p))
            return Case(p, go(budget - 1, inner))
        if r < 0.65:
            k = rng.randint(1, budget - 2) if budget > 2 else 1
            return Par(go(k, scope), go(max(1, budget - 1 - k), scope))
        if r < 0.8:
            return Rep(go(budget - 1, scope))
        n = rng.choice(("n", "m"))
        return Res(n, go(budget - 1, tuple(scope) + (n,)))

    return go(size, tuple(names))


def generalize(rng: random.Random, p):
    """A pattern ``q`` with ``(p, σ) ◁ (q, ρ)`` for every σ: widen name-free parts, unprotect names."""
    if not free_names(p) and rng.random() < 0.4:
        return Bind(fresh("g"))
    match p:
        case Comp(l, r):
            return Comp(generalize(rng, l), generalize(rng, r))
        case Prot(n) if rng.random() < 0.5:
            return Var(n)
    return p


def match_for(rng: random.Random, p, names=NAMES, depth: int = 1) -> dict:
    """A random σ over ``bn(p)`` with communicable values."""
    return {x: communicable(rng, depth, names) for x in binding_list(p)}


def reply_pattern(rng: random.Random, free, restricted, depth: int = 2, max_restricted: int = 2):
    """A pattern for a reply-context trial: protected names only from ``free``.

    At most ``max_restricted`` occurrences of restricted names keep the
    number of equality checks (quadratic in them) small enough to explore.
    """
    pool = list("xyzuvw")
    rng.shuffle(pool)

    def go(d):
        if d > 0 and rng.random() < 0.4:
            return Comp(go(d - 1), go(d - 1))
        r = rng.random()
        if r < 0.25 and pool:
            return Bind(pool.pop())
        if r < 0.5 and restricted:
            return Var(rng.choice(restricted))
        if r < 0.8:
            return Var(rng.choice(free))
        return Prot(rng.choice(free))

    while True:
        p = go(depth)
        hidden = sum(1 for a in atoms(p) if isinstance(a, Var) and a.name in restricted)
        if is_well_formed(p) and hidden <= max_restricted:
            return p


def interacting_process(rng: random.Random, size: int = 6, names=("a", "b")):
    """Like :func:`process` but over two names with shallow patterns, so most terms can reduce."""
    made: list = []

    def partner(p, scope):
        match p:
            case Bind(_):
                return Var(rng.choice(scope))
            case Var(n):
                if n not in scope:
                    return Bind(fresh("v"))
                return rng.choice([Var(n), Var(n), Prot(n), Bind(fresh("v"))])
            case Prot(n):
                return Var(n) if n in scope else Bind(fresh("v"))
            case Comp(l, r):
                return Comp(partner(l, scope), partner(r, scope))

    def pat(scope):
        if made and rng.random() < 0.6:
            p = partner(rng.choice(made), scope)
        else:
            p = pattern(rng, rng.choice((0, 1, 1)), scope)
        made.append(p)
        return p

    def go(budget, scope):
        if budget <= 1:
            return OK if rng.random() < 0.15 else Case(pat(scope), NIL)
        r = rng.random()
        if r < 0.25:
            p = pat(scope)
            return Case(p, go(budget - 1, tuple(scope) + tuple(binding_list(p))))
        if r < 0.8:
            k = rng.randint(1, budget - 2) if budget > 2 else 1
            return Par(go(k, scope), go(max(1, budget - 1 - k), scope))
        if r < 0.87:
            return Rep(go(budget - 1, scope))
        n = rng.choice(("n", "m"))
        return Res(n, go(budget - 1, tuple(scope) + (n,)))

    return go(size, tuple(names))
