"""Reduction search shared by the Linda and Spi interpreters.

Both calculi reuse the structural constructors of CPC (``Nil``, ``Ok``,
``Par``, ``Rep``, ``Res``) and add their own prefix forms.  A
:class:`Calculus` supplies renaming and the axioms; this module does the
flattening, replication unfolding and closure under context.
"""
from __future__ import annotations

import itertools
from typing import Callable, Iterator, NamedTuple

from .patterns import fresh
from .process import NIL, Nil, Par, Rep, Res, par, restrict


class Calculus(NamedTuple):
    rename: Callable        # (P, {old: new}) -> P, capture-avoiding
    unary: Callable         # thread -> list of replacement processes
    binary: Callable        # (thread, thread) -> list of replacement processes


class Exposure(NamedTuple):
    thread: object
    res: list
    rest: list


def flatten(calc: Calculus, P) -> tuple[list, list]:
    res: list = []
    threads: list = []

    def go(Q):
        match Q:
            case Nil():
                return
            case Par(l, r):
                go(l)
                go(r)
            case Res(n, b):
                m = fresh(n)
                res.append(m)
                go(calc.rename(b, {n: m}))
            case _:
                threads.append(Q)

    go(P)
    return res, threads


def expose(calc: Calculus, T) -> list[Exposure]:
    if isinstance(T, Rep):
        r, ts = flatten(calc, T.body)
        out = []
        for i, t in enumerate(ts):
            for e in expose(calc, t):
                out.append(Exposure(e.thread, r + e.res, ts[:i] + ts[i + 1:] + e.rest + [T]))
        return out
    return [Exposure(T, [], [])]


def _pair(calc, e1, e2, res, others) -> Iterator:
    for outcome in calc.binary(e1.thread, e2.thread) + calc.binary(e2.thread, e1.thread):
        yield restrict(res + e1.res + e2.res, par(*others, *e1.rest, *e2.rest, outcome))


def _internal(calc, T, res, others) -> Iterator:
    if not isinstance(T, Rep):
        return
    r, ts = flatten(calc, T.body)
    base = res + r
    for i, j in itertools.combinations(range(len(ts)), 2):
        rest = [t for k, t in enumerate(ts) if k not in (i, j)] + [T]
        for e1 in expose(calc, ts[i]):
            for e2 in expose(calc, ts[j]):
                yield from _pair(calc, e1, e2, base, others + rest)
    for i, t in enumerate(ts):
        yield from _internal(calc, t, base, others + ts[:i] + ts[i + 1:] + [T])
        for e1 in expose(calc, t):
            for e2 in expose(calc, T):
                yield from _pair(calc, e1, e2, base, others + ts[:i] + ts[i + 1:])


def step_all(calc: Calculus, P) -> Iterator:
    """Every one-step reduct of ``P`` (duplicates included)."""
    res, threads = flatten(calc, P)
    for i, t in enumerate(threads):
        others = threads[:i] + threads[i + 1:]
        for e in expose(calc, t):
            for outcome in calc.unary(e.thread):
                yield restrict(res + e.res, par(*others, *e.rest, outcome))
    for i, j in itertools.combinations(range(len(threads)), 2):
        others = [t for k, t in enumerate(threads) if k not in (i, j)]
        for e1 in expose(calc, threads[i]):
            for e2 in expose(calc, threads[j]):
                yield from _pair(calc, e1, e2, res, others)
    for i, t in enumerate(threads):
        yield from _internal(calc, t, res, threads[:i] + threads[i + 1:])
