"""Bundled example programs: the share-trading solutions and the equational examples.

Continuations are instantiated as inert tagged leaves: ``B(x)`` is
``B . x -> ok``, ``S(y)`` is ``S . y -> ok`` and the promiscuous
continuation ``P(z1, z2)`` is ``stolen . z1 . z2 -> ok``.
"""
from __future__ import annotations

from .process import Process
from .syntax import parse_process

BUYER_1 = r"s . \m -> m . b . \x -> B . x -> ok"
SELLER_1 = r"(new n) (s . n -> n . \y . c -> S . y -> ok)"

BUYER_2 = r"s . iB . \j -> nB . j . \m -> m . b . \x -> B . x -> ok"
SELLER_2 = r"s . \j . iS -> nS . j . \m -> m . \y . c -> S . y -> ok"
REGISTRAR_2 = r"(new n) (nB . iS . n | nS . iB . n)"

BUYER_3 = r"s . iB . \j -> #nB . j . \m -> #m . b . \x -> B . x -> ok"
SELLER_3 = r"s . \j . iS -> #nS . j . \m -> #m . \y . c -> S . y -> ok"
REGISTRAR_3 = r"(new n) (#nB . #iS . n | #nS . #iB . n)"

PROMISCUOUS = r"\z1 . \z2 . a -> stolen . z1 . z2 -> ok"

TRADE = {
    "solution1": f"{BUYER_1} | {SELLER_1}",
    "solution2": f"{BUYER_2} | {SELLER_2} | {REGISTRAR_2}",
    "solution3": f"(new iB iS nB nS) ({BUYER_3} | {SELLER_3} | {REGISTRAR_3})",
    "solution1-attacked": f"{BUYER_1} | {SELLER_1} | {PROMISCUOUS}",
    "solution2-attacked": f"{BUYER_2} | {SELLER_2} | {REGISTRAR_2} | {PROMISCUOUS}",
    "solution3-attacked": f"(new iB iS nB nS) ({BUYER_3} | {SELLER_3} | {REGISTRAR_3}) | {PROMISCUOUS}",
}

# the completed transaction
TRADE_FINAL = r"B . c -> ok | S . b -> ok"

# (left, right, expected verdict)
EQUATIONS = {
    "protected-subsumed": (r"#n -> 0 | !(n -> 0)", r"!(n -> 0)", True),
    "compound-binder-subsumed": (r"\x . \y -> 0 | !(\z -> 0)", r"!(\z -> 0)", True),
    "general-claim-fails": (
        r"\x -> (x | m -> #w) | !(\z -> (m | m -> #w))",
        r"!(\z -> (m | m -> #w))",
        False,
    ),
}


def trade(name: str) -> Process:
    return parse_process(TRADE[name])


def equation(name: str) -> tuple[Process, Process, bool]:
    left, right, verdict = EQUATIONS[name]
    return parse_process(left), parse_process(right), verdict


LINDA_PROGRAMS = [
    r"out(b) | in(\x).ok",
    r"out(a, b) | in(\x, =b).out(x) | in(=a).ok",
    r"out(a) | out(b) | in(\x).in(\y).ok",
    r"(new k) (out(k, a) | in(=k, \y).out(y)) | in(=a).ok",
    r"!out(a) | in(=a).in(=a).ok",
    r"out(a, b, c) | in(=a, \x, \y).out(y, x) | in(=c, =b).ok",
    r"in(\x, \y).ok | out(a)",
    r"out(a) | in(=b).ok",
    r"!in(=p, \x).out(x) | out(p, q) | out(p, r) | in(=q).ok",
    r"out(a, a) | in(\x, =a).in(=x).ok | out(a)",
]

SPI_PROGRAMS = [
    r"c!<(a, b)>.0 | c?(z). let (x, y) = z in [x is a] ok",
    r"c!<{m}k>.0 | c?(z). case z of {x}k : [x is m] ok",
    r"c!<2>.0 | c?(z). case z of 0 : 0 suc(x) : case x of 0 : 0 suc(y) : case y of 0 : ok suc(v) : 0",
    r"(new k) (c!<{a}k>.0 | c?(z). case z of {x}k : d!<x>.0) | d?(y). [y is a] ok",
    r"c!<a>.ok | c?(x).0",
    r"[a is b] ok | [a is a] 0",
    r"!c!<a>.0 | c?(x). c?(y). [x is y] ok",
    r"(new n) (c!<n>.0 | c?(x). x!<a>.0 | n?(y). ok)",
    r"c!<(a, (b, 0))>.0 | c?(z). let (x, r) = z in let (y, t) = r in case t of 0 : ok suc(u) : 0",
    r"c!<suc(0)>.0 | c?(z). case z of 0 : 0 suc(x) : [x is 0] ok",
]
