"""Linda with templates, its reduction semantics and the encoding into CPC."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from . import engine
from .patterns import Bind, Comp, Pattern, PatternError, Prot, Var, fresh
from .process import NIL, OK, Case, Nil, Ok, Par, Process, Rep, Res, canonical_key

HASH = "_hash"


@dataclass(frozen=True)
class FBind:
    name: str


@dataclass(frozen=True)
class FExact:
    name: str


Field = FBind | FExact


@dataclass(frozen=True)
class LOut:
    data: tuple


@dataclass(frozen=True)
class LIn:
    template: tuple
    body: object

    def __post_init__(self):
        names = [f.name for f in self.template if isinstance(f, FBind)]
        if len(names) != len(set(names)):
            dup = next(n for n in names if names.count(n) > 1)
            raise PatternError(f"duplicate binding name {dup!r}")


def linda_match(template, data) -> Optional[dict]:
    """Linda matching: equal length, exact fields agree, binders collect data."""
    if len(template) != len(data):
        return None
    out: dict = {}
    for t, b in zip(template, data):
        if isinstance(t, FExact):
            if t.name != b:
                return None
        else:
            if t.name in out:
                raise PatternError(f"binding name {t.name!r} bound twice")
            out[t.name] = b
    return out


def free_names(P) -> frozenset:
    match P:
        case Nil() | Ok():
            return frozenset()
        case LOut(data):
            return frozenset(data)
        case LIn(template, body):
            binders = {f.name for f in template if isinstance(f, FBind)}
            exact = {f.name for f in template if isinstance(f, FExact)}
            return frozenset(exact | (free_names(body) - binders))
        case Par(l, r):
            return free_names(l) | free_names(r)
        case Rep(b):
            return free_names(b)
        case Res(n, b):
            return free_names(b) - {n}
    raise TypeError(P)


def rename(P, s: dict):
    """Capture-avoiding name-for-name substitution."""
    s = {a: b for a, b in s.items() if a != b and a in free_names(P)}
    if not s:
        return P
    match P:
        case LOut(data):
            return LOut(tuple(s.get(b, b) for b in data))
        case LIn(template, body):
            images = set(s.values())
            binders = [f.name for f in template if isinstance(f, FBind)]
            ren = {x: fresh(x) for x in binders if x in images}
            if ren:
                body = rename(body, ren)
            fields = tuple(FBind(ren.get(f.name, f.name)) if isinstance(f, FBind)
                           else FExact(s.get(f.name, f.name)) for f in template)
            inner = {a: b for a, b in s.items() if a not in binders}
            return LIn(fields, rename(body, inner))
        case Par(l, r):
            return Par(rename(l, s), rename(r, s))
        case Rep(b):
            return Rep(rename(b, s))
        case Res(n, b):
            if n in s.values():
                m = fresh(n)
                b = rename(b, {n: m})
                n = m
            return Res(n, rename(b, s))
    return P


def _binary(t1, t2) -> list:
    if isinstance(t1, LOut) and isinstance(t2, LIn):
        sigma = linda_match(t2.template, t1.data)
        if sigma is not None:
            return [rename(t2.body, sigma)]
    return []


CALCULUS = engine.Calculus(rename, lambda t: [], _binary)


def linda_steps(P) -> list:
    return list(engine.step_all(CALCULUS, P))


def linda_reduce(P) -> list:
    """One-step reducts, deduplicated through the structural congruence of the encoding."""
    seen = {}
    for Q in engine.step_all(CALCULUS, P):
        seen.setdefault(canonical_key(encode_linda(Q)), Q)
    return [seen[k] for k in sorted(seen)]


def has_success(P) -> bool:
    _, threads = engine.flatten(CALCULUS, P)
    return any(isinstance(t, Ok) or isinstance(t, Rep) and has_success(t.body) for t in threads)


# -- encoding --------------------------------------------------------------

def patt(template) -> Pattern:
    """Template to pattern: ``(t . #) . rest`` ending in ``\\x . #``."""
    out: Pattern = Comp(Bind(fresh("x")), Var(HASH))
    for t in reversed(template):
        head = Bind(t.name) if isinstance(t, FBind) else Prot(t.name)
        out = Comp(Comp(head, Var(HASH)), out)
    return out


def patb(data) -> Pattern:
    """Data to pattern: ``(b . \\x) . rest`` ending in ``# . \\x``."""
    out: Pattern = Comp(Var(HASH), Bind(fresh("x")))
    for b in reversed(data):
        out = Comp(Comp(Var(b), Bind(fresh("x"))), out)
    return out


def encode_linda(P) -> Process:
    match P:
        case Nil():
            return NIL
        case Ok():
            return OK
        case LOut(data):
            return Case(patb(data), NIL)
        case LIn(template, body):
            exact = {f.name for f in template if isinstance(f, FExact)} | {HASH}
            ren = {f.name: fresh(f.name) for f in template
                   if isinstance(f, FBind) and f.name in exact}
            if ren:
                template = tuple(FBind(ren.get(f.name, f.name)) if isinstance(f, FBind) else f
                                 for f in template)
                body = rename(body, ren)
            return Case(patt(template), encode_linda(body))
        case Par(l, r):
            return Par(encode_linda(l), encode_linda(r))
        case Rep(b):
            return Rep(encode_linda(b))
        case Res(n, b):
            return Res(n, encode_linda(b))
    raise TypeError(P)


# -- printing --------------------------------------------------------------

def show(P) -> str:
    match P:
        case Nil():
            return "0"
        case Ok():
            return "ok"
        case LOut(data):
            return "out(" + ", ".join(data) + ")"
        case LIn(template, body):
            fields = ", ".join("\\" + f.name if isinstance(f, FBind) else "=" + f.name for f in template)
            return f"in({fields})." + _unary(body)
        case Par(l, r):
            return show(l) + " | " + show(r)
        case Rep(b):
            return "!" + _unary(b)
        case Res(n, b):
            return f"(new {n}) " + _unary(b)
    raise TypeError(P)


def _unary(P) -> str:
    s = show(P)
    return f"({s})" if isinstance(P, (Par, LIn)) else s
