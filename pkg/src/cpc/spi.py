"""Spi calculus: terms, processes, reduction and the encoding into CPC."""
from __future__ import annotations

from dataclasses import dataclass

from . import engine
from .patterns import Bind, Comp, Pattern, PatternError, Prot, Var, compound, fresh, pattern_names
from .process import NIL, OK, Case, Nil, Ok, Par, par, Process, Rep, Res, canonical_key, prune_dead
from .linda import HASH

RESERVED = frozenset({"pair", "encr", "0", "suc"})


class SpiError(ValueError):
    pass


# -- terms -----------------------------------------------------------------

@dataclass(frozen=True)
class Sym:
    """A name or a variable; binders decide which."""
    name: str


@dataclass(frozen=True)
class Pair:
    left: object
    right: object


@dataclass(frozen=True)
class Zero:
    pass


@dataclass(frozen=True)
class Int:
    value: int

    def __post_init__(self):
        if self.value <= 0:
            raise SpiError("integer literals must be positive")


@dataclass(frozen=True)
class Suc:
    arg: object


@dataclass(frozen=True)
class Encrypt:
    message: object
    key: object


ZERO = Zero()


def normalize_term(M):
    """Integers become iterated successors of zero."""
    match M:
        case Int(i):
            out = ZERO
            for _ in range(i):
                out = Suc(out)
            return out
        case Pair(a, b):
            return Pair(normalize_term(a), normalize_term(b))
        case Suc(a):
            return Suc(normalize_term(a))
        case Encrypt(a, k):
            return Encrypt(normalize_term(a), normalize_term(k))
    return M


def term_names(M) -> set:
    match M:
        case Sym(n):
            return {n}
        case Pair(a, b) | Encrypt(a, b):
            return term_names(a) | term_names(b)
        case Suc(a):
            return term_names(a)
    return set()


def subst_term(s: dict, M):
    match M:
        case Sym(n):
            return s.get(n, M)
        case Pair(a, b):
            return Pair(subst_term(s, a), subst_term(s, b))
        case Encrypt(a, b):
            return Encrypt(subst_term(s, a), subst_term(s, b))
        case Suc(a):
            return Suc(subst_term(s, a))
    return M


def encode_spi_term(M) -> Pattern:
    match M:
        case Sym(n):
            if n in RESERVED:
                raise SpiError(f"reserved name {n!r} used in a Spi program")
            return Var(n)
        case Zero():
            return Var("0")
        case Int(_):
            return encode_spi_term(normalize_term(M))
        case Suc(a):
            return Comp(Var("suc"), encode_spi_term(a))
        case Pair(a, b):
            return compound(Var("pair"), encode_spi_term(a), encode_spi_term(b))
        case Encrypt(a, k):
            return compound(Var("encr"), encode_spi_term(a), encode_spi_term(k))
    raise TypeError(M)


# -- processes -------------------------------------------------------------

@dataclass(frozen=True)
class SIn:
    channel: object
    var: str
    body: object


@dataclass(frozen=True)
class SOut:
    channel: object
    message: object
    body: object


@dataclass(frozen=True)
class SMatch:
    left: object
    right: object
    body: object


@dataclass(frozen=True)
class SLet:
    x: str
    y: str
    term: object
    body: object

    def __post_init__(self):
        if self.x == self.y:
            raise SpiError(f"let binds {self.x!r} twice")


@dataclass(frozen=True)
class SDecrypt:
    term: object
    var: str
    key: object
    body: object


@dataclass(frozen=True)
class SCaseInt:
    term: object
    zero: object
    var: str
    succ: object


def _binders(P) -> tuple:
    match P:
        case SIn(_, x, _) | SDecrypt(_, x, _, _) | SCaseInt(_, _, x, _):
            return (x,)
        case SLet(x, y, _, _):
            return (x, y)
    return ()


def free_names(P) -> frozenset:
    match P:
        case Nil() | Ok():
            return frozenset()
        case Par(l, r):
            return free_names(l) | free_names(r)
        case Rep(b):
            return free_names(b)
        case Res(n, b):
            return free_names(b) - {n}
        case SIn(M, x, b):
            return frozenset(term_names(M) | (free_names(b) - {x}))
        case SOut(M, N, b):
            return frozenset(term_names(M) | term_names(N) | free_names(b))
        case SMatch(M, N, b):
            return frozenset(term_names(M) | term_names(N) | free_names(b))
        case SLet(x, y, M, b):
            return frozenset(term_names(M) | (free_names(b) - {x, y}))
        case SDecrypt(M, x, N, b):
            return frozenset(term_names(M) | term_names(N) | (free_names(b) - {x}))
        case SCaseInt(M, p, x, q):
            return frozenset(term_names(M) | free_names(p) | (free_names(q) - {x}))
    raise TypeError(P)


def subst(s: dict, P):
    """Capture-avoiding substitution of terms for names."""
    fn = free_names(P)
    s = {x: t for x, t in s.items() if x in fn}
    if not s:
        return P
    images = set().union(*(term_names(t) for t in s.values()))
    match P:
        case Par(l, r):
            return Par(subst(s, l), subst(s, r))
        case Rep(b):
            return Rep(subst(s, b))
        case Res(n, b):
            if n in images:
                m = fresh(n)
                b = subst({n: Sym(m)}, b)
                n = m
            return Res(n, subst(s, b))
    # prefixes: freshen clashing binders first
    ren = {x: fresh(x) for x in _binders(P) if x in images}
    if ren:
        P = _rename_binders(P, ren)
    inner = {x: t for x, t in s.items() if x not in _binders(P)}
    match P:
        case SIn(M, x, b):
            return SIn(subst_term(s, M), x, subst(inner, b))
        case SOut(M, N, b):
            return SOut(subst_term(s, M), subst_term(s, N), subst(s, b))
        case SMatch(M, N, b):
            return SMatch(subst_term(s, M), subst_term(s, N), subst(s, b))
        case SLet(x, y, M, b):
            return SLet(x, y, subst_term(s, M), subst(inner, b))
        case SDecrypt(M, x, N, b):
            return SDecrypt(subst_term(s, M), x, subst_term(s, N), subst(inner, b))
        case SCaseInt(M, p, x, q):
            return SCaseInt(subst_term(s, M), subst(s, p), x, subst(inner, q))
    return P


def _rename_binders(P, ren: dict):
    sym = {a: Sym(b) for a, b in ren.items()}
    match P:
        case SIn(M, x, b):
            return SIn(M, ren.get(x, x), subst(sym, b))
        case SLet(x, y, M, b):
            return SLet(ren.get(x, x), ren.get(y, y), M, subst(sym, b))
        case SDecrypt(M, x, N, b):
            return SDecrypt(M, ren.get(x, x), N, subst(sym, b))
        case SCaseInt(M, p, x, q):
            return SCaseInt(M, p, ren.get(x, x), subst(sym, q))
    return P


def rename(P, ren: dict):
    return subst({a: Sym(b) for a, b in ren.items()}, P)


def _unary(T) -> list:
    match T:
        case SMatch(M, N, b):
            return [b] if normalize_term(M) == normalize_term(N) else []
        case SLet(x, y, M, b):
            M = normalize_term(M)
            if isinstance(M, Pair):
                return [subst({x: M.left, y: M.right}, b)]
        case SDecrypt(M, x, N, b):
            M = normalize_term(M)
            if isinstance(M, Encrypt) and M.key == normalize_term(N):
                return [subst({x: M.message}, b)]
        case SCaseInt(M, p, x, q):
            M = normalize_term(M)
            if isinstance(M, Zero):
                return [p]
            if isinstance(M, Suc):
                return [subst({x: M.arg}, q)]
    return []


def _binary(t1, t2) -> list:
    if isinstance(t1, SOut) and isinstance(t2, SIn):
        if normalize_term(t1.channel) == normalize_term(t2.channel):
            return [Par(t1.body, subst({t2.var: t1.message}, t2.body))]
    return []


CALCULUS = engine.Calculus(rename, _unary, _binary)


def spi_steps(P) -> list:
    return list(engine.step_all(CALCULUS, P))


def spi_reduce(P) -> list:
    """One-step reducts, deduplicated through the encoding."""
    seen = {}
    for Q in engine.step_all(CALCULUS, P):
        seen.setdefault(canonical_key(encode_spi_proc(Q)), Q)
    return [seen[k] for k in sorted(seen)]


def has_success(P) -> bool:
    _, threads = engine.flatten(CALCULUS, P)
    return any(isinstance(t, Ok) or isinstance(t, Rep) and has_success(t.body) for t in threads)


# -- encoding --------------------------------------------------------------

def _check_binder(x: str) -> None:
    if x in RESERVED:
        raise SpiError(f"reserved name {x!r} used in a Spi program")


def encode_spi_proc(P) -> Process:
    match P:
        case Nil():
            return NIL
        case Ok():
            return OK
        case Par(l, r):
            return Par(encode_spi_proc(l), encode_spi_proc(r))
        case Rep(b):
            return Rep(encode_spi_proc(b))
        case Res(n, b):
            _check_binder(n)
            return Res(n, encode_spi_proc(b))
        case SIn(M, x, b):
            _check_binder(x)
            m = encode_spi_term(M)
            if x in pattern_names(m) | {HASH}:
                y = fresh(x)
                b, x = rename(b, {x: y}), y
            return Case(compound(m, Bind(x), Var(HASH)), encode_spi_proc(b))
        case SOut(M, N, b):
            return Case(compound(encode_spi_term(M), encode_spi_term(N), Bind(fresh("x"))),
                        encode_spi_proc(b))
        case SMatch(M, N, b):
            n = fresh("n")
            return Res(n, Par(Case(Comp(Prot(n), encode_spi_term(M)), encode_spi_proc(b)),
                              Case(Comp(Prot(n), encode_spi_term(N)), NIL)))
        case SLet(x, y, M, b):
            _check_binder(x)
            _check_binder(y)
            n = fresh("n")
            head = compound(Prot("pair"), Bind(x), Bind(y))
            return Res(n, Par(Case(Comp(Prot(n), head), encode_spi_proc(b)),
                              Case(Comp(Prot(n), encode_spi_term(M)), NIL)))
        case SDecrypt(M, x, N, b):
            _check_binder(x)
            key = encode_spi_term(N)
            if x in pattern_names(key):
                y = fresh(x)
                b, x = rename(b, {x: y}), y
            n = fresh("n")
            head = compound(Prot("encr"), Bind(x), key)
            return Res(n, Par(Case(Comp(Prot(n), head), encode_spi_proc(b)),
                              Case(Comp(Prot(n), encode_spi_term(M)), NIL)))
        case SCaseInt(M, p, x, q):
            _check_binder(x)
            n = fresh("n")
            return Res(n, par(
                Case(Comp(Prot(n), Prot("0")), encode_spi_proc(p)),
                Case(Comp(Prot(n), Comp(Prot("suc"), Bind(x))), encode_spi_proc(q)),
                Case(Comp(Prot(n), encode_spi_term(M)), NIL)))
    raise TypeError(P)


def encoded_key(P) -> str:
    """State identity used by the harness: the pruned encoding up to ≡."""
    return canonical_key(prune_dead(encode_spi_proc(P)))


# -- printing --------------------------------------------------------------

def show_term(M) -> str:
    match M:
        case Sym(n):
            return n
        case Zero():
            return "0"
        case Int(i):
            return str(i)
        case Suc(a):
            return f"suc({show_term(a)})"
        case Pair(a, b):
            return f"({show_term(a)}, {show_term(b)})"
        case Encrypt(a, k):
            return "{" + show_term(a) + "}" + show_term(k)
    raise TypeError(M)


def show(P) -> str:
    match P:
        case Nil():
            return "0"
        case Ok():
            return "ok"
        case Par(l, r):
            return show(l) + " | " + show(r)
        case Rep(b):
            return "!" + _wrap(b)
        case Res(n, b):
            return f"(new {n}) " + _wrap(b)
        case SIn(M, x, b):
            return f"{show_term(M)}?({x})." + _wrap(b)
        case SOut(M, N, b):
            return f"{show_term(M)}!<{show_term(N)}>." + _wrap(b)
        case SMatch(M, N, b):
            return f"[{show_term(M)} is {show_term(N)}]" + _wrap(b)
        case SLet(x, y, M, b):
            return f"let ({x}, {y}) = {show_term(M)} in " + _wrap(b)
        case SDecrypt(M, x, N, b):
            return f"case {show_term(M)} of {{{x}}}{show_term(N)} : " + _wrap(b)
        case SCaseInt(M, p, x, q):
            return f"case {show_term(M)} of 0 : {_wrap(p)} suc({x}) : " + _wrap(q)
    raise TypeError(P)


def _wrap(P) -> str:
    s = show(P)
    return s if isinstance(P, (Nil, Ok, Rep, Res, SIn, SOut, SMatch)) else f"({s})"
