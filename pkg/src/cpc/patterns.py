"""Patterns, substitutions, symmetric unification and compatibility.

Names are plain strings.  Surface names are identifiers produced by the
parser; names minted by :func:`fresh` carry a ``%`` which the lexer never
accepts, so they can not collide with anything a user writes.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Mapping, Optional

Name = str
Subst = dict  # Name -> Pattern, every image communicable

_counter = itertools.count(1)


def fresh(base: str = "x") -> Name:
    """Mint a name that no surface program can mention."""
    base = base.split("%", 1)[0].lstrip("@^") or "x"
    return f"{base}%{next(_counter)}"


def is_fresh(name: Name) -> bool:
    return "%" in name


class PatternError(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class Bind:
    name: Name


@dataclass(frozen=True, slots=True)
class Var:
    name: Name


@dataclass(frozen=True, slots=True)
class Prot:
    name: Name


@dataclass(frozen=True, slots=True)
class Comp:
    left: "Pattern"
    right: "Pattern"


Pattern = Bind | Var | Prot | Comp


def compound(*parts: Pattern) -> Pattern:
    """Left-associated compound ``p1 . p2 . ... . pk``."""
    if not parts:
        raise PatternError("empty compound")
    out = parts[0]
    for p in parts[1:]:
        out = Comp(out, p)
    return out


# -- name classification ---------------------------------------------------

def _walk(p: Pattern) -> Iterator[Pattern]:
    stack = [p]
    while stack:
        q = stack.pop()
        if isinstance(q, Comp):
            stack.append(q.right)
            stack.append(q.left)
        else:
            yield q


def atoms(p: Pattern) -> list[Pattern]:
    """Atoms of ``p`` from left to right."""
    return list(_walk(p))


def variable_names(p: Pattern) -> set[Name]:
    return {a.name for a in _walk(p) if isinstance(a, Var)}


def protected_names(p: Pattern) -> set[Name]:
    return {a.name for a in _walk(p) if isinstance(a, Prot)}


def binding_names(p: Pattern) -> set[Name]:
    return {a.name for a in _walk(p) if isinstance(a, Bind)}


def binding_list(p: Pattern) -> list[Name]:
    """Binding names in left-to-right order (duplicates kept)."""
    return [a.name for a in _walk(p) if isinstance(a, Bind)]


def free_names(p: Pattern) -> set[Name]:
    return {a.name for a in _walk(p) if not isinstance(a, Bind)}


def classify_names(p: Pattern) -> tuple[set[Name], set[Name], set[Name]]:
    """Return ``(variable, protected, binding)`` name sets of ``p``."""
    v, pr, b = set(), set(), set()
    for a in _walk(p):
        if isinstance(a, Var):
            v.add(a.name)
        elif isinstance(a, Prot):
            pr.add(a.name)
        else:
            b.add(a.name)
    return v, pr, b


def pattern_names(p: Pattern) -> set[Name]:
    return {a.name for a in _walk(p)}


def is_well_formed(p: Pattern) -> bool:
    binders = binding_list(p)
    if len(binders) != len(set(binders)):
        return False
    return not (set(binders) & free_names(p))


def check_well_formed(p: Pattern) -> None:
    binders = binding_list(p)
    seen = set()
    for b in binders:
        if b in seen:
            raise PatternError(f"duplicate binding name {b!r}")
        seen.add(b)
    clash = seen & free_names(p)
    if clash:
        raise PatternError(f"binding name {sorted(clash)[0]!r} also occurs free")


def is_communicable(p: Pattern) -> bool:
    return all(isinstance(a, Var) for a in _walk(p))


def protect(p: Pattern) -> Pattern:
    if not is_communicable(p):
        raise PatternError("protect requires communicable pattern")
    return _protect(p)


def _protect(p: Pattern) -> Pattern:
    if isinstance(p, Comp):
        return Comp(_protect(p.left), _protect(p.right))
    return Prot(p.name)


def depth(p: Pattern) -> int:
    if isinstance(p, Comp):
        return 1 + max(depth(p.left), depth(p.right))
    return 0


# -- substitutions ---------------------------------------------------------

def check_subst(s: Mapping[Name, Pattern]) -> None:
    for x, q in s.items():
        if not is_communicable(q):
            raise PatternError(f"substitution image for {x!r} is not communicable")


def subst_free_names(s: Mapping[Name, Pattern]) -> set[Name]:
    out: set[Name] = set()
    for q in s.values():
        out |= free_names(q)
    return out


def subst_names(s: Mapping[Name, Pattern]) -> set[Name]:
    return set(s) | subst_free_names(s)


def identity(names) -> Subst:
    return {x: Var(x) for x in names}


def apply_subst(s: Mapping[Name, Pattern], p: Pattern) -> Pattern:
    """Apply ``s`` to the free names of ``p``; binding names are untouched."""
    if not s:
        return p
    match p:
        case Var(x):
            return s.get(x, p)
        case Prot(x):
            return _protect(s[x]) if x in s else p
        case Bind():
            return p
        case Comp(l, r):
            return Comp(apply_subst(s, l), apply_subst(s, r))
    raise TypeError(p)


def apply_subst_binding(s: Mapping[Name, Pattern], p: Pattern) -> Pattern:
    """The hat-action: replace binding names in ``dom(s)`` by their images."""
    if not s:
        return p
    match p:
        case Bind(x):
            return s.get(x, p)
        case Var() | Prot():
            return p
        case Comp(l, r):
            return Comp(apply_subst_binding(s, l), apply_subst_binding(s, r))
    raise TypeError(p)


def rename_binders(p: Pattern, ren: Mapping[Name, Name]) -> Pattern:
    """Rename binding names only (``{λy/λx}p``)."""
    if not ren:
        return p
    match p:
        case Bind(x):
            return Bind(ren.get(x, x))
        case Comp(l, r):
            return Comp(rename_binders(l, ren), rename_binders(r, ren))
    return p


def rename_free(p: Pattern, ren: Mapping[Name, Name]) -> Pattern:
    """Rename free names (variable and protected) only."""
    if not ren:
        return p
    match p:
        case Var(x):
            return Var(ren[x]) if x in ren else p
        case Prot(x):
            return Prot(ren[x]) if x in ren else p
        case Comp(l, r):
            return Comp(rename_free(l, ren), rename_free(r, ren))
    return p


def compose_limited(theta: Mapping[Name, Pattern], sigma: Mapping[Name, Pattern]) -> Subst:
    """``theta[sigma]``: ``x -> theta(sigma(x))`` for ``x`` in ``dom(sigma)``."""
    out = {x: apply_subst(theta, q) for x, q in sigma.items()}
    for x, q in out.items():
        if not is_communicable(q):
            raise AssertionError(f"composed image for {x!r} is not communicable")
    return out


def _disjoint_union(a: Subst, b: Subst) -> Subst:
    if a.keys() & b.keys():
        raise PatternError(f"overlapping substitution domains {sorted(a.keys() & b.keys())}")
    out = dict(a)
    out.update(b)
    return out


# -- unification -----------------------------------------------------------

def unify(p: Pattern, q: Pattern) -> Optional[tuple[Subst, Subst]]:
    """Symmetric matching of ``p`` against ``q``.

    Returns ``(sigma, rho)`` with ``dom(sigma) = bn(p)`` and
    ``dom(rho) = bn(q)``, or ``None`` when the patterns do not unify.
    The two substitutions are kept apart, so binding names shared between
    ``p`` and ``q`` never interfere.
    """
    check_well_formed(p)
    check_well_formed(q)
    return unify_unchecked(p, q)


def unify_unchecked(p: Pattern, q: Pattern) -> Optional[tuple[Subst, Subst]]:
    sigma: Subst = {}
    rho: Subst = {}
    if _unify(p, q, sigma, rho):
        return sigma, rho
    return None


def _unify(p: Pattern, q: Pattern, sigma: Subst, rho: Subst) -> bool:
    tp, tq = type(p), type(q)
    if tp is Bind:
        if not is_communicable(q):
            return False
        if p.name in sigma:
            raise PatternError(f"binding name {p.name!r} bound twice")
        sigma[p.name] = q
        return True
    if tq is Bind:
        if not is_communicable(p):
            return False
        if q.name in rho:
            raise PatternError(f"binding name {q.name!r} bound twice")
        rho[q.name] = p
        return True
    if tp is Comp:
        if tq is not Comp:
            return False
        return _unify(p.left, q.left, sigma, rho) and _unify(p.right, q.right, sigma, rho)
    if tq is Comp:
        return False
    return p.name == q.name


# -- compatibility ---------------------------------------------------------

def compat_reply(p: Pattern, sigma: Mapping[Name, Pattern], q: Pattern) -> Optional[Subst]:
    """The unique ``rho`` with ``(p, sigma) ◁ (q, rho)``, or ``None``.

    ``sigma`` must cover ``bn(p)``; entries outside ``bn(p)`` are ignored.
    """
    rho: Subst = {}
    if _compat(p, sigma, q, rho):
        return rho
    return None


def _compat(p: Pattern, sigma, q: Pattern, rho: Subst) -> bool:
    tq = type(q)
    if tq is Bind:
        if free_names(p):
            return False
        image = apply_subst_binding(sigma, p)
        if not is_communicable(image):
            return False
        rho[q.name] = image
        return True
    if tq is Comp:
        if type(p) is not Comp:
            return False
        return _compat(p.left, sigma, q.left, rho) and _compat(p.right, sigma, q.right, rho)
    tp = type(p)
    if tq is Var:
        return tp in (Var, Prot) and p.name == q.name
    # q protected: only a protected p with the same name
    return tp is Prot and p.name == q.name


def compat(m1: tuple[Pattern, Mapping], m2: tuple[Pattern, Mapping]) -> bool:
    """Decide ``(p, sigma) ◁ (q, rho)`` for two matches."""
    p, sigma = m1
    q, rho = m2
    if set(sigma) != binding_names(p) or set(rho) != binding_names(q):
        raise PatternError("not a match: substitution domain differs from binding names")
    expected = compat_reply(p, sigma, q)
    return expected is not None and expected == dict(rho)


def maximal_pattern(p: Pattern) -> Pattern:
    """The most permissive pattern ``p`` is compatible with."""
    if not free_names(p):
        return Bind(fresh("y"))
    if isinstance(p, Comp):
        return Comp(maximal_pattern(p.left), maximal_pattern(p.right))
    return Var(p.name)


# -- ordering and display --------------------------------------------------

_RANK = {Bind: 0, Var: 1, Prot: 2, Comp: 3}


def sort_key(p: Pattern) -> tuple:
    """Total order used for deterministic output: atoms before compounds."""
    if isinstance(p, Comp):
        return (3, sort_key(p.left), sort_key(p.right))
    return (_RANK[type(p)], p.name)


def show(p: Pattern, unicode: bool = False) -> str:
    match p:
        case Bind(x):
            return ("λ" if unicode else "\\") + x
        case Var(x):
            return x
        case Prot(x):
            return f"⌜{x}⌝" if unicode else "#" + x
        case Comp(l, r):
            dot = "•" if unicode else " . "
            rs = show(r, unicode)
            if isinstance(r, Comp):
                rs = f"({rs})"
            return show(l, unicode) + dot + rs
    raise TypeError(p)


def show_subst(s: Mapping[Name, Pattern], unicode: bool = False) -> str:
    items = ", ".join(f"{show(s[x], unicode)}/{x}" for x in sorted(s))
    return "{" + items + "}"
