"""Labelled transitions with the image-finite replication rules.

Replication is handled by two rules instead of unfolding: a single copy
acts (``!P -μ-> P' | !P``) or two independent copies interact.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional

from .patterns import (
    Name, Pattern, Var, atoms, binding_list, binding_names, fresh,
    protected_names, rename_binders, rename_free, show as show_pattern,
    unify_unchecked, variable_names, pattern_names,
)
from .process import (
    Case, Nil, Ok, Par, Process, Rep, Res, canonicalize, free_names_proc,
    par, reductions, rename_proc, restrict, subst_proc, canonical_key,
)


@dataclass(frozen=True)
class Tau:
    def show(self, unicode: bool = False) -> str:
        return "τ" if unicode else "tau"


@dataclass(frozen=True)
class Out:
    """``(ν extruded) pattern``."""
    extruded: tuple
    pattern: Pattern

    def show(self, unicode: bool = False) -> str:
        body = show_pattern(self.pattern, unicode)
        if not self.extruded:
            return body
        names = ",".join(self.extruded)
        return (f"(ν{names})" if unicode else f"nu{{{names}}} ") + body

    def names(self) -> set:
        return set(self.extruded) | pattern_names(self.pattern)


Label = Tau | Out
TAU = Tau()


@dataclass(frozen=True)
class Transition:
    source: Process
    label: Label
    target: Process


def meas(P: Process) -> int:
    """Upper bound on the number of derivatives per label."""
    match P:
        case Nil() | Ok():
            return 0
        case Case():
            return 1
        case Res(_, b):
            return meas(b)
        case Par(l, r):
            a, b = meas(l), meas(r)
            return a + b + a * b
        case Rep(b):
            a = meas(b)
            return a + a * a
    raise TypeError(P)


def raw_transitions(P: Process) -> list[tuple[Label, Process]]:
    """Derivable ``(label, target)`` pairs; bound names are fresh, not normalised."""
    match P:
        case Nil() | Ok():
            return []
        case Case(p, body):
            ren = {x: fresh(x) for x in binding_list(p)}
            body = rename_proc(body, ren)
            return [(Out((), rename_binders(p, ren)), body)]
        case Res(n, body):
            m = fresh(n)
            body = rename_proc(body, {n: m})
            out = []
            for mu, tgt in raw_transitions(body):
                if isinstance(mu, Tau) or m not in mu.names():
                    out.append((mu, Res(m, tgt)))
                elif m in variable_names(mu.pattern) and m not in protected_names(mu.pattern) \
                        and m not in mu.extruded and m not in binding_names(mu.pattern):
                    out.append((Out(mu.extruded + (m,), mu.pattern), tgt))
            return out
        case Par(left, right):
            tl = raw_transitions(left)
            tr = raw_transitions(right)
            out = [(mu, Par(t, right)) for mu, t in tl]
            out += [(mu, Par(left, t)) for mu, t in tr]
            out += _interactions(tl, tr)
            return out
        case Rep(body):
            first = raw_transitions(body)
            out = [(mu, Par(t, P)) for mu, t in first]
            second = raw_transitions(body)
            out += [(TAU, Par(t, P)) for _, t in _interactions(first, second)]
            return out
    raise TypeError(P)


def _interactions(tl, tr) -> list[tuple[Label, Process]]:
    out = []
    for (m1, t1), (m2, t2) in itertools.product(tl, tr):
        if isinstance(m1, Tau) or isinstance(m2, Tau):
            continue
        u = unify_unchecked(m1.pattern, m2.pattern)
        if u is None:
            continue
        sigma, rho = u
        out.append((TAU, restrict(m1.extruded + m2.extruded,
                                  Par(subst_proc(sigma, t1), subst_proc(rho, t2)))))
    return out


def _pick(prefix: str, avoid: set, counter: itertools.count) -> Name:
    while True:
        cand = f"^{prefix}{next(counter)}"
        if cand not in avoid:
            return cand


def normalize(label: Label, target: Process, avoid: Iterable[Name] = ()) -> tuple[Label, Process]:
    """Rename extruded and binding names of a label (and its target) canonically."""
    if isinstance(label, Tau):
        return label, target
    avoid = set(avoid) | free_names_proc(target) - set(label.extruded) - binding_names(label.pattern)
    ext_counter, bind_counter = itertools.count(), itertools.count()
    ext_map = {}
    for a in atoms(label.pattern):
        if isinstance(a, Var) and a.name in label.extruded and a.name not in ext_map:
            ext_map[a.name] = _pick("e", avoid, ext_counter)
    bind_map = {x: _pick("b", avoid, bind_counter) for x in binding_list(label.pattern)}
    p = rename_binders(rename_free(label.pattern, ext_map), bind_map)
    ext = tuple(ext_map[n] for n in label.extruded)
    target = rename_proc(target, {**ext_map, **bind_map})
    return Out(tuple(sorted(ext)), p), target


def label_key(label: Label) -> str:
    if isinstance(label, Tau):
        return "tau"
    return "nu{" + ",".join(label.extruded) + "}" + show_pattern(label.pattern)


def transitions(P: Process, avoid: Iterable[Name] = ()) -> list[Transition]:
    """Transitions of ``P`` up to α on labels and structural congruence on targets."""
    avoid = set(avoid) | free_names_proc(P)
    seen = {}
    for mu, tgt in raw_transitions(P):
        mu, tgt = normalize(mu, tgt, avoid)
        cf = canonicalize(tgt)
        key = (label_key(mu), cf.key)
        if key not in seen:
            seen[key] = Transition(P, mu, cf.process())
    return [seen[k] for k in sorted(seen)]


def tau_targets(P: Process) -> set[str]:
    return {canonical_key(t.target) for t in transitions(P) if isinstance(t.label, Tau)}


def tau_matches_reduction(P: Process) -> bool:
    """τ-derivatives and one-step reducts agree up to structural congruence."""
    return tau_targets(P) == {canonical_key(R) for R in reductions(P)}


def derivative_counts(P: Process) -> dict[str, int]:
    """Number of ≡-distinct derivatives per label."""
    counts: dict[str, int] = {}
    for t in transitions(P):
        k = label_key(t.label)
        counts[k] = counts.get(k, 0) + 1
    return counts


def exhibits(t: Transition) -> bool:
    """The source of a visible transition exposes the label's pattern.

    Checks that ``source ≡ (ν m̃)(ν ñ)(p → Q1 | Q2)`` for some top-level
    case after unfolding, with ``m̃`` the extruded names.
    """
    if isinstance(t.label, Tau):
        return True
    from .process import expose, flatten
    res, threads = flatten(t.source)
    want = canonical_key(Case(t.label.pattern, Nil()))
    for th in threads:
        for e in expose(th):
            hidden = res + e.res
            for ext in itertools.permutations(hidden, len(t.label.extruded)):
                ren = dict(zip(ext, t.label.extruded))
                p = rename_free(e.case.pattern, ren)
                if pattern_shape_equal(p, t.label.pattern, set(t.label.extruded)):
                    return True
    return False


def pattern_shape_equal(p: Pattern, q: Pattern, _ext) -> bool:
    """Equality up to renaming of binders."""
    bp, bq = binding_list(p), binding_list(q)
    if len(bp) != len(bq):
        return False
    return rename_binders(p, dict(zip(bp, bq))) == q
