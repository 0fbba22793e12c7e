"""Acceptance criteria, one test each.

Every test records a PASS/FAIL line (shown in the terminal summary) and
asserts both the criterion and its time limit.
"""
from __future__ import annotations

import itertools
import random
import time

import pytest

import gen
from cpc import corpus, linda, spi
from cpc.equivalence import (
    BisimConfig, bounded_bisim, replay, reply_context, run_gadget, spec,
)
from cpc.explore import explore
from cpc.harness import check_encoding
from cpc.lts import derivative_counts, meas, tau_matches_reduction
from cpc.patterns import (
    Bind, Comp, Prot, Var, binding_list, binding_names, compat_reply, free_names,
    is_communicable, protected_names, unify,
)
from cpc.process import (
    NIL, OK, Case, canonical_key, flatten, free_names_proc, prune_dead, reachable,
    reductions, restrict, struct_eq,
)
from cpc.syntax import parse, parse_pattern, parse_process

RESULTS: list[str] = []


def record(number: int, title: str, ok: bool, elapsed: float, limit: float | None, detail: str = ""):
    timed = limit is None or elapsed < limit
    verdict = "PASS" if ok and timed else "FAIL"
    budget = f" (limit {limit:g}s)" if limit is not None else ""
    line = f"{verdict} criterion {number:2d}: {title} [{elapsed:.2f}s{budget}]"
    if detail:
        line += f" {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line
    assert timed, line


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


TRADE_FINAL = parse_process(r"(new n) (B . c -> ok | S . b -> ok)")


def test_01_trade_solution_one():
    with Timer() as t:
        g = explore(corpus.trade("solution1"), 10)
        traces = g.maximal_traces()
        finals = [g.nodes[k] for k in g.deadlocks]
        ok = (g.complete and len(finals) == 1 and struct_eq(finals[0], TRADE_FINAL)
              and all(len(tr) - 1 <= 2 for tr in traces) and len(traces) == 1)
    record(1, "trade solution 1 ends in B(c) | S(b) within 2 steps", ok, t.elapsed, 1.0,
           f"traces={[len(tr) - 1 for tr in traces]}")


def test_02_trade_solution_two():
    with Timer() as t:
        g = explore(corpus.trade("solution2"), 10)
        traces = g.maximal_traces()
        finals = [g.nodes[k] for k in g.deadlocks]
        ok = (g.complete and traces and all(len(tr) - 1 == 4 for tr in traces)
              and all(tr[-1] in g.deadlocks for tr in traces)
              and all(struct_eq(f, TRADE_FINAL) for f in finals))
    record(2, "trade solution 2: every maximal trace has length 4", ok, t.elapsed, 1.0,
           f"{len(traces)} traces")


def _stolen(P, name: str) -> bool:
    """Some promiscuous continuation holds ``name``."""
    _, threads = flatten(P)
    for th in threads:
        if isinstance(th, Case):
            p = th.pattern
            while isinstance(p, Comp) and isinstance(p.left, Comp):
                p = p.left
            head = p.left if isinstance(p, Comp) else p
            if head == Var("stolen") and name in free_names(th.pattern):
                return True
    return False


def test_03_protected_names_stop_theft():
    with Timer() as t:
        theft1 = any(_stolen(Q, "b") for _, Q in reachable(corpus.trade("solution1-attacked"), 6))
        theft3 = any(_stolen(Q, "b") for _, Q in reachable(corpus.trade("solution3-attacked"), 6))
    record(3, "promiscuous process steals b under solution 1 but not solution 3", theft1 and not theft3,
           t.elapsed, 5.0, f"solution1={theft1} solution3={theft3}")


def test_04_unification_rule_table():
    P = parse_pattern
    cases = [
        # atoms
        ("a", "a", ({}, {})),
        ("a", "#a", ({}, {})),
        ("#a", "a", ({}, {})),
        ("#a", "#a", ({}, {})),
        # binding
        (r"\x", "a", ({"x": Var("a")}, {})),
        ("a . b", r"\y", ({}, {"y": P("a . b")})),
        # compounds
        (r"\x . b", r"a . \y", ({"x": Var("a")}, {"y": Var("b")})),
        (r"(a . b) . c", r"\y . \z", ({}, {"y": P("a . b"), "z": Var("c")})),
        (r"\x . #c", r"a . c", ({"x": Var("a")}, {})),
        # undefined
        ("a", "b", None),
        ("#a", "#b", None),
        (r"\x", r"\y", None),
        (r"\x", "#a", None),
        ("a . b", "a", None),
        ("a . #b", r"\y", None),
        (r"(a . b) . #c", r"\y . \z", None),
        (r"(a . \x) . #c", r"\y . c", None),
        (r"\x . \y", r"\z", None),
    ]
    bad = []
    with Timer() as t:
        for l, r, want in cases:
            got = unify(P(l), P(r))
            got = None if got is None else (dict(got[0]), dict(got[1]))
            if got != want:
                bad.append((l, r, got))
    record(4, "unification rule table", not bad, t.elapsed, None, f"{len(cases)} cases, failures={bad}")


def test_05_unification_properties():
    rng = random.Random(5)
    violations = 0
    defined = 0
    with Timer() as t:
        for _ in range(10_000):
            p = gen.pattern(rng, 4, binders=("x", "y", "z", "u", "v", "w"))
            q = gen.pattern(rng, 4, binders=("x1", "y1", "z1", "u1", "v1", "w1"))
            u, v = unify(p, q), unify(q, p)
            if (u is None) != (v is None) or u is not None and (u[0], u[1]) != (v[1], v[0]):
                violations += 1
                continue
            if u is None:
                continue
            defined += 1
            s, r = u
            if not (protected_names(p) <= free_names(q) and protected_names(q) <= free_names(p)):
                violations += 1
            if set(s) != binding_names(p) or set(r) != binding_names(q):
                violations += 1
            if not all(is_communicable(x) for x in [*s.values(), *r.values()]):
                violations += 1
    record(5, "unification symmetry, protected names, domains", violations == 0, t.elapsed, 10.0,
           f"violations={violations} defined={defined}")


def _patterns_two_names(depth: int):
    """All well-formed patterns over names a, b to compound depth ``depth``."""
    counter = itertools.count()

    def atoms():
        return [Var("a"), Var("b"), Prot("a"), Prot("b"), "bind"]

    def level(d):
        if d == 0:
            return atoms()
        smaller = level(d - 1)
        return atoms() + [Comp(l, r) for l in smaller for r in smaller]

    def realize(p):
        if p == "bind":
            return Bind(f"r{next(counter)}")
        if isinstance(p, Comp):
            return Comp(realize(p.left), realize(p.right))
        return p

    return [realize(p) for p in level(depth)]


def test_06_compatibility():
    rng = random.Random(6)
    violations = 0
    hits = 0
    with Timer() as t:
        for _ in range(1000):
            p = gen.pattern(rng, 3)
            s = gen.match_for(rng, p)
            if compat_reply(p, s, p) != s:
                violations += 1
        for _ in range(300):
            p = gen.pattern(rng, 3)
            s = gen.match_for(rng, p)
            q = gen.generalize(rng, p)
            r = gen.generalize(rng, q)
            rho = compat_reply(p, s, q)
            theta = compat_reply(q, rho, r) if rho is not None else None
            if rho is None or theta is None or compat_reply(p, s, r) != theta:
                violations += 1
        rs = _patterns_two_names(2)
        names = ("a", "b")
        pairs = 0
        while pairs < 200:
            p = gen.pattern(rng, 2, names=names)
            q = gen.generalize(rng, p)
            for r in rs:
                u = unify(r, p)
                if u is None:
                    continue
                theta, sigma = u
                rho = compat_reply(p, sigma, q)
                if rho is None:
                    violations += 1
                    continue
                hits += 1
                if unify(r, q) != (theta, rho):
                    violations += 1
            pairs += 1
    record(6, "compatibility: reflexive, transitive, subset semantics", violations == 0, t.elapsed, 30.0,
           f"violations={violations} subset-instances={hits}")


def _templates(max_len: int):
    fields = ["bind", linda.FExact("a"), linda.FExact("b")]
    for n in range(max_len + 1):
        for combo in itertools.product(fields, repeat=n):
            yield tuple(linda.FBind(f"t{i}") if f == "bind" else f for i, f in enumerate(combo))


def test_07_matching_correspondence():
    violations = 0
    checked = 0
    data = [d for n in range(4) for d in itertools.product("ab", repeat=n)]
    with Timer() as t:
        for tmpl in _templates(3):
            pt = linda.patt(tmpl)
            last = binding_list(pt)[-1]
            for d in data:
                pb = linda.patb(d)
                checked += 1
                m = linda.linda_match(tmpl, d)
                u = unify(pt, pb)
                if m is None:
                    violations += u is not None
                    continue
                want = ({**{x: Var(b) for x, b in m.items()}, last: Var(linda.HASH)},
                        {y: Var(linda.HASH) for y in binding_list(pb)})
                violations += u != want
    record(7, "Linda matching agrees with unification of encodings", violations == 0, t.elapsed, 30.0,
           f"{checked} pairs, violations={violations}")


def _random_processes(n: int, seed: int):
    rng = random.Random(seed)
    half = n // 2
    return ([gen.process(rng, rng.randint(1, 6)) for _ in range(half)]
            + [gen.interacting_process(rng, rng.randint(2, 6)) for _ in range(n - half)])


def test_08_tau_matches_reduction():
    procs = _random_processes(500, 8)
    with Timer() as t:
        bad = [P for P in procs if not tau_matches_reduction(P)]
    record(8, "tau transitions coincide with reductions", not bad, t.elapsed, 60.0,
           f"violations={len(bad)}, reducing={sum(1 for P in procs if reductions(P))}")


def test_09_image_finiteness():
    procs = _random_processes(500, 8)
    with Timer() as t:
        bad = [P for P in procs if any(c > meas(P) for c in derivative_counts(P).values())]
    record(9, "derivatives per label bounded by meas", not bad, t.elapsed, None, f"violations={len(bad)}")


MUTATIONS = ("protect", "rename", "refine", "bind", "split", "extend")


def _mutate(p, kind: str, leaf: int, N: list):
    """Change the ``leaf``-th atom of ``p``; ``None`` when the kind does not apply there."""
    if kind == "extend":
        return Comp(p, Var(N[0])) if leaf == 0 else None
    counter = itertools.count()

    def go(q):
        if isinstance(q, Comp):
            l = go(q.left)
            r = go(q.right)
            return Comp(l, r) if l is not None and r is not None else None
        if next(counter) != leaf:
            return q
        match kind, q:
            case "protect", Var(n) if n in N:
                return Prot(n)
            case "rename", Var(n) | Prot(n) if n in N:
                other = [m for m in N if m != n][0]
                return type(q)(other)
            case "refine", Bind(_):
                return Var(N[0])
            case "bind", Var(_) | Prot(_):
                return Bind("s0")
            case "split", _:
                return Comp(Bind("s1"), Bind("s2"))
        return None

    return go(p)


def _leaves(p) -> int:
    return _leaves(p.left) + _leaves(p.right) if isinstance(p, Comp) else 1


def test_10_spec_and_reply_contexts():
    rng = random.Random(10)
    N = ["a", "b"]
    violations = []
    trials = 0
    with Timer() as t:
        while trials < 200:
            restricted = rng.choice([[], ["r"], ["r", "s"]])
            p = gen.reply_pattern(rng, N, restricted)
            sp = spec(N, p)
            u = unify(p, sp.complementary)
            want = ({x: Var(x) for x in binding_names(p)},
                    {x: Var(n) for x, n in sp.free_expect + sp.rest_expect})
            if u != want:
                violations.append(("spec", p))
            ext = sorted(set(restricted) & free_names(p))

            def context(q):
                return reply_context(N, p, restrict(ext, Case(q, NIL)))

            q = gen.generalize(rng, p)
            assert compat_reply(p, {x: Var(x) for x in binding_names(p)}, q) is not None
            C, ch = context(q)
            out = run_gadget(C, ch.success, ch.failure)
            if not out.succeeds or out.first_success != ch.steps + 1:
                violations.append(("compatible", p, q, out))
            made = 0
            for kind in MUTATIONS:
                for leaf in range(_leaves(p)):
                    bad = _mutate(p, kind, leaf, N)
                    if bad is None:
                        continue
                    assert compat_reply(p, {x: Var(x) for x in binding_names(p)}, bad) is None
                    C, ch = context(bad)
                    if run_gadget(C, ch.success, ch.failure).succeeds:
                        violations.append(("incompatible", p, bad))
                    made += 1
                    break
                if made == 3:
                    break
            if made < 3:
                violations.append(("fewer than 3 incompatible responders", p))
            trials += 1
    record(10, "spec identity and reply-context success", not violations, t.elapsed, 30.0,
           f"trials={trials} violations={violations[:3]}")


def test_11_equational_examples():
    cfg = BisimConfig(depth=3)
    verdicts = {}
    with Timer() as t:
        for name in corpus.EQUATIONS:
            P, Q, expected = corpus.equation(name)
            r = bounded_bisim(P, Q, cfg)
            good = r.bisimilar == expected
            if not r.bisimilar:
                good = good and replay(r.witness, cfg, r.pool) and r.witness.depth <= 3
            verdicts[name] = good
    record(11, "equational examples at depth 3", all(verdicts.values()), t.elapsed, 30.0, str(verdicts))


def _spi_terms(depth: int):
    base = [spi.Sym("a"), spi.Sym("b"), spi.ZERO]
    if depth == 0:
        return base
    sub = _spi_terms(depth - 1)
    return (base + [spi.Suc(m) for m in sub]
            + [spi.Pair(m, n) for m in sub for n in sub]
            + [spi.Encrypt(m, n) for m in sub for n in sub])


def _pruned(P) -> str:
    return canonical_key(prune_dead(P))


def _axiom_ok(P) -> bool:
    src = {_pruned(spi.encode_spi_proc(Q)) for Q in spi.spi_reduce(P)}
    tgt = {_pruned(R) for R in reductions(spi.encode_spi_proc(P))}
    return src == tgt and len(src) == 1


def test_12_spi_axioms():
    d2, d1 = _spi_terms(2), _spi_terms(1)
    out_d = lambda *ts: spi.SOut(spi.Sym("d"), ts[0] if len(ts) == 1 else spi.Pair(*ts), NIL)
    instances = []
    for M in d2:
        instances.append(spi.SMatch(M, M, OK))
        instances.append(spi.Par(spi.SOut(spi.Sym("c"), M, NIL), spi.SIn(spi.Sym("c"), "x", out_d(spi.Sym("x")))))
    for M, N in itertools.product(d1, d1):
        instances.append(spi.SLet("x", "y", spi.Pair(M, N), out_d(spi.Sym("y"), spi.Sym("x"))))
        instances.append(spi.SDecrypt(spi.Encrypt(M, N), "x", N, out_d(spi.Sym("x"))))
    for M in d1:
        instances.append(spi.SCaseInt(spi.Suc(M), OK, "x", out_d(spi.Sym("x"))))
    instances.append(spi.SCaseInt(spi.ZERO, OK, "x", out_d(spi.Sym("x"))))
    with Timer() as t:
        bad = [P for P in instances if not _axiom_ok(P)]
    record(12, "Spi axioms commute with the encoding", not bad, t.elapsed, 60.0,
           f"{len(instances)} instances, violations={len(bad)}")


def test_13_encoding_corpora():
    failures = []
    with Timer() as t:
        for lang, progs in (("linda", corpus.LINDA_PROGRAMS), ("spi", corpus.SPI_PROGRAMS)):
            for text in progs:
                rep = check_encoding(lang, parse(lang, text), 6)
                if not rep.ok:
                    failures.append((lang, text, [v.clause for v in rep.violations]))
    record(13, "check_encoding on 10 Linda and 10 Spi programs", not failures, t.elapsed, 120.0,
           f"failures={failures}")
