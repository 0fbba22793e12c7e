import random

import gen
from cpc import corpus
from cpc.process import (
    barbs, canonical, canonical_key, free_names_proc, has_success, prune_dead, reachable, reductions,
    rename_proc, struct_eq, succeeds,
)
from cpc.syntax import parse_process as P


def key(text):
    return canonical_key(P(text))


def test_free_names():
    assert free_names_proc(P(r"(new n) (n . \x -> x . m)")) == {"m"}
    assert free_names_proc(P(r"\x . #a -> b")) == {"a", "b"}


def test_structural_axioms():
    assert key("a | b") == key("b | a")
    assert key("a | (b | c)") == key("(a | b) | c")
    assert key("a | 0") == key("a")
    assert key("(new n) 0") == key("0")
    assert key("(new n) (new m) n . m") == key("(new m) (new n) n . m")
    assert key("(new n) (n | a)") == key("((new n) n) | a")
    assert key("(new n) n . a") == key("(new m) m . a")


def test_replication_is_not_unfolded():
    assert not struct_eq(P("!a"), P("a | !a"))
    assert struct_eq(P("!a"), P("!a"))


def test_canonical_idempotent():
    rng = random.Random(1)
    for _ in range(300):
        Q = gen.process(rng, 7)
        C = canonical(Q)
        assert canonical_key(C) == canonical_key(Q)
        assert canonical(C) == C


def test_trade_reduction():
    R = reductions(P(r"(new n)(s . n -> n . b . \x -> B . x -> ok) | s . \m -> m . \y . c -> S . y -> ok"))
    assert len(R) == 1
    assert canonical_key(R[0]) == key(r"(new n)(n . b . \x -> B . x -> ok | n . \y . c -> S . y -> ok)")


def test_reduction_duplicate_threads():
    R = reductions(P(r"x -> ok | x -> ok"))
    assert [canonical_key(r) for r in R] == [key("ok | ok")]


def test_trade_corpus_reaches_completion():
    final = key(corpus.TRADE_FINAL)
    for name, depth in (("solution1", 2), ("solution2", 4), ("solution3", 4)):
        states = {d: set() for d in range(depth + 1)}
        for d, Q in reachable(corpus.trade(name), depth):
            states[d].add(canonical_key(Q))
        assert final in states[depth], name
        assert all(final not in states[d] for d in range(depth))


def test_barbs():
    assert barbs(P(r"\x . a -> 0")) == {frozenset({"a"})}
    assert barbs(P(r"(new n) (n . a -> 0)")) == {frozenset({"a"})}
    assert barbs(P(r"(new n) (#n . a -> 0)")) == set()
    assert barbs(P("!(a -> 0)")) == {frozenset({"a"})}


def test_barbs_invariant_under_congruence():
    rng = random.Random(2)
    for _ in range(200):
        Q = gen.process(rng, 6)
        assert barbs(Q) == barbs(canonical(Q))


def test_succeeds():
    assert has_success(P("a | ok"))
    assert not succeeds(P(r"\x -> ok"), 5)
    assert succeeds(P(r"\x -> ok | a -> 0"), 1)
    assert not succeeds(P(r"\x -> ok | a -> 0"), 0)


def test_prune_dead():
    assert canonical_key(prune_dead(P(r"(new n) (#n . #0 -> a) | b"))) == key("b")
    assert canonical_key(prune_dead(P(r"(new n) (#n . #a -> ok | #n . \x -> 0)"))) == key("0")
    assert canonical_key(prune_dead(P(r"(new n) (#n . a -> ok | #n . \x -> 0)"))) == \
        key(r"(new n) (#n . a -> ok | #n . \x -> 0)")
    assert canonical_key(prune_dead(P(r"(new n) (n -> 0)"))) == key(r"(new n) (n -> 0)")


def test_free_names_shrink_under_reduction():
    rng = random.Random(3)
    seen = 0
    for _ in range(300):
        Q = gen.interacting_process(rng, 6)
        for R in reductions(Q):
            seen += 1
            assert free_names_proc(R) <= free_names_proc(Q)
    assert seen > 50


def test_renaming_preserves_reductions():
    rng = random.Random(4)
    for _ in range(150):
        Q = gen.interacting_process(rng, 6)
        ren = {"a": "c", "b": "d"}
        before = sorted(canonical_key(rename_proc(R, ren)) for R in reductions(Q))
        after = sorted(canonical_key(R) for R in reductions(rename_proc(Q, ren)))
        assert before == after
