import random

import pytest

import gen
from cpc import corpus, linda, spi
from cpc.patterns import Bind, Comp, Prot, Var
from cpc.process import OK, Case, canonical, show, struct_eq
from cpc.syntax import ParseError, parse, parse_pattern, parse_process


def test_trade_pattern():
    P = parse_process(r"#ABCShares . sharesID . \x -> ok")
    assert P == Case(Comp(Comp(Prot("ABCShares"), Var("sharesID")), Bind("x")), OK)


def test_composition_is_left_associative():
    assert parse_pattern("a . b . c") == Comp(Comp(Var("a"), Var("b")), Var("c"))


@pytest.mark.parametrize("text, where", [
    (r"\x . \x -> 0", "duplicate binding name 'x'"),
    ("a -> (b", "1:8"),
    ("a ->\n  $", "2:3"),
])
def test_errors_carry_positions(text, where):
    with pytest.raises(ParseError, match=where):
        parse_process(text)


@pytest.mark.parametrize("name", sorted(corpus.TRADE))
def test_trade_corpus_round_trip(name):
    P = corpus.trade(name)
    assert parse_process(show(P)) == P


@pytest.mark.parametrize("unicode", [False, True])
def test_random_round_trip(unicode):
    rng = random.Random(41)
    for _ in range(300):
        P = gen.process(rng, 7)
        text = show(canonical(P), unicode=unicode)
        assert show(parse_process(text), unicode=unicode) == text
        assert struct_eq(parse_process(show(P, unicode=unicode)), P)


def test_dialect_round_trips():
    for text in corpus.LINDA_PROGRAMS:
        P = parse("linda", text)
        assert parse("linda", linda.show(P)) == P
    for text in corpus.SPI_PROGRAMS:
        P = parse("spi", text)
        assert parse("spi", spi.show(P)) == P


def test_unknown_dialect():
    with pytest.raises(ValueError):
        parse("fusion", "0")
