"""Parsers for the CPC, Linda and Spi surface syntaxes.

CPC::

    P ::= 0 | ok | p | p -> P | P | P | !P | (new x y) P | (P)
    p ::= \\x | x | #x | p . p | (p)

``->`` chains to the right and binds tighter than ``|``; ``!`` and
``(new ..)`` apply to the following unary process.  Unicode forms
(λ, ⌜x⌝, •, →, ν) are accepted as well.  ``--`` starts a comment.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable

from .patterns import Bind, Comp, Pattern, PatternError, Prot, Var, check_well_formed
from .process import NIL, OK, Case, Par, Process, Rep, Res, par
from . import linda, spi


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Token:
    kind: str        # "id", "num", "op", "eof"
    text: str
    line: int
    col: int


_UNICODE = {"λ": "\\", "•": ".", "→": "->", "⌜": "#", "⌝": "", "ν": "new "}
_TOKEN = re.compile(r"\s+|--[^\n]*|(?P<id>[A-Za-z0-9_]+)|(?P<op>->|[\\#.()|!,=<>{}\[\]:?;])")


def tokenize(text: str) -> list[Token]:
    tokens = []
    line, col, i = 1, 1, 0
    while i < len(text):
        ch = text[i]
        if ch in _UNICODE:
            rep = _UNICODE[ch]
            if rep.strip():
                kind = "op" if rep != "new " else "id"
                tokens.append(Token(kind, rep.strip(), line, col))
            i += 1
            col += 1
            continue
        m = _TOKEN.match(text, i)
        if not m:
            raise ParseError(f"unexpected character {ch!r}", line, col)
        s = m.group(0)
        if m.lastgroup == "id":
            tokens.append(Token("id", s, line, col))
        elif m.lastgroup == "op":
            tokens.append(Token("op", s, line, col))
        nl = s.count("\n")
        if nl:
            line += nl
            col = len(s) - s.rfind("\n")
        else:
            col += len(s)
        i = m.end()
    tokens.append(Token("eof", "", line, col))
    return tokens


class _Parser:
    keywords: frozenset = frozenset()

    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind != "eof"

    def error(self, msg: str, tok: Token | None = None):
        t = tok or self.tok
        found = "end of input" if t.kind == "eof" else repr(t.text)
        raise ParseError(f"{msg}, found {found}", t.line, t.col)

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}")
        t = self.tok
        self.i += 1
        return t

    def ident(self, what: str = "name") -> str:
        t = self.tok
        if t.kind != "id" or t.text in self.keywords:
            self.error(f"expected {what}")
        self.i += 1
        return t.text

    def finish(self, result):
        if self.tok.kind != "eof":
            self.error("unexpected input")
        return result

    # shared process structure ------------------------------------------
    def parallel(self):
        items = [self.unary()]
        while self.at("|"):
            self.i += 1
            items.append(self.unary())
        return par(*items) if len(items) > 1 else items[0]

    def structural(self):
        """``!``, ``(new ..)``, ``0``, ``ok``; ``None`` if the token starts something else."""
        if self.at("!"):
            self.i += 1
            return Rep(self.unary())
        if self.at("(") and self.peek().text == "new":
            self.i += 2
            names = [self.ident()]
            while self.tok.kind == "id" and self.tok.text not in self.keywords or self.at(","):
                if self.at(","):
                    self.i += 1
                names.append(self.ident())
            self.expect(")")
            body = self.unary()
            for n in reversed(names):
                body = Res(n, body)
            return body
        if self.at("ok"):
            self.i += 1
            return OK
        return None

    def group(self):
        self.expect("(")
        P = self.parallel()
        self.expect(")")
        return P


class CPCParser(_Parser):
    keywords = frozenset({"ok", "new"})

    def process(self) -> Process:
        return self.finish(self.parallel())

    def unary(self) -> Process:
        s = self.structural()
        if s is not None:
            return s
        if self.at("0") and self.peek().text not in (".", "->"):
            self.i += 1
            return NIL
        if self.at("("):
            save = self.i
            try:
                p, start = self.pattern_checked()
                if self.at("->") or self.tok.text in ("|", ")") or self.tok.kind == "eof":
                    return self.case_rest(p, start)
            except ParseError:
                pass
            self.i = save
            return self.group()
        p, start = self.pattern_checked()
        return self.case_rest(p, start)

    def case_rest(self, p: Pattern, start: Token) -> Process:
        if self.at("->"):
            self.i += 1
            return Case(p, self.unary())
        return Case(p, NIL)

    def pattern_checked(self) -> tuple[Pattern, Token]:
        start = self.tok
        p = self.pattern()
        try:
            check_well_formed(p)
        except PatternError as e:
            raise ParseError(str(e), start.line, start.col) from None
        return p, start

    def pattern(self) -> Pattern:
        p = self.patom()
        while self.at("."):
            self.i += 1
            p = Comp(p, self.patom())
        return p

    def patom(self) -> Pattern:
        if self.at("\\"):
            self.i += 1
            return Bind(self.ident())
        if self.at("#"):
            self.i += 1
            return Prot(self.ident())
        if self.at("("):
            self.i += 1
            p = self.pattern()
            self.expect(")")
            return p
        return Var(self.ident("pattern"))


class LindaParser(_Parser):
    keywords = frozenset({"ok", "new", "in", "out"})

    def process(self):
        return self.finish(self.parallel())

    def unary(self):
        s = self.structural()
        if s is not None:
            return s
        if self.at("0"):
            self.i += 1
            return NIL
        if self.at("out"):
            self.i += 1
            self.expect("(")
            data = []
            while not self.at(")"):
                data.append(self.ident())
                if not self.at(")"):
                    self.expect(",")
            self.expect(")")
            return linda.LOut(tuple(data))
        if self.at("in"):
            start = self.tok
            self.i += 1
            self.expect("(")
            fields = []
            while not self.at(")"):
                if self.at("\\"):
                    self.i += 1
                    fields.append(linda.FBind(self.ident()))
                elif self.at("="):
                    self.i += 1
                    fields.append(linda.FExact(self.ident()))
                else:
                    self.error("expected template field '\\x' or '=b'")
                if not self.at(")"):
                    self.expect(",")
            self.expect(")")
            body = NIL
            if self.at("."):
                self.i += 1
                body = self.unary()
            try:
                return linda.LIn(tuple(fields), body)
            except PatternError as e:
                raise ParseError(str(e), start.line, start.col) from None
        if self.at("("):
            return self.group()
        self.error("expected a Linda process")


class SpiParser(_Parser):
    keywords = frozenset({"ok", "new", "let", "in", "case", "of", "is", "suc"})

    def process(self):
        return self.finish(self.parallel())

    def unary(self):
        s = self.structural()
        if s is not None:
            return s
        if self.at("0") and self.peek().text not in ("!", "?"):
            self.i += 1
            return NIL
        if self.at("["):
            self.i += 1
            M = self.term()
            self.expect("is")
            N = self.term()
            self.expect("]")
            return spi.SMatch(M, N, self.unary())
        if self.at("let"):
            start = self.tok
            self.i += 1
            self.expect("(")
            x = self.ident()
            self.expect(",")
            y = self.ident()
            self.expect(")")
            self.expect("=")
            M = self.term()
            self.expect("in")
            try:
                return spi.SLet(x, y, M, self.unary())
            except spi.SpiError as e:
                raise ParseError(str(e), start.line, start.col) from None
        if self.at("case"):
            self.i += 1
            M = self.term()
            self.expect("of")
            if self.at("{"):
                self.i += 1
                x = self.ident()
                self.expect("}")
                N = self.term()
                self.expect(":")
                return spi.SDecrypt(M, x, N, self.unary())
            self.expect("0")
            self.expect(":")
            P = self.unary()
            self.expect("suc")
            self.expect("(")
            x = self.ident()
            self.expect(")")
            self.expect(":")
            return spi.SCaseInt(M, P, x, self.unary())
        if self.at("("):
            save = self.i
            try:
                return self.prefix()
            except ParseError:
                self.i = save
            return self.group()
        return self.prefix()

    def prefix(self):
        M = self.term()
        if self.at("!"):
            self.i += 1
            self.expect("<")
            N = self.term()
            self.expect(">")
            return spi.SOut(M, N, self.continuation())
        if self.at("?"):
            self.i += 1
            self.expect("(")
            x = self.ident()
            self.expect(")")
            return spi.SIn(M, x, self.continuation())
        self.error("expected '!' or '?' after a channel term")

    def continuation(self):
        if self.at("."):
            self.i += 1
            return self.unary()
        return NIL

    def term(self):
        t = self.tok
        if self.at("("):
            self.i += 1
            M = self.term()
            self.expect(",")
            N = self.term()
            self.expect(")")
            return spi.Pair(M, N)
        if self.at("{"):
            self.i += 1
            M = self.term()
            self.expect("}")
            return spi.Encrypt(M, self.term())
        if self.at("suc"):
            self.i += 1
            self.expect("(")
            M = self.term()
            self.expect(")")
            return spi.Suc(M)
        if t.kind == "id" and t.text.isdigit():
            self.i += 1
            v = int(t.text)
            return spi.ZERO if v == 0 else spi.Int(v)
        name = self.ident("term")
        if name in spi.RESERVED:
            raise ParseError(f"reserved name {name!r} used in a Spi program", t.line, t.col)
        return spi.Sym(name)


PARSERS: dict[str, Callable] = {
    "cpc": lambda text: CPCParser(text).process(),
    "linda": lambda text: LindaParser(text).process(),
    "spi": lambda text: SpiParser(text).process(),
}


def parse(dialect: str, text: str):
    """Parse ``text`` in the given dialect (``cpc``, ``linda`` or ``spi``)."""
    try:
        return PARSERS[dialect](text)
    except KeyError:
        raise ValueError(f"unknown dialect {dialect!r}") from None


def parse_process(text: str) -> Process:
    return parse("cpc", text)


def parse_pattern(text: str) -> Pattern:
    p = CPCParser(text)
    pat, _ = p.pattern_checked()
    return p.finish(pat)
