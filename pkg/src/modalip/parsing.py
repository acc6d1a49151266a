"""ASCII concrete syntax: recursive-descent parser and minimal-parenthesis printer.

Grammar, loosest binding first::

    imp   := disj ('->' imp)?                 right associative
    disj  := conj ('|' conj)*                 left associative
    conj  := unary ('&' unary)*               left associative
    unary := ('~' | '[]' | '<>') unary | atom
    atom  := letter | 'true' | 'false' | '(' imp ')' | 'nabla' '{' [imp (',' imp)*] '}'
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ParseError
from .formula import (
    AND, BOT, BOT_K, BOX, DIA, NABLA, NOT, OR, PROP, TOP, TOP_K,
    And, Box, Diamond, Formula, Nabla, Neg, Or, Prop, implies,
)

_KEYWORDS = {"true", "false", "nabla"}
_TOKEN_RE = re.compile(
    r"\s*(?:(?P<arrow>->)|(?P<box>\[\])|(?P<dia><>)|(?P<sym>[~&|(){},])|(?P<ident>[a-z][a-zA-Z0-9_]*))"
)


@dataclass(frozen=True)
class _Tok:
    kind: str  # the literal symbol, 'ident', or 'eof'
    text: str
    offset: int  # byte offset


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    pos = 0
    # byte offsets for error messages; character positions for scanning
    encoded_prefix = 0
    while True:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            rest = text[pos:]
            if rest.strip() == "":
                toks.append(_Tok("eof", "", len(text.encode("utf-8"))))
                return toks
            bad = pos + (len(rest) - len(rest.lstrip()))
            raise ParseError(f"unexpected character {text[bad]!r}", len(text[:bad].encode("utf-8")),
                             frozenset({"letter", "true", "false", "~", "[]", "<>", "(", "nabla"}))
        start = m.start(m.lastgroup)
        encoded_prefix = len(text[:start].encode("utf-8"))
        group = m.lastgroup
        value = m.group(group)
        if group == "ident":
            kind = value if value in _KEYWORDS else "ident"
        else:
            kind = value
        toks.append(_Tok(kind, value, encoded_prefix))
        pos = m.end()


_ATOM_START = frozenset({"letter", "true", "false", "(", "nabla", "~", "[]", "<>"})


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def cur(self) -> _Tok:
        return self.toks[self.i]

    def take(self, kind: str) -> _Tok:
        tok = self.cur
        if tok.kind != kind:
            raise ParseError(f"unexpected {tok.text or 'end of input'!r}", tok.offset, frozenset({kind}))
        self.i += 1
        return tok

    def parse(self) -> Formula:
        f = self.imp()
        if self.cur.kind != "eof":
            raise ParseError(f"unexpected {self.cur.text!r}", self.cur.offset,
                             frozenset({"->", "|", "&", "end of input"}))
        return f

    def imp(self) -> Formula:
        left = self.disj()
        if self.cur.kind == "->":
            self.i += 1
            return implies(left, self.imp())
        return left

    def disj(self) -> Formula:
        f = self.conj()
        while self.cur.kind == "|":
            self.i += 1
            f = Or(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.unary()
        while self.cur.kind == "&":
            self.i += 1
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        k = self.cur.kind
        if k == "~":
            self.i += 1
            return Neg(self.unary())
        if k == "[]":
            self.i += 1
            return Box(self.unary())
        if k == "<>":
            self.i += 1
            return Diamond(self.unary())
        return self.atom()

    def atom(self) -> Formula:
        tok = self.cur
        if tok.kind == "ident":
            self.i += 1
            return Prop(tok.text)
        if tok.kind == "true":
            self.i += 1
            return TOP
        if tok.kind == "false":
            self.i += 1
            return BOT
        if tok.kind == "(":
            self.i += 1
            f = self.imp()
            self.take(")")
            return f
        if tok.kind == "nabla":
            self.i += 1
            self.take("{")
            members: list[Formula] = []
            if self.cur.kind != "}":
                members.append(self.imp())
                while self.cur.kind == ",":
                    self.i += 1
                    members.append(self.imp())
            self.take("}")
            return Nabla(members)
        raise ParseError(f"unexpected {tok.text or 'end of input'!r}", tok.offset, _ATOM_START)


def parse(text: str) -> Formula:
    """Parse ASCII formula text into an interned formula."""
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# printing

_LEVEL = {OR: 1, AND: 2}
_text_cache: dict[int, str] = {}


def to_text(f: Formula) -> str:
    hit = _text_cache.get(f.uid)
    if hit is not None:
        return hit
    out = _render(f)
    _text_cache[f.uid] = out
    return out


def _level(f: Formula) -> int:
    return _LEVEL.get(f.kind, 3)


def _wrap(f: Formula, min_level: int) -> str:
    s = to_text(f)
    return s if _level(f) >= min_level else f"({s})"


def _render(f: Formula) -> str:
    k = f.kind
    if k == PROP:
        return f.name
    if k == TOP_K:
        return "true"
    if k == BOT_K:
        return "false"
    if k == NOT:
        return "~" + _wrap(f.child, 3)
    if k == BOX:
        return "[]" + _wrap(f.child, 3)
    if k == DIA:
        return "<>" + _wrap(f.child, 3)
    if k == AND:
        return f"{_wrap(f.left, 2)} & {_wrap(f.right, 3)}"
    if k == OR:
        return f"{_wrap(f.left, 1)} | {_wrap(f.right, 2)}"
    if k == NABLA:
        return "nabla{" + ", ".join(sorted(to_text(c) for c in f.children)) + "}"
    raise AssertionError(k)
