"""The bimodal language: bot, atoms, implication, [b] and [d].

Only these five constructors are ever stored. Negation, conjunction,
disjunction and the biconditional exist purely as input sugar and are
expanded by :func:`parse`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

IDENT_RE = re.compile(r"[a-z][a-z0-9_]*")
RESERVED = frozenset({"bot"})


class _Hashed:
    # formulas are hashed constantly by sequent sets; compute the hash once
    __slots__ = ()

    def __hash__(self):
        try:
            return self.__dict__["_hash"]
        except KeyError:
            h = hash((type(self).__name__,) + tuple(getattr(self, f) for f in self.__dataclass_fields__))
            object.__setattr__(self, "_hash", h)
            return h

    def __getstate__(self):
        # string hashes differ between processes
        return {k: v for k, v in self.__dict__.items() if k != "_hash"}


@dataclass(frozen=True)
class Bot(_Hashed):
    __hash__ = _Hashed.__hash__


@dataclass(frozen=True)
class Atom(_Hashed):
    name: str
    __hash__ = _Hashed.__hash__

    def __post_init__(self):
        if not isinstance(self.name, str) or IDENT_RE.fullmatch(self.name) is None:
            raise ValueError(f"invalid atom name {self.name!r}")
        if self.name in RESERVED:
            raise ValueError(f"{self.name!r} is reserved and cannot name an atom")


@dataclass(frozen=True)
class Imp(_Hashed):
    left: "Formula"
    right: "Formula"
    __hash__ = _Hashed.__hash__


@dataclass(frozen=True)
class Box(_Hashed):
    body: "Formula"
    __hash__ = _Hashed.__hash__


@dataclass(frozen=True)
class Tri(_Hashed):
    body: "Formula"
    __hash__ = _Hashed.__hash__


Formula = Union[Bot, Atom, Imp, Box, Tri]

BOT = Bot()


def neg(a: Formula) -> Formula:
    return Imp(a, BOT)


def disj(a: Formula, b: Formula) -> Formula:
    return Imp(Imp(a, BOT), b)


def conj(a: Formula, b: Formula) -> Formula:
    return Imp(Imp(a, Imp(b, BOT)), BOT)


def iff(a: Formula, b: Formula) -> Formula:
    return conj(Imp(a, b), Imp(b, a))


# ---------------------------------------------------------------------------
# parsing

class FormulaSyntaxError(ValueError):
    """Malformed formula text; ``offset`` is a byte offset into the UTF-8 input."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at byte offset {offset}")
        self.message = message
        self.offset = offset


_TOKEN_RE = re.compile(r"\s*(?:(<->|->|\[b\]|\[d\]|[~&|()])|([a-z][a-z0-9_]*))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    n = len(text)
    while True:
        while pos < n and text[pos].isspace():
            pos += 1
        if pos >= n:
            break
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", _byte_offset(text, pos))
        start = m.start(1) if m.group(1) is not None else m.start(2)
        if m.group(1) is not None:
            tokens.append(("op", m.group(1), start))
        else:
            word = m.group(2)
            tokens.append(("bot" if word == "bot" else "ident", word, start))
        pos = m.end()
    tokens.append(("eof", "", n))
    return tokens


def _byte_offset(text: str, index: int) -> int:
    return len(text[:index].encode("utf-8"))


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def error(self, message: str, tok=None):
        tok = tok or self.peek()
        return FormulaSyntaxError(message, _byte_offset(self.text, tok[2]))

    def accept(self, value: str) -> bool:
        kind, text, _ = self.peek()
        if kind == "op" and text == value:
            self.i += 1
            return True
        return False

    def parse(self) -> Formula:
        f = self.imp()
        if self.peek()[0] != "eof":
            raise self.error(f"unexpected token {self.peek()[1]!r}")
        return f

    def imp(self) -> Formula:
        left = self.iff()
        if self.accept("->"):
            return Imp(left, self.imp())
        return left

    def iff(self) -> Formula:
        f = self.disj()
        while self.accept("<->"):
            f = iff(f, self.disj())
        return f

    def disj(self) -> Formula:
        f = self.conj()
        while self.accept("|"):
            f = disj(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.unary()
        while self.accept("&"):
            f = conj(f, self.unary())
        return f

    def unary(self) -> Formula:
        if self.accept("~"):
            return neg(self.unary())
        if self.accept("[b]"):
            return Box(self.unary())
        if self.accept("[d]"):
            return Tri(self.unary())
        return self.atom()

    def atom(self) -> Formula:
        kind, text, _ = tok = self.peek()
        if kind == "bot":
            self.i += 1
            return BOT
        if kind == "ident":
            self.i += 1
            return Atom(text)
        if self.accept("("):
            f = self.imp()
            if not self.accept(")"):
                raise self.error("expected ')'")
            return f
        if kind == "eof":
            raise self.error("unexpected end of input", tok)
        raise self.error(f"unexpected token {text!r}", tok)


def parse(text: str) -> Formula:
    """Parse concrete syntax into a desugared formula.

    ``->`` is right-associative and binds weakest; ``<->``, ``|`` and ``&``
    associate to the left, and ``~``, ``[b]``, ``[d]`` bind tightest.
    """
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# printing

@lru_cache(maxsize=None)
def to_str(f: Formula) -> str:
    """Canonical text with minimal parentheses; never emits sugar."""
    if isinstance(f, Bot):
        return "bot"
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Imp):
        left = to_str(f.left)
        if isinstance(f.left, Imp):
            left = f"({left})"
        return f"{left} -> {to_str(f.right)}"
    prefix = "[b]" if isinstance(f, Box) else "[d]"
    body = to_str(f.body)
    if isinstance(f.body, Imp):
        body = f"({body})"
    return prefix + body


print_formula = to_str


# ---------------------------------------------------------------------------
# measures

def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, Imp):
        return (f.left, f.right)
    if isinstance(f, (Box, Tri)):
        return (f.body,)
    return ()


@lru_cache(maxsize=None)
def subformula_closure(f: Formula) -> frozenset:
    out = {f}
    for c in children(f):
        out |= subformula_closure(c)
    return frozenset(out)


def closure_of(formulas) -> frozenset:
    out: set = set()
    for f in formulas:
        out |= subformula_closure(f)
    return frozenset(out)


@lru_cache(maxsize=None)
def modal_depth(f: Formula) -> int:
    if isinstance(f, Imp):
        return max(modal_depth(f.left), modal_depth(f.right))
    if isinstance(f, (Box, Tri)):
        return 1 + modal_depth(f.body)
    return 0


def size(f: Formula) -> int:
    """Number of AST nodes."""
    return 1 + sum(size(c) for c in children(f))


def height(f: Formula) -> int:
    cs = children(f)
    return 0 if not cs else 1 + max(height(c) for c in cs)


def atoms(f: Formula) -> frozenset[str]:
    return frozenset(g.name for g in subformula_closure(f) if isinstance(g, Atom))


def sort_key(f: Formula) -> str:
    return to_str(f)
