"""Formulas of the logic of unknowable truths.

The stored tree only uses the primitive constructors ``Atom``, ``Top``,
``Neg``, ``And``, ``Know``, ``Ann`` and ``Unk``.  Everything else
(disjunction, implication, bi-implication, the dual announcement ``<a>``,
the unknown-truth operator ``B_i`` and ``bot``) is expanded by the parser
or by the helper constructors below.

Concrete syntax::

    formula := iff
    iff     := imp ("<->" imp)*
    imp     := or ("->" imp)?
    or      := and ("|" and)*
    and     := unary ("&" unary)*
    unary   := "~" unary | "K_" IDENT unary | "U_" IDENT unary | "B_" IDENT unary
             | "[" formula "]" unary | "<" formula ">" unary
             | "top" | "bot" | IDENT | "(" formula ")"
    IDENT   := [a-z][a-zA-Z0-9]*
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Iterator
from weakref import WeakValueDictionary

__all__ = [
    "Formula", "Atom", "Top", "Neg", "And", "Know", "Ann", "Unk", "TOP", "BOT",
    "ParseError", "Complexity",
    "parse", "render", "measures", "size", "udepth", "less_complex",
    "is_el", "is_pal", "atoms", "agents", "subformulas",
    "implies", "disj", "iff", "bullet", "diamond", "conj_all", "disj_all",
    "random_formula",
]

IDENT_RE = re.compile(r"[a-z][a-zA-Z0-9]*")
RESERVED = frozenset({"top", "bot"})


class Formula:
    """Immutable, hash-consed formula node.

    Constructing a node equal to a live one returns that same object, so
    equality on large shared formulas is usually an identity check.
    """

    __slots__ = ("_hash", "__weakref__")
    _fields: tuple[str, ...] = ()
    _interned: WeakValueDictionary = WeakValueDictionary()

    def __new__(cls, *args):
        key = (cls, *args)
        node = Formula._interned.get(key)
        if node is None:
            node = object.__new__(cls)
            for name, value in zip(cls._fields, args):
                object.__setattr__(node, name, value)
            object.__setattr__(node, "_hash", hash((cls.__name__, *args)))
            Formula._interned[key] = node
        return node

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if type(other) is not type(self) or self._hash != other._hash:
            return False
        return all(getattr(self, f) == getattr(other, f) for f in self._fields)

    def __ne__(self, other):
        return not self == other

    def __reduce__(self):
        return (type(self), tuple(getattr(self, f) for f in self._fields))

    def __repr__(self):
        args = ", ".join(repr(getattr(self, f)) for f in self._fields)
        return f"{type(self).__name__}({args})"

    def __str__(self):
        return render(self)


def _check_name(name: str, what: str) -> None:
    if not isinstance(name, str) or not IDENT_RE.fullmatch(name):
        raise ValueError(f"invalid {what} name {name!r}")


class Atom(Formula):
    __slots__ = ("name",)
    _fields = ("name",)
    __match_args__ = ("name",)

    def __new__(cls, name: str):
        _check_name(name, "atom")
        if name in RESERVED:
            raise ValueError(f"invalid atom name {name!r}")
        return super().__new__(cls, name)


class Top(Formula):
    __slots__ = ()

    def __new__(cls):
        return super().__new__(cls)


class Neg(Formula):
    __slots__ = ("sub",)
    _fields = ("sub",)
    __match_args__ = ("sub",)

    def __new__(cls, sub: Formula):
        return super().__new__(cls, sub)


class And(Formula):
    __slots__ = ("left", "right")
    _fields = ("left", "right")
    __match_args__ = ("left", "right")

    def __new__(cls, left: Formula, right: Formula):
        return super().__new__(cls, left, right)


class Know(Formula):
    __slots__ = ("agent", "sub")
    _fields = ("agent", "sub")
    __match_args__ = ("agent", "sub")

    def __new__(cls, agent: str, sub: Formula):
        _check_name(agent, "agent")
        return super().__new__(cls, agent, sub)


class Ann(Formula):
    """Public announcement ``[announcement] body``."""

    __slots__ = ("announcement", "body")
    _fields = ("announcement", "body")
    __match_args__ = ("announcement", "body")

    def __new__(cls, announcement: Formula, body: Formula):
        return super().__new__(cls, announcement, body)


class Unk(Formula):
    """``U_agent sub``: sub is an unknowable truth for agent."""

    __slots__ = ("agent", "sub")
    _fields = ("agent", "sub")
    __match_args__ = ("agent", "sub")

    def __new__(cls, agent: str, sub: Formula):
        _check_name(agent, "agent")
        return super().__new__(cls, agent, sub)


TOP = Top()
BOT = Neg(TOP)


# -- derived connectives -------------------------------------------------------

def implies(a: Formula, b: Formula) -> Formula:
    return Neg(And(a, Neg(b)))


def disj(a: Formula, b: Formula) -> Formula:
    return Neg(And(Neg(a), Neg(b)))


def iff(a: Formula, b: Formula) -> Formula:
    return And(implies(a, b), implies(b, a))


def bullet(agent: str, a: Formula) -> Formula:
    """Unknown truth: ``a & ~K_agent a``."""
    return And(a, Neg(Know(agent, a)))


def diamond(announcement: Formula, body: Formula) -> Formula:
    return Neg(Ann(announcement, Neg(body)))


def conj_all(items: Iterable[Formula]) -> Formula:
    """Left-folded conjunction; the empty conjunction is ``top``."""
    items = list(items)
    return reduce(And, items) if items else TOP


def disj_all(items: Iterable[Formula]) -> Formula:
    items = list(items)
    return reduce(disj, items) if items else BOT


# -- parsing -------------------------------------------------------------------

class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at offset {position}")
        self.message = message
        self.position = position


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<op><->|->|[~&|()\[\]<>])
  | (?P<modal>[KUB]_(?P<agent>[a-z][a-zA-Z0-9]*))
  | (?P<ident>[a-z][a-zA-Z0-9]*)
    """,
    re.VERBOSE,
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unknown token {text[pos]!r}", pos)
        if m.group("modal"):
            tokens.append((m.group("modal")[0], m.group("agent"), pos))
        elif m.group("op"):
            tokens.append(("op", m.group("op"), pos))
        elif m.group("ident"):
            word = m.group("ident")
            tokens.append(("kw" if word in RESERVED else "ident", word, pos))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def at_op(self, op: str) -> bool:
        kind, value, _ = self.peek()
        return kind == "op" and value == op

    def expect(self, op: str):
        kind, value, pos = self.peek()
        if kind != "op" or value != op:
            found = "end of input" if kind == "eof" else repr(value)
            raise ParseError(f"expected {op!r}, found {found}", pos)
        self.i += 1

    def formula(self) -> Formula:
        left = self.imp()
        while self.at_op("<->"):
            self.take()
            left = iff(left, self.imp())
        return left

    def imp(self) -> Formula:
        left = self.or_()
        if self.at_op("->"):
            self.take()
            return implies(left, self.imp())
        return left

    def or_(self) -> Formula:
        left = self.and_()
        while self.at_op("|"):
            self.take()
            left = disj(left, self.and_())
        return left

    def and_(self) -> Formula:
        left = self.unary()
        while self.at_op("&"):
            self.take()
            left = And(left, self.unary())
        return left

    def unary(self) -> Formula:
        kind, value, pos = self.take()
        if kind == "op":
            if value == "~":
                return Neg(self.unary())
            if value == "[":
                ann = self.formula()
                self.expect("]")
                return Ann(ann, self.unary())
            if value == "<":
                ann = self.formula()
                self.expect(">")
                return diamond(ann, self.unary())
            if value == "(":
                inner = self.formula()
                self.expect(")")
                return inner
        elif kind == "K":
            return Know(value, self.unary())
        elif kind == "U":
            return Unk(value, self.unary())
        elif kind == "B":
            return bullet(value, self.unary())
        elif kind == "kw":
            return TOP if value == "top" else BOT
        elif kind == "ident":
            return Atom(value)
        elif kind == "eof":
            raise ParseError("unexpected end of input", pos)
        raise ParseError(f"unexpected token {value!r}", pos)


def parse(text: str) -> Formula:
    """Parse concrete syntax into a primitive formula tree.

    Raises ParseError carrying the offending character offset.
    """
    parser = _Parser(text)
    result = parser.formula()
    kind, value, pos = parser.peek()
    if kind != "eof":
        raise ParseError(f"unexpected token {value!r}", pos)
    return result


# -- rendering -----------------------------------------------------------------

_IFF, _IMP, _OR, _AND, _UNARY = 1, 2, 3, 4, 5


def _as_implication(f: Formula):
    match f:
        case Neg(And(a, Neg(b))):
            return a, b
    return None


def _as_disjunction(f: Formula):
    match f:
        case Neg(And(Neg(And(_, Neg(_)) as a), Neg(_))) if _as_bullet(a) is None:
            return None  # reads better as (x -> y) -> z
        case Neg(And(Neg(a), Neg(b))):
            return a, b
    return None


def _as_iff(f: Formula):
    match f:
        case And(Neg(And(a, Neg(b))), Neg(And(b2, Neg(a2)))) if a == a2 and b == b2:
            return a, b
    return None


def _as_bullet(f: Formula):
    match f:
        case And(a, Neg(Know(agent, a2))) if a == a2:
            return agent, a
    return None


def _as_diamond(f: Formula):
    match f:
        case Neg(Ann(ann, Neg(body))):
            return ann, body
    return None


def _render(f: Formula, sugar: bool) -> tuple[str, int]:
    """Return the text of ``f`` and the precedence level of its head."""

    def at(g: Formula, level: int) -> str:
        text, own = _render(g, sugar)
        return f"({text})" if own < level else text

    if sugar:
        if f == BOT:
            return "bot", _UNARY
        if (parts := _as_diamond(f)) is not None:
            ann, body = parts
            return f"<{_render(ann, sugar)[0]}> {at(body, _UNARY)}", _UNARY
        if (parts := _as_disjunction(f)) is not None:
            a, b = parts
            return f"{at(a, _OR)} | {at(b, _AND)}", _OR
        if (parts := _as_implication(f)) is not None:
            a, b = parts
            return f"{at(a, _OR)} -> {at(b, _IMP)}", _IMP
        if (parts := _as_iff(f)) is not None:
            a, b = parts
            return f"{at(a, _IFF)} <-> {at(b, _IMP)}", _IFF
        if (parts := _as_bullet(f)) is not None:
            agent, a = parts
            return f"B_{agent} {at(a, _UNARY)}", _UNARY

    match f:
        case Atom(name):
            return name, _UNARY
        case Top():
            return "top", _UNARY
        case Neg(sub):
            return "~" + at(sub, _UNARY), _UNARY
        case And(left, right):
            return f"{at(left, _AND)} & {at(right, _UNARY)}", _AND
        case Know(agent, sub):
            return f"K_{agent} {at(sub, _UNARY)}", _UNARY
        case Unk(agent, sub):
            return f"U_{agent} {at(sub, _UNARY)}", _UNARY
        case Ann(ann, body):
            return f"[{_render(ann, sugar)[0]}] {at(body, _UNARY)}", _UNARY
    raise TypeError(f"not a formula: {f!r}")


def render(f: Formula, sugar: bool = True) -> str:
    """Render with minimal parentheses.

    With ``sugar`` the derived connectives are folded back into their
    abbreviations; either way ``parse(render(f)) == f``.
    """
    return _render(f, sugar)[0]


# -- measures ------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class Complexity:
    """Ordered lexicographically: U-depth first, then size."""

    udepth: int
    size: int


def measures(f: Formula) -> Complexity:
    cache: dict[Formula, Complexity] = {}

    def go(g: Formula) -> Complexity:
        hit = cache.get(g)
        if hit is not None:
            return hit
        match g:
            case Atom() | Top():
                c = Complexity(0, 1)
            case Neg(sub) | Know(_, sub):
                inner = go(sub)
                c = Complexity(inner.udepth, inner.size + 1)
            case And(left, right):
                a, b = go(left), go(right)
                c = Complexity(max(a.udepth, b.udepth), a.size + b.size + 1)
            case Ann(ann, body):
                a, b = go(ann), go(body)
                c = Complexity(a.udepth + b.udepth, (5 + a.size) * b.size)
            case Unk(_, sub):
                inner = go(sub)
                c = Complexity(inner.udepth + 1, inner.size + 1)
            case _:
                raise TypeError(f"not a formula: {g!r}")
        cache[g] = c
        return c

    return go(f)


def size(f: Formula) -> int:
    return measures(f).size


def udepth(f: Formula) -> int:
    return measures(f).udepth


def less_complex(f: Formula, g: Formula) -> bool:
    return measures(f) < measures(g)


# -- fragments and traversal ---------------------------------------------------

def subformulas(f: Formula) -> Iterator[Formula]:
    """Pre-order traversal, children left to right."""
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        match g:
            case Neg(sub) | Know(_, sub) | Unk(_, sub):
                stack.append(sub)
            case And(left, right):
                stack.extend((right, left))
            case Ann(ann, body):
                stack.extend((body, ann))


def is_el(f: Formula) -> bool:
    return not any(isinstance(g, (Ann, Unk)) for g in subformulas(f))


def is_pal(f: Formula) -> bool:
    return not any(isinstance(g, Unk) for g in subformulas(f))


def atoms(f: Formula) -> set[str]:
    return {g.name for g in subformulas(f) if isinstance(g, Atom)}


def agents(f: Formula) -> set[str]:
    return {g.agent for g in subformulas(f) if isinstance(g, (Know, Unk))}


# -- random generation ---------------------------------------------------------

def random_formula(rng, depth: int, atom_names=("p", "q"), agent_names=("i",),
                   *, announcements: bool = True, unknowability: bool = True) -> Formula:
    """Random primitive formula of nesting depth at most ``depth``.

    ``rng`` is a ``random.Random``.  Switch off ``announcements`` and
    ``unknowability`` to stay inside the epistemic fragment.
    """
    if depth <= 0 or rng.random() < 0.2:
        if rng.random() < 0.1:
            return TOP
        return Atom(rng.choice(atom_names))
    ops = ["neg", "and", "know"]
    if announcements:
        ops.append("ann")
    if unknowability:
        ops.append("unk")
    op = rng.choice(ops)
    sub = lambda: random_formula(rng, depth - 1, atom_names, agent_names,
                                 announcements=announcements, unknowability=unknowability)
    if op == "neg":
        return Neg(sub())
    if op == "and":
        return And(sub(), sub())
    if op == "know":
        return Know(rng.choice(agent_names), sub())
    if op == "unk":
        return Unk(rng.choice(agent_names), sub())
    return Ann(sub(), sub())
