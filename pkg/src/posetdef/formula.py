"""Boolean formulas over equality and Delta-literal atoms with one free slot.

Parameters are elements of the index poset; an atom reads them through the
indexed sequence.  ``Eq(p)`` holds at ``j`` when ``j`` and ``p`` carry the
same column.  ``Delta(s, sign, slots)`` fills the free slot (``None``) with
the column of ``j`` and asks whether some row realises pattern ``s``; the
sign flips the answer.

Text form::

    (= p3)
    (delta s=0110 sign=+ slots=[p0,p1,*,p2])
    (and ...) (or ...) (not ...)
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence, Union

from .poset import bits
from .trace import IndexedSequence, TraceStructure, parse_pattern, pattern_str


@dataclass(frozen=True)
class Eq:
    param: int


@dataclass(frozen=True)
class Delta:
    pattern: int
    sign: bool
    slots: tuple  # element indices, exactly one None

    def __post_init__(self):
        if sum(1 for x in self.slots if x is None) != 1:
            raise ValueError("a Delta atom needs exactly one free slot")

    @property
    def arity(self) -> int:
        return len(self.slots)

    @property
    def free(self) -> int:
        return self.slots.index(None)


@dataclass(frozen=True)
class And:
    children: tuple


@dataclass(frozen=True)
class Or:
    children: tuple


@dataclass(frozen=True)
class Not:
    child: "Formula"


Formula = Union[Eq, Delta, And, Or, Not]
TRUE = And(())
FALSE = Or(())


def conj(parts) -> Formula:
    parts = tuple(parts)
    return parts[0] if len(parts) == 1 else And(parts)


def disj(parts) -> Formula:
    parts = tuple(parts)
    return parts[0] if len(parts) == 1 else Or(parts)


def walk(F: Formula) -> Iterator[Formula]:
    stack = [F]
    while stack:
        node = stack.pop()
        yield node
        if isinstance(node, (And, Or)):
            stack.extend(reversed(node.children))
        elif isinstance(node, Not):
            stack.append(node.child)


def parameters(F: Formula) -> frozenset:
    """Elements used as parameters anywhere in ``F``."""
    out = set()
    for node in walk(F):
        if isinstance(node, Eq):
            out.add(node.param)
        elif isinstance(node, Delta):
            out.update(x for x in node.slots if x is not None)
    return frozenset(out)


def size(F: Formula) -> int:
    return sum(1 for _ in walk(F))


# evaluation -----------------------------------------------------------------

class Evaluator:
    """Evaluates formulas at every element at once, as element bitmasks.

    Atom results are cached, so formulas sharing literals are cheap.
    """

    def __init__(self, T: TraceStructure, seq: IndexedSequence):
        self.T = T
        self.seq = seq
        self.n = seq.poset.n
        self.full = (1 << self.n) - 1
        self._atoms: dict = {}
        self._by_col: dict = {}
        for i, c in enumerate(seq.assign):
            self._by_col[c] = self._by_col.get(c, 0) | 1 << i

    def _delta(self, atom: Delta) -> int:
        key = (atom.pattern, atom.slots)
        hit = self._atoms.get(key)
        if hit is None:
            T, cols = self.T, self.seq.assign
            base = (1 << T.U) - 1
            for j, x in enumerate(atom.slots):
                if x is not None:
                    base &= T.rows_with(cols[x], atom.pattern >> j & 1)
            free_sign = atom.pattern >> atom.free & 1
            hit = 0
            if base:
                for c, elems in self._by_col.items():
                    if base & T.rows_with(c, free_sign):
                        hit |= elems
            self._atoms[key] = hit
        return hit if atom.sign else self.full & ~hit

    def mask(self, F: Formula) -> int:
        if isinstance(F, Eq):
            return self._by_col.get(self.seq.assign[F.param], 0)
        if isinstance(F, Delta):
            return self._delta(F)
        if isinstance(F, Not):
            return self.full & ~self.mask(F.child)
        if isinstance(F, And):
            m = self.full
            for c in F.children:
                m &= self.mask(c)
                if not m:
                    break
            return m
        if isinstance(F, Or):
            m = 0
            for c in F.children:
                m |= self.mask(c)
                if m == self.full:
                    break
            return m
        raise TypeError(f"not a formula node: {F!r}")

    def holds(self, F: Formula, j: int) -> bool:
        return bool(self.mask(F) >> j & 1)

    def support(self, F: Formula) -> frozenset:
        return frozenset(bits(self.mask(F)))


def evaluate(F: Formula, T: TraceStructure, seq: IndexedSequence, j: int) -> bool:
    return Evaluator(T, seq).holds(F, j)


def delta_holds_direct(T: TraceStructure, seq: IndexedSequence, atom: Delta, j: int) -> bool:
    """Reference evaluation of one Delta atom by scanning rows."""
    cols = [seq.assign[j] if x is None else seq.assign[x] for x in atom.slots]
    found = any(
        all(int(T.R[u, c]) == (atom.pattern >> k & 1) for k, c in enumerate(cols))
        for u in range(T.U)
    )
    return found if atom.sign else not found


# text form ---------------------------------------------------------------------

def dumps(F: Formula) -> str:
    if isinstance(F, Eq):
        return f"(= p{F.param})"
    if isinstance(F, Delta):
        slots = ",".join("*" if x is None else f"p{x}" for x in F.slots)
        sign = "+" if F.sign else "-"
        return f"(delta s={pattern_str(F.pattern, F.arity)} sign={sign} slots=[{slots}])"
    if isinstance(F, Not):
        return f"(not {dumps(F.child)})"
    if isinstance(F, (And, Or)):
        head = "and" if isinstance(F, And) else "or"
        if not F.children:
            return f"({head})"
        return f"({head} " + " ".join(dumps(c) for c in F.children) + ")"
    raise TypeError(f"not a formula node: {F!r}")


_TOKEN = re.compile(r"\(|\)|[^\s()]+")
_DELTA_FIELDS = re.compile(r"s=([01]+)\s+sign=([+-])\s+slots=\[([^\]]*)\]")


def loads(text: str) -> Formula:
    tokens = _TOKEN.findall(text)
    pos = 0

    def node() -> Formula:
        nonlocal pos
        if tokens[pos] != "(":
            raise ValueError(f"expected '(' at token {pos}")
        head = tokens[pos + 1]
        pos += 2
        if head == "=":
            param = _param(tokens[pos])
            pos += 1
            _close()
            return Eq(param)
        if head == "delta":
            start = pos
            while tokens[pos] != ")":
                pos += 1
            m = _DELTA_FIELDS.fullmatch(" ".join(tokens[start:pos]))
            if not m:
                raise ValueError("malformed delta atom")
            _close()
            slots = tuple(None if x.strip() == "*" else _param(x.strip()) for x in m.group(3).split(","))
            pattern = m.group(1)
            if len(pattern) != len(slots):
                raise ValueError("pattern length differs from slot count")
            return Delta(parse_pattern(pattern), m.group(2) == "+", slots)
        if head in ("and", "or", "not"):
            kids = []
            while tokens[pos] != ")":
                kids.append(node())
            _close()
            if head == "not":
                if len(kids) != 1:
                    raise ValueError("not takes one argument")
                return Not(kids[0])
            return And(tuple(kids)) if head == "and" else Or(tuple(kids))
        raise ValueError(f"unknown head {head!r}")

    def _close():
        nonlocal pos
        if tokens[pos] != ")":
            raise ValueError(f"expected ')' at token {pos}")
        pos += 1

    try:
        out = node()
    except IndexError:
        raise ValueError("unexpected end of formula text") from None
    if pos != len(tokens):
        raise ValueError("trailing text after formula")
    return out


def _param(tok: str) -> int:
    if not re.fullmatch(r"p\d+", tok):
        raise ValueError(f"bad parameter {tok!r}")
    return int(tok[1:])


# templates ---------------------------------------------------------------------

def template(F: Formula) -> str:
    """Shape of ``F`` with parameters erased.

    Nested connectives of one kind are flattened and children are deduplicated
    and sorted, so two formulas differing only in parameters or in repetition
    of identical sub-shapes share a template.
    """
    if isinstance(F, Eq):
        return "(=)"
    if isinstance(F, Delta):
        sign = "+" if F.sign else "-"
        return f"(d {pattern_str(F.pattern, F.arity)}{sign}{F.free})"
    if isinstance(F, Not):
        return f"(not {template(F.child)})"
    kind = And if isinstance(F, And) else Or
    head = "and" if kind is And else "or"
    parts = set()
    stack = list(F.children)
    while stack:
        c = stack.pop()
        if isinstance(c, kind):
            stack.extend(c.children)
        else:
            parts.add(template(c))
    if len(parts) == 1:
        return parts.pop()
    if not parts:
        return f"({head})"
    return f"({head} " + " ".join(sorted(parts)) + ")"
