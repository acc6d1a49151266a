"""Hash-consed modal formulas.

Every formula is interned: building the same structure twice returns the same
object, so identity comparison is structural equality and a formula is stored
as a DAG with maximal sharing.  Nodes carry a small integer ``uid`` used for
hashing, which keeps set iteration order reproducible within a session.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import PreconditionError

PROP = "prop"
TOP_K = "top"
BOT_K = "bot"
NOT = "not"
AND = "and"
OR = "or"
DIA = "dia"
BOX = "box"
NABLA = "nabla"

_BINARY = (AND, OR)
_MODAL = (DIA, BOX)


class Signature(frozenset):
    """Set of proposition letters that iterates in lexicographic order."""

    def __iter__(self) -> Iterator[str]:
        return iter(sorted(frozenset.__iter__(self)))

    def __or__(self, other):
        return Signature(frozenset.__or__(self, frozenset(other)))

    def __and__(self, other):
        return Signature(frozenset.__and__(self, frozenset(other)))

    def __sub__(self, other):
        return Signature(frozenset.__sub__(self, frozenset(other)))

    __ror__ = __or__
    __rand__ = __and__

    def __repr__(self) -> str:
        return "{" + ", ".join(self) + "}"


def signature(letters: Iterable[str] = ()) -> Signature:
    if isinstance(letters, str):
        letters = [x for x in letters.split(",") if x.strip()]
        letters = [x.strip() for x in letters]
    return Signature(letters)


class Formula:
    __slots__ = ("kind", "name", "children", "uid", "__weakref__")

    kind: str
    name: str | None
    children: tuple["Formula", ...]
    uid: int

    def __setattr__(self, key, value):
        raise AttributeError("formulas are immutable")

    def __hash__(self) -> int:
        return self.uid

    def __eq__(self, other) -> bool:
        return self is other

    def __lt__(self, other: "Formula") -> bool:
        return self.uid < other.uid

    def __repr__(self) -> str:
        from .parsing import to_text

        return f"Formula({to_text(self)!r})"

    def __str__(self) -> str:
        from .parsing import to_text

        return to_text(self)

    @property
    def child(self) -> "Formula":
        return self.children[0]

    @property
    def left(self) -> "Formula":
        return self.children[0]

    @property
    def right(self) -> "Formula":
        return self.children[1]

    def is_literal(self) -> bool:
        return self.kind == PROP or (self.kind == NOT and self.children[0].kind == PROP)


_table: dict[tuple, Formula] = {}
_lock = threading.Lock()


def _intern(kind: str, name: str | None, children: tuple[Formula, ...], key: tuple) -> Formula:
    node = _table.get(key)
    if node is not None:
        return node
    with _lock:
        node = _table.get(key)
        if node is None:
            node = object.__new__(Formula)
            object.__setattr__(node, "kind", kind)
            object.__setattr__(node, "name", name)
            object.__setattr__(node, "children", children)
            object.__setattr__(node, "uid", len(_table))
            _table[key] = node
    return node


def intern_table_size() -> int:
    return len(_table)


def Prop(name: str) -> Formula:
    return _intern(PROP, name, (), (PROP, name))


TOP = _intern(TOP_K, None, (), (TOP_K,))
BOT = _intern(BOT_K, None, (), (BOT_K,))


def Neg(f: Formula) -> Formula:
    return _intern(NOT, None, (f,), (NOT, f.uid))


def And(a: Formula, b: Formula) -> Formula:
    return _intern(AND, None, (a, b), (AND, a.uid, b.uid))


def Or(a: Formula, b: Formula) -> Formula:
    return _intern(OR, None, (a, b), (OR, a.uid, b.uid))


def Diamond(f: Formula) -> Formula:
    return _intern(DIA, None, (f,), (DIA, f.uid))


def Box(f: Formula) -> Formula:
    return _intern(BOX, None, (f,), (BOX, f.uid))


def Nabla(members: Iterable[Formula]) -> Formula:
    kids = tuple(sorted(set(members), key=lambda f: f.uid))
    return _intern(NABLA, None, kids, (NABLA, tuple(f.uid for f in kids)))


def implies(a: Formula, b: Formula) -> Formula:
    return Or(Neg(a), b)


def iff(a: Formula, b: Formula) -> Formula:
    return And(implies(a, b), implies(b, a))


def conj(items: Iterable[Formula]) -> Formula:
    """Left-nested conjunction with constant folding and duplicate removal."""
    out: list[Formula] = []
    seen: set[Formula] = set()
    for f in items:
        if f is BOT:
            return BOT
        if f is TOP or f in seen:
            continue
        seen.add(f)
        out.append(f)
    if not out:
        return TOP
    acc = out[0]
    for f in out[1:]:
        acc = And(acc, f)
    return acc


def disj(items: Iterable[Formula]) -> Formula:
    """Left-nested disjunction with constant folding and duplicate removal."""
    out: list[Formula] = []
    seen: set[Formula] = set()
    for f in items:
        if f is TOP:
            return TOP
        if f is BOT or f in seen:
            continue
        seen.add(f)
        out.append(f)
    if not out:
        return BOT
    acc = out[0]
    for f in out[1:]:
        acc = Or(acc, f)
    return acc


def conjuncts(f: Formula) -> list[Formula]:
    if f.kind == AND:
        return conjuncts(f.left) + conjuncts(f.right)
    return [f]


def disjuncts(f: Formula) -> list[Formula]:
    if f.kind == OR:
        return disjuncts(f.left) + disjuncts(f.right)
    return [f]


# ---------------------------------------------------------------------------
# traversal helpers


def nodes(f: Formula) -> list[Formula]:
    """All distinct nodes reachable from ``f`` (children before parents)."""
    seen: set[Formula] = set()
    order: list[Formula] = []
    stack: list[tuple[Formula, bool]] = [(f, False)]
    while stack:
        node, done = stack.pop()
        if done:
            order.append(node)
            continue
        if node in seen:
            continue
        seen.add(node)
        stack.append((node, True))
        for c in reversed(node.children):
            if c not in seen:
                stack.append((c, False))
    return order


def contains_nabla(f: Formula) -> bool:
    return any(n.kind == NABLA for n in nodes(f))


def _require_nabla_free(f: Formula, op: str) -> None:
    if contains_nabla(f):
        raise PreconditionError(f"{op}: formula contains nabla; apply expand_nabla first")


_sig_cache: dict[int, Signature] = {}


def sig(f: Formula) -> Signature:
    """Proposition letters occurring in ``f``."""
    cached = _sig_cache.get(f.uid)
    if cached is None:
        cached = Signature(n.name for n in nodes(f) if n.kind == PROP)
        _sig_cache[f.uid] = cached
    return cached


_md_cache: dict[int, int] = {}


def modal_depth(f: Formula) -> int:
    for n in nodes(f):
        if n.uid in _md_cache:
            continue
        if n.kind in _MODAL:
            d = 1 + _md_cache[n.child.uid]
        elif n.kind == NABLA:
            d = 1 + max((_md_cache[c.uid] for c in n.children), default=0)
        else:
            d = max((_md_cache[c.uid] for c in n.children), default=0)
        _md_cache[n.uid] = d
    return _md_cache[f.uid]


@dataclass(frozen=True)
class PolarityReport:
    positive: Signature
    negative: Signature

    def within(self, other: "PolarityReport") -> bool:
        return self.positive <= other.positive and self.negative <= other.negative

    def to_dict(self) -> dict:
        return {"positive": list(self.positive), "negative": list(self.negative)}


_pol_cache: dict[int, PolarityReport] = {}


def polarity(f: Formula) -> PolarityReport:
    """Letters with an occurrence under an even (positive) or odd (negative) number of negations."""
    cached = _pol_cache.get(f.uid)
    if cached is not None:
        return cached
    pos: set[str] = set()
    neg: set[str] = set()
    seen: set[tuple[int, bool]] = set()
    stack = [(f, True)]
    while stack:
        node, positive = stack.pop()
        key = (node.uid, positive)
        if key in seen:
            continue
        seen.add(key)
        if node.kind == PROP:
            (pos if positive else neg).add(node.name)
        elif node.kind == NOT:
            stack.append((node.child, not positive))
        else:
            for c in node.children:
                stack.append((c, positive))
    report = PolarityReport(Signature(pos), Signature(neg))
    _pol_cache[f.uid] = report
    return report


# ---------------------------------------------------------------------------
# normal forms

_nnf_cache: dict[tuple[int, bool], Formula] = {}


def nnf(f: Formula) -> Formula:
    """Negation normal form via De Morgan and the modal duality laws."""
    _require_nabla_free(f, "nnf")
    return _nnf(f, False)


def _nnf(f: Formula, negated: bool) -> Formula:
    key = (f.uid, negated)
    hit = _nnf_cache.get(key)
    if hit is not None:
        return hit
    k = f.kind
    if k == PROP:
        out = Neg(f) if negated else f
    elif k == TOP_K:
        out = BOT if negated else TOP
    elif k == BOT_K:
        out = TOP if negated else BOT
    elif k == NOT:
        out = _nnf(f.child, not negated)
    elif k == AND:
        l, r = _nnf(f.left, negated), _nnf(f.right, negated)
        out = Or(l, r) if negated else And(l, r)
    elif k == OR:
        l, r = _nnf(f.left, negated), _nnf(f.right, negated)
        out = And(l, r) if negated else Or(l, r)
    elif k == DIA:
        c = _nnf(f.child, negated)
        out = Box(c) if negated else Diamond(c)
    elif k == BOX:
        c = _nnf(f.child, negated)
        out = Diamond(c) if negated else Box(c)
    else:  # pragma: no cover - guarded by _require_nabla_free
        raise PreconditionError("nnf: nabla node")
    _nnf_cache[key] = out
    return out


def is_nnf(f: Formula) -> bool:
    for n in nodes(f):
        if n.kind == NABLA:
            return False
        if n.kind == NOT and n.child.kind != PROP:
            return False
    return True


def subf(f: Formula) -> frozenset[Formula]:
    """SUBF closure of an NNF formula; a negative literal does not contribute its letter."""
    if not is_nnf(f):
        raise PreconditionError("subf: formula must be in NNF")
    out: set[Formula] = set()
    stack = [f]
    while stack:
        n = stack.pop()
        if n in out:
            continue
        out.add(n)
        if n.kind in (AND, OR, DIA, BOX):
            stack.extend(n.children)
    return frozenset(out)


def literals(f: Formula) -> frozenset[Formula]:
    return frozenset(g for g in subf(f) if g.is_literal())


_expand_cache: dict[int, Formula] = {}


def expand_nabla(f: Formula) -> Formula:
    """Rewrite every nabla node as its diamond/box definition; nabla of the empty set becomes box-bottom."""
    for n in nodes(f):
        if n.uid in _expand_cache:
            continue
        k = n.kind
        if k == NABLA:
            kids = sorted((_expand_cache[c.uid] for c in n.children), key=lambda g: g.uid)
            if not kids:
                out = Box(BOT)
            else:
                out = conj([Diamond(c) for c in kids] + [Box(disj(kids))])
        elif k == NOT:
            out = Neg(_expand_cache[n.child.uid])
        elif k == AND:
            out = And(_expand_cache[n.left.uid], _expand_cache[n.right.uid])
        elif k == OR:
            out = Or(_expand_cache[n.left.uid], _expand_cache[n.right.uid])
        elif k == DIA:
            out = Diamond(_expand_cache[n.child.uid])
        elif k == BOX:
            out = Box(_expand_cache[n.child.uid])
        else:
            out = n
        _expand_cache[n.uid] = out
    return _expand_cache[f.uid]


# ---------------------------------------------------------------------------
# size metrics

_size_cache: dict[int, int] = {}


def size_string(f: Formula) -> int:
    """Symbol count with every binary application parenthesized."""
    _require_nabla_free(f, "size_string")
    for n in nodes(f):
        if n.uid in _size_cache:
            continue
        if n.kind in (PROP, TOP_K, BOT_K):
            s = 1
        elif n.kind in _BINARY:
            s = 3 + _size_cache[n.left.uid] + _size_cache[n.right.uid]
        else:
            s = 1 + _size_cache[n.child.uid]
        _size_cache[n.uid] = s
    return _size_cache[f.uid]


_dag_cache: dict[int, int] = {}


def size_dag(f: Formula) -> int:
    """Number of distinct subformula nodes."""
    hit = _dag_cache.get(f.uid)
    if hit is None:
        hit = len(nodes(f))
        _dag_cache[f.uid] = hit
    return hit


def substitute_diamonds(f: Formula) -> Formula:
    """Replace every diamond by the box abbreviation ~[]~."""
    memo: dict[int, Formula] = {}
    for n in nodes(f):
        k = n.kind
        if k == DIA:
            out = Neg(Box(Neg(memo[n.child.uid])))
        elif k == NOT:
            out = Neg(memo[n.child.uid])
        elif k == AND:
            out = And(memo[n.left.uid], memo[n.right.uid])
        elif k == OR:
            out = Or(memo[n.left.uid], memo[n.right.uid])
        elif k == BOX:
            out = Box(memo[n.child.uid])
        elif k == NABLA:
            raise PreconditionError("substitute_diamonds: nabla node")
        else:
            out = n
        memo[n.uid] = out
    return memo[f.uid]


def resugar_diamonds(f: Formula) -> Formula:
    """Inverse of :func:`substitute_diamonds`: ~[]~x becomes <>x."""
    memo: dict[int, Formula] = {}
    for n in nodes(f):
        k = n.kind
        if k == NOT:
            c = n.child
            if c.kind == BOX and c.child.kind == NOT:
                out = Diamond(memo[c.child.child.uid])
            else:
                out = Neg(memo[c.uid])
        elif k == AND:
            out = And(memo[n.left.uid], memo[n.right.uid])
        elif k == OR:
            out = Or(memo[n.left.uid], memo[n.right.uid])
        elif k == BOX:
            out = Box(memo[n.child.uid])
        elif k == DIA:
            out = Diamond(memo[n.child.uid])
        elif k == NABLA:
            out = Nabla(memo[c.uid] for c in n.children)
        else:
            out = n
        memo[n.uid] = out
    return memo[f.uid]
