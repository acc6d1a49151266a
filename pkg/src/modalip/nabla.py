"""Cover-modality normal form, letter removal on normal forms, and uniform interpolants."""

from __future__ import annotations

from typing import Iterable

from .errors import NotValidError
from .formula import (
    AND, BOT, BOT_K, BOX, DIA, NABLA, NOT, OR, PROP, TOP, TOP_K,
    And, Formula, Nabla, Or, Signature, conj, expand_nabla, nnf, sig, signature,
)
from .quasimodel import is_valid_implication

_EMPTY_COVER = Nabla(())


def _literal_conj(lits: Iterable[Formula]) -> Formula:
    """Conjunction of literals ordered by letter, or TOP when empty."""
    return conj(sorted(lits, key=lambda l: (l.name or l.child.name, l.kind == NOT)))


def _flatten(items: Iterable[Formula]) -> frozenset[Formula] | None:
    """Split nested conjunctions, drop TOP; None signals a BOT conjunct."""
    out: set[Formula] = set()
    stack = list(items)
    while stack:
        f = stack.pop()
        if f.kind == AND:
            stack.extend(f.children)
        elif f.kind == TOP_K:
            continue
        elif f.kind == BOT_K:
            return None
        else:
            out.add(f)
    return frozenset(out)


class _Normalizer:
    def __init__(self):
        self.memo: dict[frozenset, Formula] = {}

    def single(self, f: Formula) -> Formula:
        k = f.kind
        if k in (PROP, NOT, TOP_K, BOT_K):
            return f
        if k == DIA:
            return Nabla([self.single(f.child), TOP])
        if k == BOX:
            return Or(Nabla([self.single(f.child)]), _EMPTY_COVER)
        if k == OR:
            return Or(self.single(f.left), self.single(f.right))
        return self.conjunction([f])

    def conjunction(self, items: Iterable[Formula]) -> Formula:
        flat = _flatten(items)
        if flat is None:
            return BOT
        hit = self.memo.get(flat)
        if hit is not None:
            return hit
        out = self._conjunction(flat)
        self.memo[flat] = out
        return out

    def _conjunction(self, phis: frozenset[Formula]) -> Formula:
        ors = sorted((f for f in phis if f.kind == OR), key=lambda g: g.uid)
        if ors:
            split = ors[0]
            rest = phis - {split}
            return Or(self.conjunction(rest | {split.left}), self.conjunction(rest | {split.right}))
        return self._conjunction_core(phis)

    def _conjunction_core(self, phis: frozenset[Formula]) -> Formula:
        lits = [f for f in phis if f.is_literal()]
        lit_set = set(lits)
        for l in lits:
            if l.kind == NOT and l.child in lit_set:
                return BOT
        dias = [f.child for f in phis if f.kind == DIA]
        boxes = [f.child for f in phis if f.kind == BOX]
        pi = _literal_conj(lits)
        if not dias:
            if not boxes:
                # the modal part would be nabla{true} | nabla{}, which is valid
                return pi
            inner = self.conjunction(boxes)
            covers = [Nabla([inner]), _EMPTY_COVER]
            if pi is TOP:
                return Or(covers[0], covers[1])
            return Or(And(pi, covers[0]), And(pi, covers[1]))
        members = [self.conjunction([d] + boxes) for d in dias]
        members.append(self.conjunction(boxes))
        if any(m is BOT for m in members):
            return BOT
        cover = Nabla(members)
        return cover if pi is TOP else And(pi, cover)


def to_nabla_nf(f: Formula) -> Formula:
    """Equivalent formula in cover-modality normal form."""
    return _Normalizer().single(nnf(expand_nabla(f)))


def _is_literal_conj(f: Formula) -> bool:
    letters: set[str] = set()
    for part in _conjunct_list(f):
        if not part.is_literal():
            return False
        name = part.name if part.kind == PROP else part.child.name
        if name in letters:
            return False
        letters.add(name)
    return True


def _conjunct_list(f: Formula) -> list[Formula]:
    if f.kind == AND:
        return _conjunct_list(f.left) + _conjunct_list(f.right)
    return [f]


def is_nabla_nf(f: Formula) -> bool:
    """Check the normal-form grammar: disjunctions of TOP, BOT, pi, nabla, or pi & nabla."""
    k = f.kind
    if k == OR:
        return is_nabla_nf(f.left) and is_nabla_nf(f.right)
    if k in (TOP_K, BOT_K):
        return True
    if k == NABLA:
        return all(is_nabla_nf(c) for c in f.children)
    if k == AND and f.right.kind == NABLA:
        return _is_literal_conj(f.left) and is_nabla_nf(f.right)
    return _is_literal_conj(f)


def _drop_from_pi(pi: Formula, drop: Signature) -> Formula:
    kept = [l for l in _conjunct_list(pi) if (l.name if l.kind == PROP else l.child.name) not in drop]
    return _literal_conj(kept)


def remove_props(f: Formula, drop: Iterable[str]) -> Formula:
    """Delete every occurrence of the letters in ``drop`` from a normal-form formula."""
    drop = signature(drop) if isinstance(drop, str) else Signature(drop)
    memo: dict[Formula, Formula] = {}

    def go(g: Formula) -> Formula:
        hit = memo.get(g)
        if hit is not None:
            return hit
        k = g.kind
        if k in (TOP_K, BOT_K):
            out = g
        elif k == OR:
            out = Or(go(g.left), go(g.right))
        elif k == NABLA:
            out = Nabla(go(c) for c in g.children)
        elif k == AND and g.right.kind == NABLA:
            pi = _drop_from_pi(g.left, drop)
            cover = go(g.right)
            out = cover if pi is TOP else And(pi, cover)
        else:
            out = _drop_from_pi(g, drop)
        memo[g] = out
        return out

    return go(f)


def uniform_interpolant(f: Formula, keep: Iterable[str]) -> Formula:
    keep = signature(keep) if isinstance(keep, str) else Signature(keep)
    return remove_props(to_nabla_nf(f), sig(f) - keep)


def craig_via_nabla(phi: Formula, psi: Formula) -> Formula:
    if not is_valid_implication(phi, psi):
        raise NotValidError("implication is not valid")
    return uniform_interpolant(phi, sig(psi))
