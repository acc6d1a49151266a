"""Finite Kripke models, model checking and bisimulations."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

from .errors import PreconditionError
from .formula import (
    AND, BOT_K, BOX, DIA, NABLA, NOT, OR, PROP, TOP_K, Formula, Signature, nodes,
)

World = str


@dataclass(frozen=True, eq=False)
class KripkeModel:
    worlds: tuple[World, ...]
    edges: frozenset[tuple[World, World]]
    valuation: Mapping[str, frozenset[World]]
    _succ: dict = field(default_factory=dict, init=False, repr=False, compare=False)
    _truth: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        ws = set(self.worlds)
        if len(ws) != len(self.worlds):
            raise PreconditionError("duplicate world ids")
        for a, b in self.edges:
            if a not in ws or b not in ws:
                raise PreconditionError(f"edge ({a},{b}) references an undeclared world")
        for p, ext in self.valuation.items():
            if not ext <= ws:
                raise PreconditionError(f"valuation of {p} references undeclared worlds")
        succ: dict[World, list[World]] = {w: [] for w in self.worlds}
        for a, b in sorted(self.edges):
            succ[a].append(b)
        self._succ.update({w: tuple(v) for w, v in succ.items()})

    @classmethod
    def build(cls, worlds: Iterable[World], edges: Iterable[tuple[World, World]] = (),
              valuation: Optional[Mapping[str, Iterable[World]]] = None) -> "KripkeModel":
        val = {p: frozenset(ws) for p, ws in (valuation or {}).items()}
        return cls(tuple(worlds), frozenset((a, b) for a, b in edges), val)

    @property
    def signature(self) -> Signature:
        return Signature(self.valuation)

    def successors(self, w: World) -> tuple[World, ...]:
        return self._succ[w]

    def label(self, w: World, letters: Optional[Iterable[str]] = None) -> frozenset[str]:
        letters = self.valuation if letters is None else letters
        return frozenset(p for p in letters if w in self.valuation.get(p, ()))

    def truth_set(self, f: Formula) -> frozenset[World]:
        """Worlds where ``f`` holds; memoized per node, so DAG sharing is exploited."""
        memo = self._truth
        if f.uid in memo:
            return memo[f.uid]
        all_w = frozenset(self.worlds)
        for n in nodes(f):
            if n.uid in memo:
                continue
            k = n.kind
            if k == PROP:
                s = self.valuation.get(n.name, frozenset())
            elif k == TOP_K:
                s = all_w
            elif k == BOT_K:
                s = frozenset()
            elif k == NOT:
                s = all_w - memo[n.child.uid]
            elif k == AND:
                s = memo[n.left.uid] & memo[n.right.uid]
            elif k == OR:
                s = memo[n.left.uid] | memo[n.right.uid]
            elif k == DIA:
                c = memo[n.child.uid]
                s = frozenset(w for w in self.worlds if any(v in c for v in self._succ[w]))
            elif k == BOX:
                c = memo[n.child.uid]
                s = frozenset(w for w in self.worlds if all(v in c for v in self._succ[w]))
            elif k == NABLA:
                sets = [memo[m.uid] for m in n.children]
                union = frozenset().union(*sets)
                s = frozenset(
                    w for w in self.worlds
                    if all(v in union for v in self._succ[w])
                    and all(any(v in c for v in self._succ[w]) for c in sets)
                )
            else:  # pragma: no cover
                raise AssertionError(k)
            memo[n.uid] = s
        return memo[f.uid]

    def to_dict(self, point: Optional[World] = None) -> dict:
        d = {
            "worlds": list(self.worlds),
            "edges": [list(e) for e in sorted(self.edges)],
            "valuation": {p: sorted(self.valuation[p]) for p in sorted(self.valuation)},
        }
        if point is not None:
            d["point"] = point
        return d

    def reduct(self, letters: Iterable[str]) -> "KripkeModel":
        keep = set(letters)
        return KripkeModel(self.worlds, self.edges,
                           {p: ext for p, ext in self.valuation.items() if p in keep})


@dataclass(frozen=True)
class PointedModel:
    model: KripkeModel
    point: World

    def __post_init__(self):
        if self.point not in self.model.worlds:
            raise PreconditionError(f"point {self.point!r} is not a world of the model")

    def satisfies(self, f: Formula) -> bool:
        return eval_formula(self.model, self.point, f)

    def to_dict(self) -> dict:
        return self.model.to_dict(self.point)


@dataclass(frozen=True)
class BisimRelation:
    pairs: frozenset[tuple[World, World]]
    signature: Signature

    @classmethod
    def of(cls, pairs: Iterable[tuple[World, World]], letters: Iterable[str]) -> "BisimRelation":
        return cls(frozenset(pairs), Signature(letters))


def model_from_dict(d: Mapping) -> KripkeModel | PointedModel:
    m = KripkeModel.build(d["worlds"], [tuple(e) for e in d.get("edges", [])], d.get("valuation", {}))
    if d.get("point") is not None:
        return PointedModel(m, d["point"])
    return m


def load_model(path: str) -> KripkeModel | PointedModel:
    with open(path, encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))


def eval_formula(m: KripkeModel, w: World, f: Formula) -> bool:
    """Truth of ``f`` at ``w``; letters missing from the valuation are false everywhere."""
    if w not in m._succ:
        raise PreconditionError(f"unknown world {w!r}")
    return w in m.truth_set(f)


# ---------------------------------------------------------------------------
# bisimulations


def _harmony(m: KripkeModel, n: KripkeModel, w: World, v: World, letters: Signature) -> bool:
    for p in letters:
        if (w in m.valuation.get(p, ())) != (v in n.valuation.get(p, ())):
            return False
    return True


def check_bisimulation(m: KripkeModel, n: KripkeModel, z: BisimRelation) -> bool:
    """Atomic harmony, forth and back for every pair of ``z``."""
    mw, nw = set(m.worlds), set(n.worlds)
    for w, v in z.pairs:
        if w not in mw or v not in nw:
            return False
    for w, v in z.pairs:
        if not _harmony(m, n, w, v, z.signature):
            return False
        for w2 in m.successors(w):
            if not any((w2, v2) in z.pairs for v2 in n.successors(v)):
                return False
        for v2 in n.successors(v):
            if not any((w2, v2) in z.pairs for w2 in m.successors(w)):
                return False
    return True


def _refine_once(m: KripkeModel, n: KripkeModel, pairs: set) -> set:
    keep = set()
    for w, v in pairs:
        forth = all(any((w2, v2) in pairs for v2 in n.successors(v)) for w2 in m.successors(w))
        if forth and all(any((w2, v2) in pairs for w2 in m.successors(w)) for v2 in n.successors(v)):
            keep.add((w, v))
    return keep


def largest_bisimulation(m: KripkeModel, n: KripkeModel, letters: Iterable[str]) -> BisimRelation:
    """Greatest sig-bisimulation, by pair elimination from the harmony-consistent relation."""
    sigma = Signature(letters)
    pairs = {(w, v) for w in m.worlds for v in n.worlds if _harmony(m, n, w, v, sigma)}
    while True:
        nxt = _refine_once(m, n, pairs)
        if nxt == pairs:
            return BisimRelation(frozenset(pairs), sigma)
        pairs = nxt


def is_fixed_point(m: KripkeModel, n: KripkeModel, z: BisimRelation) -> bool:
    return _refine_once(m, n, set(z.pairs)) == set(z.pairs)


def bisimilar(a: PointedModel, b: PointedModel, letters: Iterable[str]) -> bool:
    z = largest_bisimulation(a.model, b.model, letters)
    return (a.point, b.point) in z.pairs


def pair_id(w: World, v: World) -> World:
    return f"({w},{v})"


def bisimulation_product(m: KripkeModel, n: KripkeModel, z: BisimRelation) -> KripkeModel:
    """Subdirect product of ``m`` and ``n`` with domain ``z`` (letters of ``z.signature``)."""
    if not check_bisimulation(m, n, z):
        raise PreconditionError("bisimulation_product: relation is not a bisimulation")
    dom = sorted(z.pairs)
    ids = {pr: pair_id(*pr) for pr in dom}
    edges = set()
    for (w1, u1) in dom:
        for w2 in m.successors(w1):
            for u2 in n.successors(u1):
                if (w2, u2) in z.pairs:
                    edges.add((ids[(w1, u1)], ids[(w2, u2)]))
    val = {}
    for p in z.signature:
        val[p] = frozenset(ids[(w, u)] for (w, u) in dom
                           if w in m.valuation.get(p, ()) and u in n.valuation.get(p, ()))
    return KripkeModel(tuple(ids[pr] for pr in dom), frozenset(edges), val)


def amalgamate(m1: PointedModel, m2: PointedModel, z: BisimRelation) -> PointedModel:
    """Expand the product over the shared letters with each factor's private letters."""
    if (m1.point, m2.point) not in z.pairs:
        raise PreconditionError("amalgamate: the point pair is not in the relation")
    sigma, tau = m1.model.signature, m2.model.signature
    prod = bisimulation_product(m1.model, m2.model, z)
    dom = sorted(z.pairs)
    val = dict(prod.valuation)
    for p in sigma - tau:
        val[p] = frozenset(pair_id(u, v) for (u, v) in dom if u in m1.model.valuation[p])
    for p in tau - sigma:
        val[p] = frozenset(pair_id(u, v) for (u, v) in dom if v in m2.model.valuation[p])
    # letters shared by both signatures but outside z.signature are not constrained by z
    for p in (sigma & tau) - z.signature:
        val[p] = frozenset(pair_id(u, v) for (u, v) in dom
                           if u in m1.model.valuation[p] and v in m2.model.valuation[p])
    model = KripkeModel(prod.worlds, prod.edges, val)
    return PointedModel(model, pair_id(m1.point, m2.point))


def projection_relations(amalgam: KripkeModel, z: BisimRelation) -> tuple[BisimRelation, BisimRelation]:
    """The relations pairing each product world with its left and right component."""
    left = frozenset((pair_id(u, v), u) for (u, v) in z.pairs)
    right = frozenset((pair_id(u, v), v) for (u, v) in z.pairs)
    return BisimRelation(left, z.signature), BisimRelation(right, z.signature)


def unravel(pm: PointedModel, depth: int, fatness: int = 1) -> PointedModel:
    """Tree unraveling truncated at ``depth``, each child copied ``fatness`` times.

    World ids are paths ``<w0,k1,w1,...>``; ``k`` numbers the copies.
    """
    if depth < 0 or fatness < 1:
        raise PreconditionError("unravel: need depth >= 0 and fatness >= 1")
    m = pm.model

    def name(path: tuple) -> str:
        return "<" + ",".join(str(x) for x in path) + ">"

    worlds: list[str] = []
    edges: set[tuple[str, str]] = set()
    val: dict[str, set[str]] = {p: set() for p in m.valuation}
    frontier = [(pm.point,)]
    for level in range(depth + 1):
        nxt = []
        for path in frontier:
            pid = name(path)
            worlds.append(pid)
            last = path[-1]
            for p, ext in m.valuation.items():
                if last in ext:
                    val[p].add(pid)
            if level == depth:
                continue
            for v in m.successors(last):
                for k in range(fatness):
                    child = path + (k, v)
                    edges.add((pid, name(child)))
                    nxt.append(child)
        frontier = nxt
    model = KripkeModel(tuple(worlds), frozenset(edges), {p: frozenset(s) for p, s in val.items()})
    return PointedModel(model, name((pm.point,)))


def is_tree(pm: PointedModel) -> bool:
    """Every world is reached from the point by exactly one path."""
    m = pm.model
    indeg = {w: 0 for w in m.worlds}
    for _, b in m.edges:
        indeg[b] += 1
    if indeg[pm.point] != 0:
        return False
    if any(d != 1 for w, d in indeg.items() if w != pm.point):
        return False
    seen = {pm.point}
    stack = [pm.point]
    while stack:
        w = stack.pop()
        for v in m.successors(w):
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return len(seen) == len(m.worlds)
