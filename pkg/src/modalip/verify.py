"""Interpolant checking, semantic equivalence, a brute-force tree-model oracle, and the test corpus."""

from __future__ import annotations

import itertools
import random
from math import comb
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

from .errors import PreconditionError, SizeGuardError
from .formula import (
    AND, BOT_K, BOX, DIA, NOT, OR, PROP, TOP_K,
    And, Box, Diamond, Formula, Neg, Or, Prop,
    expand_nabla, modal_depth, nodes, nnf, polarity, sig, size_dag,
    size_string, subf,
)
from .limits import check_deadline
from .parsing import parse, to_text
from .ksat import countermodel, valid_implication as is_valid_implication
from .semantics import KripkeModel, PointedModel, eval_formula


@dataclass
class InterpolantReport:
    left_valid: bool
    right_valid: bool
    signature_ok: bool
    lyndon_ok: Optional[bool]
    size_string: int
    size_dag: int
    countermodel: Optional[PointedModel] = None
    failed_side: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.left_valid and self.right_valid and self.signature_ok and self.lyndon_ok is not False

    def to_dict(self) -> dict:
        return {
            "left_valid": self.left_valid,
            "right_valid": self.right_valid,
            "signature_ok": self.signature_ok,
            "lyndon_ok": self.lyndon_ok,
            "sizes": {"string": self.size_string, "dag": self.size_dag},
            "countermodel": None if self.countermodel is None else {
                "side": self.failed_side, **self.countermodel.to_dict()},
        }


def check_craig(theta: Formula, phi: Formula, psi: Formula) -> InterpolantReport:
    left = countermodel(phi, theta)
    right = countermodel(theta, psi)
    flat = expand_nabla(theta)
    cm, side = (left, "left") if left is not None else (right, "right") if right is not None else (None, None)
    return InterpolantReport(
        left_valid=left is None,
        right_valid=right is None,
        signature_ok=sig(theta) <= (sig(phi) & sig(psi)),
        lyndon_ok=None,
        size_string=size_string(flat),
        size_dag=size_dag(theta),
        countermodel=cm,
        failed_side=side,
    )


def lyndon_polarity_ok(theta: Formula, phi: Formula, psi: Formula) -> bool:
    t, a, b = polarity(expand_nabla(theta)), polarity(expand_nabla(phi)), polarity(expand_nabla(psi))
    return t.positive <= (a.positive & b.positive) and t.negative <= (a.negative & b.negative)


def check_lyndon(theta: Formula, phi: Formula, psi: Formula) -> InterpolantReport:
    rep = check_craig(theta, phi, psi)
    rep.lyndon_ok = lyndon_polarity_ok(theta, phi, psi)
    return rep


def equivalent(a: Formula, b: Formula) -> bool:
    return is_valid_implication(a, b) and is_valid_implication(b, a)


# ---------------------------------------------------------------------------
# brute-force oracle


def default_bounds(f: Formula) -> tuple[int, int]:
    g = expand_nabla(f)
    modal = sum(1 for n in nodes(g) if n.kind in (DIA, BOX))
    return modal_depth(g), max(1, modal)


def oracle_sat(f: Formula, max_depth: Optional[int] = None, max_branch: Optional[int] = None,
               work_limit: int = 2_000_000) -> Optional[PointedModel]:
    """Search tree models of bounded height and branching over the letters of ``f``.

    Children that agree on every modal body are interchangeable, so each level
    keeps one representative per pattern of body truth values.
    """
    d0, b0 = default_bounds(f)
    max_depth = d0 if max_depth is None else max_depth
    max_branch = b0 if max_branch is None else max_branch
    if max_depth < 0 or max_branch < 1:
        raise PreconditionError("oracle_sat: bounds must be positive")
    g = expand_nabla(f)
    order = nodes(g)
    pos = {n: i for i, n in enumerate(order)}
    bodies = sorted({n.child for n in order if n.kind in (DIA, BOX)}, key=lambda n: pos[n])
    letters = list(sig(g))
    valuations = [frozenset(c for c, bit in zip(letters, bits) if bit)
                  for bits in itertools.product((0, 1), repeat=len(letters))]

    def evaluate(val: frozenset, kids: tuple[tuple[bool, ...], ...]) -> list[bool]:
        out = [False] * len(order)
        for i, n in enumerate(order):
            k = n.kind
            if k == PROP:
                v = n.name in val
            elif k == TOP_K:
                v = True
            elif k == BOT_K:
                v = False
            elif k == NOT:
                v = not out[pos[n.child]]
            elif k == AND:
                v = out[pos[n.left]] and out[pos[n.right]]
            elif k == OR:
                v = out[pos[n.left]] or out[pos[n.right]]
            else:
                b = bodies.index(n.child)
                if k == DIA:
                    v = any(key[b] for key in kids)
                else:
                    v = all(key[b] for key in kids)
            out[i] = v
        return out

    root = pos[g]
    levels: list[dict[tuple[bool, ...], tuple[frozenset, tuple]]] = []
    previous: list[tuple[bool, ...]] = []
    for level in range(max_depth + 1):
        reps: dict[tuple[bool, ...], tuple[frozenset, tuple]] = {}
        if level == 0:
            subsets = [()]
        else:
            total = sum(comb(len(previous), r) for r in range(min(max_branch, len(previous)) + 1))
            if total * len(valuations) > work_limit:
                raise SizeGuardError("oracle_sat: search space exceeds the work limit")
            subsets = [c for r in range(min(max_branch, len(previous)) + 1)
                       for c in itertools.combinations(previous, r)]
        for kids in subsets:
            check_deadline()
            for val in valuations:
                truth = evaluate(val, kids)
                key = tuple(truth[pos[b]] for b in bodies)
                if truth[root]:
                    levels.append(reps)
                    return _build_tree(levels, val, kids, f)
                reps.setdefault(key, (val, kids))
        levels.append(reps)
        previous = sorted(reps)
    return None


def _build_tree(levels, val, kids, f: Formula) -> PointedModel:
    worlds: list[str] = []
    edges: list[tuple[str, str]] = []
    valuation: dict[str, set[str]] = {p: set() for p in sig(f)}

    def make(level: int, v: frozenset, children: tuple) -> str:
        name = f"o{len(worlds)}"
        worlds.append(name)
        for p in v:
            valuation[p].add(name)
        for key in children:
            cv, cc = levels[level - 1][key]
            edges.append((name, make(level - 1, cv, cc)))
        return name

    root = make(len(levels) - 1, val, kids)
    pm = PointedModel(KripkeModel.build(worlds, edges, valuation), root)
    if not eval_formula(pm.model, pm.point, f):
        raise AssertionError("oracle witness failed verification")
    return pm


# ---------------------------------------------------------------------------
# corpus

LETTERS = ("p", "q", "r")

HAND_PICKED_IMPLICATIONS = [
    ("<>(p & q)", "<>(p | r)"),
    ("p", "p | q"),
    ("[]p & []q", "[](p & q)"),
    ("[]p & []q", "[](p & q | r)"),
    ("<>p", "<>p"),
    ("[]p", "[](p | q)"),
    ("p & q", "p"),
    ("<>s & (p1 -> [](s -> p1)) & (~p1 -> [](s -> ~p1))",
     "(p1 -> []q1) & (~p1 -> []~q1) -> <>((p1 -> q1) & (q1 -> p1))"),
    ("false", "p"),
    ("p", "true"),
    ("[](p -> q) & []p", "[]q"),
    ("[]p & <>q", "<>(p & q)"),
    ("<>(p | q)", "<>p | <>q"),
    ("[](p & q)", "[]p & []q"),
    ("<>[]p & []q", "<>(p & q | r)"),
    ("[](p -> q) & <>p", "<>q"),
]

_SCHEMAS = [
    ("[](A -> B) & []A", "[]B"),
    ("<>(A & B)", "<>A"),
    ("[]A & <>B", "<>(A & B)"),
    ("[](A & B)", "[]A"),
    ("<>A | <>B", "<>(A | B)"),
    ("A & B", "A | C"),
    ("[]A", "[](A | B)"),
    ("<>A & []B", "<>(A & B) | C"),
]


def _random_formula(rng: random.Random, depth: int, budget: int, letters=LETTERS) -> Formula:
    if budget <= 1 or rng.random() < 0.3:
        atom = Prop(rng.choice(letters))
        return Neg(atom) if rng.random() < 0.3 else atom
    choices = ["and", "or", "not"]
    if depth > 0:
        choices += ["dia", "box"]
    c = rng.choice(choices)
    if c == "not":
        return Neg(_random_formula(rng, depth, budget - 1, letters))
    if c in ("dia", "box"):
        inner = _random_formula(rng, depth - 1, budget - 1, letters)
        return Diamond(inner) if c == "dia" else Box(inner)
    split = rng.randint(1, max(1, budget - 2))
    a = _random_formula(rng, depth, split, letters)
    b = _random_formula(rng, depth, budget - 1 - split, letters)
    return And(a, b) if c == "and" else Or(a, b)


def random_formula(rng: random.Random, max_depth: int = 2, max_nodes: int = 12, letters=LETTERS) -> Formula:
    while True:
        f = _random_formula(rng, max_depth, rng.randint(2, max_nodes), letters)
        if size_dag(f) <= max_nodes and modal_depth(f) <= max_depth:
            return f


def _weaken(rng: random.Random, f: Formula) -> Formula:
    """A formula implied by the NNF formula ``f`` via monotone weakening steps."""
    k = f.kind
    roll = rng.random()
    if roll < 0.2 or k in (PROP, NOT, TOP_K, BOT_K):
        extra = _random_formula(rng, 0, 2)
        return Or(f, extra) if roll < 0.5 or k in (PROP, NOT) else f
    if k == AND:
        if roll < 0.45:
            return _weaken(rng, rng.choice(f.children))
        return And(_weaken(rng, f.left), f.right) if roll < 0.7 else And(f.left, _weaken(rng, f.right))
    if k == OR:
        return Or(_weaken(rng, f.left), f.right) if roll < 0.6 else Or(f.left, _weaken(rng, f.right))
    if k == DIA:
        return Diamond(_weaken(rng, f.child))
    return Box(_weaken(rng, f.child))


def _substitute(template: str, subst: dict[str, Formula]) -> Formula:
    text = template
    for var, f in subst.items():
        text = text.replace(var, f"({to_text(f)})")
    return parse(text)


def _fits(phi: Formula, psi: Formula, max_nodes: int) -> bool:
    if len(sig(phi) | sig(psi)) > 3:
        return False
    if max(modal_depth(phi), modal_depth(psi)) > 2:
        return False
    if size_dag(phi) > max_nodes or size_dag(psi) > max_nodes:
        return False
    return len(subf(nnf(phi))) <= 14 and len(subf(nnf(Neg(psi)))) <= 14


@lru_cache(maxsize=None)
def implication_corpus(seed: int = 2024, count: int = 220, max_nodes: int = 12) -> tuple[tuple[Formula, Formula], ...]:
    """Valid implications: the hand-picked list, then seeded schema instances, weakenings and filtered random pairs."""
    rng = random.Random(seed)
    out: list[tuple[Formula, Formula]] = []
    seen: set[tuple[int, int]] = set()

    def add(phi: Formula, psi: Formula) -> None:
        key = (phi.uid, psi.uid)
        if key not in seen and is_valid_implication(phi, psi):
            seen.add(key)
            out.append((phi, psi))

    for a, b in HAND_PICKED_IMPLICATIONS:
        add(parse(a), parse(b))
    attempts = 0
    while len(out) < count:
        attempts += 1
        if attempts > 100 * count:
            raise RuntimeError("corpus generation stalled")
        mode = rng.random()
        if mode < 0.35:
            lhs, rhs = rng.choice(_SCHEMAS)
            subst = {v: random_formula(rng, 1, 3) for v in "ABC"}
            phi, psi = _substitute(lhs, subst), _substitute(rhs, subst)
        elif mode < 0.75:
            phi = random_formula(rng, 2, 8)
            psi = _weaken(rng, nnf(phi))
        else:
            phi, psi = random_formula(rng, 2, 7), random_formula(rng, 2, 7)
        if _fits(phi, psi, max_nodes):
            add(phi, psi)
    return tuple(out)


@lru_cache(maxsize=None)
def formula_corpus(seed: int = 7, count: int = 150, max_nodes: int = 8) -> tuple[Formula, ...]:
    """Small formulas for decider/oracle agreement: random ones plus both sides of each corpus implication."""
    rng = random.Random(seed)
    out: list[Formula] = []
    seen: set[Formula] = set()
    for phi, psi in implication_corpus():
        for f in (phi, psi, And(phi, Neg(psi))):
            if f not in seen and len(sig(f)) <= 3 and modal_depth(f) <= 2 and len(subf(nnf(f))) <= 16:
                seen.add(f)
                out.append(f)
    extra = 0
    while extra < count:
        f = random_formula(rng, 2, max_nodes)
        if f not in seen:
            seen.add(f)
            out.append(f)
            extra += 1
    return tuple(out)
