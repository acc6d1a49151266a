"""Modal tree automata: construction from formulas, acceptance, projection and back-translation."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional

from .errors import NotValidError, PreconditionError, SizeGuardError
from .formula import (
    AND, BOT_K, BOX, DIA, NOT, OR, PROP, TOP,
    Formula, Nabla, Neg, Prop, Signature, conj, disj, expand_nabla, modal_depth, nnf, sig, signature,
    subf,
)
from .limits import check_deadline
from .parsing import to_text
from .quasimodel import is_valid_implication
from .semantics import PointedModel, is_tree

Letter = frozenset  # the set of letters true at a node
Transition = tuple  # (state, letter, frozenset of states)


@dataclass(frozen=True)
class AcyclicityWitness:
    rank: dict


@dataclass(frozen=True, eq=False)
class ModalAutomaton:
    signature: Signature
    states: tuple
    transitions: frozenset
    initial: object
    accepting: frozenset
    labels: dict = field(default_factory=dict, compare=False)
    _index: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        known = set(self.states)
        if self.initial not in known:
            raise PreconditionError("initial state is not declared")
        if not self.accepting <= known:
            raise PreconditionError("accepting states must be declared")
        for q, a, s in self.transitions:
            if q not in known or not s <= known:
                raise PreconditionError("transition references an undeclared state")
            if not a <= self.signature:
                raise PreconditionError("transition letter outside the signature")
        idx: dict = {}
        for q, a, s in sorted(self.transitions, key=_transition_key):
            idx.setdefault((q, a), []).append(s)
        self._index.update(idx)

    def options(self, q, letter: Letter) -> list:
        return self._index.get((q, letter), [])

    def state_name(self, q) -> str:
        return self.labels.get(q, str(q))

    def to_dict(self) -> dict:
        name = self.state_name
        return {
            "signature": list(self.signature),
            "states": [name(q) for q in self.states],
            "transitions": [[name(q), sorted(a), sorted(name(x) for x in s)]
                            for q, a, s in sorted(self.transitions, key=_transition_key)],
            "initial": name(self.initial),
            "accepting": sorted(name(q) for q in self.accepting),
        }


def _transition_key(t):
    q, a, s = t
    return (str(q), sorted(a), sorted(str(x) for x in s))


def make_automaton(signature_letters: Iterable[str], states: Iterable, transitions: Iterable,
                   initial, accepting: Iterable) -> ModalAutomaton:
    trans = frozenset((q, frozenset(a), frozenset(s)) for q, a, s in transitions)
    return ModalAutomaton(Signature(signature_letters), tuple(states), trans, initial, frozenset(accepting))


# ---------------------------------------------------------------------------
# formulas to automata


def set_rank(psi: frozenset) -> int:
    """0 for the empty set, otherwise one plus the largest modal depth."""
    if not psi:
        return 0
    return 1 + max(modal_depth(f) for f in psi)


def _decisive_refinements(psi: frozenset) -> list[frozenset]:
    """Minimal decisive refinements: close under conjunction, choose a disjunct, never include false."""
    out: list[frozenset] = []
    stack = [(tuple(sorted(psi, key=to_text)), frozenset())]
    seen = set()
    while stack:
        todo, acc = stack.pop()
        dead = False
        while todo:
            f, todo = todo[0], todo[1:]
            if f in acc:
                continue
            if f.kind == BOT_K:
                dead = True
                break
            acc = acc | {f}
            if f.kind == AND:
                todo = (f.left, f.right) + todo
            elif f.kind == OR and f.left not in acc and f.right not in acc:
                stack.append(((f.right,) + todo, acc))
                todo = (f.left,) + todo
        if not dead and acc not in seen:
            seen.add(acc)
            out.append(acc)
    return out


def _all_decisive_refinements(psi: frozenset, universe: frozenset) -> list[frozenset]:
    rest = sorted(universe - psi, key=to_text)
    out = []
    for r in range(len(rest) + 1):
        for extra in itertools.combinations(rest, r):
            cand = psi | frozenset(extra)
            if _is_decisive(cand):
                out.append(cand)
    return out


def _is_decisive(s: frozenset) -> bool:
    for f in s:
        if f.kind == BOT_K:
            return False
        if f.kind == AND and not (f.left in s and f.right in s):
            return False
        if f.kind == OR and not (f.left in s or f.right in s):
            return False
    return True


def _letters_for(ref: frozenset, sigma: Signature) -> list[Letter]:
    pos = {f.name for f in ref if f.kind == PROP}
    neg = {f.child.name for f in ref if f.kind == NOT}
    if pos & neg:
        return []
    free = [p for p in sigma if p not in pos and p not in neg]
    return [frozenset(pos) | frozenset(c) for r in range(len(free) + 1)
            for c in itertools.combinations(free, r)]


def _set_partitions(items: list) -> Iterator[list[frozenset]]:
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [part[i] | {first}] + part[i + 1:]
        yield part + [frozenset([first])]


def _state_label(psi: frozenset) -> str:
    return "{" + ", ".join(sorted(to_text(f) for f in psi)) + "}"


def formula_to_automaton(chi: Formula, sigma: Iterable[str] | None = None, full: bool = False,
                         max_full_subformulas: int = 3) -> ModalAutomaton:
    """Automaton over subformula sets accepting exactly the finite trees that satisfy ``chi``.

    The default builds only states reachable from the initial one, using
    minimal refinements and child families that split the diamond demands into
    disjoint groups.  ``full=True`` enumerates every subset and every
    transition allowed by the definition; it is guarded to tiny formulas.
    """
    root = nnf(expand_nabla(chi))
    sigma = sig(root) if sigma is None else (signature(sigma) if isinstance(sigma, str) else Signature(sigma))
    if not sig(root) <= sigma:
        raise PreconditionError("formula uses letters outside the automaton signature")
    if full:
        return _full_automaton(root, sigma, max_full_subformulas)
    init = frozenset([root])
    states: list[frozenset] = []
    seen: set[frozenset] = set()
    transitions: set = set()
    queue = [init]
    while queue:
        check_deadline()
        psi = queue.pop()
        if psi in seen:
            continue
        seen.add(psi)
        states.append(psi)
        if not psi:
            continue
        for ref in _decisive_refinements(psi):
            letters = _letters_for(ref, sigma)
            if not letters:
                continue
            boxes = frozenset(f.child for f in ref if f.kind == BOX)
            dias = sorted({f.child for f in ref if f.kind == DIA}, key=to_text)
            families: list[frozenset] = []
            if not dias:
                families = [frozenset(), frozenset([boxes])]
            else:
                for part in _set_partitions(dias):
                    base = frozenset(boxes | blk for blk in part)
                    families.append(base)
                    families.append(base | {boxes})
            for fam in families:
                for child in fam:
                    if child not in seen:
                        queue.append(child)
                for a in letters:
                    transitions.add((psi, a, fam))
    accepting = frozenset([frozenset()]) if frozenset() in seen else frozenset()
    labels = {q: _state_label(q) for q in states}
    states.sort(key=lambda q: (set_rank(q), _state_label(q)))
    return ModalAutomaton(sigma, tuple(states), frozenset(transitions), init, accepting, labels)


def _full_automaton(root: Formula, sigma: Signature, limit: int) -> ModalAutomaton:
    universe = frozenset(subf(root))
    if len(universe) > limit:
        raise SizeGuardError(f"full automaton needs at most {limit} subformulas, got {len(universe)}")
    states = [frozenset(c) for r in range(len(universe) + 1)
              for c in itertools.combinations(sorted(universe, key=to_text), r)]
    transitions = set()
    for psi in states:
        rk = set_rank(psi)
        lower = [s for s in states if set_rank(s) < rk]
        families = [frozenset(c) for r in range(len(lower) + 1) for c in itertools.combinations(lower, r)]
        for ref in _all_decisive_refinements(psi, universe):
            letters = _letters_for(ref, sigma)
            if not letters:
                continue
            dias = [f.child for f in ref if f.kind == DIA]
            boxes = [f.child for f in ref if f.kind == BOX]
            for fam in families:
                check_deadline()
                if all(any(d in s for s in fam) for d in dias) and all(b in s for b in boxes for s in fam):
                    for a in letters:
                        transitions.add((psi, a, fam))
    labels = {q: _state_label(q) for q in states}
    return ModalAutomaton(sigma, tuple(states), frozenset(transitions), frozenset([root]),
                          frozenset([frozenset()]), labels)


# ---------------------------------------------------------------------------
# acceptance


def _tree_tuple(pm: PointedModel, sigma: Signature):
    m = pm.model

    def build(w):
        lab = frozenset(p for p in sigma if w in m.valuation.get(p, ()))
        return (lab, tuple(build(v) for v in m.successors(w)))

    return build(pm.point)


def _matches(options: frozenset, child_sets: tuple[frozenset, ...]) -> bool:
    """Can the children be labelled from their admissible sets so that the labels are exactly ``options``?"""
    if not options:
        return not child_sets
    if any(not (c & options) for c in child_sets):
        return False
    if len(options) > len(child_sets):
        return False
    # every required state gets its own child (bipartite matching)
    owner: dict[int, object] = {}

    def augment(q, visited: set) -> bool:
        for i, c in enumerate(child_sets):
            if q in c and i not in visited:
                visited.add(i)
                if i not in owner or augment(owner[i], visited):
                    owner[i] = q
                    return True
        return False

    return all(augment(q, set()) for q in sorted(options, key=str))


def matches_bruteforce(options: frozenset, child_sets: tuple[frozenset, ...]) -> bool:
    if len(child_sets) > 4:
        raise PreconditionError("brute-force matcher is limited to fanout 4")
    choices = [sorted(c & options, key=str) for c in child_sets]
    for pick in itertools.product(*choices):
        if frozenset(pick) == options:
            return True
    return not options and not child_sets


class _Acceptor:
    def __init__(self, a: ModalAutomaton):
        self.a = a
        self.cache: dict = {}

    def admissible(self, node) -> frozenset:
        hit = self.cache.get(node)
        if hit is not None:
            return hit
        lab, kids = node
        kid_sets = tuple(self.admissible(k) for k in kids)
        a = self.a
        out = set(a.accepting)
        for q in a.states:
            if q in out:
                continue
            for s in a.options(q, lab):
                if _matches(s, kid_sets):
                    out.add(q)
                    break
        res = frozenset(out)
        self.cache[node] = res
        return res


_acceptors: dict[int, _Acceptor] = {}


def accepts(a: ModalAutomaton, t: PointedModel) -> bool:
    """Whether some accepting run exists on the finite tree ``t``."""
    if not is_tree(t):
        raise PreconditionError("accepts: input model is not a tree rooted at its point")
    return accepts_tree(a, _tree_tuple(t, a.signature))


def accepts_tree(a: ModalAutomaton, node) -> bool:
    acc = _acceptors.get(id(a))
    if acc is None or acc.a is not a:
        acc = _Acceptor(a)
        _acceptors[id(a)] = acc
    return a.initial in acc.admissible(node)


# ---------------------------------------------------------------------------
# structure


def is_acyclic(a: ModalAutomaton) -> Optional[AcyclicityWitness]:
    """Least rank function (longest path to a sink), or None on a cycle."""
    succ: dict = {q: set() for q in a.states}
    for q, _, s in a.transitions:
        succ[q] |= s
    rank: dict = {}
    state: dict = {}
    for start in a.states:
        if start in rank:
            continue
        stack = [(start, iter(sorted(succ[start], key=str)))]
        state[start] = 1
        while stack:
            q, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                stack.pop()
                rank[q] = 1 + max((rank[x] for x in succ[q]), default=-1)
                state[q] = 2
                continue
            st = state.get(nxt, 0)
            if st == 1:
                return None
            if st == 0:
                state[nxt] = 1
                stack.append((nxt, iter(sorted(succ[nxt], key=str))))
    return AcyclicityWitness(rank)


def is_rank_witness(a: ModalAutomaton, rank: dict) -> bool:
    return all(rank[x] < rank[q] for q, _, s in a.transitions for x in s)


def project(a: ModalAutomaton, keep: Iterable[str]) -> ModalAutomaton:
    keep = signature(keep) if isinstance(keep, str) else Signature(keep)
    if not keep <= a.signature:
        raise PreconditionError("projection signature must be a subset of the automaton signature")
    trans = frozenset((q, letter & keep, s) for q, letter, s in a.transitions)
    return ModalAutomaton(keep, a.states, trans, a.initial, a.accepting, dict(a.labels))


def automaton_to_formula(a: ModalAutomaton) -> Formula:
    """Formula with nabla nodes true on sufficiently fat trees exactly when the automaton accepts."""
    witness = is_acyclic(a)
    if witness is None:
        raise PreconditionError("automaton_to_formula: automaton is cyclic")
    by_state: dict = {q: [] for q in a.states}
    for t in sorted(a.transitions, key=_transition_key):
        by_state[t[0]].append(t)
    memo: dict = {}
    for q in sorted(a.states, key=lambda x: witness.rank[x]):
        if q in a.accepting:
            memo[q] = TOP
            continue
        parts = []
        for _, letter, s in by_state[q]:
            lits = [Prop(p) if p in letter else Neg(Prop(p)) for p in a.signature]
            parts.append(conj(lits + [Nabla(memo[x] for x in s)]))
        memo[q] = disj(parts)
    return memo[a.initial]


def craig_via_automata(phi: Formula, psi: Formula) -> Formula:
    if not is_valid_implication(phi, psi):
        raise NotValidError("implication is not valid")
    a = formula_to_automaton(phi, sig(phi))
    return expand_nabla(automaton_to_formula(project(a, sig(phi) & sig(psi))))


# ---------------------------------------------------------------------------
# bounded tree families


def tree_family(letters: Iterable[str], depth: int, branch: int) -> list:
    """All trees (label, children) up to ``depth`` with at most ``branch`` children, up to child reordering."""
    letters = sorted(letters)
    labels = [frozenset(c) for r in range(len(letters) + 1) for c in itertools.combinations(letters, r)]
    level = [(lab, ()) for lab in labels]
    for _ in range(depth):
        pool = list(level)
        nxt = []
        for lab in labels:
            for r in range(branch + 1):
                for kids in itertools.combinations_with_replacement(range(len(pool)), r):
                    nxt.append((lab, tuple(pool[k] for k in kids)))
        level = list(dict.fromkeys(nxt))
    return level


def tree_to_model(node, letters: Iterable[str] = ()) -> PointedModel:
    from .semantics import KripkeModel

    worlds, edges = [], []
    val: dict[str, set] = {p: set() for p in letters}

    def build(n) -> str:
        name = f"n{len(worlds)}"
        worlds.append(name)
        lab, kids = n
        for p in lab:
            val.setdefault(p, set()).add(name)
        for k in kids:
            edges.append((name, build(k)))
        return name

    root = build(node)
    return PointedModel(KripkeModel.build(worlds, edges, val), root)


def reduct_tree(node, keep: frozenset):
    lab, kids = node
    return (lab & keep, tuple(reduct_tree(k, keep) for k in kids))
