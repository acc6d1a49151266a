"""Type elimination over combined types and Lyndon interpolants read off the elimination order.

Two engines share this module:

* the exact engine enumerates every locally consistent subset of both
  subformula tables, eliminates bad combined types one at a time and records
  why each one went; interpolants are assembled from that record;
* the refinement engine only ever looks at the minimal refinements of the
  formula sets it is asked about.  Surviving types are closed under taking
  locally consistent subsets, so asking whether some surviving type extends a
  given pair of sets reduces to the same question for its minimal refinements.
  This is what makes larger inputs tractable.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import NotValidError, PreconditionError, SizeGuardError
from .formula import (
    AND, BOT, BOT_K, BOX, DIA, NOT, OR, PROP, TOP,
    Box, Diamond, Formula, Neg, Prop, conj, disj, expand_nabla, nnf, subf,
)
from .limits import check_deadline, check_type_count
from .parsing import to_text
from .semantics import KripkeModel, PointedModel, eval_formula

DEFAULT_MAX_SUBFORMULAS = 20
LEFT, RIGHT = "L", "R"


def prepare(f: Formula) -> Formula:
    return nnf(expand_nabla(f))


def _ordered(fs: Iterable[Formula]) -> list[Formula]:
    return sorted(fs, key=lambda g: (len(to_text(g)), to_text(g)))


# ---------------------------------------------------------------------------
# subformula tables and type enumeration


class SubformulaTable:
    """Indexed subformula closure of one side, with the bit masks elimination needs."""

    def __init__(self, root: Formula):
        self.root = root
        self.formulas: list[Formula] = _ordered(subf(root))
        self.index = {f: i for i, f in enumerate(self.formulas)}
        self.n = len(self.formulas)
        self.diamonds = [i for i, f in enumerate(self.formulas) if f.kind == DIA]
        self.boxes = [i for i, f in enumerate(self.formulas) if f.kind == BOX]
        self.body = {i: self.index[self.formulas[i].child] for i in self.diamonds + self.boxes}
        self.letter_bits: dict[str, tuple[Optional[int], Optional[int]]] = {}
        for i, f in enumerate(self.formulas):
            if f.kind == PROP:
                pos, neg = self.letter_bits.get(f.name, (None, None))
                self.letter_bits[f.name] = (i, neg)
            elif f.kind == NOT:
                pos, neg = self.letter_bits.get(f.child.name, (None, None))
                self.letter_bits[f.child.name] = (pos, i)

    def members(self, mask: int) -> frozenset[Formula]:
        return frozenset(f for i, f in enumerate(self.formulas) if mask >> i & 1)

    def mask_of(self, fs: Iterable[Formula]) -> int:
        m = 0
        for f in fs:
            m |= 1 << self.index[f]
        return m

    def locally_consistent_masks(self) -> np.ndarray:
        """All masks satisfying the four local consistency clauses, ascending."""
        n = self.n
        masks = np.arange(1 << n, dtype=np.int64)
        ok = np.ones(masks.shape, dtype=bool)

        def bit(i: int) -> np.ndarray:
            return (masks >> i) & 1 == 1

        for i, f in enumerate(self.formulas):
            k = f.kind
            if k == AND:
                ok &= ~bit(i) | (bit(self.index[f.left]) & bit(self.index[f.right]))
            elif k == OR:
                ok &= ~bit(i) | bit(self.index[f.left]) | bit(self.index[f.right])
            elif k == BOT_K:
                ok &= ~bit(i)
        for pos, neg in self.letter_bits.values():
            if pos is not None and neg is not None:
                ok &= ~(bit(pos) & bit(neg))
        return masks[ok]


@dataclass(frozen=True)
class CombinedType:
    left_mask: int
    right_mask: int
    left: frozenset = field(compare=False, hash=False)
    right: frozenset = field(compare=False, hash=False)

    def to_dict(self) -> dict:
        return {"L": sorted(to_text(f) for f in self.left), "R": sorted(to_text(f) for f in self.right)}


@dataclass(frozen=True)
class OverlapClash:
    letter: str
    side: str  # side holding the positive literal

    def to_dict(self) -> dict:
        return {"kind": "OverlapClash", "letter": self.letter, "side": self.side}


@dataclass(frozen=True)
class DiamondUnwitnessed:
    side: str
    diamond: Formula

    def to_dict(self) -> dict:
        return {"kind": "DiamondUnwitnessed", "side": self.side, "formula": to_text(self.diamond)}


class EliminationTrace:
    """Initial type set, ordered eliminations with reasons, and the surviving set.

    Types are materialized on first access, since the initial set can be large.
    """

    def __init__(self, run: "_Run"):
        self._run = run

    @property
    def initial(self) -> list[CombinedType]:
        P = self._run.problem
        return [P.ctype(i, j) for i in range(P.NL) for j in range(P.NR)]

    @property
    def steps(self) -> list[tuple[CombinedType, object]]:
        P = self._run.problem
        return [(P.ctype(i, j), r) for i, j, r in self._run.order]

    @property
    def final(self) -> frozenset[CombinedType]:
        P = self._run.problem
        return frozenset(P.ctype(int(i), int(j)) for i, j in zip(*np.nonzero(self._run.alive)))

    def final_keys(self) -> frozenset[tuple[int, int]]:
        P = self._run.problem
        return frozenset((int(P.lmasks[i]), int(P.rmasks[j])) for i, j in zip(*np.nonzero(self._run.alive)))

    def to_dict(self) -> dict:
        P = self._run.problem
        return {
            "initial": P.NL * P.NR,
            "steps": [{"type": t.to_dict(), "reason": r.to_dict()} for t, r in self.steps],
            "final": [t.to_dict() for t in sorted(self.final, key=lambda t: (t.left_mask, t.right_mask))],
        }


@dataclass
class SatResult:
    satisfiable: bool
    witness: Optional[PointedModel]
    trace: Optional[EliminationTrace]


class _Problem:
    """Both subformula tables plus the numpy matrices shared by elimination and interpolation."""

    def __init__(self, phi: Formula, psi: Formula, max_subformulas: int = DEFAULT_MAX_SUBFORMULAS):
        self.phi, self.psi = phi, psi
        self.left_root = prepare(phi)
        self.right_root = prepare(Neg(psi))
        self.L = SubformulaTable(self.left_root)
        self.R = SubformulaTable(self.right_root)
        for side, tab in ((LEFT, self.L), (RIGHT, self.R)):
            if tab.n > max_subformulas:
                raise SizeGuardError(
                    f"{side}-side subformula table has {tab.n} entries (limit {max_subformulas})")
        self.lmasks = self.L.locally_consistent_masks()
        self.rmasks = self.R.locally_consistent_masks()
        self.NL, self.NR = len(self.lmasks), len(self.rmasks)
        check_type_count(self.NL * self.NR)
        self.succL = self._succ_matrix(self.L, self.lmasks)
        self.succR = self._succ_matrix(self.R, self.rmasks)
        self.clash = self._clash_matrix()
        self._types: dict[tuple[int, int], CombinedType] = {}

    @staticmethod
    def _succ_matrix(tab: SubformulaTable, masks: np.ndarray) -> np.ndarray:
        need = np.zeros(masks.shape, dtype=np.int64)
        for b in tab.boxes:
            has = (masks >> b) & 1 == 1
            need[has] |= 1 << tab.body[b]
        # succ[i, j]: masks[j] contains every box body of masks[i]
        return (need[:, None] & ~masks[None, :]) == 0

    def _clash_matrix(self) -> np.ndarray:
        out = np.zeros((self.NL, self.NR), dtype=bool)
        for letter in set(self.L.letter_bits) & set(self.R.letter_bits):
            lp, ln = self.L.letter_bits[letter]
            rp, rn = self.R.letter_bits[letter]
            if lp is not None and rn is not None:
                out |= (((self.lmasks >> lp) & 1) == 1)[:, None] & (((self.rmasks >> rn) & 1) == 1)[None, :]
            if ln is not None and rp is not None:
                out |= (((self.lmasks >> ln) & 1) == 1)[:, None] & (((self.rmasks >> rp) & 1) == 1)[None, :]
        return out

    def has(self, side: str, idx: np.ndarray | int, bit: int):
        masks = self.lmasks if side == LEFT else self.rmasks
        return (masks[idx] >> bit) & 1 == 1

    def ctype(self, i: int, j: int) -> CombinedType:
        key = (i, j)
        t = self._types.get(key)
        if t is None:
            lm, rm = int(self.lmasks[i]), int(self.rmasks[j])
            t = CombinedType(lm, rm, self.L.members(lm), self.R.members(rm))
            self._types[key] = t
        return t

    def clash_reason(self, i: int, j: int) -> Optional[OverlapClash]:
        lm, rm = int(self.lmasks[i]), int(self.rmasks[j])
        for letter in sorted(set(self.L.letter_bits) & set(self.R.letter_bits)):
            lp, ln = self.L.letter_bits[letter]
            rp, rn = self.R.letter_bits[letter]
            if lp is not None and rn is not None and lm >> lp & 1 and rm >> rn & 1:
                return OverlapClash(letter, LEFT)
            if ln is not None and rp is not None and lm >> ln & 1 and rm >> rp & 1:
                return OverlapClash(letter, RIGHT)
        return None


# ---------------------------------------------------------------------------
# exact elimination


@dataclass
class _Run:
    problem: _Problem
    order: list[tuple[int, int, object]]  # (i, j, reason) in elimination order
    alive: np.ndarray
    step_of: dict[tuple[int, int], int]


def _eliminate(problem: _Problem, seed: Optional[int] = None) -> _Run:
    """Eliminate in rounds.

    A type that fails at the start of a round keeps failing while others are
    removed (witness counts only shrink), so removing any batch of failing
    types one after another is a legal elimination sequence.  Without a seed
    every round removes all failing types in index order; with a seed each
    round removes a random nonempty subset in random order.
    """
    P = problem
    NL, NR = P.NL, P.NR
    alive = np.ones((NL, NR), dtype=bool)
    sides = [(LEFT, d) for d in P.L.diamonds] + [(RIGHT, d) for d in P.R.diamonds]
    sL, sR = P.succL.astype(np.float64), P.succR.astype(np.float64)
    pre = []
    for side, d in sides:
        if side == LEFT:
            body = P.has(LEFT, slice(None), P.L.body[d])
            left, right = sL * body[None, :], sR.T
            holder = np.broadcast_to(P.has(LEFT, slice(None), d)[:, None], (NL, NR))
        else:
            body = P.has(RIGHT, slice(None), P.R.body[d])
            left, right = sL, (sR * body[None, :]).T
            holder = np.broadcast_to(P.has(RIGHT, slice(None), d)[None, :], (NL, NR))
        pre.append((left, right, holder))

    rng = random.Random(seed) if seed is not None else None
    order: list[tuple[int, int, object]] = []
    step_of: dict[tuple[int, int], int] = {}
    while True:
        check_deadline()
        a = alive.astype(np.float64)
        unwitnessed = []
        failing = P.clash & alive
        for left, right, holder in pre:
            u = holder & alive & ((left @ a @ right) < 0.5)
            unwitnessed.append(u)
            failing = failing | u
        flat = np.flatnonzero(failing)
        if flat.size == 0:
            break
        batch = flat.tolist()
        if rng is not None:
            chosen = [f for f in batch if rng.random() < 0.5] or [rng.choice(batch)]
            rng.shuffle(chosen)
            batch = chosen
        for f in batch:
            i, j = divmod(f, NR)
            reason = P.clash_reason(i, j)
            if reason is None:
                for (side, d), u in zip(sides, unwitnessed):
                    if u[i, j]:
                        tab = P.L if side == LEFT else P.R
                        reason = DiamondUnwitnessed(side, tab.formulas[d])
                        break
            alive[i, j] = False
            step_of[(i, j)] = len(order)
            order.append((i, j, reason))
    return _Run(P, order, alive, step_of)


def _trace(run: _Run) -> EliminationTrace:
    return EliminationTrace(run)


def all_types(phi: Formula, psi: Formula, max_subformulas: int = DEFAULT_MAX_SUBFORMULAS) -> list[CombinedType]:
    """Every combined type, ordered by (left mask, right mask)."""
    P = _Problem(phi, psi, max_subformulas)
    return [P.ctype(i, j) for i in range(P.NL) for j in range(P.NR)]


def eliminate(phi: Formula, psi: Formula, seed: Optional[int] = None,
              max_subformulas: int = DEFAULT_MAX_SUBFORMULAS) -> EliminationTrace:
    """Run a type elimination sequence; ``seed`` picks a random order among failing types."""
    return _trace(_eliminate(_Problem(phi, psi, max_subformulas), seed))


def _root_pairs(P: _Problem) -> tuple[np.ndarray, np.ndarray]:
    lroot = P.has(LEFT, slice(None), P.L.index[P.left_root])
    rroot = P.has(RIGHT, slice(None), P.R.index[P.right_root])
    return np.flatnonzero(lroot), np.flatnonzero(rroot)


def quasi_model_witness(P: _Problem, alive: np.ndarray, point: tuple[int, int]) -> PointedModel:
    """One world per surviving type, edges along viable successors, letters from either side."""
    surv = [(int(i), int(j)) for i, j in zip(*np.nonzero(alive))]
    name = {t: f"t{i}_{j}" for t in surv for (i, j) in [t]}
    edges = []
    for a in surv:
        for b in surv:
            if P.succL[a[0], b[0]] and P.succR[a[1], b[1]]:
                edges.append((name[a], name[b]))
    val: dict[str, set[str]] = {}
    for (i, j) in surv:
        for f in P.ctype(i, j).left | P.ctype(i, j).right:
            if f.kind == PROP:
                val.setdefault(f.name, set()).add(name[(i, j)])
    letters = set(P.L.letter_bits) | set(P.R.letter_bits)
    for p in letters:
        val.setdefault(p, set())
    model = KripkeModel.build([name[t] for t in surv], edges, val)
    return PointedModel(model, name[point])


def satisfiable(f: Formula, engine: str = "exact",
                max_subformulas: int = DEFAULT_MAX_SUBFORMULAS) -> SatResult:
    """Decide satisfiability of ``f``; the exact engine runs elimination on the pair (f, false)."""
    if engine == "lazy":
        model = _Tableau().countermodel(prepare(f), TOP)
        return SatResult(model is not None, model, None)
    if engine != "exact":
        raise PreconditionError(f"unknown engine {engine!r}")
    P = _Problem(f, BOT, max_subformulas)
    run = _eliminate(P)
    trace = _trace(run)
    ls, rs = _root_pairs(P)
    for i in ls:
        for j in rs:
            if run.alive[i, j]:
                witness = quasi_model_witness(P, run.alive, (int(i), int(j)))
                if not eval_formula(witness.model, witness.point, f):
                    raise AssertionError("quasi-model witness fails the input formula")
                return SatResult(True, witness, trace)
    return SatResult(False, None, trace)


def types_hold_in_witness(P: _Problem, alive: np.ndarray) -> bool:
    if not alive.any():
        return True
    i0, j0 = (int(x) for x in np.argwhere(alive)[0])
    pm = quasi_model_witness(P, alive, (i0, j0))
    for i, j in zip(*np.nonzero(alive)):
        t = P.ctype(int(i), int(j))
        w = f"t{int(i)}_{int(j)}"
        for g in t.left | t.right:
            if not eval_formula(pm.model, w, g):
                return False
    return True


def is_valid_implication(phi: Formula, psi: Formula, engine: str = "lazy",
                         max_subformulas: int = DEFAULT_MAX_SUBFORMULAS) -> bool:
    """Validity of phi -> psi: no surviving type holds both nnf(phi) and nnf(~psi)."""
    if engine == "lazy":
        return _Tableau().satisfiable(prepare(phi), prepare(Neg(psi))) is False
    if engine != "exact":
        raise PreconditionError(f"unknown engine {engine!r}")
    P = _Problem(phi, psi, max_subformulas)
    run = _eliminate(P)
    ls, rs = _root_pairs(P)
    return not run.alive[np.ix_(ls, rs)].any()


def countermodel(phi: Formula, psi: Formula) -> Optional[PointedModel]:
    """A pointed model of phi & ~psi, verified by evaluation, or None when phi -> psi is valid."""
    pm = _Tableau().countermodel(prepare(phi), prepare(Neg(psi)))
    if pm is not None and not (eval_formula(pm.model, pm.point, phi)
                               and not eval_formula(pm.model, pm.point, psi)):
        raise AssertionError("countermodel failed verification")
    return pm


# ---------------------------------------------------------------------------
# interpolants from the exact elimination order


def _dia(f: Formula) -> Formula:
    return BOT if f is BOT else Diamond(f)


def _box(f: Formula) -> Formula:
    return TOP if f is TOP else Box(f)


def _literal(letter: str, positive: bool) -> Formula:
    return Prop(letter) if positive else Neg(Prop(letter))


class _ExactInterpolator:
    def __init__(self, run: _Run):
        self.run = run
        self.P = run.problem
        self.memo: dict[tuple[int, int], Formula] = {}
        self.conj_memo: dict[tuple[int, bytes], Formula] = {}
        self.disj_memo: dict[tuple, Formula] = {}
        self._boxkey_L = self._boxkeys(self.P.L, self.P.lmasks)
        self._boxkey_R = self._boxkeys(self.P.R, self.P.rmasks)

    @staticmethod
    def _boxkeys(tab: SubformulaTable, masks: np.ndarray) -> list[int]:
        bm = 0
        for b in tab.boxes:
            bm |= 1 << b
        return [int(m) & bm for m in masks]

    def _require_eliminated(self, i: int, j: int, before: int) -> None:
        step = self.run.step_of.get((i, j))
        if step is None or step >= before:
            raise AssertionError(f"type pair ({i},{j}) referenced before its elimination")

    def theta(self, i: int, j: int) -> Formula:
        key = (i, j)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        step = self.run.step_of.get(key)
        if step is None:
            raise AssertionError("interpolant requested for a surviving type")
        reason = self.run.order[step][2]
        P = self.P
        if isinstance(reason, OverlapClash):
            out = _literal(reason.letter, reason.side == LEFT)
        else:
            side, d = reason.side, reason.diamond
            xs = np.flatnonzero(P.succL[i])
            ys = np.flatnonzero(P.succR[j])
            if side == LEFT:
                xs = xs[P.has(LEFT, xs, P.L.index[d.child])]
            else:
                ys = ys[P.has(RIGHT, ys, P.R.index[d.child])]
            inner = self._disj_conj(xs, ys, step)
            out = _dia(inner) if side == LEFT else _box(inner)
        self.memo[key] = out
        return out

    def _disj_conj(self, xs: np.ndarray, ys: np.ndarray, before: Optional[int]) -> Formula:
        key = (xs.tobytes(), ys.tobytes())
        hit = self.disj_memo.get(key)
        if hit is not None:
            return hit
        yk = ys.tobytes()
        parts = []
        for x in xs:
            x = int(x)
            ck = (x, yk)
            c = self.conj_memo.get(ck)
            if c is None:
                terms = []
                for y in ys:
                    y = int(y)
                    if before is not None:
                        self._require_eliminated(x, y, before)
                    terms.append(self.theta(x, y))
                c = conj(terms)
                self.conj_memo[ck] = c
            elif before is not None:
                for y in ys:
                    self._require_eliminated(x, int(y), before)
            parts.append(c)
        out = disj(parts)
        self.disj_memo[key] = out
        return out


# ---------------------------------------------------------------------------
# refinement engine


def _complement(lit: Formula) -> Formula:
    return lit.child if lit.kind == NOT else Neg(lit)


class _Tableau:
    """Memoized search over minimal refinements of pairs of NNF formula sets."""

    def __init__(self):
        self._ref: dict[frozenset, list[frozenset]] = {}
        self._sat: dict[tuple[frozenset, frozenset], Optional[tuple]] = {}
        self._theta: dict[tuple[frozenset, frozenset], Formula] = {}

    def refinements(self, seed: frozenset) -> list[frozenset]:
        hit = self._ref.get(seed)
        if hit is not None:
            return hit
        out: list[frozenset] = []
        seen: set[frozenset] = set()
        stack: list[tuple[tuple[Formula, ...], frozenset]] = [(tuple(_ordered(seed)), frozenset())]
        while stack:
            check_deadline()
            todo, acc = stack.pop()
            dead = False
            while todo:
                f, todo = todo[0], todo[1:]
                if f in acc:
                    continue
                k = f.kind
                if k == BOT_K:
                    dead = True
                    break
                if k == PROP or k == NOT:
                    if _complement(f) in acc:
                        dead = True
                        break
                    acc = acc | {f}
                elif k == AND:
                    acc = acc | {f}
                    todo = (f.left, f.right) + todo
                elif k == OR:
                    acc = acc | {f}
                    if f.left in acc or f.right in acc:
                        continue
                    stack.append(((f.right,) + todo, acc))
                    todo = (f.left,) + todo
                else:
                    acc = acc | {f}
            if not dead and acc not in seen:
                seen.add(acc)
                out.append(acc)
        out.sort(key=lambda s: sorted(to_text(f) for f in s))
        self._ref[seed] = out
        return out

    @staticmethod
    def _clash(x: frozenset, y: frozenset) -> Optional[Formula]:
        for f in _ordered(x):
            if f.kind == PROP and Neg(f) in y:
                return f
            if f.kind == NOT and f.child in y:
                return f
        return None

    @staticmethod
    def _bodies(x: frozenset) -> frozenset:
        return frozenset(f.child for f in x if f.kind == BOX)

    def _demands(self, x: frozenset, y: frozenset) -> list[tuple[str, Formula, frozenset, frozenset]]:
        bx, by = self._bodies(x), self._bodies(y)
        out = []
        for d in _ordered(f for f in x if f.kind == DIA):
            out.append((LEFT, d, bx | {d.child}, by))
        for d in _ordered(f for f in y if f.kind == DIA):
            out.append((RIGHT, d, bx, by | {d.child}))
        return out

    def _find(self, left: frozenset, right: frozenset) -> Optional[tuple]:
        key = (left, right)
        if key in self._sat:
            return self._sat[key]
        self._sat[key] = None  # modal depth strictly drops, so no true cycles arise
        found = None
        for x in self.refinements(left):
            for y in self.refinements(right):
                if self._clash(x, y) is not None:
                    continue
                kids = []
                for _, _, l2, r2 in self._demands(x, y):
                    if self._find(l2, r2) is None:
                        break
                    kids.append((l2, r2))
                else:
                    found = (x, y, tuple(kids))
                    break
            if found is not None:
                break
        self._sat[key] = found
        return found

    def satisfiable(self, left: Formula, right: Formula) -> bool:
        return self._find(frozenset([left]), frozenset([right])) is not None

    def countermodel(self, left: Formula, right: Formula) -> Optional[PointedModel]:
        root = (frozenset([left]), frozenset([right]))
        if self._find(*root) is None:
            return None
        names: dict[tuple, str] = {}
        worlds, edges = [], []
        val: dict[str, set[str]] = {}
        stack = [root]
        while stack:
            key = stack.pop()
            if key in names:
                continue
            names[key] = f"s{len(names)}"
            worlds.append(key)
            x, y, kids = self._sat[key]
            for lit in x | y:
                if lit.kind == PROP:
                    val.setdefault(lit.name, set()).add(names[key])
            stack.extend(kids)
        for key in worlds:
            for kid in self._sat[key][2]:
                edges.append((names[key], names[kid]))
        for f in (left, right):
            for p in _letters(f):
                val.setdefault(p, set())
        model = KripkeModel.build([names[k] for k in worlds], edges, val)
        return PointedModel(model, names[root])

    # Lyndon interpolant for an unsatisfiable pair of sets
    def theta(self, left: frozenset, right: frozenset) -> Formula:
        key = (left, right)
        hit = self._theta.get(key)
        if hit is not None:
            return hit
        parts = []
        for x in self.refinements(left):
            parts.append(conj(self._theta_type(x, y) for y in self.refinements(right)))
        out = disj(parts)
        self._theta[key] = out
        return out

    def _theta_type(self, x: frozenset, y: frozenset) -> Formula:
        lit = self._clash(x, y)
        if lit is not None:
            return lit
        for side, _, l2, r2 in self._demands(x, y):
            if self._find(l2, r2) is None:
                inner = self.theta(l2, r2)
                return _dia(inner) if side == LEFT else _box(inner)
        raise NotValidError("type pair is satisfiable; the implication is not valid")


def _letters(f: Formula) -> set[str]:
    from .formula import sig

    return set(sig(f))


# ---------------------------------------------------------------------------
# public interpolation entry point


def lyndon_interpolant(phi: Formula, psi: Formula, engine: str = "auto",
                       max_subformulas: int = DEFAULT_MAX_SUBFORMULAS,
                       exact_pair_limit: int = 4096) -> Formula:
    """Lyndon interpolant for a valid implication phi -> psi.

    ``engine='exact'`` ranges over all types as read off one elimination
    sequence; ``'lazy'`` ranges over minimal refinements only; ``'auto'`` uses
    the exact engine when both subformula tables fit the guard and the number
    of combined types stays below ``exact_pair_limit``.
    """
    if engine == "auto":
        engine = "lazy"
        try:
            P = _Problem(phi, psi, max_subformulas)
            if P.NL * P.NR <= exact_pair_limit:
                engine = "exact"
        except SizeGuardError:
            pass
    if engine == "lazy":
        tab = _Tableau()
        left, right = frozenset([prepare(phi)]), frozenset([prepare(Neg(psi))])
        if tab._find(left, right) is not None:
            raise NotValidError("implication is not valid")
        return tab.theta(left, right)
    if engine != "exact":
        raise PreconditionError(f"unknown engine {engine!r}")
    P = _Problem(phi, psi, max_subformulas)
    run = _eliminate(P)
    ls, rs = _root_pairs(P)
    if run.alive[np.ix_(ls, rs)].any():
        raise NotValidError("implication is not valid")
    return _ExactInterpolator(run)._disj_conj(ls, rs, None)


def final_set_keys(trace: EliminationTrace) -> frozenset[tuple[int, int]]:
    return trace.final_keys()


def is_quasi_model(types: Sequence[CombinedType], phi: Formula, psi: Formula) -> bool:
    """Check both quasi-model conditions directly from the definition."""
    P = _Problem(phi, psi, max(DEFAULT_MAX_SUBFORMULAS, 64))
    tset = {(t.left_mask, t.right_mask) for t in types}
    lidx = {int(m): i for i, m in enumerate(P.lmasks)}
    ridx = {int(m): j for j, m in enumerate(P.rmasks)}
    pairs = [(lidx[a], ridx[b]) for a, b in tset]
    for i, j in pairs:
        if P.clash[i, j]:
            return False
        for side, tab, mine in ((LEFT, P.L, i), (RIGHT, P.R, j)):
            for d in tab.diamonds:
                if not P.has(side, mine, d):
                    continue
                b = tab.body[d]
                ok = any(P.succL[i, i2] and P.succR[j, j2]
                         and P.has(side, i2 if side == LEFT else j2, b) for i2, j2 in pairs)
                if not ok:
                    return False
    return True
