"""Satisfiability for K by propositional abstraction.

Modal subformulas at the top level are treated as fresh atoms and handed to a
CDCL solver. Each propositional model is then checked modally: every true
diamond, together with the bodies of all true boxes, must be satisfiable one
level down. A failed check yields a blocking clause over the diamond and a
minimised set of boxes, and the solver is asked again.

This is used as the independent checker for interpolants, because its
running time does not depend on how many disjunctions a formula carries.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from pysat.solvers import Solver

from .formula import AND, BOT_K, BOX, DIA, NOT, OR, PROP, TOP_K, And, Formula, Neg, expand_nabla, nnf, sig
from .limits import check_deadline
from .semantics import KripkeModel, PointedModel, eval_formula


@dataclass(frozen=True, eq=False)
class _World:
    letters: frozenset[str]
    children: tuple["_World", ...]


class _Encoder:
    def __init__(self):
        self.ids: dict[Formula, int] = {}
        self.clauses: list[list[int]] = []
        self.atoms: dict[int, Formula] = {}
        self.props: dict[int, str] = {}
        self._next = 1

    def _fresh(self) -> int:
        v = self._next
        self._next += 1
        return v

    def lit(self, f: Formula) -> int:
        hit = self.ids.get(f)
        if hit is not None:
            return hit
        k = f.kind
        if k == NOT:
            out = -self.lit(f.child)
        elif k == PROP:
            out = self._fresh()
            self.props[out] = f.name
        elif k in (DIA, BOX):
            out = self._fresh()
            self.atoms[out] = f
        elif k == TOP_K:
            out = self._fresh()
            self.clauses.append([out])
        elif k == BOT_K:
            out = self._fresh()
            self.clauses.append([-out])
        elif k == AND:
            # one-sided definitions suffice: every input is in negation normal form
            out = self._fresh()
            a, b = self.lit(f.left), self.lit(f.right)
            self.clauses += [[-out, a], [-out, b]]
        elif k == OR:
            out = self._fresh()
            a, b = self.lit(f.left), self.lit(f.right)
            self.clauses.append([-out, a, b])
        else:  # pragma: no cover
            raise AssertionError(k)
        self.ids[f] = out
        return out


class KSolver:
    def __init__(self):
        self._memo: dict[frozenset, Optional[_World]] = {}

    def find(self, fs: frozenset) -> Optional[_World]:
        if fs in self._memo:
            return self._memo[fs]
        check_deadline()
        enc = _Encoder()
        units = [[enc.lit(f)] for f in sorted(fs, key=lambda g: g.uid)]
        out = None
        with Solver(name="m22", bootstrap_with=enc.clauses + units) as solver:
            while solver.solve():
                check_deadline()
                true = {v for v in solver.get_model() if v > 0}
                dias = [f for v, f in enc.atoms.items() if v in true and f.kind == DIA]
                boxes = [f for v, f in enc.atoms.items() if v in true and f.kind == BOX]
                bodies = frozenset(b.child for b in boxes)
                kids = []
                conflict = None
                for d in sorted(dias, key=lambda g: g.uid):
                    kid = self.find(bodies | {d.child})
                    if kid is None:
                        conflict = (d, self._shrink(d, boxes))
                        break
                    kids.append(kid)
                if conflict is None:
                    letters = frozenset(name for v, name in enc.props.items() if v in true)
                    out = _World(letters, tuple(kids))
                    break
                d, core = conflict
                solver.add_clause([-enc.ids[d]] + [-enc.ids[b] for b in core])
        self._memo[fs] = out
        return out

    def _shrink(self, d: Formula, boxes: list[Formula]) -> list[Formula]:
        core = sorted(boxes, key=lambda g: g.uid)
        for b in list(core):
            trial = [c for c in core if c is not b]
            if self.find(frozenset(c.child for c in trial) | {d.child}) is None:
                core = trial
        return core


def _to_model(root: _World, letters) -> PointedModel:
    names: dict[int, str] = {}
    order: list[_World] = []
    stack = [root]
    while stack:
        w = stack.pop()
        if id(w) in names:
            continue
        names[id(w)] = f"k{len(names)}"
        order.append(w)
        stack.extend(w.children)
    edges = [(names[id(w)], names[id(c)]) for w in order for c in w.children]
    val = {p: [names[id(w)] for w in order if p in w.letters] for p in sorted(letters)}
    return PointedModel(KripkeModel.build([names[id(w)] for w in order], edges, val), names[id(root)])


def model_of(f: Formula) -> Optional[PointedModel]:
    """A pointed model of ``f`` (checked by evaluation), or None when unsatisfiable."""
    g = nnf(expand_nabla(f))
    w = KSolver().find(frozenset([g]))
    if w is None:
        return None
    pm = _to_model(w, sig(f))
    if not eval_formula(pm.model, pm.point, f):  # pragma: no cover
        raise AssertionError("constructed model does not satisfy the formula")
    return pm


def satisfiable(f: Formula) -> bool:
    return model_of(f) is not None


def countermodel(phi: Formula, psi: Formula) -> Optional[PointedModel]:
    """A pointed model of ``phi & ~psi``, or None when ``phi -> psi`` is valid."""
    return model_of(And(phi, Neg(psi)))


def valid_implication(phi: Formula, psi: Formula) -> bool:
    return countermodel(phi, psi) is None
