"""Backward proof search in a contraction-free sequent calculus for K, and
split interpolation read off a proof.

Sequents are box-only: diamonds are rewritten as ``~[]~`` before search and
restored afterwards. Multisets are sorted tuples, so equal multisets compare
equal and can key the search memo.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import NotValidError, PreconditionError
from .formula import (
    AND, BOT, BOX, DIA, NABLA, NOT, OR, PROP, TOP,
    Box, Formula, Neg, conj, disj, expand_nabla, nodes, resugar_diamonds, sig, substitute_diamonds,
)
from .limits import check_deadline
from .parsing import parse, to_text

Multiset = tuple[Formula, ...]

AX_ID = "Ax_id"
AX_BOT = "Ax_bot"
AX_TOP = "Ax_top"
NEG_L, NEG_R = "not_l", "not_r"
AND_L, AND_R = "and_l", "and_r"
OR_L, OR_R = "or_l", "or_r"
R_BOX = "R_box"

ANT, SUC = "ant", "suc"


def _ms(items: Iterable[Formula]) -> Multiset:
    return tuple(sorted(items, key=lambda f: f.uid))


def _remove_one(ms: Multiset, f: Formula) -> Multiset:
    i = ms.index(f)
    return ms[:i] + ms[i + 1:]


def _check_box_only(f: Formula) -> None:
    for n in nodes(f):
        if n.kind in (DIA, NABLA):
            raise PreconditionError("sequent formulas must be free of diamonds and covers")


def desugar(f: Formula) -> Formula:
    """Box-only equivalent of ``f``."""
    return substitute_diamonds(expand_nabla(f))


@dataclass(frozen=True)
class Sequent:
    antecedent: Multiset
    succedent: Multiset

    def __post_init__(self):
        for f in self.antecedent + self.succedent:
            _check_box_only(f)

    @classmethod
    def of(cls, antecedent: Iterable[Formula] = (), succedent: Iterable[Formula] = ()) -> "Sequent":
        return cls(_ms(antecedent), _ms(succedent))

    @classmethod
    def parse(cls, text: str) -> "Sequent":
        """Read ``A, B => C, D``; diamonds in the input are desugared."""
        if "=>" not in text:
            raise PreconditionError("a sequent needs '=>'")
        lhs, rhs = text.split("=>", 1)

        def side(s: str) -> list[Formula]:
            s = s.strip()
            return [desugar(parse(part)) for part in _split_top_commas(s)] if s else []

        return cls.of(side(lhs), side(rhs))

    def __str__(self) -> str:
        a = ", ".join(to_text(f) for f in self.antecedent)
        s = ", ".join(to_text(f) for f in self.succedent)
        return f"{a} => {s}".strip()


def _split_top_commas(s: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in s:
        if ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p.strip() for p in parts if p.strip()]


@dataclass(frozen=True)
class SplitSequent:
    left_ant: Multiset
    left_suc: Multiset
    right_ant: Multiset
    right_suc: Multiset

    @classmethod
    def of(cls, left_ant=(), left_suc=(), right_ant=(), right_suc=()) -> "SplitSequent":
        return cls(_ms(left_ant), _ms(left_suc), _ms(right_ant), _ms(right_suc))

    def merge(self) -> Sequent:
        return Sequent(_ms(self.left_ant + self.right_ant), _ms(self.left_suc + self.right_suc))

    def __str__(self) -> str:
        def j(ms):
            return ", ".join(to_text(f) for f in ms)
        return f"{j(self.left_ant)} ; {j(self.right_ant)} => {j(self.left_suc)} ; {j(self.right_suc)}"


@dataclass(frozen=True)
class ProofTree:
    conclusion: Sequent
    rule: str
    principal: Formula
    principal_side: str
    premises: tuple["ProofTree", ...] = ()

    def size(self) -> int:
        return 1 + sum(p.size() for p in self.premises)

    def depth(self) -> int:
        return 1 + max((p.depth() for p in self.premises), default=0)

    def render(self, indent: int = 0) -> str:
        lines: list[str] = []
        self._render(lines, indent)
        return "\n".join(lines)

    def _render(self, lines: list[str], indent: int) -> None:
        lines.append(f"{'  ' * indent}{self.conclusion}   [{self.rule}: {to_text(self.principal)}]")
        for p in self.premises:
            p._render(lines, indent + 1)

    def to_dict(self) -> dict:
        return {
            "sequent": str(self.conclusion),
            "rule": self.rule,
            "principal": to_text(self.principal),
            "side": self.principal_side,
            "premises": [p.to_dict() for p in self.premises],
        }


# ---------------------------------------------------------------------------
# proof search

class _Prover:
    def __init__(self):
        self.memo: dict[tuple[Multiset, Multiset], Optional[ProofTree]] = {}

    def prove(self, ant: Multiset, suc: Multiset) -> Optional[ProofTree]:
        key = (ant, suc)
        if key in self.memo:
            return self.memo[key]
        # single-premise steps are taken in a loop so deep formulas do not deepen the recursion
        chain: list[tuple[Sequent, str, Formula, str]] = []
        out: Optional[ProofTree] = None
        while True:
            check_deadline()
            if chain and (ant, suc) in self.memo:
                out = self.memo[(ant, suc)]
                break
            s = Sequent(ant, suc)
            ax = self._axiom(s)
            if ax is not None:
                out = ax
                break
            step = self._single(ant, suc)
            if step is None:
                out = self._branch(s)
                break
            rule, f, side, ant, suc = step
            chain.append((s, rule, f, side))
        self.memo[(ant, suc)] = out
        for s, rule, f, side in reversed(chain):
            out = None if out is None else ProofTree(s, rule, f, side, (out,))
            self.memo[(s.antecedent, s.succedent)] = out
        return out

    @staticmethod
    def _single(ant: Multiset, suc: Multiset):
        for f in ant:
            if f.kind == NOT:
                return NEG_L, f, ANT, _remove_one(ant, f), _ms(suc + (f.child,))
            if f.kind == AND:
                return AND_L, f, ANT, _ms(_remove_one(ant, f) + (f.left, f.right)), suc
        for f in suc:
            if f.kind == NOT:
                return NEG_R, f, SUC, _ms(ant + (f.child,)), _remove_one(suc, f)
            if f.kind == OR:
                return OR_R, f, SUC, ant, _ms(_remove_one(suc, f) + (f.left, f.right))
        return None

    def _branch(self, s: Sequent) -> Optional[ProofTree]:
        ant, suc = s.antecedent, s.succedent
        for f in ant:
            if f.kind == OR:
                rest = _remove_one(ant, f)
                return self._both(s, OR_L, f, ANT, [(_ms(rest + (f.left,)), suc), (_ms(rest + (f.right,)), suc)])
        for f in suc:
            if f.kind == AND:
                rest = _remove_one(suc, f)
                return self._both(s, AND_R, f, SUC, [(ant, _ms(rest + (f.left,))), (ant, _ms(rest + (f.right,)))])
        bodies = _ms(f.child for f in ant if f.kind == BOX)
        tried = set()
        for f in suc:
            if f.kind != BOX or f in tried:
                continue
            tried.add(f)
            sub = self.prove(bodies, (f.child,))
            if sub is not None:
                return ProofTree(s, R_BOX, f, SUC, (sub,))
        return None

    def _both(self, s: Sequent, rule: str, f: Formula, side: str, prem) -> Optional[ProofTree]:
        subs = []
        for a, b in prem:
            p = self.prove(a, b)
            if p is None:
                return None
            subs.append(p)
        return ProofTree(s, rule, f, side, tuple(subs))

    @staticmethod
    def _axiom(s: Sequent) -> Optional[ProofTree]:
        if BOT in s.antecedent:
            return ProofTree(s, AX_BOT, BOT, ANT)
        if TOP in s.succedent:
            return ProofTree(s, AX_TOP, TOP, SUC)
        atoms = {f for f in s.antecedent if f.kind == PROP}
        for f in s.succedent:
            if f in atoms:
                return ProofTree(s, AX_ID, f, ANT)
        return None


def prove(s: Sequent) -> Optional[ProofTree]:
    """A proof of ``s`` when one exists, else None."""
    return _Prover().prove(s.antecedent, s.succedent)


def provable(s: Sequent) -> bool:
    return prove(s) is not None


def proves_implication(phi: Formula, psi: Formula) -> bool:
    return provable(Sequent.of([desugar(phi)], [desugar(psi)]))


# ---------------------------------------------------------------------------
# split interpolation


def _neg(f: Formula) -> Formula:
    if f is TOP:
        return BOT
    if f is BOT:
        return TOP
    if f.kind == NOT:
        return f.child
    return Neg(f)


def _box(f: Formula) -> Formula:
    return TOP if f is TOP else Box(f)


def _locate(f: Formula, left: Multiset, right: Multiset) -> str:
    if f in left:
        return "L"
    if f in right:
        return "R"
    raise PreconditionError(f"principal {to_text(f)} is missing from the split")


def maehara(pt: ProofTree, split: SplitSequent) -> Formula:
    """Split interpolant of ``split`` computed bottom-up along ``pt``."""
    if split.merge() != pt.conclusion:
        raise PreconditionError("split does not match the proof's conclusion")
    return _interpolate(pt, split)


def _interpolate(pt: ProofTree, sp: SplitSequent) -> Formula:
    la, ls, ra, rs = sp.left_ant, sp.left_suc, sp.right_ant, sp.right_suc
    rule, f = pt.rule, pt.principal
    if rule == AX_BOT:
        return BOT if _locate(f, la, ra) == "L" else TOP
    if rule == AX_TOP:
        return BOT if _locate(f, ls, rs) == "L" else TOP
    if rule == AX_ID:
        # several placements may be available; the same-side ones give constants
        a_sides = [x for x, ms in (("L", la), ("R", ra)) if f in ms]
        s_sides = [x for x, ms in (("L", ls), ("R", rs)) if f in ms]
        for a, b in (("L", "L"), ("R", "R"), ("L", "R"), ("R", "L")):
            if a in a_sides and b in s_sides:
                return {"LL": BOT, "RR": TOP, "LR": f, "RL": Neg(f)}[a + b]
        raise PreconditionError("axiom atom is missing from the split")
    if rule == R_BOX:
        where = _locate(f, ls, rs)
        left_g = _ms(g.child for g in la if g.kind == BOX)
        right_g = _ms(g.child for g in ra if g.kind == BOX)
        if where == "L":
            chi = _interpolate(pt.premises[0], SplitSequent(left_g, (f.child,), right_g, ()))
            return _neg(_box(_neg(chi)))
        chi = _interpolate(pt.premises[0], SplitSequent(left_g, (), right_g, (f.child,)))
        return _box(chi)

    on_ant = pt.principal_side == ANT
    where = _locate(f, la, ra) if on_ant else _locate(f, ls, rs)
    parts = [list(la), list(ls), list(ra), list(rs)]
    slot = (0 if on_ant else 1) + (0 if where == "L" else 2)
    parts[slot].remove(f)
    mine = 0 if where == "L" else 2

    def premise_split(add_ant: tuple = (), add_suc: tuple = ()) -> SplitSequent:
        q = [list(x) for x in parts]
        q[mine] += add_ant
        q[mine + 1] += add_suc
        return SplitSequent(*(_ms(x) for x in q))

    if rule == NEG_L:
        return _interpolate(pt.premises[0], premise_split(add_suc=(f.child,)))
    if rule == NEG_R:
        return _interpolate(pt.premises[0], premise_split(add_ant=(f.child,)))
    if rule == AND_L:
        return _interpolate(pt.premises[0], premise_split(add_ant=(f.left, f.right)))
    if rule == OR_R:
        return _interpolate(pt.premises[0], premise_split(add_suc=(f.left, f.right)))
    if rule == OR_L:
        c1 = _interpolate(pt.premises[0], premise_split(add_ant=(f.left,)))
        c2 = _interpolate(pt.premises[1], premise_split(add_ant=(f.right,)))
    elif rule == AND_R:
        c1 = _interpolate(pt.premises[0], premise_split(add_suc=(f.left,)))
        c2 = _interpolate(pt.premises[1], premise_split(add_suc=(f.right,)))
    else:  # pragma: no cover
        raise AssertionError(rule)
    return disj([c1, c2]) if where == "L" else conj([c1, c2])


def is_split_interpolant(chi: Formula, split: SplitSequent) -> bool:
    """Both halves provable and the letters of ``chi`` common to both parts."""
    left_letters = set().union(*(sig(f) for f in split.left_ant + split.left_suc))
    right_letters = set().union(*(sig(f) for f in split.right_ant + split.right_suc))
    if not sig(chi) <= left_letters & right_letters:
        return False
    return (provable(Sequent.of(split.left_ant, split.left_suc + (chi,)))
            and provable(Sequent.of(split.right_ant + (chi,), split.right_suc)))


def prove_implication(phi: Formula, psi: Formula) -> Optional[ProofTree]:
    return prove(Sequent.of([desugar(phi)], [desugar(psi)]))


def craig_via_sequent(phi: Formula, psi: Formula) -> Formula:
    """Interpolant for a valid implication read off a cut-free proof."""
    a, b = desugar(phi), desugar(psi)
    pt = prove(Sequent.of([a], [b]))
    if pt is None:
        raise NotValidError("implication is not provable")
    return resugar_diamonds(maehara(pt, SplitSequent.of([a], [], [], [b])))
