import pytest
from hypothesis import given, settings

from conftest import formulas
from modalip import BOT, Neg, Prop, parse, polarity, sig
from modalip.errors import NotValidError, PreconditionError, SizeGuardError
from modalip.limits import type_limit
from modalip.quasimodel import (
    DiamondUnwitnessed, OverlapClash, SubformulaTable, _Problem, all_types, countermodel, eliminate,
    final_set_keys, is_quasi_model, is_valid_implication, lyndon_interpolant, satisfiable,
    types_hold_in_witness,
)
from modalip.verify import check_lyndon, equivalent, oracle_sat

p, q = Prop("p"), Prop("q")


class TestTypes:
    def test_single_letter_has_two_types(self):
        tab = SubformulaTable(p)
        assert sorted(tab.members(int(m)) for m in tab.locally_consistent_masks()) == [frozenset(), {p}]

    def test_contradiction_never_in_a_type(self):
        f = parse("p & ~p")
        tab = SubformulaTable(f)
        assert all(f not in tab.members(int(m)) for m in tab.locally_consistent_masks())

    def test_disjunction_clause(self):
        f = parse("p | q")
        tab = SubformulaTable(f)
        for m in tab.locally_consistent_masks():
            s = tab.members(int(m))
            if f in s:
                assert p in s or q in s

    def test_combined_types_are_products(self):
        assert len(all_types(p, p)) == 2 * 2


class TestElimination:
    def test_overlap_clash(self):
        trace = eliminate(p, p)
        reasons = {(t.left, t.right): r for t, r in trace.steps}
        assert reasons[(frozenset([p]), frozenset([Neg(p)]))] == OverlapClash("p", "L")

    def test_diamond_witnessed(self):
        f = parse("<>p")
        trace = eliminate(f, BOT)
        assert any(f in t.left for t in trace.final)
        assert any(p in t.left for t in trace.final)

    def test_unwitnessed_diamond(self):
        f = parse("<>p & []~p")
        trace = eliminate(f, BOT)
        assert all(f not in t.left for t in trace.final)
        assert any(isinstance(r, DiamondUnwitnessed) for _, r in trace.steps)

    def test_trace_is_serializable(self):
        d = eliminate(parse("<>p"), BOT).to_dict()
        assert d["initial"] >= len(d["final"])

    @given(formulas(("p", "q"), max_leaves=5))
    @settings(max_examples=25)
    def test_final_set_is_order_independent(self, f):
        base = final_set_keys(eliminate(f, BOT, seed=0))
        for seed in range(1, 4):
            assert final_set_keys(eliminate(f, BOT, seed=seed)) == base

    @given(formulas(("p", "q"), max_leaves=5))
    @settings(max_examples=25)
    def test_final_set_is_a_quasi_model_realized_by_its_witness(self, f):
        trace = eliminate(f, BOT)
        assert is_quasi_model(list(trace.final), f, BOT)
        P = _Problem(f, BOT)
        assert types_hold_in_witness(P, trace._run.alive)


class TestSatisfiable:
    def test_examples(self):
        assert not satisfiable(BOT).satisfiable
        assert not satisfiable(parse("<>p & []~p")).satisfiable
        res = satisfiable(parse("<>(p & q)"))
        assert res.satisfiable
        assert res.witness.satisfies(parse("<>(p & q)"))

    @given(formulas(max_leaves=7))
    @settings(max_examples=50)
    def test_engines_and_oracle_agree(self, f):
        exact = satisfiable(f)
        assert exact.satisfiable == satisfiable(f, engine="lazy").satisfiable
        assert exact.satisfiable == (oracle_sat(f) is not None)
        if exact.satisfiable:
            assert exact.witness.satisfies(f)

    def test_unknown_engine(self):
        with pytest.raises(PreconditionError):
            satisfiable(p, engine="bogus")

    def test_size_guards(self):
        big = parse("<>(p & q) & <>(p & ~q) & [](p | q) & <>(~p & q) & [](~p | ~q) & <>[]p & []<>q")
        with pytest.raises(SizeGuardError):
            satisfiable(big, max_subformulas=5)
        with type_limit(1):
            with pytest.raises(SizeGuardError):
                satisfiable(parse("<>p"))


class TestValidity:
    def test_examples(self):
        assert is_valid_implication(parse("[]p & []q"), parse("[](p & q)"))
        assert not is_valid_implication(parse("<>p"), parse("[]p"))
        cm = countermodel(parse("<>p"), parse("[]p"))
        assert cm.satisfies(parse("<>p & ~[]p"))

    @given(formulas(max_leaves=6), formulas(max_leaves=6))
    @settings(max_examples=40)
    def test_engines_agree(self, a, b):
        assert is_valid_implication(a, a)
        assert is_valid_implication(a, b) == is_valid_implication(a, b, engine="exact")


class TestInterpolant:
    def test_propositional(self):
        theta = lyndon_interpolant(p, parse("p | q"))
        assert equivalent(theta, p)

    def test_drops_private_letters(self):
        phi, psi = parse("<>(p & q)"), parse("<>(p | r)")
        theta = lyndon_interpolant(phi, psi)
        assert sig(theta) <= {"p"}
        assert polarity(theta).negative == set()
        assert equivalent(theta, parse("<>p"))
        assert check_lyndon(theta, phi, psi).ok

    def test_invalid_rejected(self):
        with pytest.raises(NotValidError):
            lyndon_interpolant(parse("<>p"), parse("[]p"))
        with pytest.raises(NotValidError):
            lyndon_interpolant(parse("<>p"), parse("[]p"), engine="lazy")

    @pytest.mark.parametrize("engine", ["exact", "lazy"])
    def test_engines_produce_lyndon_interpolants(self, engine):
        pairs = [(parse("[]p & <>q"), parse("<>(p & q)")), (parse("[](p -> q) & <>p"), parse("<>q | r"))]
        for phi, psi in pairs:
            theta = lyndon_interpolant(phi, psi, engine=engine)
            assert check_lyndon(theta, phi, psi).ok
