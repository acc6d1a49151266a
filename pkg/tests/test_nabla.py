import itertools

import pytest
from hypothesis import assume, given, settings

from conftest import formulas, small_models
from modalip import (
    BOT, TOP, And, Nabla, Prop, expand_nabla, modal_depth, nnf, parse, polarity, sig, size_string, subf,
)
from modalip.errors import NotValidError
from modalip.bench import lower_bound_family
from modalip.nabla import craig_via_nabla, is_nabla_nf, remove_props, to_nabla_nf, uniform_interpolant
from modalip.semantics import KripkeModel, eval_formula, unravel
from modalip.verify import check_craig, equivalent, implication_corpus, is_valid_implication

p, q = Prop("p"), Prop("q")


class TestNormalForm:
    def test_examples(self):
        f = parse("<>p & [](p | q)")
        assert equivalent(to_nabla_nf(f), parse("nabla{p} | nabla{p, q}"))
        g = to_nabla_nf(parse("[](p & q)"))
        assert is_nabla_nf(g)
        assert equivalent(g, parse("[](p & q)"))
        assert to_nabla_nf(parse("p & ~p")) is BOT

    @given(formulas(max_leaves=6))
    @settings(max_examples=50)
    def test_grammar_equivalence_polarity(self, f):
        g = to_nabla_nf(f)
        assert is_nabla_nf(g)
        assert equivalent(g, f)
        assert polarity(expand_nabla(g)).within(polarity(f))

    def test_size_stays_exponential_in_square(self):
        for phi, _ in implication_corpus()[:30]:
            assert size_string(expand_nabla(to_nabla_nf(phi))) <= 2 ** (size_string(phi) ** 2)


class TestRemoveProps:
    def test_literal_dropping(self):
        f = And(And(p, q), Nabla([q]))
        assert remove_props(f, ["q"]) is And(p, Nabla([TOP]))
        assert remove_props(f, []) is f

    def test_dropping_inside_covers(self):
        f = parse("nabla{p} | nabla{p, q}")
        g = remove_props(f, ["p"])
        assert g is parse("nabla{true} | nabla{true, q}")
        assert is_nabla_nf(g)

    @given(formulas(max_leaves=6))
    @settings(max_examples=40)
    def test_grammar_preserved(self, f):
        for drop in (["p"], ["q", "r"], ["p", "q", "r"]):
            assert is_nabla_nf(remove_props(to_nabla_nf(f), drop))


class TestUniformInterpolant:
    def test_examples(self):
        assert equivalent(uniform_interpolant(parse("<>(p & q)"), ["p"]), parse("<>p"))
        f = parse("<>p & [](q | ~p)")
        assert equivalent(uniform_interpolant(f, sig(f)), f)
        assert equivalent(uniform_interpolant(parse("p & ~p"), []), BOT)

    @given(formulas(max_leaves=6))
    @settings(max_examples=40)
    def test_signature_and_consequence(self, f):
        u = uniform_interpolant(f, ["p", "q"])
        assert sig(u) <= sig(f) & {"p", "q"}
        assert is_valid_implication(f, u)

    def test_uniformity_over_corpus(self):
        corpus = implication_corpus()[:60]
        for phi, _ in corpus[:15]:
            for keep in (["p"], ["p", "q"]):
                u = uniform_interpolant(phi, keep)
                for _, psi in corpus:
                    if (sig(psi) & sig(phi)) <= set(keep) and is_valid_implication(phi, psi):
                        assert is_valid_implication(u, psi)

    @given(small_models(("p", "q"), max_worlds=2), formulas(("p", "q"), max_leaves=4))
    @settings(max_examples=40)
    def test_bisimulation_quantifier_semantics(self, pm, f):
        # u holds at pm iff some {p}-bisimilar model satisfies f. Candidates are the unravelings of
        # pm (fat enough for every diamond) under all valuations of q.
        modal = sum(1 for g in subf(nnf(f)) if g.kind in ("dia", "box"))
        tree = unravel(pm, modal_depth(f), max(1, modal))
        worlds = tree.model.worlds
        assume(len(worlds) <= 10)
        p_ext = tree.model.valuation.get("p", frozenset())
        found = False
        for bits in itertools.product((False, True), repeat=len(worlds)):
            q_ext = [w for w, b in zip(worlds, bits) if b]
            m = KripkeModel.build(worlds, tree.model.edges, {"p": p_ext, "q": q_ext})
            if eval_formula(m, tree.point, f):
                found = True
                break
        assert pm.satisfies(uniform_interpolant(f, ["p"])) == found


class TestCraig:
    def test_examples(self):
        assert equivalent(craig_via_nabla(parse("<>p"), parse("<>p")), parse("<>p"))
        phi, psi = parse("<>(p & q)"), parse("<>(p | r)")
        assert equivalent(craig_via_nabla(phi, psi), parse("<>p"))
        phi, psi, chi = lower_bound_family(1)
        theta = craig_via_nabla(phi, psi)
        assert equivalent(theta, chi)
        assert check_craig(theta, phi, psi).ok

    def test_invalid(self):
        with pytest.raises(NotValidError):
            craig_via_nabla(parse("<>p"), parse("[]p"))
