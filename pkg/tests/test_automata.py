import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from conftest import formulas
from modalip import BOT, TOP, Prop, nnf, parse, sig
from modalip.bench import lower_bound_family
from modalip.errors import NotValidError, PreconditionError
from modalip.automata import (
    _matches, accepts, accepts_tree, automaton_to_formula, craig_via_automata, formula_to_automaton,
    is_acyclic, is_rank_witness, make_automaton, matches_bruteforce, project, reduct_tree, set_rank,
    tree_family, tree_to_model,
)
from modalip.semantics import KripkeModel, PointedModel
from modalip.verify import check_craig, equivalent, formula_corpus

p = Prop("p")


def leaf_cover():
    """Accepts trees in which every leaf-ending path passes a p-node; cyclic."""
    return make_automaton(["p"], ["q0", "q1"],
                          [("q0", [], ["q0"]), ("q0", ["p"], []), ("q0", ["p"], ["q1"])], "q0", ["q1"])


def canon(tree):
    lab, kids = tree
    return (tuple(sorted(lab)), tuple(sorted((canon(k) for k in kids), key=repr)))


def chain(labels):
    worlds = [f"c{i}" for i in range(len(labels))]
    edges = list(zip(worlds, worlds[1:]))
    val = {"p": [w for w, lab in zip(worlds, labels) if "p" in lab]}
    return PointedModel(KripkeModel.build(worlds, edges, val), worlds[0])


class TestAcceptance:
    def test_worked_run(self):
        m = KripkeModel.build(
            ["w0", "w1", "w2", "w3", "w4", "w5"],
            [("w0", "w1"), ("w1", "w2"), ("w1", "w3"), ("w2", "w4"), ("w3", "w5")],
            {"p": ["w3", "w4"]},
        )
        assert accepts(leaf_cover(), PointedModel(m, "w0"))

    def test_path_without_p_rejected(self):
        assert not accepts(leaf_cover(), chain(["", "", ""]))
        assert accepts(leaf_cover(), chain(["", "p", ""]))

    def test_accepting_initial_state_accepts_a_leaf(self):
        a = make_automaton(["p"], ["q"], [], "q", ["q"])
        assert accepts(a, chain([""]))

    def test_non_tree_rejected(self):
        m = KripkeModel.build(["a"], [("a", "a")])
        with pytest.raises(PreconditionError):
            accepts(leaf_cover(), PointedModel(m, "a"))

    def test_formula_examples(self):
        a = formula_to_automaton(parse("<>p"), ["p"])
        assert accepts(a, chain(["", "p"]))
        assert not accepts(a, chain(["", ""]))
        b = formula_to_automaton(parse("[]false"), ["p"])
        assert accepts(b, chain([""]))
        assert not accepts(b, chain(["", ""]))
        c = formula_to_automaton(parse("p & ~p"), ["p"])
        assert not any(accepts_tree(c, t) for t in tree_family(["p"], 2, 2))

    @given(st.lists(st.frozensets(st.sampled_from("abcd"), max_size=4), max_size=4),
           st.frozensets(st.sampled_from("abcd"), max_size=4))
    def test_matching_agrees_with_bruteforce(self, kids, options):
        assert _matches(options, tuple(kids)) == matches_bruteforce(options, tuple(kids))

    def test_matches_eval_on_corpus_trees(self):
        trees = tree_family(["p", "q"], 2, 2)
        for f in [g for g in formula_corpus() if sig(g) <= {"p", "q"}][:15]:
            a = formula_to_automaton(f, ["p", "q"])
            for t in trees:
                assert accepts_tree(a, t) == tree_to_model(t).satisfies(f)


class TestStructure:
    def test_cyclic_example(self):
        assert is_acyclic(leaf_cover()) is None

    def test_rank_of_nested_diamonds(self):
        f = parse("<>(<>p)")
        a = formula_to_automaton(f, ["p"])
        w = is_acyclic(a)
        assert w is not None and is_rank_witness(a, w.rank)
        assert set_rank(frozenset([nnf(f)])) == 3
        assert all(set_rank(x) < set_rank(qq) for qq, _, s in a.transitions for x in s)
        assert w.rank[a.initial] <= 3

    def test_empty_transitions(self):
        a = make_automaton(["p"], ["a", "b"], [], "a", [])
        assert is_acyclic(a).rank == {"a": 0, "b": 0}
        assert automaton_to_formula(a) is BOT
        assert automaton_to_formula(make_automaton(["p"], ["a"], [], "a", ["a"])) is TOP

    def test_back_translation_rejects_cycles(self):
        with pytest.raises(PreconditionError):
            automaton_to_formula(leaf_cover())

    def test_full_state_space_matches_pruned(self):
        f = parse("<>p")
        full = formula_to_automaton(f, ["p"], full=True)
        pruned = formula_to_automaton(f, ["p"])
        assert len(full.states) >= len(pruned.states)
        for t in tree_family(["p"], 2, 2):
            assert accepts_tree(full, t) == accepts_tree(pruned, t)

    def test_export(self):
        d = formula_to_automaton(parse("<>p"), ["p"]).to_dict()
        assert set(d) == {"signature", "states", "transitions", "initial", "accepting"}


class TestProjection:
    def test_identity(self):
        a = formula_to_automaton(parse("<>p & []q"), ["p", "q"])
        assert project(a, ["p", "q"]).transitions == a.transitions

    def test_keep_must_be_subset(self):
        with pytest.raises(PreconditionError):
            project(formula_to_automaton(p, ["p"]), ["z"])

    def test_drop_conjunct(self):
        a = project(formula_to_automaton(parse("p & q"), ["p", "q"]), ["p"])
        assert equivalent(automaton_to_formula(a), p)

    @pytest.mark.parametrize("text", ["<>(p & q)", "[](p | ~q)", "<>p & []~q", "p & <>~q"])
    def test_reducts_of_accepted_trees(self, text):
        f = parse(text)
        a = formula_to_automaton(f, ["p", "q"])
        proj = project(a, ["p"])
        assert is_acyclic(proj) is not None
        trees = tree_family(["p", "q"], 2, 2)
        images = {canon(reduct_tree(t, frozenset(["p"]))) for t in trees if accepts_tree(a, t)}
        for t in tree_family(["p"], 2, 2):
            assert accepts_tree(proj, t) == (canon(t) in images)


class TestBackTranslation:
    @given(formulas(("p", "q"), max_leaves=5))
    @settings(max_examples=30)
    def test_round_trip(self, f):
        a = formula_to_automaton(f, sig(f) or ["p"])
        assert equivalent(automaton_to_formula(a), f)

    def test_examples(self):
        assert equivalent(craig_via_automata(parse("<>(p & q)"), parse("<>(p | r)")), parse("<>p"))
        assert equivalent(craig_via_automata(BOT, p), BOT)
        phi, psi, chi = lower_bound_family(1)
        theta = craig_via_automata(phi, psi)
        assert equivalent(theta, chi)
        assert check_craig(theta, phi, psi).ok

    def test_invalid(self):
        with pytest.raises(NotValidError):
            craig_via_automata(parse("<>p"), parse("[]p"))


def test_tree_family_sizes():
    assert len(tree_family(["p"], 0, 2)) == 2
    assert len(tree_family(["p"], 1, 1)) == 2 * (1 + 2)
