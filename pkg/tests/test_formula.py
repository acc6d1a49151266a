import pytest
from hypothesis import given

from conftest import formulas
from modalip import (
    BOT, TOP, And, Box, Diamond, Nabla, Neg, Or, ParseError, Prop, expand_nabla, literals, modal_depth,
    nnf, parse, polarity, sig, size_dag, size_string, subf, to_text,
)
from modalip.bench import chi_hat, lower_bound_family
from modalip.formula import is_nnf
from modalip.verify import equivalent

p, q, r = Prop("p"), Prop("q"), Prop("r")


class TestParsing:
    def test_grammar_examples(self):
        assert parse("<>p & [](p|q)") is And(Diamond(p), Box(Or(p, q)))
        assert parse("~<>p") is Neg(Diamond(p))
        assert parse("p -> q") is Or(Neg(p), q)

    def test_constants_and_nabla(self):
        assert parse("true") is TOP
        assert parse("false") is BOT
        assert parse("nabla{p, q}") is Nabla([q, p])
        assert parse("nabla{}") is Nabla([])

    def test_implication_is_right_associative(self):
        assert parse("p -> q -> r") is parse("p -> (q -> r)")

    @pytest.mark.parametrize("text", ["", "p &", "(p", "p q", "[]", "P", "p $ q"])
    def test_errors_carry_offsets(self, text):
        with pytest.raises(ParseError) as info:
            parse(text)
        assert 0 <= info.value.offset <= len(text.encode())

    @given(formulas())
    def test_print_parse_round_trip(self, f):
        assert parse(to_text(f)) is f


class TestInterning:
    def test_structural_equality_is_identity(self):
        assert And(p, Box(q)) is And(Prop("p"), Box(Prop("q")))
        assert Nabla([p, q, p]) is Nabla([q, p])

    def test_immutable(self):
        with pytest.raises(AttributeError):
            p.name = "x"


class TestNNF:
    def test_duality(self):
        assert nnf(Neg(Diamond(p))) is Box(Neg(p))
        assert nnf(Neg(And(p, q))) is Or(Neg(p), Neg(q))
        assert nnf(Neg(BOT)) is TOP

    @given(formulas())
    def test_nnf_is_equivalent_and_in_form(self, f):
        g = nnf(f)
        assert is_nnf(g)
        assert nnf(g) is g
        assert equivalent(f, g)

    @given(formulas())
    def test_nnf_preserves_polarity(self, f):
        assert polarity(nnf(f)).within(polarity(f))


class TestMeasures:
    def test_sig(self):
        assert sig(parse("<>p & [](p|q)")) == {"p", "q"}
        assert sig(TOP) == set()
        assert sig(chi_hat(3)) == {"p"}

    def test_polarity(self):
        rep = polarity(parse("~p | q"))
        assert rep.positive == {"q"} and rep.negative == {"p"}
        rep = polarity(parse("[](p -> p)"))
        assert rep.positive == {"p"} and rep.negative == {"p"}

    def test_polarity_of_lower_bound_left_side(self):
        phi, _, _ = lower_bound_family(1)
        rep = polarity(phi)
        assert {"p1", "s"} <= rep.positive
        assert {"p1", "s"} <= rep.negative

    def test_sizes_of_nested_noncontingency(self):
        assert size_string(chi_hat(0)) == 8
        assert size_string(chi_hat(1)) == 22
        assert size_dag(chi_hat(0)) == 5
        assert size_dag(chi_hat(1)) == 9
        assert size_string(p) == 1 and size_dag(p) == 1

    @given(formulas())
    def test_dag_never_exceeds_string(self, f):
        assert size_dag(f) <= size_string(f)

    def test_modal_depth(self):
        assert modal_depth(parse("<>[]p | q")) == 2
        assert modal_depth(p) == 0


class TestSubformulas:
    def test_closure_example(self):
        f = parse("[]p & <>~q")
        assert subf(f) == {p, Box(p), Neg(q), Diamond(Neg(q)), f}
        assert literals(f) == {p, Neg(q)}

    def test_negated_letter_excludes_letter(self):
        assert subf(Neg(p)) == {Neg(p)}

    @given(formulas())
    def test_closed_under_children(self, f):
        g = nnf(f)
        s = subf(g)
        assert g in s
        for h in s:
            if not h.is_literal():
                assert set(h.children) <= s


class TestExpandNabla:
    def test_instances(self):
        assert equivalent(expand_nabla(Nabla([p])), And(Diamond(p), Box(p)))
        assert equivalent(expand_nabla(Nabla([])), Box(BOT))
        assert equivalent(expand_nabla(Nabla([p, q])), parse("<>p & <>q & [](p | q)"))

    def test_result_is_nabla_free(self):
        g = expand_nabla(parse("nabla{p, nabla{q}} | r"))
        assert "nabla" not in to_text(g)
