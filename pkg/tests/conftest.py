import sys

import hypothesis.strategies as st
import pytest
from hypothesis import settings

from modalip import And, Box, Diamond, Neg, Or, Prop
from modalip.semantics import KripkeModel, PointedModel

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

LETTERS = ("p", "q", "r")


def formulas(letters=LETTERS, max_leaves=8, modal=True):
    """Hypothesis strategy for small formulas over ``letters``."""
    atoms = st.sampled_from([Prop(x) for x in letters])

    def extend(children):
        ops = [
            children.map(Neg),
            st.tuples(children, children).map(lambda t: And(*t)),
            st.tuples(children, children).map(lambda t: Or(*t)),
        ]
        if modal:
            ops += [children.map(Diamond), children.map(Box)]
        return st.one_of(*ops)

    return st.recursive(atoms, extend, max_leaves=max_leaves)


def small_models(letters=("p", "q"), max_worlds=3):
    """Hypothesis strategy for pointed Kripke models with up to ``max_worlds`` worlds."""

    @st.composite
    def build(draw):
        n = draw(st.integers(1, max_worlds))
        worlds = [f"w{i}" for i in range(n)]
        pairs = [(a, b) for a in worlds for b in worlds]
        edges = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs)))
        val = {p: draw(st.lists(st.sampled_from(worlds), unique=True)) for p in letters}
        point = draw(st.sampled_from(worlds))
        return PointedModel(KripkeModel.build(worlds, edges, val), point)

    return build()


@pytest.fixture
def bisim_pair():
    """The two models of the standard loop/chain bisimulation example over {p}."""
    m = KripkeModel.build(["w0", "w1"], [("w0", "w1"), ("w1", "w1")], {"p": ["w1"]})
    n = KripkeModel.build(["v0", "v1", "v2"], [("v0", "v1"), ("v1", "v2"), ("v2", "v2")],
                          {"p": ["v1", "v2"]})
    return m, n


def amalgam_inputs():
    m = KripkeModel.build(
        ["w1", "w2", "w31", "w32"],
        [("w1", "w2"), ("w2", "w31"), ("w2", "w32")],
        {"q": ["w1", "w31", "w32"], "p": ["w31"]},
    )
    n = KripkeModel.build(
        ["v1", "v21", "v22", "v3"],
        [("v1", "v21"), ("v1", "v22"), ("v21", "v3"), ("v22", "v3")],
        {"q": ["v1", "v3"], "r": ["v22"]},
    )
    z = [("w1", "v1"), ("w2", "v21"), ("w2", "v22"), ("w31", "v3"), ("w32", "v3")]
    return m, n, z


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
