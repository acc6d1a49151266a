"""One entry point for the four interpolation back ends."""

from __future__ import annotations

from typing import Callable

from .automata import craig_via_automata
from .errors import PreconditionError
from .formula import Formula
from .nabla import craig_via_nabla
from .quasimodel import lyndon_interpolant
from .sequent import craig_via_sequent

METHODS: dict[str, Callable[[Formula, Formula], Formula]] = {
    "quasimodel": lyndon_interpolant,
    "nabla": craig_via_nabla,
    "automata": craig_via_automata,
    "sequent": craig_via_sequent,
}


def interpolate(phi: Formula, psi: Formula, method: str) -> Formula:
    try:
        fn = METHODS[method]
    except KeyError:
        raise PreconditionError(f"unknown method {method!r}; pick one of {', '.join(METHODS)}") from None
    return fn(phi, psi)
