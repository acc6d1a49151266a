"""Craig, Lyndon and uniform interpolation for the basic modal logic K."""

from .errors import ModalError, NotValidError, ParseError, PreconditionError, ResourceGuardError
from .formula import (
    BOT, TOP, And, Box, Diamond, Formula, Nabla, Neg, Or, PolarityReport, Prop, Signature,
    conj, disj, expand_nabla, iff, implies, literals, modal_depth, nnf, polarity, sig,
    signature, size_dag, size_string, subf,
)
from .interpolation import METHODS, interpolate
from .parsing import parse, to_text
from .semantics import KripkeModel, PointedModel, eval_formula
from .verify import check_craig, check_lyndon, equivalent, is_valid_implication, oracle_sat

__version__ = "0.1.0"

__all__ = [
    "BOT", "TOP", "And", "Box", "Diamond", "Formula", "Nabla", "Neg", "Or", "PolarityReport", "Prop",
    "Signature", "conj", "disj", "expand_nabla", "iff", "implies", "literals", "modal_depth", "nnf",
    "polarity", "sig", "signature", "size_dag", "size_string", "subf",
    "parse", "to_text",
    "KripkeModel", "PointedModel", "eval_formula",
    "METHODS", "interpolate",
    "check_craig", "check_lyndon", "equivalent", "is_valid_implication", "oracle_sat",
    "ModalError", "NotValidError", "ParseError", "PreconditionError", "ResourceGuardError",
]
