"""First-order syntax, evaluation and classification over finite structures."""
from .evaluate import Evaluator, EquivalenceResult, definable_set, equivalent_in, evaluate, evaluator
from .formula import (And, App, Const, Eq, Exists, Forall, Iff, Imp, Not, Or, Rel, Truth, Var,
                      alpha_equal, conj, substitute, to_text)
from .hformulas import HCertificate, HRefusal, classify_h
from .parser import ParseError, parse, parse_term
from .signature import GROUP, MAGMA, ORDER, PURE, Signature, SignatureError
from .structure import FiniteStructure, StructureError, pure_set

__all__ = [
    "And", "App", "Const", "Eq", "EquivalenceResult", "Evaluator", "Exists", "FiniteStructure",
    "Forall", "GROUP", "HCertificate", "HRefusal", "Iff", "Imp", "MAGMA", "Not", "ORDER", "Or",
    "PURE", "ParseError", "Rel", "Signature", "SignatureError", "StructureError", "Truth", "Var",
    "alpha_equal", "classify_h", "conj", "definable_set", "equivalent_in", "evaluate", "evaluator",
    "parse", "parse_term", "pure_set", "substitute", "to_text",
]
