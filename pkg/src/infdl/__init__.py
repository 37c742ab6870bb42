"""Bottom-up evaluation of rule programs with least and greatest
fixpoint predicates, plus a temporal-logic front-end for model checking
finite transition systems."""

from .analysis import analyze
from .engine import (MODE_EARLY, MODE_LITERAL, EvaluationContext,
                     EvaluationResult, eval_queries)
from .model import Database, Interpretation, Literal, Program, Rule
from .parser import parse_database, parse_formula, parse_kripke, parse_program
from .temporal import ModalSignature, compile_formula, model_check

__all__ = [
    "analyze", "MODE_EARLY", "MODE_LITERAL", "EvaluationContext",
    "EvaluationResult", "eval_queries", "Database", "Interpretation",
    "Literal", "Program", "Rule", "parse_database", "parse_formula",
    "parse_kripke", "parse_program", "ModalSignature", "compile_formula",
    "model_check",
]

__version__ = "0.1.0"
