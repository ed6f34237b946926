"""Access-control policies for social networks in a hybrid modal logic over
a user graph and a public-information graph."""

from .checker import (
    Decision, EvaluationError, ModelChecker, WitnessStep, audience, check, evaluate_access,
    explain,
)
from .model import (
    Model, ModelError, Violation, descendants, load_model, parse_document, rho, successors,
    validate, varrho,
)
from .parser import PolicySyntaxError, parse, parse_formula, pretty_print
from .syntax import FormulaError, free_vars
from .transform import desugar

__all__ = [
    "Decision", "EvaluationError", "FormulaError", "Model", "ModelChecker", "ModelError",
    "PolicySyntaxError", "Violation", "WitnessStep", "audience", "check", "descendants",
    "desugar", "evaluate_access", "explain", "free_vars", "load_model", "parse",
    "parse_document", "parse_formula", "pretty_print", "rho", "successors", "validate",
    "varrho",
]
