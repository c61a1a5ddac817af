"""Quantum search verification of prenex truth-table formulas.

The package compiles a quantified boolean formula over a black-box predicate
into a measurement-free amplification circuit, runs it on an exact dense
statevector simulator, and reports the verdict-qubit probability next to the
classical truth value and the paper-and-pencil resource bounds.
"""

__version__ = "0.1.0"

from .classical import (
    InstanceSpec,
    TruthTableOracle,
    classical_eval,
    closed_form_success,
    count_solutions,
    predict_gamma_prob,
    random_instance,
)
from .compiler import Formula, compile_formula, estimate_resources, evaluate
from .dsl import format_formula, load_truth_table, parse_formula
from .errors import PrenexqError, WidthExceeded
from .gadgets import ErrorBudget
from .search import build_search, search_report
from .sim import Engine, Register, UnitaryProgram

__all__ = [
    "Engine",
    "ErrorBudget",
    "Formula",
    "InstanceSpec",
    "PrenexqError",
    "Register",
    "TruthTableOracle",
    "UnitaryProgram",
    "WidthExceeded",
    "build_search",
    "classical_eval",
    "closed_form_success",
    "compile_formula",
    "count_solutions",
    "estimate_resources",
    "evaluate",
    "format_formula",
    "load_truth_table",
    "parse_formula",
    "predict_gamma_prob",
    "random_instance",
    "search_report",
]
