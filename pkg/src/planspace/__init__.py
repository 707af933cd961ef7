"""Exact counting and reasoning over the bounded plan space of a grounded
STRIPS task.

The pipeline: encode the task as a CNF whose models correspond one-to-one to
plans of length at most the bound, compile that CNF into deterministic
decomposable negation normal form, then answer counting, probability, facet,
significance, sampling, and navigation queries on the compiled form in time
polynomial in its size.  A brute-force plan enumerator provides the testing
ground truth.
"""

from .task import (
    Atom,
    Operator,
    Plan,
    PlanningTask,
    Query,
    QueryLiteral,
    applicable,
    apply,
    check_bound,
    load_task,
    load_task_file,
    plan_satisfies_query,
    task_from_dict,
    validate_plan,
)
from .cnf import Cnf, brute_force_count, clause, read_dimacs, unit_propagate, write_dimacs
from .encoding import Encoding, VarMap, classify_query, decode_model, encode, encode_query
from .ddnnf import Ddnnf, compile_cnf, read_nnf, write_nnf
from .query import format_query, parse_query
from .reasoning import (
    Commitment,
    Facet,
    NavSession,
    PlanSpace,
    Probability,
    Snapshot,
    build_plan_space,
    open_session,
)
from . import errors, fixtures, oracle

__all__ = [
    "Atom",
    "Cnf",
    "Commitment",
    "Ddnnf",
    "Encoding",
    "Facet",
    "NavSession",
    "Operator",
    "Plan",
    "PlanSpace",
    "PlanningTask",
    "Probability",
    "Query",
    "QueryLiteral",
    "Snapshot",
    "VarMap",
    "applicable",
    "apply",
    "brute_force_count",
    "build_plan_space",
    "check_bound",
    "classify_query",
    "clause",
    "compile_cnf",
    "decode_model",
    "encode",
    "encode_query",
    "errors",
    "fixtures",
    "format_query",
    "load_task",
    "load_task_file",
    "open_session",
    "oracle",
    "parse_query",
    "plan_satisfies_query",
    "read_dimacs",
    "read_nnf",
    "task_from_dict",
    "unit_propagate",
    "validate_plan",
    "write_dimacs",
    "write_nnf",
]

__version__ = "0.1.0"
