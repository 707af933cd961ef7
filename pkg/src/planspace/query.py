"""Textual query syntax for plan properties.

Grammar: clauses joined by ";", literals inside a clause joined by "|".
A literal is "op:NAME" or "atom:NAME", optionally suffixed "@i" to pin the
time index and prefixed "!" to negate.  Example:

    op:wake-up | op:sleep ; !op:get-ready

means (wake-up occurs or sleep occurs) and (get-ready does not occur).
"""

from __future__ import annotations

from .errors import QuerySyntaxError
from .task import PlanningTask, Query, QueryLiteral, validate_query


def parse_literal(text: str, task: PlanningTask, position: str) -> QueryLiteral:
    raw = text.strip()
    positive = True
    if raw.startswith("!"):
        positive = False
        raw = raw[1:].strip()
    if ":" not in raw:
        raise QuerySyntaxError(f"{position}: expected 'op:NAME' or 'atom:NAME', got {text.strip()!r}")
    kind, _, rest = raw.partition(":")
    kind = kind.strip()
    if kind not in ("op", "atom"):
        raise QuerySyntaxError(f"{position}: unknown literal kind {kind!r}")
    step = None
    name = rest.strip()
    if "@" in rest:
        name, _, step_text = rest.rpartition("@")
        name = name.strip()
        try:
            step = int(step_text.strip())
        except ValueError:
            raise QuerySyntaxError(f"{position}: bad time index {step_text.strip()!r}") from None
    if not name:
        raise QuerySyntaxError(f"{position}: missing name")
    index = task.operator_index if kind == "op" else task.atom_index
    if name not in index:
        raise QuerySyntaxError(f"{position}: unknown {kind} name {name!r}")
    return QueryLiteral(kind=kind, ref=index[name], positive=positive, step=step)


def parse_query(text: str, task: PlanningTask, bound: int) -> Query:
    """Parse and validate a textual query against a task and length bound.

    An empty string is the empty conjunction, which every plan satisfies.
    """
    clauses = []
    for ci, clause_text in enumerate(text.split(";")):
        if not clause_text.strip():
            if text.strip():
                raise QuerySyntaxError(f"clause {ci}: empty clause")
            continue
        literals = []
        for li, lit_text in enumerate(clause_text.split("|")):
            if not lit_text.strip():
                raise QuerySyntaxError(f"clause {ci}, literal {li}: empty literal")
            literals.append(parse_literal(lit_text, task, f"clause {ci}, literal {li}"))
        clauses.append(tuple(literals))
    query = Query(clauses=tuple(clauses))
    validate_query(task, query, bound)
    return query


def format_query(query: Query, task: PlanningTask) -> str:
    """Inverse of parse_query, for display and round-tripping."""
    parts = []
    for cl in query.clauses:
        lits = []
        for lit in cl:
            name = (
                task.operators[lit.ref].name if lit.kind == "op" else task.atoms[lit.ref].name
            )
            text = f"{lit.kind}:{name}"
            if lit.step is not None:
                text += f"@{lit.step}"
            if not lit.positive:
                text = "!" + text
            lits.append(text)
        parts.append(" | ".join(lits))
    return " ; ".join(parts)
