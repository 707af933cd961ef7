"""Grounded STRIPS task model: states, operators, plans, queries, and execution.

States are total boolean vectors indexed by atom id; partial states (operator
preconditions and effects, the goal) are dicts from atom id to the required
value.  Plans are tuples of operator ids.  All functions here are pure and the
data is treated as immutable after construction.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from .errors import (
    ContractViolationError,
    LengthBoundError,
    QueryError,
    StructuralError,
    TaskFormatError,
)

State = tuple[bool, ...]
PartialState = dict[int, bool]
Plan = tuple[int, ...]

# Plan lengths are capped at DEFAULT_CAP_FACTOR * (|atoms| + |operators|) to keep
# the bounded regime polynomial in the task size.
DEFAULT_CAP_FACTOR = 10

# Characters that would collide with the textual query syntax.
_FORBIDDEN_NAME_CHARS = set("|;!@\"'")


@dataclass(frozen=True)
class Atom:
    id: int
    name: str


@dataclass(frozen=True)
class Operator:
    id: int
    name: str
    pre: PartialState
    eff: PartialState


@dataclass
class PlanningTask:
    """A grounded STRIPS task: atoms, operators, a total initial state and a
    partial goal condition."""

    atoms: list[Atom]
    operators: list[Operator]
    init: State
    goal: PartialState
    atom_index: dict[str, int] = field(init=False, repr=False)
    operator_index: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self):
        for i, atom in enumerate(self.atoms):
            if atom.id != i:
                raise StructuralError(f"atom ids must be dense, got {atom.id} at position {i}")
        for i, op in enumerate(self.operators):
            if op.id != i:
                raise StructuralError(f"operator ids must be dense, got {op.id} at position {i}")
        names = [a.name for a in self.atoms]
        if len(set(names)) != len(names):
            raise StructuralError("duplicate atom names")
        op_names = [o.name for o in self.operators]
        if len(set(op_names)) != len(op_names):
            raise StructuralError("duplicate operator names")
        if len(self.init) != len(self.atoms):
            raise StructuralError(
                f"initial state has {len(self.init)} values for {len(self.atoms)} atoms"
            )
        n = len(self.atoms)
        for op in self.operators:
            for part, mapping in (("pre", op.pre), ("eff", op.eff)):
                for a in mapping:
                    if not 0 <= a < n:
                        raise StructuralError(f"operator {op.name!r} {part}: unknown atom id {a}")
        for a in self.goal:
            if not 0 <= a < n:
                raise StructuralError(f"goal: unknown atom id {a}")
        self.atom_index = {a.name: a.id for a in self.atoms}
        self.operator_index = {o.name: o.id for o in self.operators}

    def operator(self, op_id: int) -> Operator:
        if not 0 <= op_id < len(self.operators):
            raise StructuralError(f"unknown operator id {op_id}")
        return self.operators[op_id]

    def to_dict(self) -> dict:
        return {
            "atoms": [a.name for a in self.atoms],
            "operators": [
                {
                    "name": o.name,
                    "pre": {self.atoms[a].name: v for a, v in sorted(o.pre.items())},
                    "eff": {self.atoms[a].name: v for a, v in sorted(o.eff.items())},
                }
                for o in self.operators
            ],
            "init": {a.name: self.init[a.id] for a in self.atoms},
            "goal": {self.atoms[a].name: v for a, v in sorted(self.goal.items())},
        }

    def canonical_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def digest(self) -> str:
        """Hex digest of the canonical serialization; stable cache key."""
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()


# ── task file loading ─────────────────────────────────────────────────────────

def _check_name(name, where: str) -> str:
    if not isinstance(name, str) or not name:
        raise TaskFormatError(f"{where}: name must be a non-empty string")
    if any(c.isspace() or c in _FORBIDDEN_NAME_CHARS for c in name):
        raise TaskFormatError(f"{where}: name {name!r} contains whitespace or a reserved character")
    return name


def _partial_state(obj, atom_index: dict[str, int], where: str) -> PartialState:
    if not isinstance(obj, dict):
        raise TaskFormatError(f"{where}: expected an object mapping atom names to booleans")
    out: PartialState = {}
    for name, value in obj.items():
        if name not in atom_index:
            raise TaskFormatError(f"{where}: unknown atom {name!r}")
        if not isinstance(value, bool):
            raise TaskFormatError(f"{where}: value for {name!r} must be a boolean")
        out[atom_index[name]] = value
    return out


def task_from_dict(obj: dict) -> PlanningTask:
    """Build a task from its canonical JSON object; raises TaskFormatError with a
    positional message on any malformed field."""
    if not isinstance(obj, dict):
        raise TaskFormatError("top level: expected an object")
    for key in ("atoms", "operators", "init", "goal"):
        if key not in obj:
            raise TaskFormatError(f"top level: missing key {key!r}")

    raw_atoms = obj["atoms"]
    if not isinstance(raw_atoms, list):
        raise TaskFormatError("atoms: expected a list of names")
    atoms = []
    for i, name in enumerate(raw_atoms):
        atoms.append(Atom(i, _check_name(name, f"atoms[{i}]")))
    atom_index = {a.name: a.id for a in atoms}
    if len(atom_index) != len(atoms):
        raise TaskFormatError("atoms: duplicate name")

    raw_ops = obj["operators"]
    if not isinstance(raw_ops, list):
        raise TaskFormatError("operators: expected a list")
    operators = []
    seen_ops = set()
    for i, raw in enumerate(raw_ops):
        where = f"operators[{i}]"
        if not isinstance(raw, dict) or "name" not in raw:
            raise TaskFormatError(f"{where}: expected an object with a name")
        name = _check_name(raw["name"], where)
        if name in seen_ops:
            raise TaskFormatError(f"{where}: duplicate operator name {name!r}")
        seen_ops.add(name)
        pre = _partial_state(raw.get("pre", {}), atom_index, f"{where}.pre")
        eff = _partial_state(raw.get("eff", {}), atom_index, f"{where}.eff")
        operators.append(Operator(i, name, pre, eff))

    init_partial = _partial_state(obj["init"], atom_index, "init")
    missing = [a.name for a in atoms if a.id not in init_partial]
    if missing:
        raise TaskFormatError(f"init: not total, missing atoms {missing}")
    init = tuple(init_partial[a.id] for a in atoms)
    goal = _partial_state(obj["goal"], atom_index, "goal")
    return PlanningTask(atoms=atoms, operators=operators, init=init, goal=goal)


def load_task(text: str) -> PlanningTask:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TaskFormatError(f"invalid JSON: {exc}") from exc
    return task_from_dict(obj)


def load_task_file(path) -> PlanningTask:
    with open(path, "r", encoding="utf-8") as handle:
        return load_task(handle.read())


# ── length bound ──────────────────────────────────────────────────────────────

def check_bound(task: PlanningTask, bound: int, cap_factor: int = DEFAULT_CAP_FACTOR) -> int:
    """Validate a plan-length bound against the polynomial cap; returns it."""
    if bound < 0:
        raise LengthBoundError(f"length bound must be non-negative, got {bound}")
    cap = cap_factor * (len(task.atoms) + len(task.operators))
    if bound > cap:
        raise LengthBoundError(f"length bound {bound} exceeds cap {cap}")
    return bound


# ── execution semantics ───────────────────────────────────────────────────────

def satisfies(state: State, partial: PartialState) -> bool:
    return all(state[a] == v for a, v in partial.items())


def applicable(state: State, op: Operator) -> bool:
    """True iff every assigned precondition atom has the required value."""
    if any(a >= len(state) for a in op.pre):
        raise StructuralError(f"operator {op.name!r} precondition references atom outside state")
    return satisfies(state, op.pre)


def apply(state: State, op: Operator) -> State:
    """Successor state; effect atoms take the effect value, the rest persist."""
    if not applicable(state, op):
        raise ContractViolationError(f"operator {op.name!r} is not applicable in this state")
    if not op.eff:
        return state
    out = list(state)
    for a, v in op.eff.items():
        out[a] = v
    return tuple(out)


def generate_states(task: PlanningTask, plan: Plan) -> list[State] | None:
    """States s_0..s_n generated by the plan, or None if some step is inapplicable."""
    states = [task.init]
    current = task.init
    for op_id in plan:
        op = task.operator(op_id)
        if not applicable(current, op):
            return None
        current = apply(current, op)
        states.append(current)
    return states


def validate_plan(task: PlanningTask, plan: Plan, bound: int) -> bool:
    """True iff the plan fits the bound, every step applies, and the final state
    satisfies the goal."""
    if len(plan) > bound:
        return False
    states = generate_states(task, plan)
    return states is not None and satisfies(states[-1], task.goal)


# ── queries ───────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class QueryLiteral:
    """One literal of a CNF query over plan properties.

    kind is "atom" or "op"; step None means "at some point" and an integer pins
    the time index (state layer for atoms, schedule step for operators).
    """

    kind: str
    ref: int
    positive: bool = True
    step: int | None = None


@dataclass(frozen=True)
class Query:
    clauses: tuple[tuple[QueryLiteral, ...], ...]

    def is_term(self) -> bool:
        """True iff every clause is a single literal (a conjunction of literals)."""
        return all(len(c) == 1 for c in self.clauses)


def validate_query(task: PlanningTask, query: Query, bound: int) -> None:
    """Check that every literal references an existing atom/operator and that
    time indices fall inside the bounded horizon."""
    for ci, cl in enumerate(query.clauses):
        for lit in cl:
            where = f"clause {ci}"
            if lit.kind == "atom":
                if not 0 <= lit.ref < len(task.atoms):
                    raise QueryError(f"{where}: unknown atom id {lit.ref}")
                if lit.step is not None and not 0 <= lit.step <= bound:
                    raise QueryError(
                        f"{where}: atom time index {lit.step} outside 0..{bound}"
                    )
            elif lit.kind == "op":
                if not 0 <= lit.ref < len(task.operators):
                    raise QueryError(f"{where}: unknown operator id {lit.ref}")
                if lit.step is not None and not 0 <= lit.step < bound:
                    raise QueryError(
                        f"{where}: operator step {lit.step} outside 0..{bound - 1}"
                    )
            else:
                raise QueryError(f"{where}: unknown literal kind {lit.kind!r}")


def plan_satisfies_query(task: PlanningTask, plan: Plan, query: Query, bound: int) -> bool:
    """Evaluate a CNF query against one valid plan.

    An atom is "ever" satisfied if any generated state (including the initial
    one) makes it true; an operator if it occurs anywhere in the plan.  Timed
    atom literals at an index past the end of the plan see the final state,
    because trailing steps leave the state unchanged.  Timed operator literals
    past the end of the plan are unsatisfied.
    """
    validate_query(task, query, bound)
    states = generate_states(task, plan)
    if states is None:
        raise ContractViolationError("plan_satisfies_query requires a valid plan")
    n = len(plan)
    ops_used = set(plan)

    def literal_holds(lit: QueryLiteral) -> bool:
        if lit.kind == "atom":
            if lit.step is None:
                value = any(s[lit.ref] for s in states)
            else:
                value = states[min(lit.step, n)][lit.ref]
        else:
            if lit.step is None:
                value = lit.ref in ops_used
            else:
                value = lit.step < n and plan[lit.step] == lit.ref
        return value if lit.positive else not value

    return all(any(literal_holds(lit) for lit in cl) for cl in query.clauses)
