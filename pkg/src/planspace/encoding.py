"""Sequential CNF encoding of a bounded planning task.

Models of the produced formula correspond one-to-one to plans of length at most
the bound.  Per step at most one operator fires; trailing steps are empty, and a
padding constraint forbids gaps so each plan has exactly one schedule.  State
layers are pinned by the initial state, operator effects, and explanatory frame
clauses in both flip directions, which makes every non-operator variable a
function of the schedule — that functional determination is what keeps the
model count equal to the plan count.

Variable layout (1-based, contiguous blocks):
  atom value per layer 0..bound, then operator per step 0..bound-1, then —
  optionally — one occurrence indicator per operator and per atom, defined by
  biconditionals so they add no extra models.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .cnf import Cnf, ClauseT, clause
from .errors import (
    ConfigurationError,
    CorruptModelError,
    QueryError,
    StructuralError,
)
from .task import Plan, PlanningTask, Query, check_bound, validate_query


@dataclass(frozen=True)
class VarTag:
    """Meaning of one encoding variable.

    kind: "atom" (value at a layer), "op" (fires at a step), "op-ind"
    (occurs anywhere), "atom-ind" (true at some layer).  step is None for
    indicator kinds.
    """

    kind: str
    ref: int
    step: int | None = None


class VarMap:
    """Bijection between encoding variables and their tags."""

    def __init__(self, n_atoms: int, n_ops: int, bound: int, with_indicators: bool):
        self.n_atoms = n_atoms
        self.n_ops = n_ops
        self.bound = bound
        self.with_indicators = with_indicators
        self._atom_base = 1
        self._op_base = self._atom_base + (bound + 1) * n_atoms
        self._op_ind_base = self._op_base + bound * n_ops
        self._atom_ind_base = self._op_ind_base + (n_ops if with_indicators else 0)
        self.num_vars = self._atom_ind_base - 1 + (n_atoms if with_indicators else 0)

    def atom_at(self, atom: int, layer: int) -> int:
        if not (0 <= atom < self.n_atoms and 0 <= layer <= self.bound):
            raise StructuralError(f"no variable for atom {atom} at layer {layer}")
        return self._atom_base + layer * self.n_atoms + atom

    def op_at(self, op: int, step: int) -> int:
        if not (0 <= op < self.n_ops and 0 <= step < self.bound):
            raise StructuralError(f"no variable for operator {op} at step {step}")
        return self._op_base + step * self.n_ops + op

    def op_ind(self, op: int) -> int:
        if not self.with_indicators:
            raise ConfigurationError("encoding was built without indicator variables")
        if not 0 <= op < self.n_ops:
            raise StructuralError(f"no indicator for operator {op}")
        return self._op_ind_base + op

    def atom_ind(self, atom: int) -> int:
        if not self.with_indicators:
            raise ConfigurationError("encoding was built without indicator variables")
        if not 0 <= atom < self.n_atoms:
            raise StructuralError(f"no indicator for atom {atom}")
        return self._atom_ind_base + atom

    def tag_of(self, var: int) -> VarTag:
        if not 1 <= var <= self.num_vars:
            raise StructuralError(f"variable {var} outside encoding")
        offset = var - self._atom_base
        if var < self._op_base:
            return VarTag("atom", offset % self.n_atoms, offset // self.n_atoms)
        offset = var - self._op_base
        if var < self._op_ind_base:
            return VarTag("op", offset % self.n_ops, offset // self.n_ops)
        if var < self._atom_ind_base:
            return VarTag("op-ind", var - self._op_ind_base)
        return VarTag("atom-ind", var - self._atom_ind_base)

    def all_op_step_vars(self) -> list[int]:
        return [
            self.op_at(o, i) for i in range(self.bound) for o in range(self.n_ops)
        ]


@dataclass(frozen=True)
class Encoding:
    cnf: Cnf
    varmap: VarMap
    bound: int
    task_hash: str


def _lit(var: int, value: bool) -> int:
    return var if value else -var


def encode(task: PlanningTask, bound: int, with_indicators: bool = True) -> Encoding:
    """Build the bounded sequential encoding of a task."""
    check_bound(task, bound)
    n_atoms = len(task.atoms)
    n_ops = len(task.operators)
    vm = VarMap(n_atoms, n_ops, bound, with_indicators)
    clauses: list[ClauseT] = []

    # Initial layer and goal layer units.
    for a in range(n_atoms):
        clauses.append((_lit(vm.atom_at(a, 0), task.init[a]),))
    for a, value in sorted(task.goal.items()):
        clauses.append((_lit(vm.atom_at(a, bound), value),))

    # Adders/deleters per atom, for the frame clauses.
    adders: list[list[int]] = [[] for _ in range(n_atoms)]
    deleters: list[list[int]] = [[] for _ in range(n_atoms)]
    for op in task.operators:
        for a, value in op.eff.items():
            (adders if value else deleters)[a].append(op.id)

    for step in range(bound):
        # At most one operator per step (empty steps stay legal for padding).
        for o1 in range(n_ops):
            for o2 in range(o1 + 1, n_ops):
                clauses.append(clause([-vm.op_at(o1, step), -vm.op_at(o2, step)]))
        # Preconditions and effects.
        for op in task.operators:
            ov = vm.op_at(op.id, step)
            for a, value in sorted(op.pre.items()):
                clauses.append(clause([-ov, _lit(vm.atom_at(a, step), value)]))
            for a, value in sorted(op.eff.items()):
                clauses.append(clause([-ov, _lit(vm.atom_at(a, step + 1), value)]))
        # Explanatory frame: a value flip at this step needs a responsible
        # operator, in both directions.
        for a in range(n_atoms):
            before = vm.atom_at(a, step)
            after = vm.atom_at(a, step + 1)
            clauses.append(
                clause([-after, before] + [vm.op_at(o, step) for o in adders[a]])
            )
            clauses.append(
                clause([after, -before] + [vm.op_at(o, step) for o in deleters[a]])
            )
        # Padding: an empty step forces the next step empty too.
        if step < bound - 1:
            step_vars = [vm.op_at(o, step) for o in range(n_ops)]
            for o in range(n_ops):
                clauses.append(clause(step_vars + [-vm.op_at(o, step + 1)]))

    if with_indicators:
        for op in task.operators:
            ind = vm.op_ind(op.id)
            occ = [vm.op_at(op.id, i) for i in range(bound)]
            clauses.append(clause([-ind] + occ))
            for ov in occ:
                clauses.append(clause([-ov, ind]))
        for a in range(n_atoms):
            ind = vm.atom_ind(a)
            layers = [vm.atom_at(a, i) for i in range(bound + 1)]
            clauses.append(clause([-ind] + layers))
            for av in layers:
                clauses.append(clause([-av, ind]))

    return Encoding(
        cnf=Cnf(vm.num_vars, tuple(clauses)),
        varmap=vm,
        bound=bound,
        task_hash=task.digest(),
    )


def decode_model(enc: Encoding, model: dict[int, bool]) -> Plan:
    """Read the operator schedule out of a model, stopping at the first empty
    step.  Raises CorruptModelError if the schedule violates the at-most-one or
    no-gap invariants, which would indicate a compiler bug."""
    vm = enc.varmap
    steps: list[int] = []
    ended = False
    for i in range(vm.bound):
        fired = [o for o in range(vm.n_ops) if model.get(vm.op_at(o, i), False)]
        if len(fired) > 1:
            raise CorruptModelError(f"step {i} fires {len(fired)} operators")
        if not fired:
            ended = True
        elif ended:
            raise CorruptModelError(f"step {i} fires after an empty step")
        else:
            steps.append(fired[0])
    return tuple(steps)


def encode_query(query: Query, enc: Encoding, task: PlanningTask) -> tuple[ClauseT, ...]:
    """Translate a plan query into clauses over the encoding's variables."""
    validate_query(task, query, enc.bound)
    vm = enc.varmap
    out: list[ClauseT] = []
    for cl in query.clauses:
        lits: list[int] = []
        for q in cl:
            if q.step is None:
                if not vm.with_indicators:
                    raise ConfigurationError(
                        "query uses occurrence literals but the encoding has no indicators"
                    )
                var = vm.op_ind(q.ref) if q.kind == "op" else vm.atom_ind(q.ref)
            elif q.kind == "op":
                if not 0 <= q.step < vm.bound:
                    raise QueryError(f"operator step {q.step} outside 0..{vm.bound - 1}")
                var = vm.op_at(q.ref, q.step)
            else:
                if not 0 <= q.step <= vm.bound:
                    raise QueryError(f"atom layer {q.step} outside 0..{vm.bound}")
                var = vm.atom_at(q.ref, q.step)
            lits.append(_lit(var, q.positive))
        if any(-lit in lits for lit in lits):
            continue  # tautological clause: every plan satisfies it
        out.append(clause(lits))
    return tuple(out)


class QueryShape(enum.Enum):
    TERM = "term"
    GENERAL = "general"


def classify_query(query: Query) -> QueryShape:
    """Terms (conjunctions of literals) can be answered by conditioning the
    compiled form; anything else needs a recompilation of formula-and-query."""
    return QueryShape.TERM if query.is_term() else QueryShape.GENERAL


def write_varmap(enc: Encoding, task: PlanningTask) -> str:
    """Sidecar text mapping each DIMACS variable to its meaning."""
    vm = enc.varmap
    lines = []
    for var in range(1, vm.num_vars + 1):
        tag = vm.tag_of(var)
        if tag.kind == "atom":
            name = f"atom:{task.atoms[tag.ref].name}@{tag.step}"
        elif tag.kind == "op":
            name = f"op:{task.operators[tag.ref].name}@{tag.step}"
        elif tag.kind == "op-ind":
            name = f"op-ind:{task.operators[tag.ref].name}"
        else:
            name = f"atom-ind:{task.atoms[tag.ref].name}"
        lines.append(f"v {var} {name}")
    return "\n".join(lines) + "\n"
