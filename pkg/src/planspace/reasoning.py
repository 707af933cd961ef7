"""Reasoning over compiled plan spaces: counting, existence, brave/cautious
operators, probability queries, facets and their significance, and interactive
navigation sessions.

A PlanSpace owns one compiled form of the bounded task (with occurrence
indicators).  Enforcing or forbidding operators never recompiles anything:
commitments become assumption literals over indicator or step variables and
every query routes through conditioned counting on the shared DAG.  Only
probability queries that are not plain conjunctions need a fresh compilation
of formula-and-query.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import ddnnf as dnnf
from .cnf import Cnf, check_assumptions
from .encoding import Encoding, QueryShape, classify_query, decode_model, encode, encode_query
from .errors import (
    CommitmentError,
    InconsistentAssumptionsError,
    StructuralError,
    UndefinedSignificanceError,
    UnsatisfiableSpaceError,
)
from .task import Plan, PlanningTask, Query, check_bound

SNAPSHOT_SAMPLE_COUNT = 3


@dataclass(frozen=True)
class Facet:
    """An operator with residual choice: it occurs in some plan but not all.

    inclusive=True is the facet "the operator occurs"; inclusive=False its
    negation.  Both directions of a facet can be enforced.
    """

    operator: int
    inclusive: bool


@dataclass(frozen=True)
class Commitment:
    """A navigation step: enforce/forbid an operator anywhere, or pin one
    schedule step of the plan prefix."""

    kind: str  # "enforce" | "forbid" | "prefix"
    operator: int
    step: int | None = None

    def __post_init__(self):
        if self.kind not in ("enforce", "forbid", "prefix"):
            raise CommitmentError(f"unknown commitment kind {self.kind!r}", self)
        if (self.kind == "prefix") != (self.step is not None):
            raise CommitmentError("step is required for prefix commitments only", self)


@dataclass(frozen=True)
class Probability:
    """Exact conditional probability as an unreduced integer ratio.

    The denominator is max(1, plan count), so an empty plan space yields 0
    rather than a division by zero.  Comparisons cross-multiply; nothing is
    ever converted to floating point.
    """

    numerator: int
    denominator: int

    def __post_init__(self):
        if self.denominator < 1:
            raise StructuralError("probability denominator must be >= 1")
        if not 0 <= self.numerator <= self.denominator:
            raise StructuralError("probability must lie in [0, 1]")

    def as_fraction(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    def equals_ratio(self, num: int, den: int) -> bool:
        if den < 1:
            raise StructuralError("comparison denominator must be >= 1")
        return den * self.numerator == num * self.denominator


class PlanSpace:
    """All plans of a task up to a length bound, in compiled form.

    Instances are immutable; `enforce` returns a new view sharing the compiled
    DAG with one more assumption literal.  Queries on a view answer for the
    committed sub-space.
    """

    def __init__(
        self,
        task: PlanningTask,
        bound: int,
        encoding: Encoding,
        dag: dnnf.Ddnnf,
        assumptions: tuple[int, ...] = (),
        commitments: tuple[Commitment, ...] = (),
        node_budget: int = dnnf.DEFAULT_NODE_BUDGET,
        time_budget: float | None = dnnf.DEFAULT_TIME_BUDGET,
    ):
        self.task = task
        self.bound = bound
        self.encoding = encoding
        self.dag = dag
        self.assumptions = assumptions
        self.commitments = commitments
        self.node_budget = node_budget
        self.time_budget = time_budget
        self._over = range(1, encoding.cnf.num_vars + 1)
        self._count = dag.conditioned_count(assumptions, self._over)
        self._brave: frozenset[int] | None = None
        self._cautious: frozenset[int] | None = None

    # ── counting and existence ────────────────────────────────────────────

    def count(self) -> int:
        return self._count

    def plan_exists(self) -> bool:
        return self._count >= 1

    def top_k_exists(self, k: int) -> bool:
        if k < 0:
            raise StructuralError("k must be non-negative")
        return self._count >= k

    @property
    def is_empty(self) -> bool:
        return self._count == 0

    # ── brave / cautious ──────────────────────────────────────────────────

    def _operator_backbone(self) -> None:
        if self._brave is not None:
            return
        vm = self.encoding.varmap
        if self._count == 0:
            self._brave = frozenset()
            self._cautious = frozenset()
            return
        indicator_vars = [vm.op_ind(o) for o in range(vm.n_ops)]
        core, dead = self.dag.backbone(indicator_vars, self.assumptions)
        ops_of = {vm.op_ind(o): o for o in range(vm.n_ops)}
        self._cautious = frozenset(ops_of[v] for v in core)
        self._brave = frozenset(
            ops_of[v] for v in indicator_vars if v not in dead
        )

    def brave_operators(self) -> frozenset[int]:
        """Operators occurring in at least one plan."""
        self._operator_backbone()
        return self._brave

    def cautious_operators(self) -> frozenset[int]:
        """Operators occurring in every plan; empty (by convention) when there
        are no plans — check is_empty to distinguish."""
        self._operator_backbone()
        return self._cautious

    # ── facets ────────────────────────────────────────────────────────────

    def inclusive_facets(self) -> frozenset[int]:
        return self.brave_operators() - self.cautious_operators()

    def facets(self) -> tuple[Facet, ...]:
        """All facets, inclusive and excluding; always even in number."""
        out = []
        for op in sorted(self.inclusive_facets()):
            out.append(Facet(op, True))
            out.append(Facet(op, False))
        return tuple(out)

    def facet_count(self) -> int:
        return 2 * len(self.inclusive_facets())

    def facet_reason(self, operator: int) -> bool:
        """Membership in the facet set; the same for either sign of the facet."""
        return operator in self.inclusive_facets()

    def at_least_k_facets(self, k: int) -> bool:
        return self.facet_count() >= k

    def at_most_k_facets(self, k: int) -> bool:
        return self.facet_count() <= k

    def exact_k_facets(self, k: int) -> bool:
        return self.facet_count() == k

    # ── probability ───────────────────────────────────────────────────────

    def _satisfying_count(self, query: Query) -> int:
        fragment = encode_query(query, self.encoding, self.task)
        if classify_query(query) is QueryShape.TERM:
            try:
                literals = check_assumptions(
                    self.assumptions + tuple(cl[0] for cl in fragment)
                )
            except InconsistentAssumptionsError:
                # The query contradicts itself or a commitment: nothing satisfies it.
                return 0
            return self.dag.conditioned_count(literals, self._over)
        combined = Cnf(
            self.encoding.cnf.num_vars,
            self.encoding.cnf.clauses + fragment,
        )
        compiled = dnnf.compile_cnf(
            combined, node_budget=self.node_budget, time_budget=self.time_budget
        )
        return compiled.conditioned_count(self.assumptions, self._over)

    def probability(self, query: Query) -> Probability:
        """Share of plans satisfying the query, as an exact ratio."""
        return Probability(self._satisfying_count(query), max(1, self._count))

    def prob_equals(self, query: Query, num: int, den: int) -> bool:
        return self.probability(query).equals_ratio(num, den)

    # ── conditioning / navigation ─────────────────────────────────────────

    def _commitment_literal(self, commitment: Commitment) -> int:
        vm = self.encoding.varmap
        if commitment.kind == "enforce":
            return vm.op_ind(commitment.operator)
        if commitment.kind == "forbid":
            return -vm.op_ind(commitment.operator)
        return vm.op_at(commitment.operator, commitment.step)

    def check_commitment(self, commitment: Commitment) -> int:
        """Validate a commitment against the accumulated ones; returns its
        assumption literal."""
        if not 0 <= commitment.operator < len(self.task.operators):
            raise CommitmentError(
                f"unknown operator id {commitment.operator}", commitment
            )
        if commitment.kind == "prefix":
            taken = sorted(c.step for c in self.commitments if c.kind == "prefix")
            if taken != list(range(len(taken))):
                raise CommitmentError("existing prefix is not contiguous", commitment)
            if commitment.step != len(taken):
                raise CommitmentError(
                    f"prefix steps must be contiguous from 0; expected step {len(taken)}",
                    commitment,
                )
        literal = self._commitment_literal(commitment)
        if -literal in self.assumptions:
            raise CommitmentError(
                "commitment contradicts an earlier one on the same operator", commitment
            )
        return literal

    def enforce(self, commitment: Commitment | Facet) -> "PlanSpace":
        """A view of this space restricted by one commitment.

        The view shares the compiled DAG.  An inconsistent commitment raises;
        a commitment that merely empties the space returns a view flagged
        empty (is_empty) so callers can decide how to react.
        """
        if isinstance(commitment, Facet):
            commitment = Commitment(
                "enforce" if commitment.inclusive else "forbid", commitment.operator
            )
        literal = self.check_commitment(commitment)
        if literal in self.assumptions:
            new_assumptions = self.assumptions
        else:
            new_assumptions = tuple(sorted(self.assumptions + (literal,), key=abs))
        return PlanSpace(
            self.task,
            self.bound,
            self.encoding,
            self.dag,
            assumptions=new_assumptions,
            commitments=self.commitments + (commitment,),
            node_budget=self.node_budget,
            time_budget=self.time_budget,
        )

    # ── significance ──────────────────────────────────────────────────────

    def significance(self, facet: Facet) -> Probability:
        """Relative facet-count drop caused by enforcing the facet.

        Defined for any operator, but undefined (an error) when this space has
        no facets at all.
        """
        total = self.facet_count()
        if total == 0:
            raise UndefinedSignificanceError(
                "significance is undefined on a space without facets"
            )
        try:
            remaining = self.enforce(facet).facet_count()
        except CommitmentError:
            # The facet contradicts a commitment: the conditioned space is
            # empty, hence has no facets.
            remaining = 0
        return Probability(total - remaining, total)

    # ── plan extraction ───────────────────────────────────────────────────

    def enumerate_plans(self, limit: int | None = None) -> tuple[list[Plan], bool]:
        """Decode models into plans in a deterministic order; flags truncation."""
        models, truncated = self.dag.enumerate(limit, self._over, self.assumptions)
        return [decode_model(self.encoding, m) for m in models], truncated

    def sample_plans(self, n: int, seed: int) -> list[Plan]:
        """n independent uniform draws from the plan space."""
        if self._count == 0:
            raise UnsatisfiableSpaceError("cannot sample plans from an empty space")
        models = self.dag.sample(n, seed, self._over, self.assumptions)
        return [decode_model(self.encoding, m) for m in models]

    def operator_names(self, plan: Plan) -> list[str]:
        return [self.task.operators[o].name for o in plan]


def build_plan_space(
    task: PlanningTask,
    bound: int,
    node_budget: int = dnnf.DEFAULT_NODE_BUDGET,
    time_budget: float | None = dnnf.DEFAULT_TIME_BUDGET,
) -> PlanSpace:
    """Encode (with indicators), compile, and count a bounded task."""
    check_bound(task, bound)
    enc = encode(task, bound, with_indicators=True)
    dag = dnnf.compile_cnf(enc.cnf, node_budget=node_budget, time_budget=time_budget)
    return PlanSpace(
        task, bound, enc, dag, node_budget=node_budget, time_budget=time_budget
    )


# ── navigation sessions ───────────────────────────────────────────────────────

@dataclass(frozen=True)
class SignificanceEntry:
    facet: Facet
    significance: Probability


@dataclass(frozen=True)
class Snapshot:
    """Immutable view of a session state: exact count, the facet table with
    significance per facet, the commitments so far, and a few sampled plans."""

    count: int
    facets: tuple[SignificanceEntry, ...]
    commitments: tuple[Commitment, ...]
    plans: tuple[Plan, ...]


@dataclass
class NavSession:
    """One user's interactive narrowing of a plan space.

    Views are stacked; undo pops back to the previous snapshot exactly.  A
    commitment that would eliminate all plans is rejected and leaves the
    session unchanged.  Mutations are not thread-safe; callers serialize.
    """

    base: PlanSpace
    sample_count: int = SNAPSHOT_SAMPLE_COUNT
    sample_seed: int = 0
    _views: list[PlanSpace] = field(init=False)
    _snapshots: list[Snapshot] = field(init=False)

    def __post_init__(self):
        self._views = [self.base]
        self._snapshots = [self._snapshot_of(self.base)]

    def _snapshot_of(self, view: PlanSpace) -> Snapshot:
        table = []
        for facet in view.facets():
            table.append(SignificanceEntry(facet, view.significance(facet)))
        if view.is_empty:
            plans: tuple[Plan, ...] = ()
        else:
            seed = self.sample_seed + len(view.commitments)
            plans = tuple(view.sample_plans(self.sample_count, seed))
        return Snapshot(
            count=view.count(),
            facets=tuple(table),
            commitments=view.commitments,
            plans=plans,
        )

    @property
    def view(self) -> PlanSpace:
        return self._views[-1]

    def snapshot(self) -> Snapshot:
        return self._snapshots[-1]

    def commit(self, commitment: Commitment) -> Snapshot:
        candidate = self.view.enforce(commitment)
        if candidate.is_empty:
            raise CommitmentError("would eliminate all plans", commitment)
        self._views.append(candidate)
        self._snapshots.append(self._snapshot_of(candidate))
        return self.snapshot()

    def undo(self) -> Snapshot:
        """Drop the latest commitment; at the base state this is a no-op."""
        if len(self._views) > 1:
            self._views.pop()
            self._snapshots.pop()
        return self.snapshot()


def open_session(
    task: PlanningTask,
    bound: int,
    sample_count: int = SNAPSHOT_SAMPLE_COUNT,
    sample_seed: int = 0,
) -> NavSession:
    """Compile a task and start an interactive session over it."""
    return NavSession(
        build_plan_space(task, bound), sample_count=sample_count, sample_seed=sample_seed
    )
