"""CNF formulas with DIMACS I/O, unit propagation, and a small exact counter.

Literals are signed integers in the DIMACS convention: variable ids start at 1,
a negative value negates.  Clauses are canonical tuples, sorted by variable and
deduplicated, with tautologies rejected at construction; canonical clauses make
clause sets directly usable as cache keys.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    DimacsParseError,
    InconsistentAssumptionsError,
    StructuralError,
    VariableCapError,
)

ClauseT = tuple[int, ...]


def clause(literals) -> ClauseT:
    """Canonical clause: validated, sorted by (variable, polarity), deduplicated."""
    seen: set[int] = set()
    for lit in literals:
        if not isinstance(lit, int) or lit == 0:
            raise StructuralError(f"invalid literal {lit!r}")
        if -lit in seen:
            raise StructuralError(f"tautological clause: both {abs(lit)} and -{abs(lit)}")
        seen.add(lit)
    return tuple(sorted(seen, key=lambda l: (abs(l), l < 0)))


@dataclass(frozen=True)
class Cnf:
    num_vars: int
    clauses: tuple[ClauseT, ...]

    def __post_init__(self):
        if self.num_vars < 0:
            raise StructuralError("num_vars must be non-negative")
        for cl in self.clauses:
            for lit in cl:
                if abs(lit) > self.num_vars:
                    raise StructuralError(
                        f"literal {lit} exceeds declared variable count {self.num_vars}"
                    )

    def variables(self) -> frozenset[int]:
        return frozenset(abs(lit) for cl in self.clauses for lit in cl)


def cnf(num_vars: int, raw_clauses) -> Cnf:
    """Build a Cnf, canonicalizing every clause."""
    return Cnf(num_vars, tuple(clause(c) for c in raw_clauses))


# ── DIMACS ────────────────────────────────────────────────────────────────────

def write_dimacs(f: Cnf) -> str:
    lines = [f"p cnf {f.num_vars} {len(f.clauses)}"]
    for cl in f.clauses:
        lines.append(" ".join(str(lit) for lit in cl) + " 0" if cl else "0")
    return "\n".join(lines) + "\n"


def read_dimacs(text: str) -> Cnf:
    num_vars = None
    declared = None
    clauses: list[ClauseT] = []
    last_line = 0
    for line_number, raw in enumerate(text.splitlines(), start=1):
        last_line = line_number
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            if num_vars is not None:
                raise DimacsParseError(line_number, "duplicate header")
            fields = line.split()
            if len(fields) != 4 or fields[0] != "p" or fields[1] != "cnf":
                raise DimacsParseError(line_number, f"bad header {line!r}")
            try:
                num_vars = int(fields[2])
                declared = int(fields[3])
            except ValueError:
                raise DimacsParseError(line_number, f"bad header {line!r}") from None
            if num_vars < 0 or declared < 0:
                raise DimacsParseError(line_number, "negative count in header")
            continue
        if num_vars is None:
            raise DimacsParseError(line_number, "clause before header")
        try:
            lits = [int(field) for field in line.split()]
        except ValueError:
            raise DimacsParseError(line_number, f"non-integer field in {line!r}") from None
        if not lits or lits[-1] != 0:
            raise DimacsParseError(line_number, "clause line must end with 0")
        lits = lits[:-1]
        if any(lit == 0 for lit in lits):
            raise DimacsParseError(line_number, "literal 0 inside clause")
        if any(abs(lit) > num_vars for lit in lits):
            raise DimacsParseError(line_number, "literal out of range")
        try:
            clauses.append(clause(lits))
        except StructuralError as exc:
            raise DimacsParseError(line_number, str(exc)) from None
    if num_vars is None:
        raise DimacsParseError(last_line or 1, "missing header")
    if declared != len(clauses):
        raise DimacsParseError(last_line, f"expected {declared} clauses, found {len(clauses)}")
    return Cnf(num_vars, tuple(clauses))


# ── unit propagation ──────────────────────────────────────────────────────────

def _propagate(clauses, assumptions=()):
    """Unit-resolution fixpoint over raw clause tuples.

    Returns (ok, assignment, residual): assignment maps var -> bool for every
    literal forced by assumptions or unit chains; residual is a deduplicated,
    sorted tuple of the remaining clauses with falsified literals removed.  On
    conflict returns (False, partial assignment, None).
    """
    assign: dict[int, bool] = {}
    queue: list[int] = []

    def enqueue(lit: int) -> bool:
        var, value = abs(lit), lit > 0
        known = assign.get(var)
        if known is None:
            assign[var] = value
            queue.append(var)
            return True
        return known == value

    for lit in assumptions:
        if not enqueue(lit):
            return False, assign, None

    occurs: dict[int, list[int]] = {}
    for idx, cl in enumerate(clauses):
        if len(cl) == 0:
            return False, assign, None
        for lit in cl:
            occurs.setdefault(abs(lit), []).append(idx)
    satisfied = [False] * len(clauses)

    def examine(idx: int) -> bool:
        if satisfied[idx]:
            return True
        unassigned = None
        open_count = 0
        for lit in clauses[idx]:
            value = assign.get(abs(lit))
            if value is None:
                unassigned = lit
                open_count += 1
            elif value == (lit > 0):
                satisfied[idx] = True
                return True
        if open_count == 0:
            return False
        if open_count == 1:
            satisfied[idx] = True
            return enqueue(unassigned)
        return True

    for idx in range(len(clauses)):
        if not examine(idx):
            return False, assign, None
    while queue:
        var = queue.pop()
        for idx in occurs.get(var, ()):
            if not examine(idx):
                return False, assign, None

    residual = set()
    for idx, cl in enumerate(clauses):
        if satisfied[idx]:
            continue
        residual.add(tuple(lit for lit in cl if abs(lit) not in assign))
    return True, assign, tuple(sorted(residual))


@dataclass
class PropagationResult:
    status: str  # "ok" or "conflict"
    implied: frozenset[int]
    residual: Cnf | None


def unit_propagate(f: Cnf, assumptions=()) -> PropagationResult:
    """Propagate unit clauses (and assumptions) to fixpoint.

    The implied set contains the assumptions themselves plus every forced
    literal; the residual formula has no satisfied clauses and no falsified
    literals.  Contradictions yield a conflict status, not an exception.
    """
    for lit in assumptions:
        if abs(lit) > f.num_vars or lit == 0:
            raise StructuralError(f"assumption literal {lit} out of range")
    ok, assign, residual = _propagate(f.clauses, tuple(assumptions))
    implied = frozenset(v if value else -v for v, value in assign.items())
    if not ok:
        return PropagationResult("conflict", implied, None)
    return PropagationResult("ok", implied, Cnf(f.num_vars, residual))


def check_assumptions(assumptions) -> tuple[int, ...]:
    """Reject assumption sets that assign a variable both ways."""
    seen: dict[int, bool] = {}
    for lit in assumptions:
        var, value = abs(lit), lit > 0
        if seen.get(var, value) != value:
            raise InconsistentAssumptionsError(f"variable {var} assumed both true and false")
        seen[var] = value
    return tuple(sorted(seen_var if val else -seen_var for seen_var, val in seen.items()))


# ── brute-force model counting ────────────────────────────────────────────────

DEFAULT_VAR_CAP = 30


def brute_force_count(f: Cnf, assumptions=(), max_vars: int = DEFAULT_VAR_CAP) -> int:
    """Exact model count over all declared variables by plain Shannon expansion
    with unit propagation.

    Deliberately naive (no components, no caching) so it stays an independent
    check on the compiled counting path.  Refuses formulas above max_vars;
    callers that know their instance is benign may raise the cap.
    """
    if f.num_vars > max_vars:
        raise VariableCapError(
            f"{f.num_vars} variables exceed the brute-force cap of {max_vars}"
        )
    assumptions = check_assumptions(assumptions)

    def count(clauses, unassigned: frozenset[int], assume) -> int:
        ok, assign, residual = _propagate(clauses, assume)
        if not ok:
            return 0
        remaining = unassigned - assign.keys()
        if not residual:
            return 1 << len(remaining)
        branch_var = abs(residual[0][0])
        return count(residual, remaining, (branch_var,)) + count(
            residual, remaining, (-branch_var,)
        )

    return count(f.clauses, frozenset(range(1, f.num_vars + 1)), assumptions)
