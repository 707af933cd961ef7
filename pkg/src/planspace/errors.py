"""Exception types shared across the package."""


class PlanspaceError(Exception):
    """Base class for all errors raised by this package."""


class TaskFormatError(PlanspaceError):
    """A task file or task dictionary is malformed (message carries the position)."""


class StructuralError(PlanspaceError):
    """An identifier (atom, operator, variable) does not exist or a contract on
    structure is violated."""


class ContractViolationError(PlanspaceError):
    """A documented precondition was violated by the caller."""


class LengthBoundError(PlanspaceError):
    """The requested plan-length bound is negative or exceeds the configured cap."""


class QueryError(PlanspaceError):
    """A query references unknown names or out-of-range time indices."""


class QuerySyntaxError(QueryError):
    """The textual query form could not be parsed (message carries the position)."""


class DimacsParseError(PlanspaceError):
    """Malformed DIMACS input; carries the offending line number."""

    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class NnfParseError(PlanspaceError):
    """Malformed NNF input; carries the offending line number."""

    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class BudgetExceededError(PlanspaceError):
    """Compilation exceeded its node or time budget.  Never a silent wrong answer."""


class VariableCapError(PlanspaceError):
    """The brute-force counter refuses formulas above its variable cap."""


class InconsistentAssumptionsError(PlanspaceError):
    """An assumption set contains a variable with both polarities."""


class UnsatisfiableSpaceError(PlanspaceError):
    """An operation that needs at least one model/plan was called on an empty space."""


class UndefinedSignificanceError(PlanspaceError):
    """Significance is undefined when the facet set is empty (division by zero)."""


class ConfigurationError(PlanspaceError):
    """An operation needs a encoding feature (e.g. indicator variables) that was
    not enabled."""


class CommitmentError(PlanspaceError):
    """A navigation commitment is inconsistent with the session state or would
    eliminate every plan."""

    def __init__(self, message: str, commitment=None):
        super().__init__(message)
        self.commitment = commitment


class CorruptModelError(PlanspaceError):
    """A model handed to the decoder violates the encoding's schedule invariants;
    this indicates a compiler or encoder bug, not a user error."""
