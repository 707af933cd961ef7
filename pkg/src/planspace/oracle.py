"""Brute-force plan enumeration: the ground truth the compiled pipeline is
tested against.

Plans are operator *sequences*; revisiting a state yields a distinct plan, so
no pruning happens here.  Enumeration is depth-first and pre-order: a plan is
emitted before any of its extensions, children ordered by ascending operator
id, which makes the output order deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

from .task import Plan, PlanningTask, apply, applicable, check_bound, satisfies


@dataclass
class Enumeration:
    plans: list[Plan]
    truncated: bool


@dataclass
class SpaceStats:
    """Exact plan-space summary.

    When no plan exists the intersection defining the cautious set is over an
    empty family; by convention we report the empty set and has_plans=False so
    callers can tell the two situations apart.
    """

    count: int
    brave: frozenset[int]
    cautious: frozenset[int]
    has_plans: bool


def enumerate_plans(task: PlanningTask, bound: int, limit: int | None = None) -> Enumeration:
    """All valid operator sequences of length <= bound, in deterministic order.

    Stops after `limit` plans if given, flagging the result as truncated.
    """
    check_bound(task, bound)
    plans: list[Plan] = []
    truncated = False
    prefix: list[int] = []
    ops = task.operators

    def walk(state) -> bool:
        """Returns False when the limit was hit and the search must stop."""
        nonlocal truncated
        if satisfies(state, task.goal):
            if limit is not None and len(plans) >= limit:
                truncated = True
                return False
            plans.append(tuple(prefix))
        if len(prefix) == bound:
            return True
        for op in ops:
            if applicable(state, op):
                prefix.append(op.id)
                alive = walk(apply(state, op))
                prefix.pop()
                if not alive:
                    return False
        return True

    walk(task.init)
    return Enumeration(plans=plans, truncated=truncated)


def stats(task: PlanningTask, bound: int) -> SpaceStats:
    """Plan count plus the union (brave) and intersection (cautious) of the
    operator sets used across all plans."""
    plans = enumerate_plans(task, bound).plans
    if not plans:
        return SpaceStats(count=0, brave=frozenset(), cautious=frozenset(), has_plans=False)
    brave: set[int] = set()
    cautious = set(range(len(task.operators)))
    for plan in plans:
        used = set(plan)
        brave |= used
        cautious &= used
    return SpaceStats(
        count=len(plans),
        brave=frozenset(brave),
        cautious=frozenset(cautious),
        has_plans=True,
    )
