"""Built-in tasks: small hand-made instances with known plan counts, scalable
generators with closed-form counts, and a random-task generator for property
testing."""

from __future__ import annotations

import math
import random

from .task import Atom, Operator, PlanningTask, task_from_dict


def talk_task() -> PlanningTask:
    """Morning-of-the-conference demo task.

    A researcher must wake up and give a talk.  Exactly two plans exist within
    bound 4: with or without getting ready first.  Sleeping in leads to a dead
    end, so that operator occurs in no plan.
    """
    return task_from_dict(
        {
            "atoms": ["awake", "ready", "at-aaai", "talk-given", "overslept"],
            "operators": [
                {
                    "name": "wake-up",
                    "pre": {"awake": False, "overslept": False},
                    "eff": {"awake": True},
                },
                {
                    "name": "get-ready",
                    "pre": {"awake": True, "ready": False, "at-aaai": False},
                    "eff": {"ready": True},
                },
                {
                    "name": "go-to-AAAI",
                    "pre": {"awake": True, "at-aaai": False},
                    "eff": {"at-aaai": True},
                },
                {
                    "name": "give-talk",
                    "pre": {"at-aaai": True, "talk-given": False},
                    "eff": {"talk-given": True},
                },
                {
                    "name": "sleep",
                    "pre": {"awake": False, "overslept": False},
                    "eff": {"overslept": True},
                },
            ],
            "init": {
                "awake": False,
                "ready": False,
                "at-aaai": False,
                "talk-given": False,
                "overslept": False,
            },
            "goal": {"talk-given": True},
        }
    )


def ball_transport_task(n_balls: int) -> PlanningTask:
    """Move each of n balls from room A to room B, one move per step.

    Each ball moves exactly once and the moves commute, so the plans of bound
    n_balls (or larger) are exactly the n_balls! orderings of the moves; see
    ball_transport_count.
    """
    atoms = [Atom(i, f"ball-{i}-in-b") for i in range(n_balls)]
    operators = [
        Operator(i, f"move-ball-{i}", pre={i: False}, eff={i: True}) for i in range(n_balls)
    ]
    return PlanningTask(
        atoms=atoms,
        operators=operators,
        init=tuple(False for _ in range(n_balls)),
        goal={i: True for i in range(n_balls)},
    )


def ball_transport_count(n_balls: int, bound: int) -> int:
    """Closed-form plan count for ball_transport_task: every plan is a
    permutation of the n moves, and only fits when the bound allows it."""
    return math.factorial(n_balls) if bound >= n_balls else 0


def binary_choice_task(k: int) -> PlanningTask:
    """k goals, each achievable by either of two interchangeable operators.

    Plans of bound k pick an order for the k goals and one of two operators per
    goal: k! * 2^k plans.
    """
    atoms = [Atom(i, f"goal-{i}") for i in range(k)]
    operators = []
    for i in range(k):
        for side in ("a", "b"):
            operators.append(
                Operator(len(operators), f"achieve-{i}-{side}", pre={i: False}, eff={i: True})
            )
    return PlanningTask(
        atoms=atoms,
        operators=operators,
        init=tuple(False for _ in range(k)),
        goal={i: True for i in range(k)},
    )


def binary_choice_count(k: int, bound: int) -> int:
    return math.factorial(k) * 2**k if bound >= k else 0


def optional_detour_task() -> PlanningTask:
    """Three required switch flips plus one optional, goal-irrelevant errand.

    With bound 4 the plans are the 3! orderings of the flips plus the 4!
    orderings that include the errand: 30 plans.
    """
    atoms = [Atom(0, "x0"), Atom(1, "x1"), Atom(2, "x2"), Atom(3, "errand-done")]
    operators = [
        Operator(0, "flip-x0", pre={0: False}, eff={0: True}),
        Operator(1, "flip-x1", pre={1: False}, eff={1: True}),
        Operator(2, "flip-x2", pre={2: False}, eff={2: True}),
        Operator(3, "run-errand", pre={3: False}, eff={3: True}),
    ]
    return PlanningTask(
        atoms=atoms,
        operators=operators,
        init=(False, False, False, False),
        goal={0: True, 1: True, 2: True},
    )


def random_task(
    rng: random.Random,
    max_atoms: int = 5,
    max_operators: int = 5,
) -> PlanningTask:
    """A small random task for oracle-equivalence property testing.

    Preconditions, effects, and the goal are random partial states; effects may
    be empty.  Roughly half the drawn tasks have at least one plan at small
    bounds, which keeps both branches of every property exercised.
    """
    n_atoms = rng.randint(1, max_atoms)
    n_ops = rng.randint(1, max_operators)
    atoms = [Atom(i, f"a{i}") for i in range(n_atoms)]

    def partial(p_include: float):
        return {
            a: rng.random() < 0.5 for a in range(n_atoms) if rng.random() < p_include
        }

    operators = []
    for i in range(n_ops):
        operators.append(Operator(i, f"o{i}", pre=partial(0.4), eff=partial(0.5)))
    init = tuple(rng.random() < 0.5 for _ in range(n_atoms))
    goal = partial(0.4)
    return PlanningTask(atoms=atoms, operators=operators, init=init, goal=goal)
