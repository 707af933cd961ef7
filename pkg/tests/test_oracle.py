"""Brute-force enumeration against an independent breadth-first re-count."""

import random
from collections import deque

from planspace import fixtures, oracle
from planspace.task import applicable, apply, satisfies, validate_plan

PLAN_LONG = ("wake-up", "get-ready", "go-to-AAAI", "give-talk")
PLAN_SHORT = ("wake-up", "go-to-AAAI", "give-talk")


def names(task, plan):
    return tuple(task.operators[o].name for o in plan)


def bfs_plans(task, bound):
    """Independent re-enumeration: breadth-first over operator sequences."""
    plans = []
    queue = deque([((), task.init)])
    while queue:
        prefix, state = queue.popleft()
        if satisfies(state, task.goal):
            plans.append(prefix)
        if len(prefix) < bound:
            for op in task.operators:
                if applicable(state, op):
                    queue.append((prefix + (op.id,), apply(state, op)))
    return sorted(plans)


def test_exactly_two_plans_at_bound_four(talk):
    result = oracle.enumerate_plans(talk, 4)
    assert not result.truncated
    assert sorted(names(talk, p) for p in result.plans) == sorted([PLAN_LONG, PLAN_SHORT])


def test_single_plan_at_bound_three(talk):
    result = oracle.enumerate_plans(talk, 3)
    assert [names(talk, p) for p in result.plans] == [PLAN_SHORT]


def test_no_plans_at_bound_two(talk):
    assert oracle.enumerate_plans(talk, 2).plans == []


def test_limit_flags_truncation(talk):
    result = oracle.enumerate_plans(talk, 4, limit=1)
    assert result.truncated and len(result.plans) == 1
    exact = oracle.enumerate_plans(talk, 4, limit=2)
    assert not exact.truncated and len(exact.plans) == 2


def test_stats_on_demo_task(talk):
    st = oracle.stats(talk, 4)
    assert st.count == 2
    assert {talk.operators[o].name for o in st.brave} == {
        "wake-up", "get-ready", "go-to-AAAI", "give-talk",
    }
    assert {talk.operators[o].name for o in st.cautious} == {
        "wake-up", "go-to-AAAI", "give-talk",
    }


def test_stats_trivial_goal_counts_empty_plan():
    task = fixtures.ball_transport_task(2)
    trivial = task.__class__(
        atoms=task.atoms, operators=task.operators, init=task.init, goal={}
    )
    st = oracle.stats(trivial, 0)
    assert st.count == 1 and st.has_plans
    assert st.brave == frozenset()
    assert st.cautious == frozenset()


def test_stats_empty_space_flagged(talk):
    st = oracle.stats(talk, 2)
    assert st.count == 0 and not st.has_plans
    assert st.brave == st.cautious == frozenset()


def test_enumeration_matches_bfs_and_validates():
    rng = random.Random(99)
    for _ in range(60):
        task = fixtures.random_task(rng)
        bound = rng.randint(0, 5)
        result = oracle.enumerate_plans(task, bound)
        assert sorted(result.plans) == bfs_plans(task, bound)
        for plan in result.plans:
            assert validate_plan(task, plan, bound)


def test_counts_monotone_in_bound():
    rng = random.Random(7)
    for _ in range(30):
        task = fixtures.random_task(rng)
        counts = [oracle.stats(task, bound).count for bound in range(5)]
        assert counts == sorted(counts)


def test_cautious_subset_of_brave():
    rng = random.Random(13)
    seen_nonempty = 0
    for _ in range(40):
        task = fixtures.random_task(rng)
        st = oracle.stats(task, 4)
        if st.has_plans:
            seen_nonempty += 1
            assert st.cautious <= st.brave
    assert seen_nonempty > 5


def test_enumeration_order_is_deterministic_preorder(talk):
    result = oracle.enumerate_plans(talk, 4)
    assert result.plans == sorted(result.plans)
