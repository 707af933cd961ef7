"""Task model, execution semantics, plan validation, and query satisfaction."""

import json
import random

import pytest

from planspace import fixtures
from planspace.errors import (
    ContractViolationError,
    LengthBoundError,
    QueryError,
    StructuralError,
    TaskFormatError,
)
from planspace.query import parse_query
from planspace.task import (
    Query,
    QueryLiteral,
    applicable,
    apply,
    check_bound,
    load_task,
    plan_satisfies_query,
    validate_plan,
)

PLAN_LONG = ("wake-up", "get-ready", "go-to-AAAI", "give-talk")
PLAN_SHORT = ("wake-up", "go-to-AAAI", "give-talk")


def ids(task, names):
    return tuple(task.operator_index[n] for n in names)


# ── applicability and application ─────────────────────────────────────────────

def test_applicable_in_init(talk, talk_ops):
    assert applicable(talk.init, talk.operators[talk_ops["wake-up"]])


def test_empty_precondition_always_applicable(talk):
    from planspace.task import Operator

    op = Operator(0, "noop", pre={}, eff={})
    assert applicable(talk.init, op)


def test_give_talk_not_applicable_in_init(talk, talk_ops):
    assert not applicable(talk.init, talk.operators[talk_ops["give-talk"]])


def test_apply_sets_effect_and_keeps_rest(talk, talk_ops):
    awake = talk.atom_index["awake"]
    state = apply(talk.init, talk.operators[talk_ops["wake-up"]])
    assert state[awake] is True
    for atom in talk.atoms:
        if atom.id != awake:
            assert state[atom.id] == talk.init[atom.id]
    assert len(state) == len(talk.atoms)


def test_apply_empty_effect_is_identity(talk):
    from planspace.task import Operator

    op = Operator(0, "noop", pre={}, eff={})
    assert apply(talk.init, op) == talk.init


def test_apply_along_short_plan_reaches_goal_atom(talk, talk_ops):
    state = talk.init
    for name in ("wake-up", "go-to-AAAI"):
        state = apply(state, talk.operators[talk_ops[name]])
    state = apply(state, talk.operators[talk_ops["give-talk"]])
    assert state[talk.atom_index["talk-given"]] is True


def test_apply_rejects_inapplicable(talk, talk_ops):
    with pytest.raises(ContractViolationError):
        apply(talk.init, talk.operators[talk_ops["give-talk"]])


# ── plan validation ───────────────────────────────────────────────────────────

def test_validate_both_known_plans(talk):
    assert validate_plan(talk, ids(talk, PLAN_LONG), 4)
    assert validate_plan(talk, ids(talk, PLAN_SHORT), 4)


def test_validate_rejects_overlong_plan(talk):
    assert not validate_plan(talk, ids(talk, PLAN_LONG), 3)


def test_validate_rejects_empty_plan_when_goal_unmet(talk):
    assert not validate_plan(talk, (), 4)


def test_validate_unknown_operator_id(talk):
    with pytest.raises(StructuralError):
        validate_plan(talk, (99,), 4)


def test_bound_cap(talk):
    with pytest.raises(LengthBoundError):
        check_bound(talk, -1)
    with pytest.raises(LengthBoundError):
        check_bound(talk, 10 * (len(talk.atoms) + len(talk.operators)) + 1)
    check_bound(talk, 4)


# ── query satisfaction ────────────────────────────────────────────────────────

def test_conjunctive_query_on_short_plan(talk):
    plan = ids(talk, PLAN_SHORT)
    both = parse_query("op:wake-up ; op:sleep", talk, 4)
    either = parse_query("op:wake-up | op:sleep", talk, 4)
    assert not plan_satisfies_query(talk, plan, both, 4)
    assert plan_satisfies_query(talk, plan, either, 4)


def test_empty_query_is_true(talk):
    assert plan_satisfies_query(talk, ids(talk, PLAN_SHORT), Query(()), 4)


def test_atom_ever_includes_initial_state(talk):
    # No plan ever clears "awake" once set, and the initial state has it false,
    # so a negative timed literal at 0 and the untimed positive both hold.
    plan = ids(talk, PLAN_SHORT)
    q = parse_query("!atom:awake@0 ; atom:awake", talk, 4)
    assert plan_satisfies_query(talk, plan, q, 4)


def test_timed_atom_after_plan_end_sees_final_state(talk):
    plan = ids(talk, PLAN_SHORT)  # length 3, bound 4
    q = parse_query("atom:talk-given@4", talk, 4)
    assert plan_satisfies_query(talk, plan, q, 4)


def test_timed_operator_after_plan_end_is_unsatisfied(talk):
    plan = ids(talk, PLAN_SHORT)
    q = parse_query("op:give-talk@3", talk, 4)
    assert not plan_satisfies_query(talk, plan, q, 4)
    q2 = parse_query("op:give-talk@2", talk, 4)
    assert plan_satisfies_query(talk, plan, q2, 4)


def test_query_index_out_of_range(talk):
    q = Query(((QueryLiteral("op", 0, True, 4),),))
    with pytest.raises(QueryError):
        plan_satisfies_query(talk, ids(talk, PLAN_SHORT), q, 4)
    q = Query(((QueryLiteral("atom", 0, True, 5),),))
    with pytest.raises(QueryError):
        plan_satisfies_query(talk, ids(talk, PLAN_SHORT), q, 4)


def test_query_conjunction_distributes(talk):
    rng = random.Random(4)
    plan = ids(talk, PLAN_LONG)
    for _ in range(25):
        task = talk
        ops = list(task.operator_index)
        atoms = list(task.atom_index)

        def rand_clause():
            k = rng.randint(1, 2)
            lits = []
            for _ in range(k):
                if rng.random() < 0.5:
                    lits.append(QueryLiteral("op", rng.randrange(len(ops)), rng.random() < 0.5))
                else:
                    lits.append(QueryLiteral("atom", rng.randrange(len(atoms)), rng.random() < 0.5))
            return tuple(lits)

        q1 = Query((rand_clause(),))
        q2 = Query((rand_clause(),))
        union = Query(q1.clauses + q2.clauses)
        assert plan_satisfies_query(task, plan, union, 4) == (
            plan_satisfies_query(task, plan, q1, 4)
            and plan_satisfies_query(task, plan, q2, 4)
        )


# ── loader ────────────────────────────────────────────────────────────────────

def test_loader_round_trip(talk):
    again = load_task(json.dumps(talk.to_dict()))
    assert again.to_dict() == talk.to_dict()
    assert again.digest() == talk.digest()


def test_loader_rejects_partial_init(talk):
    obj = talk.to_dict()
    del obj["init"]["awake"]
    with pytest.raises(TaskFormatError, match="init.*awake"):
        load_task(json.dumps(obj))


def test_loader_rejects_unknown_atom(talk):
    obj = talk.to_dict()
    obj["operators"][0]["pre"]["phantom"] = True
    with pytest.raises(TaskFormatError, match=r"operators\[0\].pre"):
        load_task(json.dumps(obj))


def test_loader_rejects_duplicate_names(talk):
    obj = talk.to_dict()
    obj["operators"][1]["name"] = obj["operators"][0]["name"]
    with pytest.raises(TaskFormatError, match="duplicate"):
        load_task(json.dumps(obj))


def test_loader_rejects_goal_typo(talk):
    obj = talk.to_dict()
    obj["goal"] = {"talk-give": True}
    with pytest.raises(TaskFormatError, match="goal"):
        load_task(json.dumps(obj))


def test_loader_rejects_reserved_characters():
    obj = fixtures.talk_task().to_dict()
    obj["atoms"].append("bad|name")
    with pytest.raises(TaskFormatError, match="reserved"):
        load_task(json.dumps(obj))
