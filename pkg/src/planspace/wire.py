"""Shared JSON wire shapes for the CLI and the HTTP service.

Counts and probability parts travel as decimal strings so arbitrary precision
survives JSON; serialization is key-sorted and compact so equal states produce
byte-identical payloads.
"""

from __future__ import annotations

import json

from .errors import CommitmentError, TaskFormatError
from .reasoning import Commitment, Probability, Snapshot
from .task import Plan, PlanningTask


def dumps_stable(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def probability_to_dict(p: Probability) -> dict:
    return {"num": str(p.numerator), "den": str(p.denominator)}


def plan_names(task: PlanningTask, plan: Plan) -> list[str]:
    return [task.operators[o].name for o in plan]


def commitment_to_dict(task: PlanningTask, c: Commitment) -> dict:
    out = {"kind": c.kind, "operator": task.operators[c.operator].name}
    if c.step is not None:
        out["step"] = c.step
    return out


def commitment_from_dict(task: PlanningTask, obj) -> Commitment:
    if not isinstance(obj, dict):
        raise CommitmentError("commitment must be an object")
    kind = obj.get("kind")
    name = obj.get("operator")
    if kind not in ("enforce", "forbid", "prefix"):
        raise CommitmentError(f"unknown commitment kind {kind!r}")
    if name not in task.operator_index:
        raise CommitmentError(f"unknown operator {name!r}")
    step = obj.get("step")
    if kind == "prefix":
        if not isinstance(step, int) or step < 0:
            raise CommitmentError("prefix commitments need a non-negative integer step")
    elif step is not None:
        raise CommitmentError(f"{kind} commitments take no step")
    return Commitment(kind=kind, operator=task.operator_index[name], step=step)


def snapshot_to_dict(task: PlanningTask, snap: Snapshot) -> dict:
    return {
        "count": str(snap.count),
        "commitments": [commitment_to_dict(task, c) for c in snap.commitments],
        "facet_count": len(snap.facets),
        "facets": [
            {
                "operator": task.operators[entry.facet.operator].name,
                "sign": "include" if entry.facet.inclusive else "exclude",
                "significance": probability_to_dict(entry.significance),
            }
            for entry in snap.facets
        ],
        "plans": [plan_names(task, p) for p in snap.plans],
    }


def task_from_payload(obj) -> PlanningTask:
    from .task import task_from_dict

    if not isinstance(obj, dict):
        raise TaskFormatError("task payload must be a JSON object")
    return task_from_dict(obj)
