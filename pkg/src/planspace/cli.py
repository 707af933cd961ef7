"""Command-line frontend for batch use and scripting.

Every reasoning operation is a subcommand; output is stable JSON by default
(pass --format human for readable text).  Exit codes: 0 success, 1 usage or
input error, 2 compilation budget exceeded, 3 no plans where a plan was
required.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

from . import ddnnf as dnnf
from . import oracle
from .errors import BudgetExceededError, PlanspaceError, UnsatisfiableSpaceError
from .encoding import write_varmap
from .cnf import write_dimacs
from .query import parse_query
from .reasoning import Facet, NavSession, build_plan_space
from .task import load_task_file
from .wire import (
    commitment_from_dict,
    dumps_stable,
    plan_names,
    probability_to_dict,
    snapshot_to_dict,
)

NODE_BUDGET_ENV = "PLANSPACE_NODE_BUDGET"
TIME_BUDGET_ENV = "PLANSPACE_TIME_BUDGET"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_BUDGET = 2
EXIT_NO_PLANS = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _budgets() -> tuple[int, float | None]:
    node = int(os.environ.get(NODE_BUDGET_ENV, dnnf.DEFAULT_NODE_BUDGET))
    raw_time = os.environ.get(TIME_BUDGET_ENV)
    time_budget = float(raw_time) if raw_time is not None else dnnf.DEFAULT_TIME_BUDGET
    return node, time_budget


def build_parser() -> _Parser:
    parser = _Parser(prog="planspace", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, task_required=True):
        p.add_argument("--task", required=task_required, help="path to a task JSON file")
        p.add_argument("--length", type=int, help="absolute plan-length bound")
        p.add_argument("--factor", type=float, help="multiplier over --base-bound")
        p.add_argument("--base-bound", type=int, help="base bound for --factor")
        p.add_argument("--format", choices=("json", "human"), default="json")
        p.add_argument("--emit-cnf", metavar="PATH", help="write DIMACS plus a .vars sidecar")
        p.add_argument("--emit-nnf", metavar="PATH", help="write the compiled form")

    p = sub.add_parser("count", help="number of plans within the bound")
    common(p)
    p = sub.add_parser("exists", help="is there at least one plan")
    common(p)
    p = sub.add_parser("topk", help="are there at least K plans")
    p.add_argument("k", type=int)
    common(p)
    p = sub.add_parser("brave", help="operators occurring in some plan")
    common(p)
    p = sub.add_parser("cautious", help="operators occurring in every plan")
    common(p)
    p = sub.add_parser("facets", help="operators with residual choice")
    common(p)
    p = sub.add_parser("significance", help="facet-count drop per enforced facet")
    p.add_argument("operator", nargs="?", help="restrict to one operator")
    p.add_argument("--forbid", action="store_true", help="use the excluding facet")
    common(p)
    p = sub.add_parser("prob", help="exact probability of a query")
    p.add_argument("query")
    common(p)
    p = sub.add_parser("enum", help="enumerate plans")
    p.add_argument("--limit", type=int)
    common(p)
    p = sub.add_parser("sample", help="uniformly sample N plans")
    p.add_argument("n", type=int)
    p.add_argument("--seed", type=int, default=0)
    common(p)
    p = sub.add_parser("oracle", help="brute-force enumeration ground truth")
    common(p)
    p = sub.add_parser("validate-ddnnf", help="check d-DNNF structural properties")
    p.add_argument("--nnf", metavar="PATH", help="validate this file instead of compiling")
    common(p, task_required=False)
    p = sub.add_parser("navigate", help="line-oriented interactive session")
    p.add_argument("--samples", type=int, default=3, help="plans shown per snapshot")
    p.add_argument("--seed", type=int, default=0)
    common(p)
    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--nnf-dir", help="directory for compiled-form snapshots")
    return parser


def _resolve_bound(args) -> int:
    has_length = getattr(args, "length", None) is not None
    has_factor = getattr(args, "factor", None) is not None
    if has_length == has_factor:
        raise UsageError("give exactly one of --length or --factor")
    if has_length:
        return args.length
    if args.base_bound is None:
        raise UsageError("--factor requires --base-bound")
    if args.factor <= 0:
        raise UsageError("--factor must be positive")
    return math.floor(args.factor * args.base_bound)


def _emit(args, text: str) -> None:
    print(text)


def _render(args, payload: dict, human_lines) -> None:
    if args.format == "json":
        _emit(args, dumps_stable(payload))
    else:
        for line in human_lines:
            _emit(args, line)


def _space_for(args):
    task = load_task_file(args.task)
    bound = _resolve_bound(args)
    node_budget, time_budget = _budgets()
    space = build_plan_space(task, bound, node_budget=node_budget, time_budget=time_budget)
    if args.emit_cnf:
        with open(args.emit_cnf, "w", encoding="utf-8") as handle:
            handle.write(write_dimacs(space.encoding.cnf))
        with open(args.emit_cnf + ".vars", "w", encoding="utf-8") as handle:
            handle.write(write_varmap(space.encoding, task))
    if args.emit_nnf:
        with open(args.emit_nnf, "w", encoding="utf-8") as handle:
            handle.write(dnnf.write_nnf(space.dag))
    return task, bound, space


def _names(task, ids) -> list[str]:
    return sorted(task.operators[o].name for o in ids)


def _significance_table(task, space, which=None) -> list[dict]:
    rows = []
    for facet in space.facets():
        if which is not None and facet != which:
            continue
        rows.append(
            {
                "operator": task.operators[facet.operator].name,
                "sign": "include" if facet.inclusive else "exclude",
                "significance": probability_to_dict(space.significance(facet)),
            }
        )
    return rows


def run(args) -> int:
    command = args.command

    if command == "serve":
        from .service import serve

        node_budget, time_budget = _budgets()
        serve(
            host=args.host,
            port=args.port,
            nnf_dir=args.nnf_dir,
            node_budget=node_budget,
            time_budget=time_budget,
        )
        return EXIT_OK

    if command == "oracle":
        task = load_task_file(args.task)
        bound = _resolve_bound(args)
        stats = oracle.stats(task, bound)
        payload = {
            "count": str(stats.count),
            "brave": _names(task, stats.brave),
            "cautious": _names(task, stats.cautious),
            "has_plans": stats.has_plans,
            "length": bound,
        }
        _render(
            args,
            payload,
            [
                f"count: {stats.count}",
                "brave: " + " ".join(payload["brave"]),
                "cautious: " + " ".join(payload["cautious"]),
            ],
        )
        return EXIT_OK

    if command == "validate-ddnnf" and args.nnf:
        with open(args.nnf, "r", encoding="utf-8") as handle:
            dag = dnnf.read_nnf(handle.read())
        report = dag.validate()
        payload = {
            "ok": report.ok,
            "violations": [{"node": nid, "message": msg} for nid, msg in report.violations],
        }
        _render(args, payload, [f"ok: {report.ok}"] + [f"node {n}: {m}" for n, m in report.violations])
        return EXIT_OK
    if command == "validate-ddnnf" and not args.task:
        raise UsageError("validate-ddnnf needs --task (to compile) or --nnf (to read)")

    task, bound, space = _space_for(args)

    if command == "count":
        payload = {"count": str(space.count()), "length": bound}
        _render(args, payload, [f"count: {space.count()}"])
    elif command == "exists":
        payload = {"exists": space.plan_exists(), "length": bound}
        _render(args, payload, [f"exists: {space.plan_exists()}"])
    elif command == "topk":
        if args.k < 0:
            raise UsageError("K must be non-negative")
        value = space.top_k_exists(args.k)
        payload = {"k": args.k, "satisfied": value, "length": bound}
        _render(args, payload, [f"at least {args.k} plans: {value}"])
    elif command == "brave":
        names = _names(task, space.brave_operators())
        payload = {"brave": names, "length": bound}
        _render(args, payload, ["brave: " + " ".join(names)])
    elif command == "cautious":
        names = _names(task, space.cautious_operators())
        payload = {"cautious": names, "has_plans": not space.is_empty, "length": bound}
        _render(args, payload, ["cautious: " + " ".join(names)])
    elif command == "facets":
        names = _names(task, space.inclusive_facets())
        payload = {"inclusive": names, "facet_count": space.facet_count(), "length": bound}
        _render(
            args,
            payload,
            ["inclusive facets: " + " ".join(names), f"facet count: {space.facet_count()}"],
        )
    elif command == "significance":
        which = None
        if args.operator is not None:
            if args.operator not in task.operator_index:
                raise UsageError(f"unknown operator {args.operator!r}")
            which = Facet(task.operator_index[args.operator], not args.forbid)
            table = [
                {
                    "operator": args.operator,
                    "sign": "exclude" if args.forbid else "include",
                    "significance": probability_to_dict(space.significance(which)),
                }
            ]
        else:
            table = _significance_table(task, space)
        payload = {"table": table, "length": bound}
        _render(
            args,
            payload,
            [
                f"{row['operator']} ({row['sign']}): "
                f"{row['significance']['num']}/{row['significance']['den']}"
                for row in table
            ],
        )
    elif command == "prob":
        query = parse_query(args.query, task, bound)
        prob = space.probability(query)
        payload = dict(probability_to_dict(prob), length=bound)
        _render(args, payload, [f"probability: {prob.numerator}/{prob.denominator}"])
    elif command == "enum":
        plans, truncated = space.enumerate_plans(args.limit)
        payload = {
            "plans": [plan_names(task, p) for p in plans],
            "truncated": truncated,
            "count": str(space.count()),
            "length": bound,
        }
        _render(
            args,
            payload,
            [" ".join(p) if p else "(empty plan)" for p in payload["plans"]]
            + ([f"(truncated at {args.limit})"] if truncated else []),
        )
    elif command == "sample":
        if args.n < 0:
            raise UsageError("N must be non-negative")
        plans = space.sample_plans(args.n, args.seed)
        payload = {
            "plans": [plan_names(task, p) for p in plans],
            "seed": args.seed,
            "length": bound,
        }
        _render(args, payload, [" ".join(p) if p else "(empty plan)" for p in payload["plans"]])
    elif command == "validate-ddnnf":
        report = space.dag.validate()
        payload = {
            "ok": report.ok,
            "violations": [{"node": nid, "message": msg} for nid, msg in report.violations],
            "length": bound,
        }
        _render(args, payload, [f"ok: {report.ok}"] + [f"node {n}: {m}" for n, m in report.violations])
    elif command == "navigate":
        return _navigate(args, task, space)
    else:
        raise UsageError(f"unknown command {command!r}")
    return EXIT_OK


def _navigate(args, task, space) -> int:
    """Line protocol: show | enforce OP | forbid OP | prefix STEP OP | undo | quit.

    Every successful mutation prints the new snapshot; rejected commitments
    print an error object and leave the session unchanged.
    """
    session = NavSession(space, sample_count=args.samples, sample_seed=args.seed)

    def show(snapshot):
        if args.format == "json":
            _emit(args, dumps_stable(snapshot_to_dict(task, snapshot)))
        else:
            data = snapshot_to_dict(task, snapshot)
            _emit(args, f"count: {data['count']}")
            for row in data["facets"]:
                sig = row["significance"]
                _emit(args, f"  {row['operator']} ({row['sign']}): {sig['num']}/{sig['den']}")
            for plan in data["plans"]:
                _emit(args, "  plan: " + (" ".join(plan) if plan else "(empty)"))

    show(session.snapshot())
    for raw in sys.stdin:
        fields = raw.strip().split()
        if not fields:
            continue
        verb = fields[0].lower()
        try:
            if verb in ("quit", "exit"):
                break
            elif verb == "show":
                show(session.snapshot())
            elif verb == "undo":
                show(session.undo())
            elif verb in ("enforce", "forbid"):
                if len(fields) != 2:
                    raise UsageError(f"usage: {verb} OPERATOR")
                show(session.commit(commitment_from_dict(task, {"kind": verb, "operator": fields[1]})))
            elif verb == "prefix":
                if len(fields) != 3:
                    raise UsageError("usage: prefix STEP OPERATOR")
                show(
                    session.commit(
                        commitment_from_dict(
                            task,
                            {"kind": "prefix", "operator": fields[2], "step": int(fields[1])},
                        )
                    )
                )
            else:
                raise UsageError(f"unknown verb {verb!r}")
        except (PlanspaceError, UsageError, ValueError) as exc:
            _emit(args, dumps_stable({"error": str(exc)}))
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return run(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceededError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except UnsatisfiableSpaceError as exc:
        print(f"no plans: {exc}", file=sys.stderr)
        return EXIT_NO_PLANS
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PlanspaceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
