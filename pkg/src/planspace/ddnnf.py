"""Compilation of CNF into deterministic decomposable negation normal form,
plus the counting-graph queries that make the compiled form useful: exact model
counting, counting under literal assumptions, backbone extraction, exactly
uniform sampling, and model enumeration.

The compiler is an exhaustive DPLL: propagate units, split the residual clauses
into variable-disjoint connected components (compiled independently under a
conjunction node), otherwise branch on one variable and emit a decision node.
Identical residual components are compiled once thanks to a component cache,
and structurally identical nodes are shared through hash-consing, so the result
is a DAG.

Smoothness is not materialized.  Every node stores the bitmask of variables it
actually constrains; wherever a disjunction's branches support different
variable sets, counting multiplies in a power of two for the missing ("free")
variables instead of inserting smoothing nodes.  Conditioning zeroes the
contradicted side of decisions and literal leaves and stops counting assumed
variables as free.
"""

from __future__ import annotations

import random
import sys
import time
from dataclasses import dataclass, field
from itertools import product as _cartesian

from .cnf import Cnf, check_assumptions, _propagate
from .errors import (
    BudgetExceededError,
    InconsistentAssumptionsError,
    NnfParseError,
    StructuralError,
    UnsatisfiableSpaceError,
)

K_TRUE = 0
K_FALSE = 1
K_LIT = 2
K_AND = 3
K_DECISION = 4

_KIND_NAMES = {K_TRUE: "true", K_FALSE: "false", K_LIT: "literal",
               K_AND: "and", K_DECISION: "decision"}

DEFAULT_NODE_BUDGET = 10_000_000
DEFAULT_TIME_BUDGET = 300.0


def _bit(var: int) -> int:
    return 1 << (var - 1)


def _mask(variables) -> int:
    out = 0
    for v in variables:
        if v < 1:
            raise StructuralError(f"variable {v} must be positive")
        out |= 1 << (v - 1)
    return out


def _vars_of(mask: int):
    """Ascending variable ids set in a support mask."""
    while mask:
        low = mask & -mask
        yield low.bit_length()
        mask ^= low


@dataclass
class ValidationReport:
    violations: list[tuple[int, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


class Ddnnf:
    """A rooted DAG in d-DNNF with per-node variable supports.

    Node arrays are parallel: kinds[i] is one of the K_* constants, payloads[i]
    is the literal (K_LIT) or decision variable (K_DECISION), children[i] the
    child id tuple.  Children must precede parents.  Instances are immutable
    once constructed; every query below is read-only.
    """

    def __init__(self, num_vars: int, kinds: list[int], payloads: list[int],
                 children: list[tuple[int, ...]], root: int):
        if not (len(kinds) == len(payloads) == len(children)):
            raise StructuralError("node arrays must have equal length")
        if not 0 <= root < len(kinds):
            raise StructuralError(f"root {root} outside node store")
        self.num_vars = num_vars
        self.kinds = kinds
        self.payloads = payloads
        self.children = children
        self.root = root
        self.supports = self._compute_supports()

    def _compute_supports(self) -> list[int]:
        supports = [0] * len(self.kinds)
        for nid, kind in enumerate(self.kinds):
            if kind == K_LIT:
                supports[nid] = _bit(abs(self.payloads[nid]))
            elif kind == K_AND:
                m = 0
                for c in self.children[nid]:
                    if 0 <= c < nid:
                        m |= supports[c]
                supports[nid] = m
            elif kind == K_DECISION:
                m = _bit(self.payloads[nid])
                for c in self.children[nid]:
                    if 0 <= c < nid:
                        m |= supports[c]
                supports[nid] = m
        return supports

    def __len__(self) -> int:
        return len(self.kinds)

    # ── structural validation ─────────────────────────────────────────────

    def validate(self) -> ValidationReport:
        """Check acyclicity (children precede parents), decomposability of
        conjunctions, and decision-variable absence from decision branches."""
        report = ValidationReport()
        for nid, kind in enumerate(self.kinds):
            for c in self.children[nid]:
                if not 0 <= c < len(self.kinds):
                    report.violations.append((nid, f"child {c} does not exist"))
                elif c >= nid:
                    report.violations.append((nid, f"child {c} not before parent (cycle risk)"))
            if kind == K_LIT:
                var = abs(self.payloads[nid])
                if not 1 <= var <= self.num_vars:
                    report.violations.append((nid, f"literal variable {var} out of range"))
            elif kind == K_AND:
                total = 0
                union = 0
                for c in self.children[nid]:
                    if 0 <= c < nid:
                        total += self.supports[c].bit_count()
                        union |= self.supports[c]
                if total != union.bit_count():
                    report.violations.append((nid, "conjunction children share variables"))
            elif kind == K_DECISION:
                var = self.payloads[nid]
                if not 1 <= var <= self.num_vars:
                    report.violations.append((nid, f"decision variable {var} out of range"))
                if len(self.children[nid]) != 2:
                    report.violations.append((nid, "decision node needs exactly two children"))
                    continue
                hi, lo = self.children[nid]
                for c, side in ((hi, "true"), (lo, "false")):
                    if 0 <= c < nid and self.supports[c] & _bit(var):
                        report.violations.append(
                            (nid, f"decision variable {var} occurs in {side} branch")
                        )
            elif kind not in (K_TRUE, K_FALSE):
                report.violations.append((nid, f"unknown node kind {kind}"))
        return report

    # ── counting ──────────────────────────────────────────────────────────

    def _values(self, true_mask: int, false_mask: int) -> list[int]:
        """Bottom-up model counts per node, conditioned on the assumption masks."""
        assumed = true_mask | false_mask
        vals = [0] * len(self.kinds)
        for nid, kind in enumerate(self.kinds):
            if kind == K_TRUE:
                vals[nid] = 1
            elif kind == K_FALSE:
                vals[nid] = 0
            elif kind == K_LIT:
                lit = self.payloads[nid]
                bad = false_mask if lit > 0 else true_mask
                vals[nid] = 0 if bad & _bit(abs(lit)) else 1
            elif kind == K_AND:
                v = 1
                for c in self.children[nid]:
                    v *= vals[c]
                    if v == 0:
                        break
                vals[nid] = v
            else:
                var = self.payloads[nid]
                var_bit = _bit(var)
                hi, lo = self.children[nid]
                rest = self.supports[nid] & ~var_bit
                total = 0
                if not var_bit & false_mask:
                    gap = rest & ~self.supports[hi] & ~assumed
                    total += vals[hi] << gap.bit_count()
                if not var_bit & true_mask:
                    gap = rest & ~self.supports[lo] & ~assumed
                    total += vals[lo] << gap.bit_count()
                vals[nid] = total
        return vals

    def _assumption_masks(self, assumptions, over_mask: int) -> tuple[int, int]:
        true_mask = 0
        false_mask = 0
        for lit in check_assumptions(assumptions):
            var = abs(lit)
            if var > self.num_vars or not over_mask & _bit(var):
                raise StructuralError(f"assumption variable {var} outside counting scope")
            if lit > 0:
                true_mask |= _bit(var)
            else:
                false_mask |= _bit(var)
        return true_mask, false_mask

    def _over_mask(self, over) -> int:
        over_mask = _mask(over)
        if self.supports[self.root] & ~over_mask:
            missing = sorted(_vars_of(self.supports[self.root] & ~over_mask))
            raise StructuralError(f"counting scope misses support variables {missing}")
        return over_mask

    def count(self, over) -> int:
        """Exact number of models over the given variable set."""
        return self.conditioned_count((), over)

    def conditioned_count(self, assumptions, over) -> int:
        """Exact number of models that agree with the assumption literals."""
        over_mask = self._over_mask(over)
        true_mask, false_mask = self._assumption_masks(assumptions, over_mask)
        vals = self._values(true_mask, false_mask)
        free = over_mask & ~self.supports[self.root] & ~(true_mask | false_mask)
        return vals[self.root] << free.bit_count()

    # ── backbone ──────────────────────────────────────────────────────────

    def backbone(self, variables, assumptions=()) -> tuple[frozenset[int], frozenset[int]]:
        """Variables forced true (core) and forced false (dead) in all models.

        Determined by two conditioned counts per variable: v is dead when no
        model sets it, core when no model clears it.
        """
        over = range(1, self.num_vars + 1)
        if self.conditioned_count(assumptions, over) == 0:
            raise UnsatisfiableSpaceError("backbone is undefined without models")
        base = tuple(assumptions)

        def count_or_zero(literals) -> int:
            # An extension contradicting the base assumptions has no models.
            try:
                return self.conditioned_count(literals, over)
            except InconsistentAssumptionsError:
                return 0

        core = set()
        dead = set()
        for var in variables:
            if count_or_zero(base + (var,)) == 0:
                dead.add(var)
            elif count_or_zero(base + (-var,)) == 0:
                core.add(var)
        return frozenset(core), frozenset(dead)

    # ── sampling ──────────────────────────────────────────────────────────

    def sample(self, n: int, seed: int, over, assumptions=()) -> list[dict[int, bool]]:
        """Draw n independent, exactly uniform models (integer arithmetic only).

        Deterministic for a fixed seed.  Decision branches are chosen with
        probability proportional to their conditioned model weight; variables
        that no constraint touches are fair coin flips, or pinned when assumed.
        """
        over_mask = self._over_mask(over)
        true_mask, false_mask = self._assumption_masks(assumptions, over_mask)
        assumed = true_mask | false_mask
        vals = self._values(true_mask, false_mask)
        root_free = over_mask & ~self.supports[self.root] & ~assumed
        if vals[self.root] == 0:
            raise UnsatisfiableSpaceError("cannot sample from an empty model set")
        rng = random.Random(seed)

        def fill_free(mask: int, assignment: dict[int, bool]):
            for var in _vars_of(mask & ~assumed):
                assignment[var] = bool(rng.getrandbits(1))
            for var in _vars_of(mask & true_mask):
                assignment[var] = True
            for var in _vars_of(mask & false_mask):
                assignment[var] = False

        out = []
        for _ in range(n):
            assignment: dict[int, bool] = {}
            stack = [self.root]
            while stack:
                nid = stack.pop()
                kind = self.kinds[nid]
                if kind == K_LIT:
                    lit = self.payloads[nid]
                    assignment[abs(lit)] = lit > 0
                elif kind == K_AND:
                    stack.extend(reversed(self.children[nid]))
                elif kind == K_DECISION:
                    var = self.payloads[nid]
                    var_bit = _bit(var)
                    hi, lo = self.children[nid]
                    rest = self.supports[nid] & ~var_bit
                    gap_hi = rest & ~self.supports[hi]
                    gap_lo = rest & ~self.supports[lo]
                    w_hi = 0 if var_bit & false_mask else vals[hi] << (gap_hi & ~assumed).bit_count()
                    w_lo = 0 if var_bit & true_mask else vals[lo] << (gap_lo & ~assumed).bit_count()
                    take_hi = rng.randrange(w_hi + w_lo) < w_hi
                    assignment[var] = take_hi
                    fill_free(gap_hi if take_hi else gap_lo, assignment)
                    stack.append(hi if take_hi else lo)
            fill_free(root_free, assignment)
            out.append(assignment)
        return out

    # ── enumeration ───────────────────────────────────────────────────────

    def iter_models(self, over, assumptions=()):
        """Stream every model (agreeing with the assumptions) exactly once, in a
        deterministic order: false branches before true, free variables counted
        up from all-false."""
        over_mask = self._over_mask(over)
        true_mask, false_mask = self._assumption_masks(assumptions, over_mask)
        assumed = true_mask | false_mask

        def choices(mask: int) -> list[list[tuple[int, bool]]]:
            per_var = []
            for var in _vars_of(mask):
                var_bit = _bit(var)
                if var_bit & true_mask:
                    per_var.append([(var, True)])
                elif var_bit & false_mask:
                    per_var.append([(var, False)])
                else:
                    per_var.append([(var, False), (var, True)])
            return per_var

        def expand(mask: int, base: dict[int, bool]):
            for combo in _cartesian(*choices(mask)):
                model = dict(base)
                model.update(combo)
                yield model

        def gen(nid: int):
            kind = self.kinds[nid]
            if kind == K_TRUE:
                yield {}
            elif kind == K_FALSE:
                return
            elif kind == K_LIT:
                lit = self.payloads[nid]
                value = lit > 0
                bad = false_mask if value else true_mask
                if bad & _bit(abs(lit)):
                    return
                yield {abs(lit): value}
            elif kind == K_AND:
                kids = self.children[nid]

                def conj(idx: int):
                    if idx == len(kids):
                        yield {}
                        return
                    for head in gen(kids[idx]):
                        for rest in conj(idx + 1):
                            merged = dict(head)
                            merged.update(rest)
                            yield merged

                yield from conj(0)
            else:
                var = self.payloads[nid]
                var_bit = _bit(var)
                hi, lo = self.children[nid]
                rest = self.supports[nid] & ~var_bit
                for value, child in ((False, lo), (True, hi)):
                    if value and var_bit & false_mask:
                        continue
                    if not value and var_bit & true_mask:
                        continue
                    gap = rest & ~self.supports[child]
                    for frag in gen(child):
                        frag[var] = value
                        yield from expand(gap, frag)

        root_free = over_mask & ~self.supports[self.root]
        for frag in gen(self.root):
            yield from expand(root_free, frag)

    def enumerate(self, limit: int | None, over, assumptions=()) -> tuple[list[dict[int, bool]], bool]:
        """Materialize up to `limit` models; the flag reports truncation."""
        models = []
        for model in self.iter_models(over, assumptions):
            if limit is not None and len(models) >= limit:
                return models, True
            models.append(model)
        return models, False


# ── compilation ───────────────────────────────────────────────────────────────

class _Builder:
    """Node store with hash-consing and a node budget."""

    def __init__(self, node_budget: int):
        self.kinds = [K_TRUE, K_FALSE]
        self.payloads = [0, 0]
        self.children: list[tuple[int, ...]] = [(), ()]
        self.node_budget = node_budget
        self._unique: dict[tuple, int] = {}

    def _new(self, kind: int, payload: int, children: tuple[int, ...]) -> int:
        if len(self.kinds) >= self.node_budget:
            raise BudgetExceededError(
                f"compilation exceeded the node budget of {self.node_budget}"
            )
        self.kinds.append(kind)
        self.payloads.append(payload)
        self.children.append(children)
        return len(self.kinds) - 1

    def lit(self, literal: int) -> int:
        key = (K_LIT, literal)
        nid = self._unique.get(key)
        if nid is None:
            nid = self._new(K_LIT, literal, ())
            self._unique[key] = nid
        return nid

    def conj(self, parts: list[int]) -> int:
        parts = [p for p in parts if p != 0]
        if any(p == 1 for p in parts):
            return 1
        if not parts:
            return 0
        if len(parts) == 1:
            return parts[0]
        key = (K_AND, tuple(sorted(parts)))
        nid = self._unique.get(key)
        if nid is None:
            nid = self._new(K_AND, 0, key[1])
            self._unique[key] = nid
        return nid

    def decision(self, var: int, hi: int, lo: int) -> int:
        if hi == lo:
            # Both phases behave identically, so the variable is free here and
            # the counting-graph gap multipliers account for it.
            return hi
        if hi == 0 and lo == 1:
            return self.lit(var)
        if hi == 1 and lo == 0:
            return self.lit(-var)
        key = (K_DECISION, var, hi, lo)
        nid = self._unique.get(key)
        if nid is None:
            nid = self._new(K_DECISION, var, (hi, lo))
            self._unique[key] = nid
        return nid


def _condition(clauses: tuple, literal: int) -> tuple:
    """Residual clause set after fixing one literal; sorted and deduplicated."""
    out = set()
    for cl in clauses:
        if literal in cl:
            continue
        if -literal in cl:
            cl = tuple(l for l in cl if l != -literal)
        out.add(cl)
    return tuple(sorted(out))


def _components(clauses: tuple) -> list[tuple]:
    """Split clauses into variable-connected components, deterministically."""
    if len(clauses) <= 1:
        return [clauses]
    parent: dict[int, int] = {}

    def find(v: int) -> int:
        root = v
        while parent[root] != root:
            root = parent[root]
        while parent[v] != root:
            parent[v], v = root, parent[v]
        return root

    for cl in clauses:
        first = abs(cl[0])
        for lit in cl:
            parent.setdefault(abs(lit), abs(lit))
        parent.setdefault(first, first)
        anchor = find(first)
        for lit in cl:
            parent[find(abs(lit))] = anchor
    groups: dict[int, list] = {}
    for cl in clauses:
        groups.setdefault(find(abs(cl[0])), []).append(cl)
    return [tuple(g) for _, g in sorted(groups.items())]


def _pick_branch_var(clauses: tuple) -> int:
    """Most occurrences among shortest clauses; ties broken by lowest index."""
    shortest = min(len(cl) for cl in clauses)
    counts: dict[int, int] = {}
    for cl in clauses:
        if len(cl) == shortest:
            for lit in cl:
                var = abs(lit)
                counts[var] = counts.get(var, 0) + 1
    return max(counts.items(), key=lambda item: (item[1], -item[0]))[0]


def compile_cnf(
    f: Cnf,
    node_budget: int = DEFAULT_NODE_BUDGET,
    time_budget: float | None = DEFAULT_TIME_BUDGET,
    use_cache: bool = True,
) -> Ddnnf:
    """Compile a CNF into an equivalent d-DNNF.

    Exceeding either budget raises BudgetExceededError; the result is never an
    approximation.  Disabling the component cache only affects sharing, not the
    computed function.
    """
    deadline = time.monotonic() + time_budget if time_budget is not None else None
    builder = _Builder(node_budget)
    cache: dict[tuple, int] = {}
    calls = 0

    def rec(clauses: tuple) -> int:
        nonlocal calls
        calls += 1
        if deadline is not None and calls % 256 == 0 and time.monotonic() > deadline:
            raise BudgetExceededError("compilation exceeded its time budget")
        ok, assign, residual = _propagate(clauses)
        if not ok:
            return 1
        parts = [builder.lit(v if value else -v) for v, value in sorted(assign.items())]
        if residual:
            for component in _components(residual):
                nid = cache.get(component) if use_cache else None
                if nid is None:
                    var = _pick_branch_var(component)
                    hi = rec(_condition(component, var))
                    lo = rec(_condition(component, -var))
                    nid = builder.decision(var, hi, lo)
                    if use_cache:
                        cache[component] = nid
                parts.append(nid)
        return builder.conj(parts)

    limit = sys.getrecursionlimit()
    wanted = min(max(limit, 4 * f.num_vars + 10_000), 1_000_000)
    sys.setrecursionlimit(wanted)
    try:
        root = rec(tuple(f.clauses))
    finally:
        sys.setrecursionlimit(limit)
    return Ddnnf(f.num_vars, builder.kinds, builder.payloads, builder.children, root)


# ── NNF text format ───────────────────────────────────────────────────────────

def write_nnf(d: Ddnnf) -> str:
    """Serialize the subgraph reachable from the root.

    Line format: header "nnf <nodes> <edges> <vars>", then one node per line in
    child-before-parent order — "L <lit>", "A <k> <children>" (A 0 is the true
    leaf), "O <var> 2 <hi> <lo>" (O 0 0 is the false leaf).  The root is the
    last node.
    """
    order: list[int] = []
    index: dict[int, int] = {}
    stack: list[tuple[int, bool]] = [(d.root, False)]
    while stack:
        nid, expanded = stack.pop()
        if nid in index:
            continue
        if expanded:
            index[nid] = len(order)
            order.append(nid)
            continue
        stack.append((nid, True))
        for c in d.children[nid]:
            if c not in index:
                stack.append((c, False))
    lines = []
    edges = 0
    for nid in order:
        kind = d.kinds[nid]
        if kind == K_TRUE:
            lines.append("A 0")
        elif kind == K_FALSE:
            lines.append("O 0 0")
        elif kind == K_LIT:
            lines.append(f"L {d.payloads[nid]}")
        elif kind == K_AND:
            kids = [str(index[c]) for c in d.children[nid]]
            edges += len(kids)
            lines.append(f"A {len(kids)} " + " ".join(kids))
        else:
            hi, lo = d.children[nid]
            edges += 2
            lines.append(f"O {d.payloads[nid]} 2 {index[hi]} {index[lo]}")
    header = f"nnf {len(order)} {edges} {d.num_vars}"
    return "\n".join([header] + lines) + "\n"


def read_nnf(text: str) -> Ddnnf:
    """Parse the text format produced by write_nnf."""
    kinds: list[int] = []
    payloads: list[int] = []
    children: list[tuple[int, ...]] = []
    header: tuple[int, int, int] | None = None
    edges_seen = 0
    last_line = 0

    for line_number, raw in enumerate(text.splitlines(), start=1):
        last_line = line_number
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        fields = line.split()
        if header is None:
            if fields[0] != "nnf" or len(fields) != 4:
                raise NnfParseError(line_number, "expected header 'nnf <nodes> <edges> <vars>'")
            try:
                header = (int(fields[1]), int(fields[2]), int(fields[3]))
            except ValueError:
                raise NnfParseError(line_number, "non-integer header field") from None
            if any(x < 0 for x in header):
                raise NnfParseError(line_number, "negative header field")
            continue
        nid = len(kinds)
        try:
            args = [int(x) for x in fields[1:]]
        except ValueError:
            raise NnfParseError(line_number, "non-integer field") from None
        if fields[0] == "L":
            if len(args) != 1 or args[0] == 0:
                raise NnfParseError(line_number, "literal line must be 'L <lit>'")
            if abs(args[0]) > header[2]:
                raise NnfParseError(line_number, f"literal {args[0]} out of range")
            kinds.append(K_LIT)
            payloads.append(args[0])
            children.append(())
        elif fields[0] == "A":
            if not args or args[0] != len(args) - 1:
                raise NnfParseError(line_number, "conjunction child count mismatch")
            kids = tuple(args[1:])
            if any(not 0 <= c < nid for c in kids):
                raise NnfParseError(line_number, "dangling child id")
            if not kids:
                kinds.append(K_TRUE)
                payloads.append(0)
                children.append(())
            else:
                kinds.append(K_AND)
                payloads.append(0)
                children.append(kids)
                edges_seen += len(kids)
        elif fields[0] == "O":
            if args == [0, 0]:
                kinds.append(K_FALSE)
                payloads.append(0)
                children.append(())
            elif len(args) == 4 and args[1] == 2:
                var, _, hi, lo = args
                if not 1 <= var <= header[2]:
                    raise NnfParseError(line_number, f"decision variable {var} out of range")
                if not (0 <= hi < nid and 0 <= lo < nid):
                    raise NnfParseError(line_number, "dangling child id")
                kinds.append(K_DECISION)
                payloads.append(var)
                children.append((hi, lo))
                edges_seen += 2
            else:
                raise NnfParseError(line_number, "disjunction must be 'O 0 0' or 'O <var> 2 <hi> <lo>'")
        else:
            raise NnfParseError(line_number, f"unknown node type {fields[0]!r}")

    if header is None:
        raise NnfParseError(last_line or 1, "missing header")
    if len(kinds) != header[0]:
        raise NnfParseError(last_line, f"expected {header[0]} nodes, found {len(kinds)}")
    if edges_seen != header[1]:
        raise NnfParseError(last_line, f"expected {header[1]} edges, found {edges_seen}")
    if not kinds:
        raise NnfParseError(last_line, "empty graph")
    return Ddnnf(header[2], kinds, payloads, children, root=len(kinds) - 1)
