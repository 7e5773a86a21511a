"""Combinator repository construction.

For every provided connection point of a component one static combinator
is generated: its arguments are the required types of all other annotated
connection points and its result is the provided type intersected with
the component's inherent attributes.  A request with aggregates expands
these static entries into property-annotated dynamic entries that sum a
discrete metric across a composition.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

from .catalog import Catalog, ComponentSpec
from .types import Atom, AtomSet, CombinatorType, SynthError, Term

DEFAULT_EXPANSION_CAP = 10**6


class ExpansionTooLargeError(SynthError):
    def __init__(self, count: int, cap: int):
        super().__init__(f"dynamic expansion would create {count} entries, exceeding the cap {cap}")
        self.count = count
        self.cap = cap


class RequestError(SynthError):
    pass


@dataclass(frozen=True)
class Binding:
    """Maps a combinator back to catalog entities.

    ``arg_points`` lists the required connection-point ids in argument
    order; ``static_id`` names the entry a dynamic combinator was expanded
    from (itself for static entries).
    """

    component: str
    provided_point: str
    arg_points: tuple[str, ...]
    static_id: str


@dataclass(frozen=True)
class Repository:
    entries: dict[str, CombinatorType] = field(default_factory=dict)
    bindings: dict[str, Binding] = field(default_factory=dict)

    def sorted_ids(self) -> list[str]:
        return sorted(self.entries)

    def dump(self) -> str:
        """One combinator per line in the textual type grammar, for debugging."""
        lines = [f"{cid}: {self.entries[cid]}" for cid in self.sorted_ids()]
        return "\n".join(lines)


@dataclass(frozen=True)
class Aggregate:
    key: str
    op: str  # "eq" | "le"
    target: int

    def __post_init__(self):
        if self.op not in ("eq", "le"):
            raise RequestError(f"unknown aggregate comparator {self.op!r}")
        if self.target < 0:
            raise RequestError("aggregate targets must be non-negative")


@dataclass(frozen=True)
class Filter:
    """Post-hoc constraint on BOM totals, applied after enumeration."""

    key: str
    op: str  # "eq" | "le" | "ge"
    target: int

    def accepts(self, totals: dict[str, int]) -> bool:
        value = totals.get(self.key, 0)
        if self.op == "eq":
            return value == self.target
        if self.op == "le":
            return value <= self.target
        return value >= self.target


@dataclass(frozen=True)
class Request:
    goal: AtomSet
    aggregates: tuple[Aggregate, ...] = ()
    max_size: int = 10
    max_results: int = 100
    filters: tuple[Filter, ...] = ()

    def __post_init__(self):
        if self.max_size < 1:
            raise RequestError("max_size must be at least 1")
        if self.max_results < 1:
            raise RequestError("max_results must be at least 1")

    def to_json(self) -> dict:
        doc: dict = {
            "goal": self.goal.to_json(),
            "aggregates": [
                {"key": a.key, "op": a.op, "target": a.target} for a in self.aggregates
            ],
            "max_size": self.max_size,
            "max_results": self.max_results,
        }
        if self.filters:
            doc["filters"] = [
                {"key": f.key, "op": f.op, "target": f.target} for f in self.filters
            ]
        return doc

    @staticmethod
    def from_json(doc: dict) -> "Request":
        aggregates = tuple(
            Aggregate(a["key"], a["op"], int(a["target"])) for a in doc.get("aggregates", [])
        )
        filters = tuple(
            Filter(f["key"], f["op"], int(f["target"])) for f in doc.get("filters", [])
        )
        return Request(
            goal=AtomSet.from_json(doc.get("goal", [])),
            aggregates=aggregates,
            max_size=int(doc.get("max_size", 10)),
            max_results=int(doc.get("max_results", 100)),
            filters=filters,
        )


def static_types(component: ComponentSpec) -> list[tuple[str, CombinatorType, Binding]]:
    """Generate one combinator per provided connection point.

    Argument order follows catalog order of the other required points; a
    point typed both required and provided never feeds its own entry.
    """
    out = []
    for cp in component.connection_points:
        if cp.provided is None:
            continue
        arg_points = [
            other for other in component.connection_points
            if other.id != cp.id and other.required is not None
        ]
        args = tuple(p.required for p in arg_points)
        result = cp.provided.union(component.inherent)
        cid = f"{component.id}.{cp.id}"
        binding = Binding(component.id, cp.id, tuple(p.id for p in arg_points), cid)
        out.append((cid, CombinatorType(args, result), binding))
    return out


def build_static_repository(catalog: Catalog) -> Repository:
    entries: dict[str, CombinatorType] = {}
    bindings: dict[str, Binding] = {}
    for component in catalog.components:
        for cid, ctype, binding in static_types(component):
            entries[cid] = ctype
            bindings[cid] = binding
    return Repository(entries, bindings)


def _assignments(arity: int, target: int, local: int):
    """Argument value vectors over {0..target} whose sum plus local stays within target.

    Yielded in ascending lexicographic order; only valid vectors are
    generated, so large targets stay cheap.
    """
    budget = target - local
    if budget < 0:
        return
    values = [0] * arity
    if arity == 0:
        yield ()
        return

    def rec(i: int, remaining: int):
        if i == arity - 1:
            for v in range(remaining + 1):
                values[i] = v
                yield tuple(values)
            return
        for v in range(remaining + 1):
            values[i] = v
            yield from rec(i + 1, remaining - v)

    yield from rec(0, budget)


def _assignment_count(arity: int, target: int, local: int) -> int:
    budget = target - local
    if budget < 0:
        return 0
    return math.comb(budget + arity, arity)


def dynamic_expand(
    static_repo: Repository,
    request: Request,
    catalog: Catalog,
    cap: int = DEFAULT_EXPANSION_CAP,
) -> Repository:
    """Expand static entries with property atoms, one per aggregate key.

    Each argument gains a marker ``@key=v`` and the result gains
    ``@key=sum(v)+local`` where local is the component's own metadata
    value; one entry is created per element of the cartesian product of
    value assignments across aggregates.
    """
    if not request.aggregates:
        return static_repo

    # exact entry count up front so oversized requests fail fast
    total = 0
    for cid in static_repo.sorted_ids():
        ctype = static_repo.entries[cid]
        component = catalog.component(static_repo.bindings[cid].component)
        per_entry = 1
        for agg in request.aggregates:
            per_entry *= _assignment_count(ctype.arity, agg.target, component.metadata_value(agg.key))
        total += per_entry
    if total > cap:
        raise ExpansionTooLargeError(total, cap)

    entries: dict[str, CombinatorType] = {}
    bindings: dict[str, Binding] = {}
    for cid in static_repo.sorted_ids():
        ctype = static_repo.entries[cid]
        binding = static_repo.bindings[cid]
        component = catalog.component(binding.component)
        per_aggregate = []
        for agg in request.aggregates:
            local = component.metadata_value(agg.key)
            options = [
                (values, sum(values) + local)
                for values in _assignments(ctype.arity, agg.target, local)
            ]
            per_aggregate.append((agg.key, options))
        for combo in itertools.product(*(opts for _, opts in per_aggregate)):
            args = list(ctype.args)
            result = ctype.result
            suffix_parts = []
            for (key, _), (values, agg_sum) in zip(per_aggregate, combo):
                args = [a.add(Atom("", (key, v))) for a, v in zip(args, values)]
                result = result.add(Atom("", (key, agg_sum)))
                suffix_parts.append(f"{key}={','.join(map(str, values + (agg_sum,)))}")
            dyn_id = f"{cid}@{';'.join(suffix_parts)}"
            entries[dyn_id] = CombinatorType(tuple(args), result)
            bindings[dyn_id] = Binding(
                binding.component, binding.provided_point, binding.arg_points, cid
            )
    return Repository(entries, bindings)


def translate_request(request: Request) -> list[AtomSet]:
    """Build the solver start symbols for a request.

    ``eq`` aggregates conjoin one exact marker into every target; ``le``
    aggregates fan out into a disjunctive family of alternative targets,
    one per admissible value.
    """
    base = request.goal
    for agg in request.aggregates:
        if agg.op == "eq":
            base = base.add(Atom("", (agg.key, agg.target)))
    targets = [base]
    for agg in request.aggregates:
        if agg.op == "le":
            targets = [
                t.add(Atom("", (agg.key, v)))
                for t in targets
                for v in range(agg.target + 1)
            ]
    return targets


def erase_term(repo: Repository, term: Term) -> Term:
    """Replace dynamic combinators by the static entries they expand."""
    stack: list[tuple[Term, bool]] = [(term, False)]
    done: list[Term] = []
    while stack:
        node, expanded = stack.pop()
        if not expanded:
            stack.append((node, True))
            stack.extend((a, False) for a in node.args)
        else:
            args = tuple(done.pop() for _ in node.args)
            binding = repo.bindings.get(node.combinator)
            name = binding.static_id if binding is not None else node.combinator
            done.append(Term(name, args))
    return done.pop()
