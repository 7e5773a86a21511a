"""Named taxonomies: partial orders of atoms with merge and closure queries."""

from __future__ import annotations

from dataclasses import dataclass, field

from .types import SynthError, UnknownAtomError


class CycleError(SynthError):
    def __init__(self, cycle: list[str]):
        super().__init__("taxonomy contains a cycle: " + " <= ".join(cycle))
        self.cycle = cycle


class TaxonomyError(SynthError):
    pass


@dataclass(frozen=True)
class Taxonomy:
    """A DAG of atom names; an edge (child, parent) means child <= parent.

    Values are immutable once constructed; supertype closures are memoized
    on the instance, which makes subtype queries cheap in the solver's
    inner loop.
    """

    name: str
    nodes: frozenset[str]
    edges: frozenset[tuple[str, str]]
    _closures: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        for child, parent in self.edges:
            for endpoint in (child, parent):
                if endpoint not in self.nodes:
                    raise TaxonomyError(
                        f"edge ({child!r}, {parent!r}) references undeclared node {endpoint!r}"
                    )
        cycle = _find_cycle(self.nodes, self.edges)
        if cycle is not None:
            raise CycleError(cycle)

    @staticmethod
    def create(name: str = "", nodes: list[str] | set[str] = (), edges=()) -> "Taxonomy":
        return Taxonomy(name, frozenset(nodes), frozenset(tuple(e) for e in edges))

    def supertype_closure(self, atom: str) -> frozenset[str]:
        """Reflexive-transitive upward closure of ``atom``."""
        if atom not in self.nodes:
            raise UnknownAtomError(atom)
        cached = self._closures.get(atom)
        if cached is not None:
            return cached
        parents: dict[str, list[str]] = {}
        for child, parent in self.edges:
            parents.setdefault(child, []).append(parent)
        closure = {atom}
        stack = [atom]
        while stack:
            for parent in parents.get(stack.pop(), ()):
                if parent not in closure:
                    closure.add(parent)
                    stack.append(parent)
        result = frozenset(closure)
        self._closures[atom] = result
        return result

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "nodes": sorted(self.nodes),
            "edges": [list(e) for e in sorted(self.edges)],
        }

    @staticmethod
    def from_json(doc: dict) -> "Taxonomy":
        return Taxonomy.create(doc.get("name", ""), doc.get("nodes", []), doc.get("edges", []))


def merge(parts: list[Taxonomy], name: str = "merged") -> Taxonomy:
    """Union the node and edge sets of ``parts``; rejects resulting cycles.

    Idempotent: merging the merge with any of its parts is a fixed point.
    """
    nodes: set[str] = set()
    edges: set[tuple[str, str]] = set()
    for part in parts:
        nodes |= part.nodes
        edges |= part.edges
    return Taxonomy(name, frozenset(nodes), frozenset(edges))


def _find_cycle(nodes: frozenset[str], edges: frozenset[tuple[str, str]]):
    """Return one cycle as a node list, or None if the edge relation is acyclic."""
    succ: dict[str, list[str]] = {}
    for child, parent in edges:
        succ.setdefault(child, []).append(parent)
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {n: WHITE for n in nodes}
    for root in sorted(nodes):
        if color[root] != WHITE:
            continue
        stack: list[tuple[str, int]] = [(root, 0)]
        trail = [root]
        color[root] = GRAY
        while stack:
            node, idx = stack[-1]
            targets = succ.get(node, ())
            if idx >= len(targets):
                stack.pop()
                trail.pop()
                color[node] = BLACK
                continue
            stack[-1] = (node, idx + 1)
            nxt = targets[idx]
            if color[nxt] == GRAY:
                at = trail.index(nxt)
                return trail[at:] + [nxt]
            if color[nxt] == WHITE:
                color[nxt] = GRAY
                stack.append((nxt, 0))
                trail.append(nxt)
    return None
