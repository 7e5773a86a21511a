"""Term interpretation: flatten solutions into assembly programs and BOMs."""

from __future__ import annotations

from dataclasses import dataclass

from .catalog import Catalog
from .repo import Repository
from .types import SynthError, Term


class BindingError(SynthError):
    """Repository and catalog drifted apart; a combinator has no usable binding."""


@dataclass(frozen=True)
class Insert:
    instance: str
    component: str

    def to_json(self) -> dict:
        return {"op": "insert", "instance": self.instance, "component": self.component}


@dataclass(frozen=True)
class Joint:
    parent: str
    parent_cp: str
    child: str
    child_cp: str
    kind: str

    def to_json(self) -> dict:
        return {
            "op": "joint",
            "parent": self.parent,
            "parent_cp": self.parent_cp,
            "child": self.child,
            "child_cp": self.child_cp,
            "kind": self.kind,
        }


@dataclass(frozen=True)
class AssemblyProgram:
    """Flattened instructions; joints form a tree over inserted instances."""

    instructions: tuple = ()

    @property
    def inserts(self) -> list[Insert]:
        return [i for i in self.instructions if isinstance(i, Insert)]

    @property
    def joints(self) -> list[Joint]:
        return [i for i in self.instructions if isinstance(i, Joint)]

    def to_json(self) -> dict:
        return {"instructions": [i.to_json() for i in self.instructions]}

    @staticmethod
    def from_json(doc: dict) -> "AssemblyProgram":
        out = []
        for entry in doc["instructions"]:
            if entry["op"] == "insert":
                out.append(Insert(entry["instance"], entry["component"]))
            else:
                out.append(
                    Joint(
                        entry["parent"],
                        entry["parent_cp"],
                        entry["child"],
                        entry["child_cp"],
                        entry["kind"],
                    )
                )
        return AssemblyProgram(tuple(out))


@dataclass(frozen=True)
class BOM:
    """Component quantities plus aggregated metadata totals (costs in cents)."""

    lines: tuple[tuple[str, int], ...]
    totals: tuple[tuple[str, int], ...]

    def line(self, component: str) -> int:
        return dict(self.lines).get(component, 0)

    def total(self, key: str) -> int:
        return dict(self.totals).get(key, 0)

    def to_json(self) -> dict:
        return {"lines": dict(self.lines), "totals": dict(self.totals)}


def interpret(term: Term, repo: Repository, catalog: Catalog) -> AssemblyProgram:
    """Flatten a solution term into insert/joint instructions.

    Depth-first pre-order: instance ids are "i0", "i1", ... in traversal
    order; the parent side of a joint is the requiring point, the child
    side the providing point, with the joint kind declared at the
    requiring point.
    """
    instructions: list = []
    counter = 0
    # explicit stack: a child's joint instruction pops only after the
    # child's whole subtree has been emitted, so arbitrarily deep terms work
    work: list[tuple] = [("visit", term, None)]
    while work:
        item = work.pop()
        if item[0] == "joint":
            _, parent_instance, required_cp, child_cp, kind, child_ref = item
            instructions.append(
                Joint(parent_instance, required_cp, child_ref[0], child_cp, kind)
            )
            continue
        _, node, ref = item
        binding = repo.bindings.get(node.combinator)
        if binding is None:
            raise BindingError(f"no binding for combinator {node.combinator!r}")
        try:
            component = catalog.component(binding.component)
        except KeyError:
            raise BindingError(f"component {binding.component!r} missing from catalog")
        if len(node.args) != len(binding.arg_points):
            raise BindingError(f"binding arity drift for {node.combinator!r}")
        instance = f"i{counter}"
        counter += 1
        if ref is not None:
            ref[0] = instance
        instructions.append(Insert(instance, component.id))
        pending: list[tuple] = []
        for child, required_cp in zip(node.args, binding.arg_points):
            child_binding = repo.bindings.get(child.combinator)
            if child_binding is None:
                raise BindingError(f"no binding for combinator {child.combinator!r}")
            kind = component.point(required_cp).joint
            child_ref: list = [None]
            pending.append(("visit", child, child_ref))
            pending.append(
                ("joint", instance, required_cp, child_binding.provided_point, kind, child_ref)
            )
        work.extend(reversed(pending))
    return AssemblyProgram(tuple(instructions))


def bom(program: AssemblyProgram, catalog: Catalog) -> BOM:
    """Quantities per component and metadata sums over all instances."""
    quantities: dict[str, int] = {}
    totals: dict[str, int] = {}
    for insert in program.inserts:
        try:
            component = catalog.component(insert.component)
        except KeyError:
            raise BindingError(f"unknown component {insert.component!r}")
        quantities[component.id] = quantities.get(component.id, 0) + 1
        for key, value in component.metadata:
            totals[key] = totals.get(key, 0) + value
    return BOM(
        tuple(sorted(quantities.items())),
        tuple(sorted(totals.items())),
    )
