"""Persistent catalog format: modular components with typed connection points.

A catalog on disk is a directory of JSON documents: components (one file
per part) plus any number of taxonomy documents, distinguished by shape.
Loading merges the taxonomies; saving is byte-stable so catalogs diff
cleanly.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

from . import taxonomy as tax
from .types import AtomSet, SynthError, is_subtype

JOINT_KINDS = ("rigid", "revolute")

IDENTITY_ROTATION = ((1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0))

# z axis inverted: the conventional orientation for required mate frames
FLIPPED_ROTATION = ((1.0, 0.0, 0.0), (0.0, -1.0, 0.0), (0.0, 0.0, -1.0))

ROTATION_TOLERANCE = 1e-9


class SchemaError(SynthError):
    """A document failed validation; ``pointer`` locates the offending field."""

    def __init__(self, message: str, pointer: str):
        super().__init__(f"{message} (at {pointer})")
        self.pointer = pointer


@dataclass(frozen=True)
class Frame:
    """A coordinate frame: origin in millimeters, orthonormal rotation columns."""

    origin: tuple[float, float, float]
    rotation: tuple[tuple[float, float, float], ...] = IDENTITY_ROTATION

    def to_json(self) -> dict:
        return {"origin": list(self.origin), "rotation": [list(r) for r in self.rotation]}

    @staticmethod
    def from_json(doc: dict) -> "Frame":
        origin = tuple(float(v) for v in doc["origin"])
        rotation = tuple(tuple(float(v) for v in row) for row in doc["rotation"])
        return Frame(origin, rotation)


def rotation_defect(rotation) -> float:
    """Max-entry deviation of R^T R from the identity, plus determinant error."""
    r = rotation
    worst = 0.0
    for i in range(3):
        for j in range(3):
            dot = sum(r[k][i] * r[k][j] for k in range(3))
            want = 1.0 if i == j else 0.0
            worst = max(worst, abs(dot - want))
    det = (
        r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1])
        - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
        + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0])
    )
    return max(worst, abs(det - 1.0))


@dataclass(frozen=True)
class ConnectionPoint:
    """An annotated frame where a joint may form.

    Revolute joints rotate about the frame's local z axis.  At least one
    of ``required``/``provided`` must be present.
    """

    id: str
    frame: Frame
    joint: str = "rigid"
    required: AtomSet | None = None
    provided: AtomSet | None = None

    def to_json(self) -> dict:
        doc: dict = {"id": self.id, "joint": self.joint, "frame": self.frame.to_json()}
        if self.required is not None:
            doc["required"] = self.required.to_json()
        if self.provided is not None:
            doc["provided"] = self.provided.to_json()
        return doc

    @staticmethod
    def from_json(doc: dict, pointer: str) -> "ConnectionPoint":
        required = AtomSet.from_json(doc["required"]) if "required" in doc else None
        provided = AtomSet.from_json(doc["provided"]) if "provided" in doc else None
        joint = doc.get("joint", "rigid")
        if joint not in JOINT_KINDS:
            raise SchemaError(f"unknown joint kind {joint!r}", pointer + "/joint")
        return ConnectionPoint(doc["id"], Frame.from_json(doc["frame"]), joint, required, provided)


@dataclass(frozen=True)
class ComponentSpec:
    """One modular part: inherent attributes, connection points, metadata."""

    id: str
    inherent: AtomSet = AtomSet.empty()
    connection_points: tuple[ConnectionPoint, ...] = ()
    metadata: tuple[tuple[str, int], ...] = ()
    geometry_ref: str | None = None

    def metadata_value(self, key: str) -> int:
        # missing counters default to 0 so aggregates apply catalog-wide
        return dict(self.metadata).get(key, 0)

    def point(self, cp_id: str) -> ConnectionPoint:
        for cp in self.connection_points:
            if cp.id == cp_id:
                return cp
        raise KeyError(cp_id)

    def to_json(self) -> dict:
        doc: dict = {
            "id": self.id,
            "inherent": self.inherent.to_json(),
            "metadata": {k: v for k, v in sorted(self.metadata)},
        }
        if self.geometry_ref is not None:
            doc["geometry_ref"] = self.geometry_ref
        doc["connection_points"] = [cp.to_json() for cp in self.connection_points]
        return doc

    @staticmethod
    def from_json(doc: dict, pointer: str = "") -> "ComponentSpec":
        points = []
        for i, cp_doc in enumerate(doc.get("connection_points", [])):
            points.append(ConnectionPoint.from_json(cp_doc, f"{pointer}/connection_points/{i}"))
        metadata = tuple(sorted((k, int(v)) for k, v in doc.get("metadata", {}).items()))
        return ComponentSpec(
            id=doc["id"],
            inherent=AtomSet.from_json(doc.get("inherent", [])),
            connection_points=tuple(points),
            metadata=metadata,
            geometry_ref=doc.get("geometry_ref"),
        )


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    component: str
    message: str

    def __str__(self) -> str:
        return f"{self.severity}: [{self.component}] {self.message}"


@dataclass(frozen=True)
class Catalog:
    """An immutable set of component specs plus their merged taxonomy."""

    components: tuple[ComponentSpec, ...] = ()
    taxonomies: tuple[tax.Taxonomy, ...] = ()
    base_dir: str | None = field(default=None, compare=False)

    @property
    def taxonomy(self) -> tax.Taxonomy:
        return tax.merge(list(self.taxonomies))

    def component(self, component_id: str) -> ComponentSpec:
        for spec in self.components:
            if spec.id == component_id:
                return spec
        raise KeyError(component_id)

    def resolve_geometry(self, spec: ComponentSpec) -> Path | None:
        if spec.geometry_ref is None or self.base_dir is None:
            return None
        return Path(self.base_dir) / spec.geometry_ref


def validate_component(catalog: Catalog, spec: ComponentSpec) -> list[Diagnostic]:
    """Check one component against the catalog's merged taxonomy.

    Returns diagnostics instead of raising; an empty list means all
    invariants hold.  Over-specified provided types (strictly more atoms
    than an equivalent provided type elsewhere, same joint kind) yield a
    warning.
    """
    out: list[Diagnostic] = []
    merged = catalog.taxonomy

    def check_atoms(atoms: AtomSet, where: str):
        for atom in atoms:
            if not atom.is_property and atom.name not in merged.nodes:
                out.append(Diagnostic("error", spec.id, f"unknown atom {atom.name!r} in {where}"))

    check_atoms(spec.inherent, "inherent attributes")
    seen_ids: set[str] = set()
    for cp in spec.connection_points:
        if cp.id in seen_ids:
            out.append(Diagnostic("error", spec.id, f"duplicate connection point id {cp.id!r}"))
        seen_ids.add(cp.id)
        if cp.required is None and cp.provided is None:
            out.append(Diagnostic("error", spec.id, f"untyped connection point {cp.id!r}"))
        if cp.joint not in JOINT_KINDS:
            out.append(Diagnostic("error", spec.id, f"unknown joint kind {cp.joint!r} on {cp.id!r}"))
        defect = rotation_defect(cp.frame.rotation)
        if defect > ROTATION_TOLERANCE:
            out.append(
                Diagnostic(
                    "error",
                    spec.id,
                    f"frame of {cp.id!r} is not a proper rotation (defect {defect:.3g})",
                )
            )
        if cp.required is not None:
            check_atoms(cp.required, f"required type of {cp.id!r}")
        if cp.provided is not None:
            check_atoms(cp.provided, f"provided type of {cp.id!r}")

    if any(d.severity == "error" for d in out):
        return out

    # over-specification hint: a strictly larger spelling of a provided type
    # that another component already offers with no distinguishing atom
    for cp in spec.connection_points:
        if cp.provided is None:
            continue
        for other in catalog.components:
            if other.id == spec.id:
                continue
            for ocp in other.connection_points:
                if ocp.provided is None or ocp.joint != cp.joint:
                    continue
                if (
                    ocp.provided.atoms < cp.provided.atoms
                    and is_subtype(merged, ocp.provided, cp.provided)
                ):
                    out.append(
                        Diagnostic(
                            "warning",
                            spec.id,
                            f"provided type of {cp.id!r} is a superset of "
                            f"{other.id}.{ocp.id} with no distinguishing atom; "
                            "consider the more general spelling",
                        )
                    )
    return out


def validate_catalog(catalog: Catalog) -> list[Diagnostic]:
    out: list[Diagnostic] = []
    seen: set[str] = set()
    for spec in catalog.components:
        if spec.id in seen:
            out.append(Diagnostic("error", spec.id, "duplicate component id"))
        seen.add(spec.id)
        out.extend(validate_component(catalog, spec))
    return out


def validate_component_doc(doc: dict, pointer: str):
    if not isinstance(doc, dict):
        raise SchemaError("component document must be an object", pointer)
    if not isinstance(doc.get("id"), str) or not doc["id"]:
        raise SchemaError("component id must be a non-empty string", pointer + "/id")
    for key, value in doc.get("metadata", {}).items():
        if not isinstance(value, int) or isinstance(value, bool):
            raise SchemaError("metadata values must be integers", f"{pointer}/metadata/{key}")
    for i, cp in enumerate(doc.get("connection_points", [])):
        cp_ptr = f"{pointer}/connection_points/{i}"
        if "id" not in cp:
            raise SchemaError("connection point missing id", cp_ptr)
        frame = cp.get("frame")
        if not isinstance(frame, dict) or "origin" not in frame or "rotation" not in frame:
            raise SchemaError("connection point missing frame", cp_ptr + "/frame")
        if len(frame["origin"]) != 3:
            raise SchemaError("origin must be a 3-vector", cp_ptr + "/frame")
        rotation = frame["rotation"]
        if len(rotation) != 3 or any(len(row) != 3 for row in rotation):
            raise SchemaError("rotation must be a 3x3 matrix", cp_ptr + "/frame")
        try:
            rows = tuple(tuple(float(v) for v in row) for row in rotation)
        except (TypeError, ValueError):
            raise SchemaError("rotation entries must be numbers", cp_ptr + "/frame")
        if any(not math.isfinite(v) for row in rows for v in row):
            raise SchemaError("rotation entries must be finite", cp_ptr + "/frame")
        if rotation_defect(rows) > ROTATION_TOLERANCE:
            raise SchemaError("rotation is not orthonormal with determinant +1", cp_ptr + "/frame")


def load_catalog(paths) -> Catalog:
    """Load component and taxonomy documents from files or directories.

    A document with ``nodes``/``edges`` is a taxonomy; one with an ``id``
    is a component.  Files are processed in sorted order so validation is
    order-independent.
    """
    if isinstance(paths, (str, Path)):
        paths = [paths]
    files: list[Path] = []
    base_dir: str | None = None
    for p in paths:
        p = Path(p)
        if p.is_dir():
            base_dir = base_dir or str(p)
            files.extend(sorted(q for q in p.iterdir() if q.suffix == ".json"))
        else:
            base_dir = base_dir or str(p.parent)
            files.append(p)
    components: list[ComponentSpec] = []
    taxonomies: list[tax.Taxonomy] = []
    for f in sorted(files):
        try:
            doc = json.loads(f.read_text())
        except json.JSONDecodeError as e:
            raise SchemaError(f"invalid JSON in {f.name}: {e}", "")
        if isinstance(doc, dict) and "nodes" in doc and "edges" in doc:
            taxonomies.append(tax.Taxonomy.from_json(doc))
        else:
            validate_component_doc(doc, "")
            components.append(ComponentSpec.from_json(doc))
    components.sort(key=lambda c: c.id)
    taxonomies.sort(key=lambda t: t.name)
    return Catalog(tuple(components), tuple(taxonomies), base_dir)


def save_catalog(catalog: Catalog, path) -> None:
    """Write one JSON file per component plus taxonomy files; byte-stable."""
    from .jsonio import canonical_dumps

    root = Path(path)
    os.makedirs(root, exist_ok=True)
    for t in catalog.taxonomies:
        name = t.name or "taxonomy"
        (root / f"{name}.taxonomy.json").write_text(canonical_dumps(t.to_json()))
    for spec in catalog.components:
        (root / f"{spec.id}.json").write_text(canonical_dumps(spec.to_json()))
