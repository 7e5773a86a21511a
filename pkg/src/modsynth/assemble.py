"""Executes assembly programs into posed scene graphs and export files.

World poses are rigid transforms in millimeters.  Mating two connection
frames uses one global convention: origins coincide and the two frames'
z axes oppose (a rotation of pi about the parent frame's local x axis,
``FLIP``).  Kinematic links are the connected components of the joint
graph restricted to rigid joints; revolute joints separate links and are
posed at angle zero.
"""

from __future__ import annotations

import json
import logging
import struct
from dataclasses import dataclass

import numpy as np

from .catalog import Catalog, Frame
from .interpret import AssemblyProgram
from .jsonio import canonical_bytes, compact_dumps
from .types import SynthError

log = logging.getLogger(__name__)

FLIP = np.array([[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]])

DEGENERACY_LIMIT = 1e-6

GLB_MAGIC = 0x46546C67
GLB_JSON = 0x4E4F534A
GLB_BIN = 0x004E4942


class ProgramError(SynthError):
    pass


class NumericalDegeneracyError(SynthError):
    def __init__(self, instance: str, defect: float):
        super().__init__(
            f"rotation of instance {instance!r} drifted from orthonormal (defect {defect:.3g})"
        )
        self.instance = instance
        self.defect = defect


@dataclass(frozen=True)
class Pose:
    """A rigid transform: orthonormal rotation plus translation."""

    rotation: np.ndarray
    translation: np.ndarray

    @staticmethod
    def identity() -> "Pose":
        return Pose(np.eye(3), np.zeros(3))

    @staticmethod
    def from_frame(frame: Frame) -> "Pose":
        return Pose(np.array(frame.rotation, dtype=float), np.array(frame.origin, dtype=float))

    def compose(self, other: "Pose") -> "Pose":
        return Pose(
            self.rotation @ other.rotation,
            self.rotation @ other.translation + self.translation,
        )

    def inverse(self) -> "Pose":
        rt = self.rotation.T
        return Pose(rt, -rt @ self.translation)

    def orthonormal_defect(self) -> float:
        gram = self.rotation.T @ self.rotation - np.eye(3)
        return max(float(np.abs(gram).max()), abs(float(np.linalg.det(self.rotation)) - 1.0))

    def reorthonormalized(self) -> "Pose":
        u, _, vt = np.linalg.svd(self.rotation)
        return Pose(u @ vt, self.translation)

    def to_json(self) -> dict:
        return {
            "rotation": [[_clean(v) for v in row] for row in self.rotation.tolist()],
            "translation": [_clean(v) for v in self.translation.tolist()],
        }


def _clean(value: float) -> float:
    # normalize -0.0 so serialized scenes are byte-stable
    return 0.0 if value == 0.0 else value


@dataclass(frozen=True)
class SceneJoint:
    parent: str
    child: str
    kind: str
    axis: tuple[float, float, float] | None  # world z of the parent frame, revolute only

    def to_json(self) -> dict:
        doc: dict = {"parent": self.parent, "child": self.child, "kind": self.kind}
        if self.axis is not None:
            doc["axis"] = [_clean(v) for v in self.axis]
        return doc


@dataclass(frozen=True)
class SceneGraph:
    """Posed instances partitioned into kinematic links, with repeat groups."""

    instances: tuple[tuple[str, str, Pose], ...]  # (instance id, component id, world pose)
    links: tuple[tuple[str, ...], ...]
    groups: tuple[tuple[str, tuple[str, ...]], ...]  # component id -> grouped instances
    joints: tuple[SceneJoint, ...]

    def world_pose(self, instance: str) -> Pose:
        for iid, _, pose in self.instances:
            if iid == instance:
                return pose
        raise KeyError(instance)

    def to_json(self) -> dict:
        return {
            "instances": [
                {"id": iid, "component": cid, "pose": pose.to_json()}
                for iid, cid, pose in self.instances
            ],
            "links": [list(link) for link in self.links],
            "groups": {cid: list(ids) for cid, ids in self.groups},
            "joints": [j.to_json() for j in self.joints],
        }


def assemble(program: AssemblyProgram, catalog: Catalog) -> SceneGraph:
    """Pose every instance of the program; the first insert is the root at identity."""
    inserts = program.inserts
    joints = program.joints
    order = {ins.instance: n for n, ins in enumerate(inserts)}
    component_of = {ins.instance: ins.component for ins in inserts}
    if len(order) != len(inserts):
        raise ProgramError("duplicate instance insertion")
    for j in joints:
        if j.parent not in order or j.child not in order:
            raise ProgramError(f"joint references uninserted instance {j.parent!r}/{j.child!r}")

    children: dict[str, list] = {iid: [] for iid in order}
    for j in joints:
        children[j.parent].append(j)

    poses: dict[str, Pose] = {}
    axes: dict[tuple[str, str], tuple[float, float, float]] = {}
    if inserts:
        root = inserts[0].instance
        poses[root] = Pose.identity()
        stack = [root]
        while stack:
            parent = stack.pop()
            parent_pose = poses[parent]
            parent_spec = catalog.component(component_of[parent])
            for j in sorted(children[parent], key=lambda j: order[j.child]):
                child_spec = catalog.component(component_of[j.child])
                parent_frame = Pose.from_frame(parent_spec.point(j.parent_cp).frame)
                child_frame = Pose.from_frame(child_spec.point(j.child_cp).frame)
                mate = parent_pose.compose(parent_frame).compose(Pose(FLIP, np.zeros(3)))
                pose = mate.compose(child_frame.inverse())
                defect = pose.orthonormal_defect()
                if defect > DEGENERACY_LIMIT:
                    raise NumericalDegeneracyError(j.child, defect)
                poses[j.child] = pose.reorthonormalized()
                if j.kind == "revolute":
                    world_frame_rot = parent_pose.rotation @ parent_frame.rotation
                    axes[(j.parent, j.child)] = tuple(
                        float(v) for v in world_frame_rot[:, 2]
                    )
                stack.append(j.child)
    missing = [iid for iid in order if iid not in poses]
    if missing:
        raise ProgramError(f"instances not connected to the root: {missing}")

    links = _link_partition(list(order), joints)
    counts: dict[str, list[str]] = {}
    for ins in inserts:
        counts.setdefault(ins.component, []).append(ins.instance)
    groups = tuple(
        (cid, tuple(ids)) for cid, ids in sorted(counts.items()) if len(ids) > 1
    )
    scene_joints = tuple(
        SceneJoint(j.parent, j.child, j.kind, axes.get((j.parent, j.child)))
        for j in joints
    )
    instances = tuple(
        (ins.instance, ins.component, poses[ins.instance]) for ins in inserts
    )
    return SceneGraph(instances, links, groups, scene_joints)


def _link_partition(instance_ids: list[str], joints) -> tuple[tuple[str, ...], ...]:
    """Connected components over rigid joints; revolute joints separate links."""
    parent: dict[str, str] = {iid: iid for iid in instance_ids}

    def find(x: str) -> str:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for j in joints:
        if j.kind == "rigid":
            a, b = find(j.parent), find(j.child)
            if a != b:
                parent[b] = a

    order = {iid: n for n, iid in enumerate(instance_ids)}
    members: dict[str, list[str]] = {}
    for iid in instance_ids:
        members.setdefault(find(iid), []).append(iid)
    links = [tuple(sorted(ids, key=order.__getitem__)) for ids in members.values()]
    links.sort(key=lambda link: order[link[0]])
    return tuple(links)


def export(scene: SceneGraph, format: str, catalog: Catalog | None = None) -> bytes:
    """Serialize a scene: canonical lossless JSON or binary glTF preview."""
    if format == "scene-json":
        return canonical_bytes(scene.to_json())
    if format == "gltf":
        return _export_glb(scene, catalog)
    raise ValueError(f"unknown export format {format!r}")


def _load_mesh(path) -> tuple[np.ndarray, np.ndarray] | None:
    """Preview meshes are JSON {positions: [[x,y,z]..], indices: [[a,b,c]..]}."""
    try:
        doc = json.loads(path.read_text())
        positions = np.array(doc["positions"], dtype="<f4")
        indices = np.array(doc["indices"], dtype="<u4").reshape(-1)
        return positions, indices
    except (OSError, ValueError, KeyError):
        return None


def _export_glb(scene: SceneGraph, catalog: Catalog | None) -> bytes:
    """Minimal glTF 2.0 binary: one node per instance, meshes shared per component.

    Link membership and repeat groups are mirrored through node names and
    extras; nodes whose component has no loadable mesh are emitted bare
    with a warning.
    """
    link_of = {iid: n for n, link in enumerate(scene.links) for iid in link}
    group_of = {iid: cid for cid, ids in scene.groups for iid in ids}

    meshes_json: list[dict] = []
    accessors: list[dict] = []
    views: list[dict] = []
    blob = bytearray()
    mesh_index: dict[str, int | None] = {}

    def add_mesh(component: str) -> int | None:
        if component in mesh_index:
            return mesh_index[component]
        data = None
        if catalog is not None:
            try:
                spec = catalog.component(component)
                path = catalog.resolve_geometry(spec)
                data = _load_mesh(path) if path is not None else None
            except KeyError:
                data = None
        if data is None:
            log.warning("no preview mesh for component %r; node emitted without geometry", component)
            mesh_index[component] = None
            return None
        positions, indices = data
        pos_bytes = positions.tobytes()
        idx_bytes = indices.tobytes()
        pos_view = len(views)
        views.append({"buffer": 0, "byteOffset": len(blob), "byteLength": len(pos_bytes)})
        blob.extend(pos_bytes)
        while len(blob) % 4:
            blob.append(0)
        idx_view = len(views)
        views.append({"buffer": 0, "byteOffset": len(blob), "byteLength": len(idx_bytes)})
        blob.extend(idx_bytes)
        while len(blob) % 4:
            blob.append(0)
        pos_accessor = len(accessors)
        accessors.append(
            {
                "bufferView": pos_view,
                "componentType": 5126,
                "count": int(positions.shape[0]),
                "type": "VEC3",
                "min": [float(v) for v in positions.min(axis=0)],
                "max": [float(v) for v in positions.max(axis=0)],
            }
        )
        idx_accessor = len(accessors)
        accessors.append(
            {
                "bufferView": idx_view,
                "componentType": 5125,
                "count": int(indices.shape[0]),
                "type": "SCALAR",
            }
        )
        index = len(meshes_json)
        meshes_json.append(
            {
                "name": component,
                "primitives": [
                    {"attributes": {"POSITION": pos_accessor}, "indices": idx_accessor, "mode": 4}
                ],
            }
        )
        mesh_index[component] = index
        return index

    nodes = []
    for iid, cid, pose in scene.instances:
        r = pose.rotation
        t = pose.translation
        matrix = [
            _clean(float(r[0][0])), _clean(float(r[1][0])), _clean(float(r[2][0])), 0.0,
            _clean(float(r[0][1])), _clean(float(r[1][1])), _clean(float(r[2][1])), 0.0,
            _clean(float(r[0][2])), _clean(float(r[1][2])), _clean(float(r[2][2])), 0.0,
            _clean(float(t[0])), _clean(float(t[1])), _clean(float(t[2])), 1.0,
        ]
        extras: dict = {"component": cid, "link": link_of.get(iid, 0)}
        if iid in group_of:
            extras["group"] = group_of[iid]
        node: dict = {"name": iid, "matrix": matrix, "extras": extras}
        mesh = add_mesh(cid)
        if mesh is not None:
            node["mesh"] = mesh
        nodes.append(node)

    doc: dict = {
        "asset": {"version": "2.0", "generator": "modsynth"},
        "scene": 0,
        "scenes": [{"nodes": list(range(len(nodes)))}],
        "nodes": nodes,
    }
    if meshes_json:
        doc["meshes"] = meshes_json
        doc["accessors"] = accessors
        doc["bufferViews"] = views
        doc["buffers"] = [{"byteLength": len(blob)}]

    json_bytes = compact_dumps(doc).encode("utf-8")
    while len(json_bytes) % 4:
        json_bytes += b" "
    chunks = struct.pack("<II", len(json_bytes), GLB_JSON) + json_bytes
    if blob:
        bin_bytes = bytes(blob)
        while len(bin_bytes) % 4:
            bin_bytes += b"\x00"
        chunks += struct.pack("<II", len(bin_bytes), GLB_BIN) + bin_bytes
    header = struct.pack("<III", GLB_MAGIC, 2, 12 + len(chunks))
    return header + chunks
