import json
import struct

import numpy as np
import pytest

from modsynth.assemble import (
    FLIP,
    GLB_BIN,
    GLB_JSON,
    GLB_MAGIC,
    Pose,
    assemble,
    export,
)
from modsynth.catalog import Catalog, ComponentSpec, ConnectionPoint, Frame, FLIPPED_ROTATION
from modsynth.interpret import interpret
from modsynth.repo import build_static_repository
from modsynth.taxonomy import Taxonomy
from modsynth.types import AtomSet, Term


def tower_term(cubes: int) -> Term:
    node = Term("cap.bottom")
    for _ in range(cubes):
        node = Term("cube.bottom", (node,))
    return Term("base.bottom", (node,))


def tower_scene(tower_catalog, cubes: int):
    repo = build_static_repository(tower_catalog)
    program = interpret(tower_term(cubes), repo, tower_catalog)
    return assemble(program, tower_catalog)


def parse_glb(data: bytes) -> tuple[dict, bytes | None]:
    magic, version, total = struct.unpack_from("<III", data, 0)
    assert magic == GLB_MAGIC and version == 2 and total == len(data)
    offset = 12
    length, kind = struct.unpack_from("<II", data, offset)
    assert kind == GLB_JSON
    doc = json.loads(data[offset + 8 : offset + 8 + length])
    offset += 8 + length
    blob = None
    if offset < len(data):
        length, kind = struct.unpack_from("<II", data, offset)
        assert kind == GLB_BIN
        blob = data[offset + 8 : offset + 8 + length]
    return doc, blob


class TestPoses:
    def test_tower_stack_heights(self, tower_catalog):
        scene = tower_scene(tower_catalog, 1)  # base(cube(cap))
        base = scene.world_pose("i0")
        cube = scene.world_pose("i1")
        cap = scene.world_pose("i2")
        assert np.allclose(base.translation, [0, 0, 0], atol=1e-12)
        assert np.allclose(cube.translation, [0, 0, 10], atol=1e-12)
        assert np.allclose(cap.translation, [0, 0, 60], atol=1e-12)
        for pose in (base, cube, cap):
            assert np.allclose(pose.rotation, np.eye(3), atol=1e-12)

    def test_single_instance_scene(self, tower_catalog):
        repo = build_static_repository(tower_catalog)
        program = interpret(Term("cap.bottom"), repo, tower_catalog)
        scene = assemble(program, tower_catalog)
        assert len(scene.instances) == 1
        assert scene.links == (("i0",),)
        assert scene.groups == ()
        assert np.allclose(scene.world_pose("i0").rotation, np.eye(3))

    def test_frame_coincidence(self, tower_catalog):
        scene = tower_scene(tower_catalog, 3)
        repo = build_static_repository(tower_catalog)
        program = interpret(tower_term(3), repo, tower_catalog)
        components = {i.instance: i.component for i in program.inserts}
        for joint in program.joints:
            parent_spec = tower_catalog.component(components[joint.parent])
            child_spec = tower_catalog.component(components[joint.child])
            lhs = scene.world_pose(joint.child).compose(
                Pose.from_frame(child_spec.point(joint.child_cp).frame)
            )
            rhs = (
                scene.world_pose(joint.parent)
                .compose(Pose.from_frame(parent_spec.point(joint.parent_cp).frame))
                .compose(Pose(FLIP, np.zeros(3)))
            )
            assert np.abs(lhs.rotation - rhs.rotation).max() < 1e-9
            assert np.abs(lhs.translation - rhs.translation).max() < 1e-9

    def test_reassembly_is_bit_identical(self, tower_catalog):
        one = export(tower_scene(tower_catalog, 3), "scene-json", tower_catalog)
        two = export(tower_scene(tower_catalog, 3), "scene-json", tower_catalog)
        assert one == two


class TestLinks:
    def test_rigid_pair_is_one_link(self):
        taxonomy = Taxonomy.create("t", ["root", "plug"], [])
        parts = []
        for kind in ("rigid", "revolute"):
            a = ComponentSpec(
                id=f"a_{kind}",
                connection_points=(
                    ConnectionPoint("out", Frame((0, 0, 0)), provided=AtomSet.of("root")),
                    ConnectionPoint(
                        "in", Frame((0, 0, 10), FLIPPED_ROTATION), kind,
                        required=AtomSet.of("plug"),
                    ),
                ),
            )
            b = ComponentSpec(
                id=f"b_{kind}",
                connection_points=(
                    ConnectionPoint("out", Frame((0, 0, 0)), provided=AtomSet.of("plug")),
                ),
            )
            parts.extend([a, b])
        catalog = Catalog(tuple(parts), (taxonomy,))
        repo = build_static_repository(catalog)

        rigid = assemble(
            interpret(Term("a_rigid.out", (Term("b_rigid.out"),)), repo, catalog), catalog
        )
        assert rigid.links == (("i0", "i1"),)

        revolute = assemble(
            interpret(Term("a_revolute.out", (Term("b_revolute.out"),)), repo, catalog),
            catalog,
        )
        assert revolute.links == (("i0",), ("i1",))
        [joint] = revolute.joints
        assert joint.kind == "revolute"
        assert joint.axis is not None
        assert np.allclose(joint.axis, [0, 0, -1])

    def test_arm_link_count_tracks_revolute_joints(self, arm_catalog):
        from modsynth.pipeline import solve
        from modsynth.repo import Aggregate, Request

        request = Request(
            goal=AtomSet.of("robot_arm"),
            aggregates=(Aggregate("dof", "eq", 3),),
            max_size=30,
            max_results=4,
        )
        outcome = solve(arm_catalog, request)
        repo = build_static_repository(arm_catalog)
        for term, _, _ in outcome.results:
            program = interpret(term, repo, arm_catalog)
            scene = assemble(program, arm_catalog)
            revolute = sum(1 for j in scene.joints if j.kind == "revolute")
            assert revolute == 3
            assert len(scene.links) == 1 + revolute


class TestDrift:
    def test_thousand_node_chain_stays_orthonormal(self):
        # every mate multiplies in an inexact rotation, so 999 compositions
        # accumulate floating error unless poses are re-orthonormalized
        angle = 0.37
        c, s = np.cos(angle), np.sin(angle)
        twist = ((c, -s, 0.0), (s, c, 0.0), (0.0, 0.0, 1.0))
        taxonomy = Taxonomy.create("t", ["seg", "tip"], [])
        segment = ComponentSpec(
            id="seg",
            connection_points=(
                ConnectionPoint("out", Frame((0, 0, 0), twist), provided=AtomSet.of("seg")),
                ConnectionPoint(
                    "in", Frame((1.0, 2.0, 3.0), FLIPPED_ROTATION), "rigid",
                    required=AtomSet.of("seg"),
                ),
            ),
        )
        tip = ComponentSpec(
            id="tip",
            connection_points=(
                ConnectionPoint("out", Frame((0, 0, 0)), provided=AtomSet.of("seg")),
            ),
        )
        catalog = Catalog((segment, tip), (taxonomy,))
        repo = build_static_repository(catalog)
        node = Term("tip.out")
        for _ in range(999):
            node = Term("seg.out", (node,))
        program = interpret(node, repo, catalog)
        scene = assemble(program, catalog)
        assert len(scene.instances) == 1000
        for _, _, pose in scene.instances:
            assert pose.orthonormal_defect() < 1e-9


class TestExport:
    def test_scene_json_contents(self, tower_catalog):
        scene = tower_scene(tower_catalog, 3)
        doc = json.loads(export(scene, "scene-json", tower_catalog))
        assert len(doc["instances"]) == 5
        assert len(doc["links"]) == 1
        assert doc["groups"] == {"cube": ["i1", "i2", "i3"]}
        assert len(doc["joints"]) == 4

    def test_empty_scene_is_valid(self, tower_catalog):
        from modsynth.assemble import SceneGraph
        from modsynth.interpret import AssemblyProgram

        scene = assemble(AssemblyProgram(), tower_catalog)
        assert scene == SceneGraph((), (), (), ())
        doc = json.loads(export(scene, "scene-json", tower_catalog))
        assert doc["instances"] == []
        data = export(scene, "gltf", tower_catalog)
        gltf, _ = parse_glb(data)
        assert gltf["scenes"][0]["nodes"] == []

    def test_glb_round_trip_node_count(self, tower_catalog):
        scene = tower_scene(tower_catalog, 3)
        data = export(scene, "gltf", tower_catalog)
        gltf, blob = parse_glb(data)
        assert len(gltf["nodes"]) == len(scene.instances)
        assert gltf["asset"]["version"] == "2.0"
        # tower parts all carry preview meshes: one shared mesh per component
        assert {n["name"] for n in gltf["nodes"]} == {f"i{k}" for k in range(5)}
        assert len(gltf["meshes"]) == 3
        assert all("mesh" in n for n in gltf["nodes"])
        assert blob is not None and len(blob) == gltf["buffers"][0]["byteLength"]
        for accessor in gltf["accessors"]:
            view = gltf["bufferViews"][accessor["bufferView"]]
            assert view["byteOffset"] + view["byteLength"] <= len(blob)

    def test_glb_missing_mesh_emits_bare_node(self, arm_catalog):
        repo = build_static_repository(arm_catalog)
        term = Term("end_cap.palm")
        scene = assemble(interpret(term, repo, arm_catalog), arm_catalog)
        gltf, blob = parse_glb(export(scene, "gltf", arm_catalog))
        assert len(gltf["nodes"]) == 1
        assert "mesh" not in gltf["nodes"][0]
        assert blob is None

    def test_glb_deterministic(self, tower_catalog):
        scene = tower_scene(tower_catalog, 2)
        assert export(scene, "gltf", tower_catalog) == export(scene, "gltf", tower_catalog)

    def test_unknown_format_rejected(self, tower_catalog):
        scene = tower_scene(tower_catalog, 0)
        with pytest.raises(ValueError):
            export(scene, "step")
