#!/usr/bin/env python3
"""Regenerates the bundled catalogs (tower, arm28) and request fixtures.

Run from the repository root:  python3 scripts/build_catalogs.py
"""

from __future__ import annotations

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from modsynth.catalog import (  # noqa: E402
    Catalog,
    ComponentSpec,
    ConnectionPoint,
    Frame,
    FLIPPED_ROTATION,
    save_catalog,
)
from modsynth.jsonio import canonical_dumps  # noqa: E402
from modsynth.taxonomy import Taxonomy  # noqa: E402
from modsynth.types import AtomSet  # noqa: E402

UP = Frame((0.0, 0.0, 0.0))


def down(x=0.0, y=0.0, z=0.0) -> Frame:
    return Frame((float(x), float(y), float(z)), FLIPPED_ROTATION)


def box_mesh(sx: float, sy: float, sz: float) -> dict:
    """An axis-aligned box sitting on z=0, centered in x/y."""
    hx, hy = sx / 2, sy / 2
    p = [
        [-hx, -hy, 0.0], [hx, -hy, 0.0], [hx, hy, 0.0], [-hx, hy, 0.0],
        [-hx, -hy, sz], [hx, -hy, sz], [hx, hy, sz], [-hx, hy, sz],
    ]
    i = [
        [0, 2, 1], [0, 3, 2], [4, 5, 6], [4, 6, 7],
        [0, 1, 5], [0, 5, 4], [1, 2, 6], [1, 6, 5],
        [2, 3, 7], [2, 7, 6], [3, 0, 4], [3, 4, 7],
    ]
    return {"positions": p, "indices": i}


def cp(id, frame, joint="rigid", required=None, provided=None):
    return ConnectionPoint(
        id,
        frame,
        joint,
        AtomSet.of(*required) if required else None,
        AtomSet.of(*provided) if provided else None,
    )


def component(id, inherent, points, metadata=None, geometry_ref=None):
    return ComponentSpec(
        id=id,
        inherent=AtomSet.of(*inherent),
        connection_points=tuple(points),
        metadata=tuple(sorted((metadata or {}).items())),
        geometry_ref=geometry_ref,
    )


def build_tower() -> Catalog:
    taxonomy = Taxonomy.create(
        "tower",
        ["base", "cap", "cube", "stackable", "tower", "wood"],
        [],
    )
    base = component(
        "base",
        ["base"],
        [
            cp("bottom", UP, provided=["tower"]),
            cp("top", down(z=10), required=["stackable"]),
        ],
        {"cost": 500},
        geometry_ref="meshes/base.mesh.json",
    )
    cube = component(
        "cube",
        ["cube", "wood"],
        [
            cp("bottom", UP, provided=["stackable"]),
            cp("top", down(z=50), required=["stackable"]),
        ],
        {"cost": 120, "cubes": 1},
        geometry_ref="meshes/cube.mesh.json",
    )
    cap = component(
        "cap",
        ["cap"],
        [cp("bottom", UP, provided=["stackable"])],
        {"cost": 80},
        geometry_ref="meshes/cap.mesh.json",
    )
    return Catalog((base, cap, cube), (taxonomy,))


def build_arm() -> Catalog:
    nodes = [
        "robot_arm", "camera_rig", "test_rig", "bench_tool",
        "component", "actuator", "servo", "servo_micro_t", "servo_std_t", "servo_heavy_t",
        "flange", "flange_s", "flange_l",
        "horn_s", "horn_l", "horn_l_offset",
        "pan_unit", "tilt_unit", "cam_mount", "cable_route",
        "fastener", "screws", "screws_m2", "screws_m3", "screws_m4", "screws_m5",
        "material", "aluminum", "steel", "plastic", "nylon",
        "base", "bracket", "link", "gripper", "endeffector", "camera", "accessory",
    ]
    edges = [
        ["servo_micro_t", "servo"], ["servo_std_t", "servo"], ["servo_heavy_t", "servo"],
        ["servo", "actuator"], ["actuator", "component"],
        ["flange_s", "flange"], ["flange_l", "flange"],
        ["screws_m2", "screws"], ["screws_m3", "screws"],
        ["screws_m4", "screws"], ["screws_m5", "screws"],
        ["screws", "fastener"],
        ["aluminum", "material"], ["steel", "material"],
        ["plastic", "material"], ["nylon", "material"],
        ["gripper", "endeffector"],
    ]
    taxonomy = Taxonomy.create("arm", nodes, edges)

    parts = [
        # mounts
        component(
            "base_small", ["base", "aluminum"],
            [
                cp("mount", UP, provided=["robot_arm"]),
                cp("column", down(z=40), required=["flange"]),
                cp("anchors", down(x=45, z=6), required=["screws_m5"]),
            ],
            {"cost": 1800, "dof": 0},
            geometry_ref="meshes/base_small.mesh.json",
        ),
        component(
            "base_heavy", ["base", "steel"],
            [
                cp("mount", UP, provided=["robot_arm"]),
                cp("column", down(z=60), required=["flange"]),
                cp("anchors", down(x=60, z=8), required=["screws_m5"]),
            ],
            {"cost": 3200, "dof": 0},
        ),
        # actuators: micro horns mate small brackets, std/heavy horns mate large ones
        component(
            "servo_micro", ["servo_micro_t", "plastic"],
            [
                cp("body", UP, provided=["flange_s"]),
                cp("horn", down(z=32), "revolute", required=["horn_s"]),
                cp("lugs", down(x=14, z=26), required=["screws_m2"]),
            ],
            {"cost": 450, "dof": 1},
            geometry_ref="meshes/servo_micro.mesh.json",
        ),
        component(
            "servo_std", ["servo_std_t", "plastic"],
            [
                cp("body", UP, provided=["flange_l"]),
                cp("horn", down(z=42), "revolute", required=["horn_l"]),
                cp("lugs", down(x=20, z=34), required=["screws_m3"]),
            ],
            {"cost": 1250, "dof": 1},
            geometry_ref="meshes/servo_std.mesh.json",
        ),
        component(
            "servo_heavy", ["servo_heavy_t", "steel"],
            [
                cp("body", UP, provided=["flange_l"]),
                cp("horn", down(z=54), "revolute", required=["horn_l"]),
                cp("lugs", down(x=26, z=44), required=["screws_m4"]),
            ],
            {"cost": 3400, "dof": 1},
        ),
        # brackets carry a horn plate and expose the next mounting flange
        component(
            "bracket_micro", ["bracket", "nylon"],
            [
                cp("horn_plate", UP, provided=["horn_s"]),
                cp("next", down(x=24, z=18), required=["flange"]),
                cp("fasteners", down(x=10, z=8), required=["screws_m2"]),
            ],
            {"cost": 240, "dof": 0},
        ),
        component(
            "bracket_std", ["bracket", "nylon"],
            [
                cp("horn_plate", UP, provided=["horn_l"]),
                cp("next", down(x=36, z=26), required=["flange_l"]),
                cp("fasteners", down(x=16, z=12), required=["screws_m3"]),
            ],
            {"cost": 380, "dof": 0},
        ),
        # end effectors; all accept either horn size
        component(
            "gripper_claw", ["gripper", "nylon"],
            [
                cp("palm", UP, provided=["horn_s", "horn_l"]),
                cp("fasteners", down(x=12, z=10), required=["screws_m3"]),
            ],
            {"cost": 900, "dof": 0},
            geometry_ref="meshes/gripper_claw.mesh.json",
        ),
        component(
            "gripper_suction", ["gripper", "plastic"],
            [
                cp("palm", UP, provided=["horn_s", "horn_l"]),
                cp("fasteners", down(x=12, z=8), required=["screws_m2"]),
            ],
            {"cost": 700, "dof": 0},
        ),
        component(
            "tool_probe", ["endeffector", "steel"],
            [
                cp("palm", UP, provided=["horn_s", "horn_l"]),
                cp("fasteners", down(x=10, z=6), required=["screws_m2"]),
            ],
            {"cost": 350, "dof": 0},
        ),
        component(
            "gripper_soft", ["gripper", "nylon"],
            [
                cp("palm", UP, provided=["horn_s"]),
                cp("fasteners", down(x=10, z=6), required=["screws_m2"]),
            ],
            {"cost": 1100, "dof": 0},
        ),
        component(
            "end_cap", ["accessory", "plastic"],
            [cp("palm", UP, provided=["horn_s", "horn_l"])],
            {"cost": 60, "dof": 0},
        ),
        # fastener packs
        component(
            "screws_m2_pack", ["fastener", "steel"],
            [cp("pack", UP, provided=["screws_m2"])],
            {"cost": 20, "dof": 0},
        ),
        component(
            "screws_m3_pack", ["fastener", "steel"],
            [cp("pack", UP, provided=["screws_m3"])],
            {"cost": 30, "dof": 0},
        ),
        component(
            "screws_m4_pack", ["fastener", "steel"],
            [cp("pack", UP, provided=["screws_m4"])],
            {"cost": 45, "dof": 0},
        ),
        component(
            "screws_m5_pack", ["fastener", "steel"],
            [cp("pack", UP, provided=["screws_m5"])],
            {"cost": 60, "dof": 0},
        ),
        # camera rig family
        component(
            "pan_tilt_base", ["base", "plastic"],
            [
                cp("mount", UP, provided=["camera_rig"]),
                cp("pan", down(z=24), required=["pan_unit"]),
                cp("anchors", down(x=30, z=5), required=["screws_m4"]),
            ],
            {"cost": 650, "dof": 0},
        ),
        component(
            "tripod_adapter", ["base", "aluminum"],
            [
                cp("mount", UP, provided=["camera_rig"]),
                cp("pan", down(z=12), required=["pan_unit"]),
                cp("anchors", down(x=20, z=4), required=["screws_m5"]),
            ],
            {"cost": 980, "dof": 0},
        ),
        component(
            "pan_stage", ["actuator", "plastic"],
            [
                cp("body", UP, provided=["pan_unit"]),
                cp("output", down(z=30), "revolute", required=["tilt_unit"]),
                cp("lugs", down(x=12, z=22), required=["screws_m2"]),
            ],
            {"cost": 520, "dof": 1},
        ),
        component(
            "tilt_stage", ["actuator", "plastic"],
            [
                cp("body", UP, provided=["tilt_unit"]),
                cp("output", down(z=28), "revolute", required=["cam_mount"]),
                cp("lugs", down(x=12, z=20), required=["screws_m2"]),
            ],
            {"cost": 520, "dof": 1},
        ),
        component(
            "camera_pod", ["camera", "plastic"],
            [
                cp("shoe", UP, provided=["cam_mount"]),
                cp("fasteners", down(x=8, z=6), required=["screws_m2"]),
            ],
            {"cost": 1500, "dof": 0},
        ),
        component(
            "led_ring", ["camera", "plastic"],
            [cp("shoe", UP, provided=["cam_mount"])],
            {"cost": 420, "dof": 0},
        ),
        # plausible stock that current requests never select
        component(
            "arm_tube_200", ["link", "aluminum"],
            [
                cp("plate", UP, provided=["horn_l_offset"]),
                cp("next", down(z=200), required=["flange_l"]),
                cp("fasteners", down(x=14, z=10), required=["screws_m3"]),
            ],
            {"cost": 510, "dof": 0},
        ),
        component(
            "arm_tube_300", ["link", "aluminum"],
            [
                cp("plate", UP, provided=["horn_l_offset"]),
                cp("next", down(z=300), required=["flange_l"]),
                cp("fasteners", down(x=14, z=10), required=["screws_m3"]),
            ],
            {"cost": 640, "dof": 0},
        ),
        component(
            "bracket_offset", ["bracket", "aluminum"],
            [
                cp("horn_plate", UP, provided=["horn_l_offset"]),
                cp("next", down(x=50, z=20), required=["flange_l"]),
                cp("fasteners", down(x=20, z=10), required=["screws_m4"]),
            ],
            {"cost": 560, "dof": 0},
        ),
        component(
            "cable_clip", ["accessory", "nylon"],
            [cp("clip", UP, provided=["cable_route"])],
            {"cost": 15, "dof": 0},
        ),
        component(
            "servo_test_jig", ["accessory", "nylon"],
            [
                cp("bench", UP, provided=["test_rig"]),
                cp("seat", down(z=10), required=["flange"]),
                cp("fasteners", down(x=12, z=4), required=["screws_m2"]),
            ],
            {"cost": 180, "dof": 0},
        ),
        component(
            "spool_holder", ["accessory", "nylon"],
            [
                cp("foot", UP, provided=["bench_tool"]),
                cp("anchors", down(x=16, z=4), required=["screws_m5"]),
            ],
            {"cost": 210, "dof": 0},
        ),
    ]
    return Catalog(tuple(sorted(parts, key=lambda p: p.id)), (taxonomy,))


MESHES = {
    "tower": {
        "base": box_mesh(120, 120, 10),
        "cube": box_mesh(50, 50, 50),
        "cap": box_mesh(60, 60, 8),
    },
    "arm28": {
        "base_small": box_mesh(90, 90, 40),
        "servo_micro": box_mesh(23, 12, 32),
        "servo_std": box_mesh(40, 20, 42),
        "gripper_claw": box_mesh(40, 30, 60),
    },
}

REQUESTS = {
    "tower_cubes3.json": {
        "goal": [{"name": "tower"}],
        "aggregates": [{"key": "cubes", "op": "eq", "target": 3}],
        "max_size": 10,
        "max_results": 10,
    },
    "tower_any.json": {
        "goal": [{"name": "tower"}],
        "aggregates": [],
        "max_size": 3,
        "max_results": 100,
    },
    "arm_dof6.json": {
        "goal": [{"name": "robot_arm"}],
        "aggregates": [{"key": "dof", "op": "eq", "target": 6}],
        "max_size": 30,
        "max_results": 256,
    },
    "arm_dof4_budget.json": {
        "goal": [{"name": "robot_arm"}],
        "aggregates": [{"key": "dof", "op": "eq", "target": 4}],
        "max_size": 30,
        "max_results": 256,
        "filters": [{"key": "cost", "op": "le", "target": 9000}],
    },
}


def main():
    for name, catalog in (("tower", build_tower()), ("arm28", build_arm())):
        out = ROOT / "catalogs" / name
        save_catalog(catalog, out)
        mesh_dir = out / "meshes"
        mesh_dir.mkdir(exist_ok=True)
        for comp, mesh in MESHES[name].items():
            (mesh_dir / f"{comp}.mesh.json").write_text(canonical_dumps(mesh))
        print(f"wrote {out} ({len(catalog.components)} components)")
    req_dir = ROOT / "fixtures" / "requests"
    req_dir.mkdir(parents=True, exist_ok=True)
    for name, doc in REQUESTS.items():
        (req_dir / name).write_text(canonical_dumps(doc))
        print(f"wrote {req_dir / name}")


if __name__ == "__main__":
    main()
