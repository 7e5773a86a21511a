import json
import random

import pytest

from modsynth.catalog import (
    Catalog,
    ComponentSpec,
    ConnectionPoint,
    Frame,
    SchemaError,
    load_catalog,
    save_catalog,
    validate_catalog,
    validate_component,
)
from modsynth.taxonomy import Taxonomy
from modsynth.types import AtomSet

from randgen import random_catalog


def test_bundled_tower_catalog_loads(tower_catalog):
    assert len(tower_catalog.components) == 3
    assert {c.id for c in tower_catalog.components} == {"base", "cap", "cube"}
    assert validate_catalog(tower_catalog) == []


def test_empty_file_list_gives_empty_catalog():
    assert load_catalog([]) == Catalog()


def test_cube_spec_is_clean(tower_catalog):
    cube = tower_catalog.component("cube")
    assert validate_component(tower_catalog, cube) == []


def test_untyped_connection_point_is_an_error(tower_catalog):
    bad = ComponentSpec(
        id="widget",
        connection_points=(ConnectionPoint("p", Frame((0, 0, 0))),),
    )
    diags = validate_component(tower_catalog, bad)
    assert any(d.severity == "error" and "untyped" in d.message for d in diags)


def test_unknown_atom_is_an_error(tower_catalog):
    bad = ComponentSpec(
        id="widget",
        inherent=AtomSet.of("titanium"),
        connection_points=(
            ConnectionPoint("p", Frame((0, 0, 0)), provided=AtomSet.of("stackable")),
        ),
    )
    diags = validate_component(tower_catalog, bad)
    assert any("titanium" in d.message and d.severity == "error" for d in diags)


def test_overspecified_provided_type_warns():
    taxonomy = Taxonomy.create("t", ["plug", "socket", "metric"], [])
    slim = ComponentSpec(
        id="slim",
        connection_points=(
            ConnectionPoint("p", Frame((0, 0, 0)), provided=AtomSet.of("plug")),
        ),
    )
    fat = ComponentSpec(
        id="fat",
        connection_points=(
            ConnectionPoint("p", Frame((0, 0, 0)), provided=AtomSet.of("plug", "plug")),
        ),
    )
    catalog = Catalog((slim, fat), (taxonomy,))
    assert validate_component(catalog, fat) == []
    redundant = ComponentSpec(
        id="fat",
        connection_points=(
            ConnectionPoint(
                "p", Frame((0, 0, 0)),
                provided=AtomSet.of("plug", "metric"),
            ),
        ),
    )
    taxonomy2 = Taxonomy.create("t", ["plug", "socket", "metric"], [("plug", "metric")])
    catalog2 = Catalog((slim, redundant), (taxonomy2,))
    diags = validate_component(catalog2, redundant)
    assert any(d.severity == "warning" and "superset" in d.message for d in diags)


def test_reflection_rotation_rejected_with_pointer(tmp_path):
    doc = {
        "id": "mirror",
        "inherent": [],
        "metadata": {},
        "connection_points": [
            {
                "id": "p",
                "joint": "rigid",
                "frame": {
                    "origin": [0, 0, 0],
                    "rotation": [[-1, 0, 0], [0, 1, 0], [0, 0, 1]],
                },
                "provided": [{"name": "x"}],
            }
        ],
    }
    path = tmp_path / "mirror.json"
    path.write_text(json.dumps(doc))
    with pytest.raises(SchemaError) as err:
        load_catalog([path])
    assert err.value.pointer == "/connection_points/0/frame"


def test_load_save_round_trip(tower_catalog, tmp_path):
    save_catalog(tower_catalog, tmp_path)
    reloaded = load_catalog(tmp_path)
    assert reloaded == Catalog(tower_catalog.components, tower_catalog.taxonomies)


def test_save_is_byte_stable(tower_catalog, tmp_path):
    save_catalog(tower_catalog, tmp_path / "one")
    save_catalog(tower_catalog, tmp_path / "two")
    for f in sorted((tmp_path / "one").iterdir()):
        assert f.read_bytes() == (tmp_path / "two" / f.name).read_bytes()


def test_random_catalog_round_trips(tmp_path):
    rng = random.Random(7)
    for i in range(20):
        catalog = random_catalog(rng)
        out = tmp_path / f"cat{i}"
        save_catalog(catalog, out)
        reloaded = load_catalog(out)
        assert reloaded == Catalog(catalog.components, catalog.taxonomies)


def test_validation_is_order_independent(tower_catalog, tmp_path):
    save_catalog(tower_catalog, tmp_path)
    files = sorted(p for p in tmp_path.iterdir() if p.suffix == ".json")
    forward = validate_catalog(load_catalog(files))
    backward = validate_catalog(load_catalog(list(reversed(files))))
    assert forward == backward
