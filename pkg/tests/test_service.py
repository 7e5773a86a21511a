import json

import pytest
from fastapi.testclient import TestClient

from modsynth.jsonio import load_json
from modsynth.service import create_app


@pytest.fixture()
def client(tmp_path):
    app = create_app(str(tmp_path / "store"))
    with TestClient(app) as c:
        yield c


def tower_doc(path, name):
    return load_json(path / "catalogs" / "tower" / f"{name}.json")


def setup_tower_project(client, repo_root, pid="tower"):
    assert client.post("/projects", json={"id": pid}).status_code == 201
    taxonomy = load_json(repo_root / "catalogs" / "tower" / "tower.taxonomy.json")
    r = client.put(f"/projects/{pid}/taxonomy", json={"taxonomies": [taxonomy]})
    assert r.status_code == 200, r.text
    for name in ("base", "cube", "cap"):
        doc = tower_doc(repo_root, name)
        doc.pop("geometry_ref", None)  # meshes live outside the store
        r = client.put(f"/projects/{pid}/components/{name}", json=doc)
        assert r.status_code == 200, r.text
    return pid


def submit(client, pid, body):
    return client.post(f"/projects/{pid}/requests", json=body)


CUBES3 = {
    "goal": [{"name": "tower"}],
    "aggregates": [{"key": "cubes", "op": "eq", "target": 3}],
    "max_size": 10,
    "max_results": 10,
}


class TestProjectLifecycle:
    def test_create_and_get(self, client):
        r = client.post("/projects", json={"id": "p1"})
        assert r.status_code == 201
        assert r.json() == {"id": "p1", "taxonomy_rev": 0, "catalog_rev": 0}
        assert client.get("/projects/p1").status_code == 200
        assert client.get("/projects/nope").status_code == 404
        assert client.post("/projects", json={"id": "p1"}).status_code == 409

    def test_taxonomy_cycle_rejected(self, client):
        client.post("/projects", json={"id": "p1"})
        r = client.put(
            "/projects/p1/taxonomy",
            json={"taxonomies": [{"name": "t", "nodes": ["a", "b"],
                                  "edges": [["a", "b"], ["b", "a"]]}]},
        )
        assert r.status_code == 400
        assert "cycle" in r.json()["detail"]

    def test_component_with_unknown_atom_rejected(self, client, repo_root):
        client.post("/projects", json={"id": "p1"})
        doc = tower_doc(repo_root, "cap")
        r = client.put("/projects/p1/components/cap", json=doc)
        assert r.status_code == 400
        assert any("unknown atom" in d["message"] for d in r.json()["detail"])

    def test_revisions_advance(self, client, repo_root):
        pid = setup_tower_project(client, repo_root)
        project = client.get(f"/projects/{pid}").json()
        assert project["taxonomy_rev"] == 1
        assert project["catalog_rev"] == 3

    def test_delete_referenced_taxonomy_node_conflicts(self, client, repo_root):
        pid = setup_tower_project(client, repo_root)
        r = client.delete(f"/projects/{pid}/taxonomy/nodes/stackable")
        assert r.status_code == 409
        detail = r.json()["detail"]
        assert set(detail["references"]) == {"base", "cap", "cube"}

    def test_edits_conflict_while_solve_holds_the_project_lock(self, client, repo_root):
        pid = setup_tower_project(client, repo_root)
        lock = client.app.state.store.lock(pid)
        assert lock.acquire(blocking=False)
        try:
            doc = tower_doc(repo_root, "cap")
            doc.pop("geometry_ref", None)
            assert client.put(f"/projects/{pid}/components/cap", json=doc).status_code == 409
            taxonomy = load_json(repo_root / "catalogs" / "tower" / "tower.taxonomy.json")
            r = client.put(f"/projects/{pid}/taxonomy", json={"taxonomies": [taxonomy]})
            assert r.status_code == 409
        finally:
            lock.release()
        # once the lock clears, the same edit goes through
        doc = tower_doc(repo_root, "cap")
        doc.pop("geometry_ref", None)
        assert client.put(f"/projects/{pid}/components/cap", json=doc).status_code == 200

    def test_delete_unreferenced_taxonomy_node_ok(self, client, repo_root):
        pid = setup_tower_project(client, repo_root)
        taxonomy = load_json(repo_root / "catalogs" / "tower" / "tower.taxonomy.json")
        taxonomy["nodes"] = taxonomy["nodes"] + ["spare"]
        assert (
            client.put(f"/projects/{pid}/taxonomy", json={"taxonomies": [taxonomy]})
            .status_code == 200
        )
        r = client.delete(f"/projects/{pid}/taxonomy/nodes/spare")
        assert r.status_code == 200
        merged = client.get(f"/projects/{pid}/taxonomy").json()
        assert "spare" not in merged["taxonomies"][0]["nodes"]


class TestSolveWorkflow:
    def test_cubes3_end_to_end(self, client, repo_root):
        pid = setup_tower_project(client, repo_root)
        r = submit(client, pid, CUBES3)
        assert r.status_code == 201, r.text
        body = r.json()
        assert body["status"] == "done"
        assert body["summary"]["count"] == {"kind": "finite", "value": 1}
        assert body["summary"]["returned"] == 1

        rid = body["id"]
        page = client.get(f"/projects/{pid}/requests/{rid}/results", params={"page": 0})
        rows = page.json()["rows"]
        assert len(rows) == 1
        assert rows[0]["bom"] == {
            "lines": {"base": 1, "cap": 1, "cube": 3},
            "totals": {"cost": 940, "cubes": 3},
        }
        assert rows[0]["size"] == 5

    def test_unconstrained_request_reports_infinite(self, client, repo_root):
        pid = setup_tower_project(client, repo_root)
        r = submit(client, pid, {"goal": [{"name": "tower"}], "max_size": 3, "max_results": 100})
        body = r.json()
        assert body["summary"]["count"] == {"kind": "infinite"}
        assert body["summary"]["returned"] == 2
        page = client.get(f"/projects/{pid}/requests/{body['id']}/results").json()
        assert page["count"]["kind"] == "infinite"
        assert page["total"] == 2

    def test_unknown_goal_atom_is_400_naming_it(self, client, repo_root):
        pid = setup_tower_project(client, repo_root)
        r = submit(client, pid, {"goal": [{"name": "castle"}], "max_size": 3, "max_results": 1})
        assert r.status_code == 400
        assert "castle" in r.json()["detail"]

    def test_expansion_too_large_is_422(self, client, repo_root):
        pid = setup_tower_project(client, repo_root)
        body = dict(CUBES3)
        # two wide aggregates: entry count is the product of both value ranges
        body["aggregates"] = [
            {"key": "cubes", "op": "eq", "target": 4000},
            {"key": "cost", "op": "eq", "target": 4000},
        ]
        r = submit(client, pid, body)
        assert r.status_code == 422
        assert r.json()["detail"]["cap"] == 10**6

    def test_results_paging(self, client, repo_root):
        pid = setup_tower_project(client, repo_root)
        r = submit(client, pid, {
            "goal": [{"name": "tower"}],
            "aggregates": [{"key": "cubes", "op": "le", "target": 3}],
            "max_size": 10,
            "max_results": 10,
        })
        body = r.json()
        assert body["summary"]["count"] == {"kind": "finite", "value": 4}
        page0 = client.get(
            f"/projects/{pid}/requests/{body['id']}/results",
            params={"page": 0, "page_size": 3},
        ).json()
        page1 = client.get(
            f"/projects/{pid}/requests/{body['id']}/results",
            params={"page": 1, "page_size": 3},
        ).json()
        assert [row["index"] for row in page0["rows"]] == [0, 1, 2]
        assert [row["index"] for row in page1["rows"]] == [3]

    def test_bom_filter_drops_expensive_designs(self, client, repo_root):
        pid = setup_tower_project(client, repo_root)
        r = submit(client, pid, {
            "goal": [{"name": "tower"}],
            "aggregates": [{"key": "cubes", "op": "le", "target": 3}],
            "max_size": 10,
            "max_results": 10,
            "filters": [{"key": "cost", "op": "le", "target": 820}],
        })
        rows = client.get(
            f"/projects/{pid}/requests/{r.json()['id']}/results"
        ).json()["rows"]
        # towers with 0..2 cubes cost 580, 700, 820; the 3-cube tower is filtered
        assert [row["bom"]["totals"]["cost"] for row in rows] == [580, 700, 820]

    def test_request_status_listing(self, client, repo_root):
        pid = setup_tower_project(client, repo_root)
        submit(client, pid, CUBES3)
        submit(client, pid, CUBES3)
        listed = client.get(f"/projects/{pid}/requests").json()["requests"]
        assert [d["id"] for d in listed] == ["r1", "r2"]
        assert all(d["status"] == "done" for d in listed)


class TestAssemblyEndpoints:
    def test_assemble_result_idempotent(self, client, repo_root):
        pid = setup_tower_project(client, repo_root)
        rid = submit(client, pid, CUBES3).json()["id"]
        first = client.post(f"/projects/{pid}/requests/{rid}/results/0/assemble").json()
        second = client.post(f"/projects/{pid}/requests/{rid}/results/0/assemble").json()
        assert first == second
        a = client.get(f"/artifacts/{first['artifact']}")
        b = client.get(f"/artifacts/{second['artifact']}")
        assert a.content == b.content
        scene = a.json()
        assert len(scene["instances"]) == 5
        assert scene["groups"] == {"cube": ["i1", "i2", "i3"]}

    def test_assemble_out_of_range_is_404(self, client, repo_root):
        pid = setup_tower_project(client, repo_root)
        rid = submit(client, pid, CUBES3).json()["id"]
        r = client.post(f"/projects/{pid}/requests/{rid}/results/99/assemble")
        assert r.status_code == 404

    def test_assemble_all_bundle(self, client, repo_root):
        import io
        import zipfile

        pid = setup_tower_project(client, repo_root)
        rid = submit(client, pid, {
            "goal": [{"name": "tower"}],
            "aggregates": [{"key": "cubes", "op": "le", "target": 2}],
            "max_size": 10,
            "max_results": 10,
        }).json()["id"]
        bundle = client.post(f"/projects/{pid}/requests/{rid}/assemble-all").json()
        assert bundle["entries"] == 3
        data = client.get(f"/artifacts/{bundle['artifact']}").content
        with zipfile.ZipFile(io.BytesIO(data)) as zf:
            assert len(zf.namelist()) == 3
            for name in zf.namelist():
                scene = json.loads(zf.read(name))
                assert scene["instances"]

    def test_gltf_artifact(self, client, repo_root):
        pid = setup_tower_project(client, repo_root)
        rid = submit(client, pid, CUBES3).json()["id"]
        r = client.post(
            f"/projects/{pid}/requests/{rid}/results/0/assemble",
            params={"format": "gltf"},
        )
        art = client.get(f"/artifacts/{r.json()['artifact']}")
        assert art.headers["content-type"].startswith("model/gltf-binary")
        assert art.content[:4] == b"glTF"


class TestDeterminism:
    def test_same_request_same_results_bytes(self, client, repo_root):
        pid_a = setup_tower_project(client, repo_root, "a")
        pid_b = setup_tower_project(client, repo_root, "b")
        rid_a = submit(client, pid_a, CUBES3).json()["id"]
        rid_b = submit(client, pid_b, CUBES3).json()["id"]
        raw_a = client.get(f"/projects/{pid_a}/requests/{rid_a}/results.json").content
        raw_b = client.get(f"/projects/{pid_b}/requests/{rid_b}/results.json").content
        assert raw_a == raw_b

    def test_replay_on_pinned_revisions_is_identical(self, client, repo_root, tmp_path):
        from modsynth.pipeline import solve
        from modsynth.repo import Request
        from modsynth.jsonio import canonical_bytes

        pid = setup_tower_project(client, repo_root)
        rid = submit(client, pid, CUBES3).json()["id"]
        stored = client.get(f"/projects/{pid}/requests/{rid}/results.json").content

        # mutate the project after solving; replay must use the pinned revisions
        doc = tower_doc(repo_root, "cap")
        doc.pop("geometry_ref", None)
        doc["metadata"] = {"cost": 9999}
        assert client.put(f"/projects/{pid}/components/cap", json=doc).status_code == 200

        store = client.app.state.store
        record = store.get_request(pid, rid)
        catalog = store.catalog_at(pid, record["taxonomy_rev"], record["catalog_rev"])
        outcome = solve(catalog, Request.from_json(record["request"]))
        assert canonical_bytes(outcome.to_json()) == stored
