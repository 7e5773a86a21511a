"""FastAPI service: persistence, solve orchestration, assembly artifacts."""

from __future__ import annotations

import io
import os
import zipfile
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query, Response
from fastapi.staticfiles import StaticFiles

from ..assemble import assemble, export
from ..catalog import Catalog, ComponentSpec, SchemaError, validate_component_doc, validate_component
from ..interpret import interpret
from ..pipeline import ValidationError, solve, validate_request
from ..repo import ExpansionTooLargeError, Request, RequestError, build_static_repository
from ..taxonomy import CycleError, Taxonomy, TaxonomyError, merge
from ..types import SynthError, Term, UnknownAtomError
from . import schemas
from .store import ConflictError, NotFoundError, ProjectStore

DEFAULT_STORAGE_ENV = "MODSYNTH_STORAGE"

MEDIA_TYPES = {"scene-json": "application/json", "gltf": "model/gltf-binary"}


def create_app(storage_root: str | None = None) -> FastAPI:
    root = storage_root or os.environ.get(DEFAULT_STORAGE_ENV) or "modsynth-data"
    store = ProjectStore(root)
    app = FastAPI(title="modsynth", version="0.1.0")
    app.state.store = store

    def fail(status: int, detail) -> HTTPException:
        return HTTPException(status_code=status, detail=detail)

    def editing_lock(project_id: str):
        lock = store.lock(project_id)
        if not lock.acquire(blocking=False):
            raise fail(409, "a solve is in flight against the current revisions")
        return lock

    # -- projects --------------------------------------------------------

    @app.post("/projects", response_model=schemas.ProjectModel, status_code=201)
    def create_project(body: schemas.ProjectCreateModel):
        try:
            return store.create_project(body.id)
        except ConflictError as e:
            raise fail(409, str(e))

    @app.get("/projects/{pid}", response_model=schemas.ProjectModel)
    def get_project(pid: str):
        try:
            return store.get_project(pid)
        except NotFoundError as e:
            raise fail(404, str(e))

    # -- taxonomy --------------------------------------------------------

    @app.get("/projects/{pid}/taxonomy")
    def get_taxonomy(pid: str):
        try:
            project = store.get_project(pid)
            return {"taxonomies": store.taxonomy_docs(pid, project["taxonomy_rev"])}
        except NotFoundError as e:
            raise fail(404, str(e))

    @app.put("/projects/{pid}/taxonomy", response_model=schemas.ProjectModel)
    def put_taxonomy(pid: str, body: schemas.TaxonomyPutModel):
        docs = [t.model_dump() for t in body.taxonomies]
        docs = [
            {"name": d["name"], "nodes": d["nodes"], "edges": [list(e) for e in d["edges"]]}
            for d in docs
        ]
        try:
            # each document must be valid on its own and the merge acyclic
            merge([Taxonomy.from_json(d) for d in docs])
        except (CycleError, TaxonomyError) as e:
            raise fail(400, str(e))
        try:
            store.get_project(pid)
        except NotFoundError as e:
            raise fail(404, str(e))
        lock = editing_lock(pid)
        try:
            return store.put_taxonomy(pid, docs)
        except ConflictError as e:
            raise fail(409, {"message": str(e), "references": e.references})
        finally:
            lock.release()

    @app.delete("/projects/{pid}/taxonomy/nodes/{node}", response_model=schemas.ProjectModel)
    def delete_taxonomy_node(pid: str, node: str):
        try:
            store.get_project(pid)
        except NotFoundError as e:
            raise fail(404, str(e))
        lock = editing_lock(pid)
        try:
            return store.delete_taxonomy_node(pid, node)
        except NotFoundError as e:
            raise fail(404, str(e))
        except ConflictError as e:
            raise fail(409, {"message": str(e), "references": e.references})
        finally:
            lock.release()

    # -- components ------------------------------------------------------

    @app.get("/projects/{pid}/components")
    def list_components(pid: str):
        try:
            project = store.get_project(pid)
            return {"components": store.component_docs(pid, project["catalog_rev"])}
        except NotFoundError as e:
            raise fail(404, str(e))

    @app.put(
        "/projects/{pid}/components/{cid}",
        response_model=schemas.ComponentPutResponseModel,
    )
    def put_component(pid: str, cid: str, body: dict):
        try:
            project = store.get_project(pid)
        except NotFoundError as e:
            raise fail(404, str(e))
        if body.get("id") != cid:
            raise fail(400, f"document id {body.get('id')!r} does not match path {cid!r}")
        try:
            validate_component_doc(body, "")
            spec = ComponentSpec.from_json(body)
        except SchemaError as e:
            raise fail(400, {"message": str(e), "pointer": e.pointer})
        taxonomies = tuple(
            Taxonomy.from_json(d) for d in store.taxonomy_docs(pid, project["taxonomy_rev"])
        )
        current = tuple(
            ComponentSpec.from_json(d)
            for d in store.component_docs(pid, project["catalog_rev"])
            if d["id"] != cid
        )
        prospective = Catalog(current + (spec,), taxonomies)
        diagnostics = validate_component(prospective, spec)
        errors = [d for d in diagnostics if d.severity == "error"]
        if errors:
            raise fail(400, [d.__dict__ for d in errors])
        lock = editing_lock(pid)
        try:
            project = store.put_component(pid, body)
        finally:
            lock.release()
        return {
            "project": project,
            "warnings": [d.__dict__ for d in diagnostics if d.severity == "warning"],
        }

    @app.delete("/projects/{pid}/components/{cid}", response_model=schemas.ProjectModel)
    def delete_component(pid: str, cid: str):
        try:
            store.get_project(pid)
        except NotFoundError as e:
            raise fail(404, str(e))
        lock = editing_lock(pid)
        try:
            return store.delete_component(pid, cid)
        except NotFoundError as e:
            raise fail(404, str(e))
        finally:
            lock.release()

    # -- requests ----------------------------------------------------------

    def run_solve(pid: str, request_doc: dict) -> dict:
        """Solve synchronously under the project lock (FIFO per project)."""
        lock = store.lock(pid)
        with lock:
            record = store.new_request(pid, request_doc)
            record["status"] = "solving"
            store.save_request(pid, record)
            try:
                catalog = store.catalog_at(pid, record["taxonomy_rev"], record["catalog_rev"])
                request = Request.from_json(request_doc)
                outcome = solve(catalog, request)
                store.save_results(pid, record["id"], outcome.to_json())
                record["status"] = "done"
                record["summary"] = {
                    "count": outcome.count.to_json(),
                    "returned": len(outcome.results),
                    "truncated": outcome.truncated,
                    "timings_ms": outcome.timings_ms,
                }
            except SynthError as e:
                record["status"] = "failed"
                record["error"] = str(e)
                store.save_request(pid, record)
                raise
            store.save_request(pid, record)
            return record

    @app.post(
        "/projects/{pid}/requests",
        response_model=schemas.RequestStatusModel,
        response_model_exclude_none=True,
        status_code=201,
    )
    def submit_request(pid: str, body: schemas.RequestModel):
        try:
            project = store.get_project(pid)
        except NotFoundError as e:
            raise fail(404, str(e))
        request_doc = body.to_request_doc()
        try:
            request = Request.from_json(request_doc)
            catalog = store.catalog_at(pid, project["taxonomy_rev"], project["catalog_rev"])
            validate_request(catalog, request)
        except (UnknownAtomError, RequestError) as e:
            raise fail(400, str(e))
        try:
            return run_solve(pid, request_doc)
        except ExpansionTooLargeError as e:
            raise fail(422, {"message": str(e), "cap": e.cap})
        except (UnknownAtomError, RequestError, ValidationError) as e:
            raise fail(400, str(e))

    @app.get("/projects/{pid}/requests")
    def list_requests(pid: str):
        try:
            docs = store.list_requests(pid)
        except NotFoundError as e:
            raise fail(404, str(e))
        return {"requests": [_status_doc(d) for d in docs]}

    @app.get(
        "/projects/{pid}/requests/{rid}",
        response_model=schemas.RequestStatusModel,
        response_model_exclude_none=True,
    )
    def get_request(pid: str, rid: str):
        try:
            return _status_doc(store.get_request(pid, rid))
        except NotFoundError as e:
            raise fail(404, str(e))

    def _status_doc(doc: dict) -> dict:
        return {
            "id": doc["id"],
            "status": doc["status"],
            "taxonomy_rev": doc["taxonomy_rev"],
            "catalog_rev": doc["catalog_rev"],
            "request": doc.get("request"),
            "summary": doc.get("summary"),
            "error": doc.get("error"),
        }

    @app.get(
        "/projects/{pid}/requests/{rid}/results",
        response_model=schemas.ResultsPageModel,
        response_model_exclude_none=True,
    )
    def list_results(
        pid: str,
        rid: str,
        page: int = Query(default=0, ge=0),
        page_size: int = Query(default=20, ge=1, le=500),
    ):
        try:
            doc = store.get_results(pid, rid)
        except NotFoundError as e:
            raise fail(404, str(e))
        rows = doc["results"][page * page_size : (page + 1) * page_size]
        return {
            "page": page,
            "page_size": page_size,
            "total": len(doc["results"]),
            "count": doc["count"],
            "truncated": doc["enumeration"]["truncated"],
            "rows": rows,
        }

    # -- assembly ----------------------------------------------------------

    def _assemble_result(pid: str, rid: str, index: int, format: str) -> tuple[str, bytes, str]:
        record = store.get_request(pid, rid)
        results = store.get_results(pid, rid)
        if index < 0 or index >= len(results["results"]):
            raise NotFoundError(f"result index {index} out of range")
        artifact = store.artifact_id(
            pid, rid, index, format, record["taxonomy_rev"], record["catalog_rev"]
        )
        media_type = MEDIA_TYPES[format]
        if store.has_artifact(artifact):
            data, _ = store.get_artifact(artifact)
            return artifact, data, media_type
        catalog = store.catalog_at(pid, record["taxonomy_rev"], record["catalog_rev"])
        term = Term.from_json(results["results"][index]["term"])
        repo = build_static_repository(catalog)
        scene = assemble(interpret(term, repo, catalog), catalog)
        data = export(scene, format, catalog)
        store.put_artifact(artifact, data, media_type)
        return artifact, data, media_type

    @app.post(
        "/projects/{pid}/requests/{rid}/results/{index}/assemble",
        response_model=schemas.ArtifactRefModel,
    )
    def assemble_result(pid: str, rid: str, index: int, format: str = "scene-json"):
        if format not in MEDIA_TYPES:
            raise fail(400, f"unknown format {format!r}")
        try:
            artifact, _, media_type = _assemble_result(pid, rid, index, format)
        except NotFoundError as e:
            raise fail(404, str(e))
        return {"artifact": artifact, "media_type": media_type}

    @app.post(
        "/projects/{pid}/requests/{rid}/assemble-all",
        response_model=schemas.BundleRefModel,
    )
    def assemble_all(pid: str, rid: str, format: str = "scene-json"):
        if format not in MEDIA_TYPES:
            raise fail(400, f"unknown format {format!r}")
        try:
            record = store.get_request(pid, rid)
            results = store.get_results(pid, rid)
        except NotFoundError as e:
            raise fail(404, str(e))
        bundle_id = store.artifact_id(
            pid, rid, "all", format, record["taxonomy_rev"], record["catalog_rev"]
        )
        if not store.has_artifact(bundle_id):
            suffix = "scene.json" if format == "scene-json" else "glb"
            buffer = io.BytesIO()
            with zipfile.ZipFile(buffer, "w", zipfile.ZIP_STORED) as zf:
                for index in range(len(results["results"])):
                    _, data, _ = _assemble_result(pid, rid, index, format)
                    info = zipfile.ZipInfo(f"{rid}/{index}.{suffix}", date_time=(1980, 1, 1, 0, 0, 0))
                    zf.writestr(info, data)
            store.put_artifact(bundle_id, buffer.getvalue(), "application/zip")
        return {
            "artifact": bundle_id,
            "media_type": "application/zip",
            "entries": len(results["results"]),
        }

    @app.get("/artifacts/{aid}")
    def get_artifact(aid: str):
        try:
            data, media_type = store.get_artifact(aid)
        except NotFoundError as e:
            raise fail(404, str(e))
        return Response(content=data, media_type=media_type)

    @app.get("/projects/{pid}/requests/{rid}/results.json")
    def raw_results(pid: str, rid: str):
        """The stored canonical results document, byte-identical to CLI output."""
        try:
            data = store.results_bytes(pid, rid)
        except NotFoundError as e:
            raise fail(404, str(e))
        return Response(content=data, media_type="application/json")

    ui_dir = os.environ.get(
        "MODSYNTH_UI_DIR",
        str(Path(__file__).resolve().parents[3] / "frontend" / "dist"),
    )
    if Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
