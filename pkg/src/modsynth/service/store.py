"""File-backed document store for projects, revisions, requests and artifacts.

Layout under the storage root:

    projects/<pid>/project.json
    projects/<pid>/taxonomy/<rev>.json      taxonomy document sets
    projects/<pid>/catalog/<rev>.json       component snapshots
    projects/<pid>/requests/<rid>/request.json
    projects/<pid>/requests/<rid>/results.json
    artifacts/<aid>.bin, artifacts/<aid>.meta.json

Every revision is immutable once written; requests pin the revisions they
were solved against so stored results stay reproducible.
"""

from __future__ import annotations

import hashlib
import threading
from pathlib import Path

from ..catalog import Catalog, ComponentSpec
from ..jsonio import canonical_dumps, load_json
from ..taxonomy import Taxonomy
from ..types import SynthError


class NotFoundError(SynthError):
    pass


class ConflictError(SynthError):
    def __init__(self, message: str, references: list[str] | None = None):
        super().__init__(message)
        self.references = references or []


class ProjectStore:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        (self.root / "projects").mkdir(parents=True, exist_ok=True)
        (self.root / "artifacts").mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    def lock(self, project_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks.setdefault(project_id, threading.Lock())

    # -- projects ----------------------------------------------------------

    def _project_dir(self, project_id: str) -> Path:
        return self.root / "projects" / project_id

    def create_project(self, project_id: str) -> dict:
        pdir = self._project_dir(project_id)
        if pdir.exists():
            raise ConflictError(f"project {project_id!r} already exists")
        (pdir / "taxonomy").mkdir(parents=True)
        (pdir / "catalog").mkdir()
        (pdir / "requests").mkdir()
        doc = {"id": project_id, "taxonomy_rev": 0, "catalog_rev": 0, "request_counter": 0}
        (pdir / "taxonomy" / "0.json").write_text(canonical_dumps({"taxonomies": []}))
        (pdir / "catalog" / "0.json").write_text(canonical_dumps({"components": []}))
        self._write_project(doc)
        return doc

    def _write_project(self, doc: dict) -> None:
        (self._project_dir(doc["id"]) / "project.json").write_text(canonical_dumps(doc))

    def get_project(self, project_id: str) -> dict:
        path = self._project_dir(project_id) / "project.json"
        if not path.exists():
            raise NotFoundError(f"project {project_id!r} not found")
        return load_json(path)

    # -- revisions ---------------------------------------------------------

    def taxonomy_docs(self, project_id: str, rev: int) -> list[dict]:
        path = self._project_dir(project_id) / "taxonomy" / f"{rev}.json"
        if not path.exists():
            raise NotFoundError(f"taxonomy revision {rev} not found")
        return load_json(path)["taxonomies"]

    def component_docs(self, project_id: str, rev: int) -> list[dict]:
        path = self._project_dir(project_id) / "catalog" / f"{rev}.json"
        if not path.exists():
            raise NotFoundError(f"catalog revision {rev} not found")
        return load_json(path)["components"]

    def put_taxonomy(self, project_id: str, docs: list[dict]) -> dict:
        project = self.get_project(project_id)
        referenced = self._referenced_atoms(project_id, project["catalog_rev"])
        merged_nodes: set[str] = set()
        for doc in docs:
            merged_nodes |= set(doc.get("nodes", []))
        missing = sorted(
            {atom for atom, _ in referenced.items() if atom not in merged_nodes}
        )
        if missing:
            refs = sorted({cid for atom in missing for cid in referenced[atom]})
            raise ConflictError(
                f"taxonomy update removes atoms still referenced by components: {missing}",
                refs,
            )
        rev = project["taxonomy_rev"] + 1
        path = self._project_dir(project_id) / "taxonomy" / f"{rev}.json"
        path.write_text(canonical_dumps({"taxonomies": docs}))
        project["taxonomy_rev"] = rev
        self._write_project(project)
        return project

    def delete_taxonomy_node(self, project_id: str, node: str) -> dict:
        project = self.get_project(project_id)
        docs = self.taxonomy_docs(project_id, project["taxonomy_rev"])
        if not any(node in doc.get("nodes", []) for doc in docs):
            raise NotFoundError(f"taxonomy node {node!r} not found")
        new_docs = []
        for doc in docs:
            new_docs.append(
                {
                    "name": doc.get("name", ""),
                    "nodes": [n for n in doc.get("nodes", []) if n != node],
                    "edges": [
                        e for e in doc.get("edges", []) if node not in (e[0], e[1])
                    ],
                }
            )
        return self.put_taxonomy(project_id, new_docs)

    def _referenced_atoms(self, project_id: str, catalog_rev: int) -> dict[str, list[str]]:
        """Plain atom name -> component ids that use it."""
        out: dict[str, list[str]] = {}
        for doc in self.component_docs(project_id, catalog_rev):
            spec = ComponentSpec.from_json(doc)
            atom_sets = [spec.inherent]
            for point in spec.connection_points:
                if point.required is not None:
                    atom_sets.append(point.required)
                if point.provided is not None:
                    atom_sets.append(point.provided)
            for atoms in atom_sets:
                for atom in atoms:
                    if not atom.is_property:
                        out.setdefault(atom.name, []).append(spec.id)
        return out

    def put_component(self, project_id: str, doc: dict) -> dict:
        project = self.get_project(project_id)
        current = self.component_docs(project_id, project["catalog_rev"])
        replaced = [c for c in current if c["id"] != doc["id"]]
        replaced.append(doc)
        replaced.sort(key=lambda c: c["id"])
        rev = project["catalog_rev"] + 1
        path = self._project_dir(project_id) / "catalog" / f"{rev}.json"
        path.write_text(canonical_dumps({"components": replaced}))
        project["catalog_rev"] = rev
        self._write_project(project)
        return project

    def delete_component(self, project_id: str, component_id: str) -> dict:
        project = self.get_project(project_id)
        current = self.component_docs(project_id, project["catalog_rev"])
        if not any(c["id"] == component_id for c in current):
            raise NotFoundError(f"component {component_id!r} not found")
        remaining = [c for c in current if c["id"] != component_id]
        rev = project["catalog_rev"] + 1
        path = self._project_dir(project_id) / "catalog" / f"{rev}.json"
        path.write_text(canonical_dumps({"components": remaining}))
        project["catalog_rev"] = rev
        self._write_project(project)
        return project

    def catalog_at(self, project_id: str, taxonomy_rev: int, catalog_rev: int) -> Catalog:
        taxonomies = tuple(
            Taxonomy.from_json(doc) for doc in self.taxonomy_docs(project_id, taxonomy_rev)
        )
        components = tuple(
            ComponentSpec.from_json(doc)
            for doc in self.component_docs(project_id, catalog_rev)
        )
        return Catalog(components, taxonomies)

    # -- requests ----------------------------------------------------------

    def _request_dir(self, project_id: str, request_id: str) -> Path:
        return self._project_dir(project_id) / "requests" / request_id

    def new_request(self, project_id: str, request_doc: dict) -> dict:
        project = self.get_project(project_id)
        project["request_counter"] += 1
        request_id = f"r{project['request_counter']}"
        rdir = self._request_dir(project_id, request_id)
        rdir.mkdir(parents=True)
        doc = {
            "id": request_id,
            "request": request_doc,
            "status": "queued",
            "taxonomy_rev": project["taxonomy_rev"],
            "catalog_rev": project["catalog_rev"],
            "summary": None,
        }
        self.save_request(project_id, doc)
        self._write_project(project)
        return doc

    def save_request(self, project_id: str, doc: dict) -> None:
        path = self._request_dir(project_id, doc["id"]) / "request.json"
        path.write_text(canonical_dumps(doc))

    def get_request(self, project_id: str, request_id: str) -> dict:
        path = self._request_dir(project_id, request_id) / "request.json"
        if not path.exists():
            raise NotFoundError(f"request {request_id!r} not found")
        return load_json(path)

    def list_requests(self, project_id: str) -> list[dict]:
        rdir = self._project_dir(project_id) / "requests"
        if not rdir.exists():
            raise NotFoundError(f"project {project_id!r} not found")
        docs = [load_json(p / "request.json") for p in rdir.iterdir() if p.is_dir()]
        docs.sort(key=lambda d: int(d["id"][1:]))
        return docs

    def save_results(self, project_id: str, request_id: str, results_doc: dict) -> None:
        path = self._request_dir(project_id, request_id) / "results.json"
        path.write_text(canonical_dumps(results_doc))

    def results_bytes(self, project_id: str, request_id: str) -> bytes:
        path = self._request_dir(project_id, request_id) / "results.json"
        if not path.exists():
            raise NotFoundError(f"results for request {request_id!r} not found")
        return path.read_bytes()

    def get_results(self, project_id: str, request_id: str) -> dict:
        path = self._request_dir(project_id, request_id) / "results.json"
        if not path.exists():
            raise NotFoundError(f"results for request {request_id!r} not found")
        return load_json(path)

    # -- artifacts ---------------------------------------------------------

    def artifact_id(self, *parts) -> str:
        digest = hashlib.sha256("/".join(str(p) for p in parts).encode()).hexdigest()
        return digest[:24]

    def put_artifact(self, artifact_id: str, data: bytes, media_type: str) -> None:
        (self.root / "artifacts" / f"{artifact_id}.bin").write_bytes(data)
        (self.root / "artifacts" / f"{artifact_id}.meta.json").write_text(
            canonical_dumps({"media_type": media_type})
        )

    def has_artifact(self, artifact_id: str) -> bool:
        return (self.root / "artifacts" / f"{artifact_id}.bin").exists()

    def get_artifact(self, artifact_id: str) -> tuple[bytes, str]:
        path = self.root / "artifacts" / f"{artifact_id}.bin"
        if not path.exists():
            raise NotFoundError(f"artifact {artifact_id!r} not found")
        meta = load_json(self.root / "artifacts" / f"{artifact_id}.meta.json")
        return path.read_bytes(), meta["media_type"]
