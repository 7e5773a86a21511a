"""Pydantic request/response models for the HTTP API."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field


class PropModel(BaseModel):
    key: str
    value: int


class AtomModel(BaseModel):
    name: str = ""
    prop: Optional[PropModel] = None


class AggregateModel(BaseModel):
    key: str
    op: Literal["eq", "le"]
    target: int = Field(ge=0)


class FilterModel(BaseModel):
    key: str
    op: Literal["eq", "le", "ge"]
    target: int


class RequestModel(BaseModel):
    goal: list[AtomModel]
    aggregates: list[AggregateModel] = []
    max_size: int = Field(default=10, ge=1)
    max_results: int = Field(default=100, ge=1)
    filters: list[FilterModel] = []

    def to_request_doc(self) -> dict:
        doc = {
            "goal": [a.model_dump(exclude_none=True) for a in self.goal],
            "aggregates": [a.model_dump() for a in self.aggregates],
            "max_size": self.max_size,
            "max_results": self.max_results,
        }
        if self.filters:
            doc["filters"] = [f.model_dump() for f in self.filters]
        return doc


class ProjectCreateModel(BaseModel):
    id: str = Field(min_length=1, pattern=r"^[A-Za-z0-9_-]+$")


class ProjectModel(BaseModel):
    id: str
    taxonomy_rev: int
    catalog_rev: int


class TaxonomyDocModel(BaseModel):
    name: str = ""
    nodes: list[str] = []
    edges: list[tuple[str, str]] = []


class TaxonomyPutModel(BaseModel):
    taxonomies: list[TaxonomyDocModel]


class CountModel(BaseModel):
    kind: Literal["finite", "infinite", "at_least"]
    value: Optional[int] = None


class SummaryModel(BaseModel):
    count: CountModel
    returned: int
    truncated: bool
    timings_ms: dict[str, float]


class RequestStatusModel(BaseModel):
    id: str
    status: Literal["queued", "solving", "done", "failed"]
    taxonomy_rev: int
    catalog_rev: int
    request: Optional[dict] = None
    summary: Optional[SummaryModel] = None
    error: Optional[str] = None


class BomModel(BaseModel):
    lines: dict[str, int]
    totals: dict[str, int]


class ResultRowModel(BaseModel):
    index: int
    term: dict
    size: int
    bom: BomModel


class ResultsPageModel(BaseModel):
    page: int
    page_size: int
    total: int
    count: CountModel
    truncated: bool
    rows: list[ResultRowModel]


class ArtifactRefModel(BaseModel):
    artifact: str
    media_type: str


class BundleRefModel(BaseModel):
    artifact: str
    media_type: str
    entries: int


class DiagnosticModel(BaseModel):
    severity: str
    component: str
    message: str


class ComponentPutResponseModel(BaseModel):
    project: ProjectModel
    warnings: list[DiagnosticModel] = []
