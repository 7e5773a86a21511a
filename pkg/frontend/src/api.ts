// Thin REST client; every domain answer comes from the service.

import type {
  ComponentDoc,
  Project,
  RequestDoc,
  RequestStatus,
  ResultsPage,
  SceneDoc,
  TaxonomyDoc,
} from "./types.js";

export class ApiError extends Error {
  readonly status: number;
  readonly detail: unknown;

  constructor(status: number, detail: unknown) {
    super(typeof detail === "string" ? detail : JSON.stringify(detail));
    this.status = status;
    this.detail = detail;
  }
}

async function call<T>(method: string, path: string, body?: unknown): Promise<T> {
  const response = await fetch(path, {
    method,
    headers: body === undefined ? {} : { "Content-Type": "application/json" },
    body: body === undefined ? undefined : JSON.stringify(body),
  });
  const text = await response.text();
  const payload = text ? JSON.parse(text) : null;
  if (!response.ok) {
    throw new ApiError(response.status, payload?.detail ?? payload);
  }
  return payload as T;
}

export const api = {
  createProject: (id: string) => call<Project>("POST", "/projects", { id }),
  getProject: (id: string) => call<Project>("GET", `/projects/${id}`),
  getTaxonomy: (pid: string) =>
    call<{ taxonomies: TaxonomyDoc[] }>("GET", `/projects/${pid}/taxonomy`),
  putTaxonomy: (pid: string, taxonomies: TaxonomyDoc[]) =>
    call<Project>("PUT", `/projects/${pid}/taxonomy`, { taxonomies }),
  deleteTaxonomyNode: (pid: string, node: string) =>
    call<Project>("DELETE", `/projects/${pid}/taxonomy/nodes/${encodeURIComponent(node)}`),
  listComponents: (pid: string) =>
    call<{ components: ComponentDoc[] }>("GET", `/projects/${pid}/components`),
  putComponent: (pid: string, doc: ComponentDoc) =>
    call<{ project: Project; warnings: unknown[] }>(
      "PUT", `/projects/${pid}/components/${encodeURIComponent(doc.id)}`, doc,
    ),
  deleteComponent: (pid: string, cid: string) =>
    call<Project>("DELETE", `/projects/${pid}/components/${encodeURIComponent(cid)}`),
  submitRequest: (pid: string, doc: RequestDoc) =>
    call<RequestStatus>("POST", `/projects/${pid}/requests`, doc),
  listRequests: (pid: string) =>
    call<{ requests: RequestStatus[] }>("GET", `/projects/${pid}/requests`),
  getRequest: (pid: string, rid: string) =>
    call<RequestStatus>("GET", `/projects/${pid}/requests/${rid}`),
  listResults: (pid: string, rid: string, page: number, pageSize: number) =>
    call<ResultsPage>(
      "GET",
      `/projects/${pid}/requests/${rid}/results?page=${page}&page_size=${pageSize}`,
    ),
  assembleResult: (pid: string, rid: string, index: number, format = "scene-json") =>
    call<{ artifact: string; media_type: string }>(
      "POST",
      `/projects/${pid}/requests/${rid}/results/${index}/assemble?format=${format}`,
    ),
  fetchScene: async (artifact: string): Promise<SceneDoc> => {
    const response = await fetch(`/artifacts/${artifact}`);
    if (!response.ok) {
      throw new ApiError(response.status, await response.text());
    }
    return (await response.json()) as SceneDoc;
  },
};
