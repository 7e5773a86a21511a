// Single-page wiring for the designer loop: set up knowledge, pose a
// request, browse results, preview assemblies, refine. All state is
// authoritative from the service; every mutation re-fetches.

import { api, ApiError } from "./api.js";
import { buildComponentDoc, emptyPoint, formFromDoc, validateForm, ComponentForm } from "./component_editor.js";
import { drawScene } from "./preview.js";
import {
  RequestDraft,
  buildRequestDoc,
  canSubmit,
  draftFromRequestDoc,
  emptyDraft,
  serializeRequest,
  toggleGoalAtom,
} from "./request_builder.js";
import { defaultView, renderResultsTable, TableView } from "./results_table.js";
import { addNode, renderTaxonomyHtml } from "./taxonomy_editor.js";
import type { RequestStatus, ResultsPage, TaxonomyDoc } from "./types.js";

interface AppState {
  projectId: string | null;
  taxonomies: TaxonomyDoc[];
  draft: RequestDraft;
  requests: RequestStatus[];
  currentRequest: string | null;
  page: number;
  pageSize: number;
  resultsPage: ResultsPage | null;
  view: TableView;
  componentForm: ComponentForm;
}

const state: AppState = {
  projectId: null,
  taxonomies: [],
  draft: emptyDraft(),
  requests: [],
  currentRequest: null,
  page: 0,
  pageSize: 20,
  resultsPage: null,
  view: defaultView(),
  componentForm: { id: "", inherent: [], metadata: {}, points: [emptyPoint("p0")] },
};

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

function showError(target: string, err: unknown): void {
  const box = el(target);
  box.textContent = err instanceof ApiError ? `error ${err.status}: ${err.message}` : String(err);
  box.classList.add("error");
}

function clearError(target: string): void {
  const box = el(target);
  box.textContent = "";
  box.classList.remove("error");
}

async function refreshProject(): Promise<void> {
  if (!state.projectId) {
    return;
  }
  const [taxonomy, requests] = await Promise.all([
    api.getTaxonomy(state.projectId),
    api.listRequests(state.projectId),
  ]);
  state.taxonomies = taxonomy.taxonomies;
  state.requests = requests.requests;
  renderTaxonomy();
  renderGoalPicker();
  renderRequests();
}

function allAtomNames(): string[] {
  const names = new Set<string>();
  for (const doc of state.taxonomies) {
    for (const node of doc.nodes) {
      names.add(node);
    }
  }
  return [...names].sort();
}

// -- taxonomy section ------------------------------------------------------

function renderTaxonomy(): void {
  const host = el("taxonomy-tree");
  if (state.taxonomies.length === 0) {
    host.innerHTML = "<p class=\"muted\">no taxonomy yet</p>";
    return;
  }
  host.innerHTML = state.taxonomies
    .map((doc) => `<h4>${doc.name || "(unnamed)"}</h4>` + renderTaxonomyHtml(doc))
    .join("");
}

async function mutateTaxonomy(mutate: (docs: TaxonomyDoc[]) => TaxonomyDoc[]): Promise<void> {
  if (!state.projectId) {
    return;
  }
  clearError("taxonomy-error");
  try {
    await api.putTaxonomy(state.projectId, mutate(state.taxonomies));
  } catch (err) {
    showError("taxonomy-error", err);
  }
  await refreshProject(); // rejected edits leave the view unchanged
}

// -- component section -----------------------------------------------------

function renderComponentForm(): void {
  const form = state.componentForm;
  el<HTMLInputElement>("component-id").value = form.id;
  el<HTMLInputElement>("component-inherent").value = form.inherent.join(" ");
  el<HTMLInputElement>("component-metadata").value = Object.entries(form.metadata)
    .map(([k, v]) => `${k}=${v}`)
    .join(" ");
  const host = el("component-points");
  host.innerHTML = form.points
    .map((p, i) => {
      const atomsList = allAtomNames().join(", ");
      return (
        `<fieldset data-point="${i}"><legend>point ${p.id}</legend>` +
        `<label>id <input data-field="id" data-point="${i}" value="${p.id}"></label>` +
        `<label>joint <select data-field="joint" data-point="${i}">` +
        `<option${p.joint === "rigid" ? " selected" : ""}>rigid</option>` +
        `<option${p.joint === "revolute" ? " selected" : ""}>revolute</option></select></label>` +
        `<label>origin mm <input data-field="origin" data-point="${i}" value="${p.origin.join(",")}"></label>` +
        `<label>yaw&deg; <input data-field="yaw" data-point="${i}" value="${p.yawDegrees}" size="4"></label>` +
        `<label>z down <input type="checkbox" data-field="zdown" data-point="${i}"${p.zDown ? " checked" : ""}></label>` +
        `<label>required <input data-field="required" data-point="${i}" value="${p.required.join(" ")}" placeholder="${atomsList}"></label>` +
        `<label>provided <input data-field="provided" data-point="${i}" value="${p.provided.join(" ")}"></label>` +
        `</fieldset>`
      );
    })
    .join("");
}

function readComponentForm(): void {
  const form = state.componentForm;
  form.id = el<HTMLInputElement>("component-id").value.trim();
  form.inherent = el<HTMLInputElement>("component-inherent").value.split(/\s+/).filter(Boolean);
  form.metadata = {};
  for (const pair of el<HTMLInputElement>("component-metadata").value.split(/\s+/)) {
    const [k, v] = pair.split("=");
    if (k && v !== undefined && !Number.isNaN(parseInt(v, 10))) {
      form.metadata[k] = parseInt(v, 10);
    }
  }
  document.querySelectorAll<HTMLElement>("#component-points [data-field]").forEach((input) => {
    const index = parseInt(input.dataset.point ?? "0", 10);
    const point = form.points[index];
    if (!point) {
      return;
    }
    const value = (input as HTMLInputElement).value;
    switch (input.dataset.field) {
      case "id":
        point.id = value.trim();
        break;
      case "joint":
        point.joint = value === "revolute" ? "revolute" : "rigid";
        break;
      case "origin": {
        const parts = value.split(",").map((v) => parseFloat(v.trim()));
        if (parts.length === 3 && parts.every((v) => Number.isFinite(v))) {
          point.origin = parts as [number, number, number];
        }
        break;
      }
      case "yaw":
        point.yawDegrees = parseFloat(value) || 0;
        break;
      case "zdown":
        point.zDown = (input as HTMLInputElement).checked;
        break;
      case "required":
        point.required = value.split(/\s+/).filter(Boolean);
        break;
      case "provided":
        point.provided = value.split(/\s+/).filter(Boolean);
        break;
    }
  });
}

async function saveComponent(): Promise<void> {
  if (!state.projectId) {
    return;
  }
  readComponentForm();
  clearError("component-error");
  const problems = validateForm(state.componentForm);
  if (problems.length > 0) {
    showError("component-error", problems.join("; "));
    return;
  }
  try {
    const result = await api.putComponent(state.projectId, buildComponentDoc(state.componentForm));
    if (result.warnings.length > 0) {
      el("component-error").textContent = `saved with warnings: ${JSON.stringify(result.warnings)}`;
    }
    await renderComponentList();
  } catch (err) {
    showError("component-error", err);
  }
}

async function renderComponentList(): Promise<void> {
  if (!state.projectId) {
    return;
  }
  const { components } = await api.listComponents(state.projectId);
  el("component-list").innerHTML = components
    .map(
      (c) =>
        `<li><code>${c.id}</code> (${c.connection_points.length} points)` +
        ` <button data-action="edit-component" data-cid="${c.id}">edit</button></li>`,
    )
    .join("");
  el("component-list").querySelectorAll("button").forEach((button) => {
    button.addEventListener("click", async () => {
      const cid = (button as HTMLElement).dataset.cid!;
      const { components } = await api.listComponents(state.projectId!);
      const doc = components.find((c) => c.id === cid);
      if (doc) {
        state.componentForm = formFromDoc(doc);
        renderComponentForm();
      }
    });
  });
}

// -- request builder -------------------------------------------------------

function renderGoalPicker(): void {
  const host = el("goal-picker");
  host.innerHTML = allAtomNames()
    .map((name) => {
      const on = state.draft.goalAtoms.includes(name);
      return `<button class="atom${on ? " on" : ""}" data-atom="${name}">${name}</button>`;
    })
    .join("");
  host.querySelectorAll("button").forEach((button) => {
    button.addEventListener("click", () => {
      state.draft = toggleGoalAtom(state.draft, (button as HTMLElement).dataset.atom!);
      renderGoalPicker();
      renderDraftPreview();
    });
  });
  renderDraftPreview();
}

function readDraftBounds(): void {
  state.draft.maxSize = parseInt(el<HTMLInputElement>("draft-max-size").value, 10) || 10;
  state.draft.maxResults = parseInt(el<HTMLInputElement>("draft-max-results").value, 10) || 100;
}

function renderAggregateRows(): void {
  el("aggregate-rows").innerHTML = state.draft.aggregates
    .map(
      (a, i) =>
        `<li>${a.key} ${a.op === "eq" ? "=" : "&le;"} ${a.target}` +
        ` <button data-action="drop-aggregate" data-i="${i}">x</button></li>`,
    )
    .join("");
  document.querySelectorAll("#aggregate-rows button").forEach((button) => {
    button.addEventListener("click", () => {
      const i = parseInt((button as HTMLElement).dataset.i!, 10);
      state.draft.aggregates.splice(i, 1);
      renderAggregateRows();
      renderDraftPreview();
    });
  });
}

function renderDraftPreview(): void {
  readDraftBounds();
  el("draft-json").textContent = serializeRequest(state.draft);
  el<HTMLButtonElement>("submit-request").disabled = !canSubmit(state.draft);
}

async function submitDraft(): Promise<void> {
  if (!state.projectId || !canSubmit(state.draft)) {
    return;
  }
  readDraftBounds();
  clearError("request-error");
  try {
    const status = await api.submitRequest(state.projectId, buildRequestDoc(state.draft));
    state.currentRequest = status.id;
    state.page = 0;
    await refreshProject();
    await loadResults();
  } catch (err) {
    showError("request-error", err);
  }
}

// -- requests + results ----------------------------------------------------

function renderRequests(): void {
  el("request-list").innerHTML = state.requests
    .map((r) => {
      const summary = r.summary
        ? `${describeSummaryCount(r)} &middot; ${r.summary.returned} stored`
        : r.error ?? "";
      const current = r.id === state.currentRequest ? " class=\"current\"" : "";
      return (
        `<li${current}><code>${r.id}</code> [${r.status}] ${summary}` +
        ` <button data-action="open-request" data-rid="${r.id}">open</button>` +
        ` <button data-action="refine-request" data-rid="${r.id}">refine</button></li>`
      );
    })
    .join("");
  el("request-list").querySelectorAll("button").forEach((button) => {
    const rid = (button as HTMLElement).dataset.rid!;
    if ((button as HTMLElement).dataset.action === "open-request") {
      button.addEventListener("click", async () => {
        state.currentRequest = rid;
        state.page = 0;
        await loadResults();
        renderRequests();
      });
    } else {
      button.addEventListener("click", async () => {
        // clone a previous request into the draft (the refine loop edge)
        const record = await api.getRequest(state.projectId!, rid);
        if (record.request) {
          state.draft = draftFromRequestDoc(record.request);
          renderGoalPicker();
          renderAggregateRows();
          el<HTMLInputElement>("draft-max-size").value = String(state.draft.maxSize);
          el<HTMLInputElement>("draft-max-results").value = String(state.draft.maxResults);
          renderDraftPreview();
        }
      });
    }
  });
}

function describeSummaryCount(r: RequestStatus): string {
  const c = r.summary!.count;
  if (c.kind === "infinite") {
    return `count: Infinite (showing ${r.summary!.returned} of bounded enumeration)`;
  }
  if (c.kind === "at_least") {
    return `count: at least ${c.value}`;
  }
  return `count: ${c.value}`;
}

async function loadResults(): Promise<void> {
  if (!state.projectId || !state.currentRequest) {
    return;
  }
  clearError("results-error");
  try {
    state.resultsPage = await api.listResults(
      state.projectId, state.currentRequest, state.page, state.pageSize,
    );
    renderResults();
  } catch (err) {
    showError("results-error", err);
  }
}

function renderResults(): void {
  if (!state.resultsPage) {
    return;
  }
  el("results-host").innerHTML = renderResultsTable(state.resultsPage, state.view);
  el("results-host").querySelectorAll("th[data-sort]").forEach((th) => {
    th.addEventListener("click", () => {
      const key = (th as HTMLElement).dataset.sort!;
      if (state.view.sortKey === key) {
        state.view.descending = !state.view.descending;
      } else {
        state.view = { ...state.view, sortKey: key, descending: false };
      }
      renderResults();
    });
  });
  el("results-host").querySelectorAll("button[data-action=assemble]").forEach((button) => {
    button.addEventListener("click", async () => {
      const index = parseInt((button as HTMLElement).dataset.index!, 10);
      await previewResult(index);
    });
  });
  const prev = el("results-host").querySelector("button[data-action=prev-page]");
  const next = el("results-host").querySelector("button[data-action=next-page]");
  prev?.addEventListener("click", async () => {
    if (state.page > 0) {
      state.page -= 1;
      await loadResults();
    }
  });
  next?.addEventListener("click", async () => {
    if ((state.page + 1) * state.pageSize < (state.resultsPage?.total ?? 0)) {
      state.page += 1;
      await loadResults();
    }
  });
}

async function previewResult(index: number): Promise<void> {
  if (!state.projectId || !state.currentRequest) {
    return;
  }
  clearError("preview-error");
  try {
    const sceneRef = await api.assembleResult(state.projectId, state.currentRequest, index);
    const scene = await api.fetchScene(sceneRef.artifact);
    drawScene(el<HTMLCanvasElement>("preview-canvas"), scene);
    const glb = await api.assembleResult(state.projectId, state.currentRequest, index, "gltf");
    const link = el<HTMLAnchorElement>("preview-gltf");
    link.href = `/artifacts/${glb.artifact}`;
    link.textContent = `download glTF for result ${index}`;
    el("preview-meta").textContent =
      `${scene.instances.length} instances, ${scene.links.length} kinematic links, ` +
      `${Object.keys(scene.groups).length} repeated groups`;
  } catch (err) {
    showError("preview-error", err);
  }
}

// -- bootstrap ---------------------------------------------------------------

function wire(): void {
  el("project-open").addEventListener("click", async () => {
    const id = el<HTMLInputElement>("project-id").value.trim();
    if (!id) {
      return;
    }
    clearError("project-error");
    try {
      try {
        await api.getProject(id);
      } catch (err) {
        if (err instanceof ApiError && err.status === 404) {
          await api.createProject(id);
        } else {
          throw err;
        }
      }
      state.projectId = id;
      el("workspace").classList.remove("hidden");
      await refreshProject();
      await renderComponentList();
    } catch (err) {
      showError("project-error", err);
    }
  });

  el("taxonomy-add-root").addEventListener("click", async () => {
    const name = el<HTMLInputElement>("taxonomy-new-node").value.trim();
    if (!name) {
      return;
    }
    await mutateTaxonomy((docs) => {
      if (docs.length === 0) {
        return [{ name: "main", nodes: [name], edges: [] }];
      }
      return [addNode(docs[0], name), ...docs.slice(1)];
    });
  });

  el("taxonomy-tree").addEventListener("click", async (event) => {
    const target = event.target as HTMLElement;
    const node = target.dataset.node;
    if (!node) {
      return;
    }
    if (target.dataset.action === "delete") {
      clearError("taxonomy-error");
      try {
        await api.deleteTaxonomyNode(state.projectId!, node);
      } catch (err) {
        showError("taxonomy-error", err);
      }
      await refreshProject();
    } else if (target.dataset.action === "add-child") {
      const name = el<HTMLInputElement>("taxonomy-new-node").value.trim();
      if (!name) {
        showError("taxonomy-error", "type the new node name first");
        return;
      }
      await mutateTaxonomy((docs) => [addNode(docs[0], name, node), ...docs.slice(1)]);
    }
  });

  el("component-add-point").addEventListener("click", () => {
    readComponentForm();
    state.componentForm.points.push(emptyPoint(`p${state.componentForm.points.length}`));
    renderComponentForm();
  });
  el("component-save").addEventListener("click", saveComponent);
  el("component-new").addEventListener("click", () => {
    state.componentForm = { id: "", inherent: [], metadata: {}, points: [emptyPoint("p0")] };
    renderComponentForm();
  });

  el("aggregate-add").addEventListener("click", () => {
    const key = el<HTMLInputElement>("aggregate-key").value.trim();
    const op = el<HTMLSelectElement>("aggregate-op").value === "le" ? "le" : "eq";
    const target = parseInt(el<HTMLInputElement>("aggregate-target").value, 10);
    if (!key || Number.isNaN(target) || target < 0) {
      return;
    }
    state.draft.aggregates.push({ key, op, target });
    renderAggregateRows();
    renderDraftPreview();
  });
  el("draft-max-size").addEventListener("input", renderDraftPreview);
  el("draft-max-results").addEventListener("input", renderDraftPreview);
  el("submit-request").addEventListener("click", submitDraft);

  renderComponentForm();
  renderAggregateRows();
  renderDraftPreview();
}

if (typeof document !== "undefined" && document.getElementById("project-open")) {
  wire();
}
