// Structural edits on taxonomy documents. Cycle/reference checks live in
// the service; the editor only reshapes the document and re-renders from
// whatever the service accepted.

import type { TaxonomyDoc } from "./types.js";

export function addNode(doc: TaxonomyDoc, node: string, parent?: string): TaxonomyDoc {
  if (doc.nodes.includes(node)) {
    return doc;
  }
  const edges: [string, string][] = parent ? [...doc.edges, [node, parent]] : [...doc.edges];
  return { ...doc, nodes: [...doc.nodes, node], edges };
}

export function deleteNode(doc: TaxonomyDoc, node: string): TaxonomyDoc {
  return {
    name: doc.name,
    nodes: doc.nodes.filter((n) => n !== node),
    edges: doc.edges.filter(([child, parent]) => child !== node && parent !== node),
  };
}

export function moveNode(doc: TaxonomyDoc, node: string, newParent?: string): TaxonomyDoc {
  const edges = doc.edges.filter(([child]) => child !== node);
  if (newParent) {
    edges.push([node, newParent]);
  }
  return { ...doc, edges };
}

export function parentsOf(doc: TaxonomyDoc, node: string): string[] {
  return doc.edges.filter(([child]) => child === node).map(([, parent]) => parent);
}

export function childrenOf(doc: TaxonomyDoc, node: string): string[] {
  return doc.edges.filter(([, parent]) => parent === node).map(([child]) => child);
}

export function roots(doc: TaxonomyDoc): string[] {
  const withParents = new Set(doc.edges.map(([child]) => child));
  return doc.nodes.filter((n) => !withParents.has(n));
}

export interface TreeRow {
  node: string;
  depth: number;
  extraParents: string[];
}

// Depth-first rows for rendering; DAG nodes appear under their first parent
// and list the remaining parents inline.
export function treeRows(doc: TaxonomyDoc): TreeRow[] {
  const rows: TreeRow[] = [];
  const seen = new Set<string>();
  const visit = (node: string, depth: number) => {
    if (seen.has(node)) {
      return;
    }
    seen.add(node);
    rows.push({ node, depth, extraParents: parentsOf(doc, node).slice(1) });
    for (const child of childrenOf(doc, node).sort()) {
      visit(child, depth + 1);
    }
  };
  for (const root of roots(doc).sort()) {
    visit(root, 0);
  }
  for (const node of [...doc.nodes].sort()) {
    visit(node, 0); // anything left over (only possible mid-edit)
  }
  return rows;
}

export function renderTaxonomyHtml(doc: TaxonomyDoc): string {
  const rows = treeRows(doc);
  const items = rows.map((row) => {
    const pad = "&nbsp;".repeat(row.depth * 4);
    const extra = row.extraParents.length
      ? ` <span class="muted">(also under ${row.extraParents.join(", ")})</span>`
      : "";
    return (
      `<li data-node="${row.node}">${pad}<span class="node">${row.node}</span>${extra}` +
      ` <button data-action="add-child" data-node="${row.node}">+child</button>` +
      ` <button data-action="delete" data-node="${row.node}">delete</button></li>`
    );
  });
  return `<ul class="taxonomy">${items.join("")}</ul>`;
}
