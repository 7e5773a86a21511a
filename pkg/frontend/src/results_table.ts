// Results table: renders exactly what list_results returned. Sorting and
// filtering only reorder/hide the fetched rows; no BOM or count is ever
// recomputed client-side.

import type { Count, ResultRow, ResultsPage, TermDoc } from "./types.js";

export function describeCount(count: Count, returned: number, truncated: boolean): string {
  if (count.kind === "infinite") {
    return `count: Infinite (showing ${returned} of bounded enumeration)`;
  }
  if (count.kind === "at_least") {
    return `count: at least ${count.value} (showing ${returned})`;
  }
  return truncated
    ? `count: ${count.value} (showing first ${returned})`
    : `count: ${count.value}`;
}

export function bomColumns(rows: ResultRow[]): { lines: string[]; totals: string[] } {
  const lines = new Set<string>();
  const totals = new Set<string>();
  for (const row of rows) {
    for (const key of Object.keys(row.bom.lines)) {
      lines.add(key);
    }
    for (const key of Object.keys(row.bom.totals)) {
      totals.add(key);
    }
  }
  return { lines: [...lines].sort(), totals: [...totals].sort() };
}

export function termLabel(term: TermDoc): string {
  // component of the root combinator plus the instance count
  return term.combinator.split(".")[0];
}

export interface TableView {
  sortKey: string | null; // "size" | "total:<key>"
  descending: boolean;
  totalFilter: { key: string; max: number } | null;
}

export function defaultView(): TableView {
  return { sortKey: null, descending: false, totalFilter: null };
}

export function applyView(rows: ResultRow[], view: TableView): ResultRow[] {
  let out = [...rows];
  if (view.totalFilter) {
    const { key, max } = view.totalFilter;
    out = out.filter((r) => (r.bom.totals[key] ?? 0) <= max);
  }
  if (view.sortKey === "size") {
    out.sort((a, b) => a.size - b.size);
  } else if (view.sortKey?.startsWith("total:")) {
    const key = view.sortKey.slice(6);
    out.sort((a, b) => (a.bom.totals[key] ?? 0) - (b.bom.totals[key] ?? 0));
  }
  if (view.descending) {
    out.reverse();
  }
  return out;
}

export function renderResultsTable(page: ResultsPage, view: TableView): string {
  const rows = applyView(page.rows, view);
  const { lines, totals } = bomColumns(page.rows);
  const head =
    "<tr><th>#</th><th data-sort=\"size\">size</th>" +
    lines.map((c) => `<th>${c}</th>`).join("") +
    totals.map((c) => `<th data-sort="total:${c}">${c}</th>`).join("") +
    "<th></th></tr>";
  const body = rows
    .map((row) => {
      const cells = [
        `<td>${row.index}</td>`,
        `<td>${row.size}</td>`,
        ...lines.map((c) => `<td>${row.bom.lines[c] ?? 0}</td>`),
        ...totals.map((c) => `<td>${row.bom.totals[c] ?? 0}</td>`),
        `<td><button data-action="assemble" data-index="${row.index}">assemble</button></td>`,
      ];
      return `<tr data-index="${row.index}" title="${termLabel(row.term)}">${cells.join("")}</tr>`;
    })
    .join("");
  const note = describeCount(page.count, page.total, page.truncated);
  return (
    `<p class="count-note">${note}</p>` +
    `<table class="results"><thead>${head}</thead><tbody>${body}</tbody></table>` +
    `<p class="paging">page ${page.page} &middot; ${page.rows.length} of ${page.total} rows` +
    ` <button data-action="prev-page">prev</button>` +
    ` <button data-action="next-page">next</button></p>`
  );
}
