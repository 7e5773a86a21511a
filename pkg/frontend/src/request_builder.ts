// Request drafts: built by picking goal atoms from the taxonomy tree and
// adding aggregate/filter rows. Serialization must match a CLI-authored
// request byte for byte, so all domain meaning stays server-side.

import { canonicalJson } from "./canonical.js";
import type { Aggregate, Atom, BomFilter, RequestDoc } from "./types.js";

export interface RequestDraft {
  goalAtoms: string[];
  aggregates: Aggregate[];
  maxSize: number;
  maxResults: number;
  filters: BomFilter[];
}

export function emptyDraft(): RequestDraft {
  return { goalAtoms: [], aggregates: [], maxSize: 10, maxResults: 100, filters: [] };
}

export function canSubmit(draft: RequestDraft): boolean {
  return draft.goalAtoms.length > 0 && draft.maxSize >= 1 && draft.maxResults >= 1;
}

export function toggleGoalAtom(draft: RequestDraft, atom: string): RequestDraft {
  const goalAtoms = draft.goalAtoms.includes(atom)
    ? draft.goalAtoms.filter((a) => a !== atom)
    : [...draft.goalAtoms, atom];
  return { ...draft, goalAtoms };
}

export function buildRequestDoc(draft: RequestDraft): RequestDoc {
  const goal: Atom[] = draft.goalAtoms.map((name) => ({ name }));
  const doc: RequestDoc = {
    goal,
    aggregates: draft.aggregates.map((a) => ({
      key: a.key,
      op: a.op,
      target: a.target,
    })),
    max_size: draft.maxSize,
    max_results: draft.maxResults,
  };
  if (draft.filters.length > 0) {
    doc.filters = draft.filters.map((f) => ({ key: f.key, op: f.op, target: f.target }));
  }
  return doc;
}

export function serializeRequest(draft: RequestDraft): string {
  return canonicalJson(buildRequestDoc(draft));
}

// The "refine" loop edge: clone a previously submitted request into a draft.
export function draftFromRequestDoc(doc: RequestDoc): RequestDraft {
  return {
    goalAtoms: doc.goal.map((a) => a.name),
    aggregates: doc.aggregates.map((a) => ({ ...a })),
    maxSize: doc.max_size,
    maxResults: doc.max_results,
    filters: (doc.filters ?? []).map((f) => ({ ...f })),
  };
}
