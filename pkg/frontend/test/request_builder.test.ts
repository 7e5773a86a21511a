import { readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import {
  buildRequestDoc,
  canSubmit,
  draftFromRequestDoc,
  emptyDraft,
  serializeRequest,
  toggleGoalAtom,
} from "../src/request_builder.js";

const FIXTURES = join(__dirname, "..", "..", "fixtures", "requests");

function fixture(name: string): string {
  return readFileSync(join(FIXTURES, name), "utf8");
}

describe("request serialization", () => {
  it("matches the CLI cubes3 fixture byte for byte", () => {
    const draft = emptyDraft();
    draft.goalAtoms = ["tower"];
    draft.aggregates = [{ key: "cubes", op: "eq", target: 3 }];
    draft.maxSize = 10;
    draft.maxResults = 10;
    expect(serializeRequest(draft)).toBe(fixture("tower_cubes3.json"));
  });

  it("matches the unconstrained tower fixture byte for byte", () => {
    const draft = emptyDraft();
    draft.goalAtoms = ["tower"];
    draft.maxSize = 3;
    draft.maxResults = 100;
    expect(serializeRequest(draft)).toBe(fixture("tower_any.json"));
  });

  it("matches the arm dof6 fixture byte for byte", () => {
    const draft = emptyDraft();
    draft.goalAtoms = ["robot_arm"];
    draft.aggregates = [{ key: "dof", op: "eq", target: 6 }];
    draft.maxSize = 30;
    draft.maxResults = 256;
    expect(serializeRequest(draft)).toBe(fixture("arm_dof6.json"));
  });

  it("includes filters only when present", () => {
    const draft = emptyDraft();
    draft.goalAtoms = ["robot_arm"];
    draft.aggregates = [{ key: "dof", op: "eq", target: 4 }];
    draft.maxSize = 30;
    draft.maxResults = 256;
    draft.filters = [{ key: "cost", op: "le", target: 9000 }];
    expect(serializeRequest(draft)).toBe(fixture("arm_dof4_budget.json"));
    expect(buildRequestDoc(emptyDraft())).not.toHaveProperty("filters");
  });
});

describe("draft state", () => {
  it("empty draft cannot submit", () => {
    expect(canSubmit(emptyDraft())).toBe(false);
  });

  it("submit enabled once a goal atom is picked", () => {
    const draft = toggleGoalAtom(emptyDraft(), "tower");
    expect(canSubmit(draft)).toBe(true);
    expect(canSubmit(toggleGoalAtom(draft, "tower"))).toBe(false);
  });

  it("refine round-trips a request document", () => {
    const doc = JSON.parse(fixture("arm_dof4_budget.json"));
    const draft = draftFromRequestDoc(doc);
    expect(serializeRequest(draft)).toBe(fixture("arm_dof4_budget.json"));
  });
});
