import { describe, expect, it } from "vitest";

import { canonicalJson } from "../src/canonical.js";

describe("canonical JSON", () => {
  it("two-space indent with trailing newline", () => {
    expect(canonicalJson({ a: [1, 2] })).toBe('{\n  "a": [\n    1,\n    2\n  ]\n}\n');
  });

  it("empty containers stay compact", () => {
    expect(canonicalJson({})).toBe("{}\n");
    expect(canonicalJson([])).toBe("[]\n");
  });

  it("escapes non-ascii like the engine serializer", () => {
    expect(canonicalJson("útil")).toBe('"\\u00fatil"\n');
  });

  it("preserves key insertion order", () => {
    expect(canonicalJson({ b: 1, a: 2 })).toBe('{\n  "b": 1,\n  "a": 2\n}\n');
  });
});
