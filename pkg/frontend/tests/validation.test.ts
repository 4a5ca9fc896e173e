import { describe, expect, it } from "vitest";

import { hasErrors, validateForm } from "../src/validation.js";

const VALID = {
  terms: "context-awareness AND automation systems",
  yearFrom: "2016",
  yearTo: "2022",
  sources: ["db1", "db2"],
};

describe("validateForm", () => {
  it("accepts the demo inputs", () => {
    expect(validateForm(VALID)).toEqual({});
    expect(hasErrors(validateForm(VALID))).toBe(false);
  });

  it("rejects empty terms", () => {
    const errors = validateForm({ ...VALID, terms: "   " });
    expect(errors.terms).toBeTruthy();
  });

  it("rejects inverted year ranges", () => {
    const errors = validateForm({ ...VALID, yearFrom: "2022", yearTo: "2016" });
    expect(errors.years).toMatch(/start year/);
  });

  it("rejects non-numeric years", () => {
    expect(validateForm({ ...VALID, yearFrom: "soon" }).years).toBeTruthy();
    expect(validateForm({ ...VALID, yearTo: "21" }).years).toBeTruthy();
  });

  it("requires at least one source", () => {
    expect(validateForm({ ...VALID, sources: [] }).sources).toBeTruthy();
  });
});
