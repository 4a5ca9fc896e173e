import { describe, expect, it } from "vitest";

import {
  LABEL_COLORS,
  SchemaMismatchError,
  applyClusterColors,
  buildViewModel,
} from "../src/viewmodel.js";
import { makeGraphPayload } from "./helpers.js";

const ONE_PUB = makeGraphPayload([
  {
    key: "p1#2020",
    title: "Single",
    year: 2020,
    database: "db1",
    citations: 5,
    field: "automation",
    keywords: ["context model", "sensing"],
  },
]);

describe("buildViewModel", () => {
  it("renders one publication with its value nodes and six edges", () => {
    const model = buildViewModel(ONE_PUB);
    expect(model.nodes).toHaveLength(7); // pub + year + db + citation + field + 2 keywords
    expect(model.edges).toHaveLength(6);
    expect(model.publicationCount).toBe(1);
    expect(model.truncated).toBe(false);
  });

  it("renders the empty graph as an empty model", () => {
    const model = buildViewModel({ nodes: [], edges: [] });
    expect(model.nodes).toHaveLength(0);
    expect(model.publicationCount).toBe(0);
  });

  it("colors nodes by their label", () => {
    const model = buildViewModel(ONE_PUB);
    for (const node of model.nodes) {
      expect(node.color).toBe(LABEL_COLORS[node.label]);
    }
    expect(new Set(Object.values(LABEL_COLORS)).size).toBe(6);
  });

  it("sizes publications by citation count", () => {
    const payload = makeGraphPayload([
      { key: "a#1", title: "A", year: 2020, database: "db1", citations: 0, field: "f" },
      { key: "b#1", title: "B", year: 2020, database: "db1", citations: 50, field: "f" },
    ]);
    const model = buildViewModel(payload);
    const pubs = model.nodes.filter((n) => n.label === "Publication");
    const small = pubs.find((n) => n.key === "a#1")!;
    const large = pubs.find((n) => n.key === "b#1")!;
    expect(large.radius).toBeGreaterThan(small.radius);
    const year = model.nodes.find((n) => n.label === "Year")!;
    expect(year.radius).toBeLessThan(large.radius);
  });

  it("rejects malformed payloads", () => {
    expect(() => buildViewModel({ nodes: [{} as never], edges: [] })).toThrow(
      SchemaMismatchError,
    );
    expect(() => buildViewModel({ oops: true } as never)).toThrow(SchemaMismatchError);
  });

  it("truncates large graphs, largest field clusters first", () => {
    const pubs = [];
    for (let i = 0; i < 30; i++) {
      pubs.push({
        key: `big${i}#2020`, title: `Big ${i}`, year: 2016 + (i % 3),
        database: "db1", citations: i, field: "big-field",
      });
    }
    for (let i = 0; i < 3; i++) {
      pubs.push({
        key: `small${i}#2020`, title: `Small ${i}`, year: 2020,
        database: "db2", citations: 1, field: "small-field",
      });
    }
    const payload = makeGraphPayload(pubs);
    const model = buildViewModel(payload, { nodeBudget: 25 });
    expect(model.truncated).toBe(true);
    expect(model.truncationNote).toMatch(/largest clusters first/);
    expect(model.nodes.length).toBeLessThanOrEqual(25);
    const fields = model.nodes.filter((n) => n.label === "Field").map((n) => n.key);
    expect(fields).toContain("big-field"); // the larger cluster wins the budget
    expect(fields).not.toContain("small-field");
    // every rendered edge has both endpoints rendered
    const ids = new Set(model.nodes.map((n) => n.id));
    for (const edge of model.edges) {
      expect(ids.has(edge.src) && ids.has(edge.dst)).toBe(true);
    }
  });

  it("is a pure function of the payload", () => {
    expect(buildViewModel(ONE_PUB)).toEqual(buildViewModel(ONE_PUB));
  });
});

describe("applyClusterColors", () => {
  it("gives five database clusters five distinct colors", () => {
    const pubs = ["db1", "db2", "db3", "db4", "db5"].flatMap((db, i) => [
      { key: `${db}-a#1`, title: "x", year: 2020, database: db, citations: i, field: "f" },
      { key: `${db}-b#1`, title: "y", year: 2021, database: db, citations: i, field: "f" },
    ]);
    const model = buildViewModel(makeGraphPayload(pubs));
    const clusters = {
      dimension: "database",
      clusters: Object.fromEntries(
        ["db1", "db2", "db3", "db4", "db5"].map((db) => [
          db,
          [`${db}-a#1`, `${db}-b#1`],
        ]),
      ),
    };
    const recolored = applyClusterColors(model, clusters);
    const colors = new Set(
      recolored.nodes.filter((n) => n.label === "Publication").map((n) => n.color),
    );
    expect(colors.size).toBe(5);
    // same-cluster publications share a color
    const byKey = new Map(recolored.nodes.map((n) => [n.key, n.color]));
    expect(byKey.get("db1-a#1")).toBe(byKey.get("db1-b#1"));
    // value nodes keep label colors; the input model is untouched
    const year = recolored.nodes.find((n) => n.label === "Year")!;
    expect(year.color).toBe(LABEL_COLORS.Year);
    expect(model.nodes.find((n) => n.key === "db1-a#1")!.color).toBe(
      LABEL_COLORS.Publication,
    );
  });
});
