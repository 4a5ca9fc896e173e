/** Test fixtures: graph payload builder and a fake service implementing
 * the API contract behind a fetch-compatible function. */

import type {
  GraphEdge,
  GraphNode,
  GraphPayload,
  JobState,
  ResultRow,
} from "../src/types.js";
import type { FetchLike } from "../src/api.js";

export interface PubSpec {
  key: string;
  title: string;
  year: number;
  database: string;
  citations: number;
  field: string;
  keywords?: string[];
  authors?: string[];
}

/** Build a meta-model-shaped payload: shared value nodes, one scalar
 * edge of each kind per publication, HAS_KEYWORD per keyword. */
export function makeGraphPayload(pubs: PubSpec[]): GraphPayload {
  const nodes: GraphNode[] = [];
  const edges: GraphEdge[] = [];
  const valueIds = new Map<string, string>();
  let next = 1;

  const valueNode = (label: GraphNode["label"], key: string): string => {
    const mapKey = `${label}:${key}`;
    const existing = valueIds.get(mapKey);
    if (existing) return existing;
    const id = `n${next++}`;
    valueIds.set(mapKey, id);
    nodes.push({ id, label, key, props: {} });
    return id;
  };

  for (const pub of pubs) {
    const pubId = `n${next++}`;
    nodes.push({
      id: pubId,
      label: "Publication",
      key: pub.key,
      props: {
        title: pub.title,
        authors: pub.authors ?? ["A. Author"],
        abstract: `abstract of ${pub.title}`,
        url: `https://example.org/${pub.key}`,
        keywords: pub.keywords ?? [],
        pub_type: "journal",
      },
    });
    edges.push({ src: pubId, dst: valueNode("Year", String(pub.year)), label: "PUBLISHED_IN", props: {} });
    edges.push({ src: pubId, dst: valueNode("Database", pub.database), label: "PUBLISHED_BY", props: {} });
    edges.push({ src: pubId, dst: valueNode("Citation", String(pub.citations)), label: "CITED", props: {} });
    edges.push({ src: pubId, dst: valueNode("Field", pub.field), label: "APPLIED_IN", props: {} });
    for (const [rank, keyword] of (pub.keywords ?? []).entries()) {
      edges.push({
        src: pubId,
        dst: valueNode("Keyword", keyword),
        label: "HAS_KEYWORD",
        props: { rank: rank + 1, score: 1.0 },
      });
    }
  }
  return { nodes, edges };
}

const JOB_SEQUENCE: JobState[] = ["pending", "fetching", "enriching", "merging", "done"];

/** In-memory stand-in for the service; counts requests per endpoint. */
export class FakeService {
  graph: GraphPayload = { nodes: [], edges: [] };
  pendingPubs: PubSpec[];
  jobs = new Map<string, number>();
  calls: string[] = [];
  private jobCounter = 0;

  constructor(pubsAfterSearch: PubSpec[]) {
    this.pendingPubs = pubsAfterSearch;
  }

  get fetch(): FetchLike {
    return async (input, init) => this.dispatch(input, init);
  }

  private respond(body: unknown, status = 200): Response {
    return new Response(JSON.stringify(body), {
      status,
      headers: { "content-type": "application/json" },
    });
  }

  private clustersBy(dimension: string): Record<string, string[]> {
    const byId = new Map(this.graph.nodes.map((n) => [n.id, n]));
    const edgeLabel = { field: "APPLIED_IN", year: "PUBLISHED_IN", database: "PUBLISHED_BY" }[
      dimension
    ];
    const clusters: Record<string, string[]> = {};
    for (const edge of this.graph.edges) {
      if (edge.label !== edgeLabel) continue;
      const pub = byId.get(edge.src)!;
      const key = byId.get(edge.dst)!.key;
      (clusters[key] ??= []).push(pub.key);
    }
    return clusters;
  }

  private rows(): ResultRow[] {
    const byId = new Map(this.graph.nodes.map((n) => [n.id, n]));
    const out: ResultRow[] = [];
    for (const node of this.graph.nodes) {
      if (node.label !== "Publication") continue;
      const targets: Record<string, string> = {};
      for (const edge of this.graph.edges) {
        if (edge.src === node.id) targets[edge.label] = byId.get(edge.dst)!.key;
      }
      out.push({
        title: String(node.props.title),
        authors: (node.props.authors as string[]) ?? [],
        year: Number(targets.PUBLISHED_IN),
        database: targets.PUBLISHED_BY,
        citations: Number(targets.CITED),
        field: targets.APPLIED_IN,
      });
    }
    return out;
  }

  private dispatch(input: string, init?: RequestInit): Response {
    const url = new URL(input, "http://fake");
    const method = init?.method ?? "GET";
    this.calls.push(`${method} ${url.pathname}`);

    if (method === "POST" && url.pathname === "/search") {
      const payload = JSON.parse(String(init?.body ?? "{}"));
      if (/\bAND\s*$/i.test(String(payload.terms))) {
        return this.respond(
          {
            detail: {
              error: "operator 'AND' is missing a right operand",
              position: String(payload.terms).length,
              field: "terms",
            },
          },
          400,
        );
      }
      const violations: { field: string; rule: string; detail?: string }[] = [];
      if (payload.year_from > payload.year_to) {
        violations.push({ field: "year_from/year_to", rule: "YearRangeInverted" });
      }
      for (const sid of payload.sources ?? []) {
        if (!/^db[1-5]$/.test(sid)) {
          violations.push({ field: "sources", rule: "UnknownSource", detail: sid });
        }
      }
      if (violations.length > 0) {
        return this.respond(
          { detail: { error: "invalid search specification", violations } },
          400,
        );
      }
      const jobId = `job${++this.jobCounter}`;
      this.jobs.set(jobId, 0);
      return this.respond({ job_id: jobId });
    }

    if (method === "GET" && url.pathname.startsWith("/jobs/")) {
      const jobId = url.pathname.slice("/jobs/".length);
      const step = this.jobs.get(jobId);
      if (step === undefined) {
        return this.respond({ detail: { error: "unknown job" } }, 404);
      }
      const state = JOB_SEQUENCE[Math.min(step, JOB_SEQUENCE.length - 1)];
      this.jobs.set(jobId, step + 1);
      if (state === "done" && this.graph.nodes.length === 0) {
        this.graph = makeGraphPayload(this.pendingPubs);
      }
      return this.respond({
        job_id: jobId,
        state,
        per_source: { db1: { after_search: this.pendingPubs.length, after_filter: this.pendingPubs.length } },
        warnings: [],
        error: null,
        outcomes: state === "done" ? { created: this.pendingPubs.length, updated: 0, unchanged: 0 } : null,
      });
    }

    if (method === "GET" && url.pathname === "/graph") {
      return this.respond(this.graph);
    }

    if (method === "GET" && url.pathname === "/stats") {
      const counts: Record<string, number> = {
        Publication: 0, Year: 0, Database: 0, Citation: 0, Keyword: 0, Field: 0,
      };
      for (const node of this.graph.nodes) counts[node.label] += 1;
      return this.respond({
        node_counts: counts,
        edge_counts: {},
        total_nodes: this.graph.nodes.length,
        total_edges: this.graph.edges.length,
      });
    }

    if (method === "GET" && url.pathname.startsWith("/clusters/")) {
      const dimension = url.pathname.slice("/clusters/".length);
      if (!["field", "year", "database"].includes(dimension)) {
        return this.respond({ detail: { error: "bad dimension" } }, 400);
      }
      return this.respond({ dimension, clusters: this.clustersBy(dimension) });
    }

    if (method === "POST" && url.pathname === "/query") {
      const { q } = JSON.parse(String(init?.body ?? "{}"));
      const text = String(q);
      if (/^\s*CLUSTER BY (FIELD|YEAR|DATABASE)\s*$/i.test(text)) {
        const dimension = text.trim().split(/\s+/)[2].toLowerCase();
        return this.respond({ dimension, clusters: this.clustersBy(dimension) });
      }
      const match = /^\s*FIND PUBLICATIONS ORDER BY citations (ASC|DESC)\s*$/i.exec(text);
      if (match) {
        const rows = this.rows().sort((a, b) =>
          match[1].toUpperCase() === "DESC" ? b.citations - a.citations : a.citations - b.citations,
        );
        return this.respond({
          columns: ["title", "authors", "year", "database", "citations", "field"],
          rows,
        });
      }
      return this.respond(
        { detail: { error: "syntax error", position: 0 } },
        400,
      );
    }

    return this.respond({ detail: { error: `no route ${method} ${url.pathname}` } }, 404);
  }
}

export const instantSleep = () => Promise.resolve();
