/** Payload shapes of the review service API. */

export type NodeLabel =
  | "Publication"
  | "Year"
  | "Database"
  | "Citation"
  | "Keyword"
  | "Field";

export interface GraphNode {
  id: string;
  label: NodeLabel;
  key: string;
  props: Record<string, unknown>;
}

export interface GraphEdge {
  src: string;
  dst: string;
  label: string;
  props: Record<string, unknown>;
}

export interface GraphPayload {
  nodes: GraphNode[];
  edges: GraphEdge[];
}

export type JobState =
  | "pending"
  | "fetching"
  | "enriching"
  | "merging"
  | "done"
  | "failed";

export interface SourceProgress {
  after_search: number;
  after_filter: number;
}

export interface JobStatus {
  job_id: string;
  state: JobState;
  per_source: Record<string, SourceProgress>;
  warnings: string[];
  error: string | null;
  outcomes: Record<string, number> | null;
}

export interface StatsPayload {
  node_counts: Record<string, number>;
  edge_counts: Record<string, number>;
  total_nodes: number;
  total_edges: number;
}

export interface ClustersPayload {
  dimension: string;
  clusters: Record<string, string[]>;
}

export type ResultRow = {
  title: string;
  authors: string[];
  year: number;
  database: string;
  citations: number;
  field: string;
};

/** POST /query returns either a result table or a cluster map. */
export interface QueryResponse {
  columns?: string[];
  rows?: ResultRow[];
  dimension?: string;
  clusters?: Record<string, string[]>;
}

export interface SearchForm {
  terms: string;
  yearFrom: string;
  yearTo: string;
  sources: string[];
}

export type ClusterDimension = "field" | "year" | "database";
