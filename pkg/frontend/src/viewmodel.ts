/** Pure derivation of the graph view from API payloads.
 *
 * The view model is a function of the `/graph` payload (plus an optional
 * `/clusters` payload for recoloring); rebuilding it from the same
 * payloads yields the same model, so the UI holds no review state of
 * its own.
 */

import type {
  ClustersPayload,
  GraphEdge,
  GraphNode,
  GraphPayload,
  NodeLabel,
} from "./types.js";

export class SchemaMismatchError extends Error {}

export const LABEL_COLORS: Record<NodeLabel, string> = {
  Publication: "#4c78a8",
  Year: "#f58518",
  Database: "#54a24b",
  Citation: "#b79a20",
  Keyword: "#9d755d",
  Field: "#e45756",
};

export const CLUSTER_PALETTE = [
  "#4c78a8", "#f58518", "#54a24b", "#e45756", "#72b7b2",
  "#eeca3b", "#b279a2", "#ff9da6", "#9d755d", "#bab0ac",
];

const NODE_LABELS = new Set<string>(Object.keys(LABEL_COLORS));
const MIN_RADIUS = 5;
const MAX_RADIUS = 16;
export const DEFAULT_NODE_BUDGET = 300;

export interface ViewNode {
  id: string;
  label: NodeLabel;
  key: string;
  color: string;
  radius: number;
  props: Record<string, unknown>;
}

export interface ViewEdge {
  src: string;
  dst: string;
  label: string;
}

export interface GraphViewModel {
  nodes: ViewNode[];
  edges: ViewEdge[];
  publicationCount: number;
  totalNodes: number;
  truncated: boolean;
  truncationNote: string | null;
}

function checkShape(payload: GraphPayload): void {
  if (!payload || !Array.isArray(payload.nodes) || !Array.isArray(payload.edges)) {
    throw new SchemaMismatchError("graph payload must have nodes[] and edges[]");
  }
  for (const node of payload.nodes) {
    if (
      typeof node.id !== "string" ||
      typeof node.key !== "string" ||
      !NODE_LABELS.has(node.label)
    ) {
      throw new SchemaMismatchError(`malformed node: ${JSON.stringify(node)}`);
    }
  }
  for (const edge of payload.edges) {
    if (typeof edge.src !== "string" || typeof edge.dst !== "string") {
      throw new SchemaMismatchError(`malformed edge: ${JSON.stringify(edge)}`);
    }
  }
}

function citationCounts(payload: GraphPayload): Map<string, number> {
  const byId = new Map(payload.nodes.map((n) => [n.id, n]));
  const counts = new Map<string, number>();
  for (const edge of payload.edges) {
    if (edge.label === "CITED") {
      const target = byId.get(edge.dst);
      counts.set(edge.src, target ? Number(target.key) || 0 : 0);
    }
  }
  return counts;
}

function radiusFor(node: GraphNode, citations: Map<string, number>, maxCitations: number): number {
  if (node.label !== "Publication") {
    return MIN_RADIUS;
  }
  const count = citations.get(node.id) ?? 0;
  const scale = maxCitations > 0 ? count / maxCitations : 0;
  return MIN_RADIUS + 2 + scale * (MAX_RADIUS - MIN_RADIUS - 2);
}

/** Keep whole publications (the publication plus everything it points
 * at), largest field clusters first, until the budget is reached. */
function truncate(payload: GraphPayload, budget: number): {
  payload: GraphPayload;
  truncated: boolean;
  note: string | null;
} {
  if (payload.nodes.length <= budget) {
    return { payload, truncated: false, note: null };
  }
  const byId = new Map(payload.nodes.map((n) => [n.id, n]));
  const outEdges = new Map<string, GraphEdge[]>();
  for (const edge of payload.edges) {
    const list = outEdges.get(edge.src);
    if (list) list.push(edge);
    else outEdges.set(edge.src, [edge]);
  }
  const clusters = new Map<string, string[]>();
  for (const node of payload.nodes) {
    if (node.label !== "Publication") continue;
    const applied = (outEdges.get(node.id) ?? []).find((e) => e.label === "APPLIED_IN");
    const clusterKey = applied ? byId.get(applied.dst)?.key ?? "?" : "?";
    const members = clusters.get(clusterKey);
    if (members) members.push(node.id);
    else clusters.set(clusterKey, [node.id]);
  }
  const ordered = [...clusters.entries()].sort(
    (a, b) => b[1].length - a[1].length || a[0].localeCompare(b[0]),
  );
  const keep = new Set<string>();
  let shownPubs = 0;
  let totalPubs = 0;
  for (const [, members] of ordered) totalPubs += members.length;
  outer: for (const [, members] of ordered) {
    for (const pubId of members) {
      const neighborhood = [pubId, ...(outEdges.get(pubId) ?? []).map((e) => e.dst)];
      const added = neighborhood.filter((id) => !keep.has(id)).length;
      if (keep.size + added > budget && keep.size > 0) {
        break outer;
      }
      neighborhood.forEach((id) => keep.add(id));
      shownPubs += 1;
    }
  }
  return {
    payload: {
      nodes: payload.nodes.filter((n) => keep.has(n.id)),
      edges: payload.edges.filter((e) => keep.has(e.src) && keep.has(e.dst)),
    },
    truncated: true,
    note: `showing ${shownPubs} of ${totalPubs} publications (largest clusters first)`,
  };
}

export function buildViewModel(
  payload: GraphPayload,
  options: { nodeBudget?: number } = {},
): GraphViewModel {
  checkShape(payload);
  const budget = options.nodeBudget ?? DEFAULT_NODE_BUDGET;
  const totalNodes = payload.nodes.length;
  const { payload: visible, truncated, note } = truncate(payload, budget);
  const citations = citationCounts(visible);
  const maxCitations = Math.max(0, ...citations.values());
  const nodes = visible.nodes.map((node) => ({
    id: node.id,
    label: node.label,
    key: node.key,
    color: LABEL_COLORS[node.label],
    radius: radiusFor(node, citations, maxCitations),
    props: node.props ?? {},
  }));
  const edges = visible.edges.map((edge) => ({
    src: edge.src,
    dst: edge.dst,
    label: edge.label,
  }));
  return {
    nodes,
    edges,
    publicationCount: nodes.filter((n) => n.label === "Publication").length,
    totalNodes,
    truncated,
    truncationNote: note,
  };
}

/** Recolor publication nodes by their cluster; value nodes keep label
 * colors. Returns a new model; the input is untouched. */
export function applyClusterColors(
  model: GraphViewModel,
  clusters: ClustersPayload,
): GraphViewModel {
  const colorByCluster = new Map<string, string>();
  const keys = Object.keys(clusters.clusters).sort();
  keys.forEach((key, index) => {
    colorByCluster.set(key, CLUSTER_PALETTE[index % CLUSTER_PALETTE.length]);
  });
  const clusterOfPub = new Map<string, string>();
  for (const [key, members] of Object.entries(clusters.clusters)) {
    for (const member of members) clusterOfPub.set(member, key);
  }
  return {
    ...model,
    nodes: model.nodes.map((node) => {
      if (node.label !== "Publication") return node;
      const cluster = clusterOfPub.get(node.key);
      if (cluster === undefined) return node;
      return { ...node, color: colorByCluster.get(cluster) ?? node.color };
    }),
  };
}
