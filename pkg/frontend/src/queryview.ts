/** Query console model: run queries, show positioned errors, keep history. */

import { ApiClient, ApiError } from "./api.js";
import type { QueryResponse, ResultRow } from "./types.js";

export interface TableView {
  kind: "table";
  columns: string[];
  rows: string[][];
  raw: ResultRow[];
}

export interface ClusterView {
  kind: "clusters";
  dimension: string;
  sizes: [string, number][];
}

export interface QueryErrorView {
  message: string;
  /** The query echoed back with a caret line underneath, when the
   * service reported a position. */
  caret: string | null;
  retryable: boolean;
}

export interface ConsoleState {
  history: string[];
  result: TableView | ClusterView | null;
  error: QueryErrorView | null;
}

export function initialConsoleState(): ConsoleState {
  return { history: [], result: null, error: null };
}

export function caretLines(query: string, position: number): string {
  const clamped = Math.max(0, Math.min(position, query.length));
  return `${query}\n${" ".repeat(clamped)}^`;
}

function formatCell(value: unknown): string {
  if (Array.isArray(value)) return value.join("; ");
  return String(value);
}

export function toView(response: QueryResponse): TableView | ClusterView {
  if (response.clusters !== undefined && response.dimension !== undefined) {
    const sizes = Object.entries(response.clusters)
      .map(([key, members]): [string, number] => [key, members.length])
      .sort((a, b) => b[1] - a[1] || a[0].localeCompare(b[0]));
    return { kind: "clusters", dimension: response.dimension, sizes };
  }
  const columns = response.columns ?? [];
  const rows = (response.rows ?? []).map((row) =>
    columns.map((column) => formatCell((row as Record<string, unknown>)[column])),
  );
  return { kind: "table", columns, rows, raw: response.rows ?? [] };
}

/** Run one query; returns the next console state (input state untouched). */
export async function runQuery(
  client: ApiClient,
  state: ConsoleState,
  text: string,
): Promise<ConsoleState> {
  const history = state.history.includes(text)
    ? state.history
    : [...state.history, text];
  try {
    const response = await client.query(text);
    return { history, result: toView(response), error: null };
  } catch (error) {
    if (error instanceof ApiError) {
      const position = error.position;
      return {
        history,
        result: state.result, // keep previous result visible
        error: {
          message: error.message,
          caret: position === null ? null : caretLines(text, position),
          retryable: false,
        },
      };
    }
    return {
      history,
      result: state.result,
      error: {
        message: `network failure: ${String(error)}`,
        caret: null,
        retryable: true,
      },
    };
  }
}
