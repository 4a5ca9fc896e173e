/** The workbench controller: one place where form submission, job
 * polling, graph refresh, clustering, and the query console meet.
 *
 * Holds no review data of its own; every view is derived from fresh
 * API payloads, so reloading and re-fetching reproduces the identical
 * view model. All writes flow through POST /search.
 */

import { ApiClient, ApiError } from "./api.js";
import { pollJob, type Sleep } from "./polling.js";
import {
  applyClusterColors,
  buildViewModel,
  type GraphViewModel,
} from "./viewmodel.js";
import {
  initialConsoleState,
  runQuery,
  type ConsoleState,
} from "./queryview.js";
import { hasErrors, validateForm, type FieldErrors } from "./validation.js";
import type {
  ClusterDimension,
  JobStatus,
  SearchForm,
  StatsPayload,
} from "./types.js";

export interface SubmitOutcome {
  /** False when client-side validation failed; no request was made. */
  issued: boolean;
  errors: FieldErrors;
  job: JobStatus | null;
}

export interface WorkbenchEvents {
  onJobUpdate?: (status: JobStatus) => void;
  onGraphUpdated?: (model: GraphViewModel, stats: StatsPayload) => void;
  onError?: (message: string) => void;
}

export class Workbench {
  graphView: GraphViewModel | null = null;
  stats: StatsPayload | null = null;
  consoleState: ConsoleState = initialConsoleState();
  clusterDimension: ClusterDimension | null = null;
  activeJob: JobStatus | null = null;

  constructor(
    private readonly client: ApiClient,
    private readonly events: WorkbenchEvents = {},
    private readonly options: { nodeBudget?: number; pollIntervalMs?: number; sleep?: Sleep } = {},
  ) {}

  /** Validate, submit, poll to completion, refresh the graph. */
  async submitSearch(form: SearchForm): Promise<SubmitOutcome> {
    const errors = validateForm(form);
    if (hasErrors(errors)) {
      return { issued: false, errors, job: null };
    }
    let jobId: string;
    try {
      const response = await this.client.search({
        terms: form.terms.trim(),
        year_from: Number(form.yearFrom),
        year_to: Number(form.yearTo),
        sources: form.sources,
      });
      jobId = response.job_id;
    } catch (error) {
      if (error instanceof ApiError) {
        return { issued: true, errors: serverErrors(error), job: null };
      }
      throw error;
    }
    const status = await pollJob(this.client, jobId, {
      intervalMs: this.options.pollIntervalMs ?? 1000,
      sleep: this.options.sleep,
      onUpdate: (update) => {
        this.activeJob = update;
        this.events.onJobUpdate?.(update);
      },
    });
    if (status.state === "done") {
      await this.refreshGraph();
    } else {
      this.events.onError?.(status.error ?? "search job failed");
    }
    return { issued: true, errors: {}, job: status };
  }

  /** Re-derive the graph view from fresh /graph + /stats payloads. */
  async refreshGraph(): Promise<GraphViewModel> {
    const [payload, stats] = await Promise.all([
      this.client.graph(),
      this.client.stats(),
    ]);
    let model = buildViewModel(payload, { nodeBudget: this.options.nodeBudget });
    if (this.clusterDimension !== null) {
      const clusters = await this.client.clusters(this.clusterDimension);
      model = applyClusterColors(model, clusters);
    }
    this.graphView = model;
    this.stats = stats;
    this.events.onGraphUpdated?.(model, stats);
    return model;
  }

  /** Switch cluster coloring (or back to label colors with null). */
  async setClusterDimension(dimension: ClusterDimension | null): Promise<void> {
    this.clusterDimension = dimension;
    if (this.graphView !== null) {
      await this.refreshGraph();
    }
  }

  async runConsoleQuery(text: string): Promise<ConsoleState> {
    this.consoleState = await runQuery(this.client, this.consoleState, text);
    const result = this.consoleState.result;
    // CLUSTER BY queries also drive the graph coloring, per the console's
    // role as the analysis entry point.
    if (result?.kind === "clusters" && isDimension(result.dimension)) {
      await this.setClusterDimension(result.dimension);
    }
    return this.consoleState;
  }
}

function isDimension(value: string): value is ClusterDimension {
  return value === "field" || value === "year" || value === "database";
}

function serverErrors(error: ApiError): FieldErrors {
  const errors: FieldErrors = {};
  const detail = error.detail;
  if (detail.field === "terms") {
    errors.terms = String(detail.error ?? "invalid terms");
    return errors;
  }
  const violations = Array.isArray(detail.violations) ? detail.violations : [];
  for (const violation of violations as { field?: string; rule?: string }[]) {
    if (violation.field?.startsWith("year")) {
      errors.years = violation.rule ?? "invalid years";
    } else if (violation.field === "sources") {
      errors.sources = violation.rule ?? "invalid sources";
    } else {
      errors.terms = violation.rule ?? "invalid search";
    }
  }
  if (!hasErrors(errors)) {
    errors.terms = error.message;
  }
  return errors;
}
