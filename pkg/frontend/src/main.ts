/** DOM wiring: renders the workbench into #app against a live service. */

import { ApiClient } from "./api.js";
import { layoutGraph } from "./layout.js";
import { hasErrors, validateForm } from "./validation.js";
import { LABEL_COLORS, type GraphViewModel, type ViewNode } from "./viewmodel.js";
import { Workbench } from "./workbench.js";
import type { ClusterDimension, JobStatus, SearchForm, StatsPayload } from "./types.js";

const SOURCES = ["db1", "db2", "db3", "db4", "db5"];
const SVG_NS = "http://www.w3.org/2000/svg";
const WIDTH = 920;
const HEIGHT = 620;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  node.append(...children);
  return node;
}

function svgEl(tag: string, attrs: Record<string, string>): SVGElement {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  return node;
}

export function mountWorkbench(root: HTMLElement, baseUrl: string): Workbench {
  const client = new ApiClient(baseUrl);

  // --- search form ---
  const termsInput = el("input", {
    id: "terms", type: "text", placeholder: "context-awareness AND automation systems",
    value: "context-awareness AND automation systems",
  });
  const fromInput = el("input", { id: "year-from", type: "text", size: "6", value: "2016" });
  const toInput = el("input", { id: "year-to", type: "text", size: "6", value: "2022" });
  const termsError = el("span", { class: "field-error" });
  const yearsError = el("span", { class: "field-error" });
  const sourcesError = el("span", { class: "field-error" });
  const submitButton = el("button", { id: "submit-search" }, "Search");
  const sourceBoxes = SOURCES.map((sid) => {
    const box = el("input", { type: "checkbox", value: sid, checked: "" }) as HTMLInputElement;
    box.checked = true;
    return box;
  });

  const form = el(
    "section", { class: "panel" },
    el("h2", {}, "Search"),
    el("div", { class: "row" }, el("label", { for: "terms" }, "Terms "), termsInput, termsError),
    el("div", { class: "row" },
      el("label", {}, "Years "), fromInput, el("span", {}, " to "), toInput, yearsError),
    el("div", { class: "row" },
      el("label", {}, "Sources "),
      ...sourceBoxes.flatMap((box, i) => [box, el("span", {}, `${SOURCES[i]} `)]),
      sourcesError),
    el("div", { class: "row" }, submitButton),
  );

  // --- job progress ---
  const progress = el("section", { class: "panel" }, el("h2", {}, "Job"));
  const progressBody = el("div", {}, "no job yet");
  progress.append(progressBody);

  // --- graph view ---
  const svg = svgEl("svg", {
    width: String(WIDTH), height: String(HEIGHT), viewBox: `0 0 ${WIDTH} ${HEIGHT}`,
  });
  const banner = el("div", { class: "banner", hidden: "" });
  const truncationNote = el("div", { class: "note" });
  const statsLine = el("div", { class: "note" });
  const clusterSelect = el("select", { id: "cluster-dimension" });
  for (const [value, label] of [
    ["", "color by node label"], ["field", "cluster by field"],
    ["year", "cluster by year"], ["database", "cluster by database"],
  ]) {
    clusterSelect.append(el("option", { value }, label));
  }
  const legend = el("div", { class: "legend" });
  for (const [label, color] of Object.entries(LABEL_COLORS)) {
    legend.append(
      el("span", { class: "swatch", style: `background:${color}` }), el("span", {}, ` ${label}  `),
    );
  }
  const detailPanel = el("div", { class: "detail" }, "click a publication for details");
  const graphPanel = el(
    "section", { class: "panel" },
    el("h2", {}, "Knowledge graph"), banner, statsLine, truncationNote,
    el("div", { class: "row" }, clusterSelect), legend, svg, detailPanel,
  );

  // --- query console ---
  const queryInput = el("input", {
    id: "query", type: "text", size: "70",
    placeholder: "FIND PUBLICATIONS ORDER BY citations DESC",
  });
  const runButton = el("button", { id: "run-query" }, "Run");
  const queryError = el("pre", { class: "query-error" });
  const queryOutput = el("div", { class: "query-output" });
  const historyList = el("div", { class: "history" });
  const consolePanel = el(
    "section", { class: "panel" },
    el("h2", {}, "Query console"),
    el("div", { class: "row" }, queryInput, runButton),
    queryError, queryOutput, el("h3", {}, "History"), historyList,
  );

  root.append(form, progress, graphPanel, consolePanel);

  function showBanner(message: string) {
    banner.hidden = false;
    banner.textContent = message;
  }

  function renderJob(status: JobStatus) {
    progressBody.replaceChildren(
      el("div", {}, `job ${status.job_id}: ${status.state}`),
      ...Object.entries(status.per_source).map(([sid, p]) =>
        el("div", {}, `  ${sid}: ${p.after_search} found, ${p.after_filter} retained`)),
      ...status.warnings.map((w) => el("div", { class: "warning" }, `warning: ${w}`)),
    );
  }

  function renderDetail(node: ViewNode) {
    if (node.label !== "Publication") {
      detailPanel.replaceChildren(el("div", {}, `${node.label}: ${node.key}`));
      return;
    }
    const props = node.props as Record<string, unknown>;
    detailPanel.replaceChildren(
      el("h3", {}, String(props.title ?? node.key)),
      el("div", {}, `authors: ${(props.authors as string[] | undefined)?.join(", ") ?? ""}`),
      el("div", {}, `keywords: ${(props.keywords as string[] | undefined)?.join(", ") ?? ""}`),
      el("div", {}, String(props.abstract ?? "")),
      el("div", {}, el("a", { href: String(props.url ?? "#") }, String(props.url ?? ""))),
    );
  }

  function renderGraph(model: GraphViewModel, stats: StatsPayload) {
    banner.hidden = true;
    statsLine.textContent =
      `${stats.node_counts.Publication ?? 0} publications, ` +
      `${stats.total_nodes} nodes, ${stats.total_edges} edges`;
    truncationNote.textContent = model.truncationNote ?? "";
    if (model.nodes.length === 0) {
      svg.replaceChildren(svgEl("text", { x: "20", y: "40" }));
      (svg.lastChild as SVGElement).textContent =
        "graph is empty: run a search to populate the review";
      return;
    }
    const positions = layoutGraph(model.nodes, model.edges, {
      width: WIDTH, height: HEIGHT,
    });
    svg.replaceChildren();
    for (const edge of model.edges) {
      const a = positions.get(edge.src)!;
      const b = positions.get(edge.dst)!;
      svg.append(svgEl("line", {
        x1: String(a.x), y1: String(a.y), x2: String(b.x), y2: String(b.y),
        stroke: "#ccc", "stroke-width": "0.6",
      }));
    }
    for (const node of model.nodes) {
      const point = positions.get(node.id)!;
      const circle = svgEl("circle", {
        cx: String(point.x), cy: String(point.y), r: String(node.radius),
        fill: node.color, "data-node-id": node.id,
      });
      circle.addEventListener("click", () => renderDetail(node));
      const title = svgEl("title", {});
      title.textContent = `${node.label}: ${node.key}`;
      circle.append(title);
      svg.append(circle);
    }
  }

  const workbench = new Workbench(client, {
    onJobUpdate: renderJob,
    onGraphUpdated: renderGraph,
    onError: showBanner,
  });

  function readForm(): SearchForm {
    return {
      terms: termsInput.value,
      yearFrom: fromInput.value,
      yearTo: toInput.value,
      sources: sourceBoxes.filter((b) => b.checked).map((b) => b.value),
    };
  }

  // live validation: disable submit while any field has an error
  function refreshSubmitState() {
    const fieldErrors = validateForm(readForm());
    termsError.textContent = fieldErrors.terms ?? "";
    yearsError.textContent = fieldErrors.years ?? "";
    sourcesError.textContent = fieldErrors.sources ?? "";
    submitButton.toggleAttribute("disabled", hasErrors(fieldErrors));
  }
  [termsInput, fromInput, toInput, ...sourceBoxes].forEach((input) =>
    input.addEventListener("input", refreshSubmitState));

  submitButton.addEventListener("click", async () => {
    const outcome = await workbench.submitSearch(readForm());
    termsError.textContent = outcome.errors.terms ?? "";
    yearsError.textContent = outcome.errors.years ?? "";
    sourcesError.textContent = outcome.errors.sources ?? "";
  });

  clusterSelect.addEventListener("change", () => {
    const value = (clusterSelect as HTMLSelectElement).value;
    void workbench.setClusterDimension(
      value === "" ? null : (value as ClusterDimension),
    );
  });

  function renderConsole() {
    const state = workbench.consoleState;
    queryError.textContent = state.error
      ? state.error.caret
        ? `${state.error.message}\n${state.error.caret}`
        : state.error.message
      : "";
    if (state.error?.retryable) {
      const retry = el("button", {}, "retry");
      retry.addEventListener("click", () => void execQuery(queryInput.value));
      queryError.append("\n", retry);
    }
    const result = state.result;
    if (result === null) {
      queryOutput.replaceChildren();
    } else if (result.kind === "table") {
      const table = el("table", {});
      table.append(el("tr", {}, ...result.columns.map((c) => el("th", {}, c))));
      for (const row of result.rows) {
        table.append(el("tr", {}, ...row.map((cell) => el("td", {}, cell))));
      }
      queryOutput.replaceChildren(table, el("div", {}, `${result.rows.length} rows`));
    } else {
      queryOutput.replaceChildren(
        el("div", {}, `clusters by ${result.dimension}:`),
        ...result.sizes.map(([key, size]) => el("div", {}, `  ${key}: ${size}`)),
      );
    }
    historyList.replaceChildren(
      ...state.history.map((entry) => {
        const link = el("a", { href: "#" }, entry);
        link.addEventListener("click", (event) => {
          event.preventDefault();
          queryInput.value = entry;
          void execQuery(entry);
        });
        return el("div", {}, link);
      }),
    );
  }

  async function execQuery(text: string) {
    await workbench.runConsoleQuery(text);
    renderConsole();
  }

  runButton.addEventListener("click", () => void execQuery(queryInput.value));
  queryInput.addEventListener("keydown", (event) => {
    if ((event as KeyboardEvent).key === "Enter") void execQuery(queryInput.value);
  });

  // initial view
  void workbench.refreshGraph().catch((error) => showBanner(String(error)));
  return workbench;
}

declare global {
  interface Window {
    litgraphWorkbench?: Workbench;
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  const params = new URLSearchParams(window.location.search);
  const baseUrl = params.get("api") ?? "http://127.0.0.1:8745";
  window.litgraphWorkbench = mountWorkbench(
    document.getElementById("app")!,
    baseUrl,
  );
}
