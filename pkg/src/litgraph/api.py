"""HTTP service backing the review workbench.

Search runs execute asynchronously on a single worker thread (one merge
job at a time, queued otherwise) and are polled via ``/jobs/{id}``;
read endpoints serve consistent graph snapshots at any time, so a
running merge is never observed half-wired.  The graph is imported from
the data directory on startup and exported after every completed job
and on shutdown, so the review accumulates across restarts.
"""

from __future__ import annotations

import queue
import threading
import uuid
from contextlib import asynccontextmanager
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from .acquisition import SourceRegistry, fixture_registry
from .evaluation import load_benchmark, build_report, render_report, report_to_dict
from .graph import KnowledgeGraph
from .pipeline import (
    RunSummary,
    graph_field_labels,
    load_graph,
    load_run_summary,
    run_review,
    save_graph,
    save_run_summary,
)
from .queries import (
    CLUSTER_DIMENSIONS,
    ClusterSet,
    QuerySyntaxError,
    QueryTypeError,
    ResultTable,
    UnknownAttributeError,
    cluster_by,
    execute,
    parse_query,
)
from .search import ExpressionError, SearchSpec, parse_search_expr, validate_spec
from .textproc import Enricher, KeywordTaxonomyEnricher, Taxonomy, load_taxonomy


class JobState(str, Enum):
    PENDING = "pending"
    FETCHING = "fetching"
    ENRICHING = "enriching"
    MERGING = "merging"
    DONE = "done"
    FAILED = "failed"


_STATE_ORDER = [
    JobState.PENDING,
    JobState.FETCHING,
    JobState.ENRICHING,
    JobState.MERGING,
    JobState.DONE,
]


@dataclass
class JobStatus:
    job_id: str
    state: JobState = JobState.PENDING
    per_source: dict[str, dict] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)
    error: Optional[str] = None
    outcomes: Optional[dict[str, int]] = None

    def advance(self, new_state: JobState) -> None:
        if new_state is JobState.FAILED:
            self.state = new_state
            return
        if _STATE_ORDER.index(new_state) < _STATE_ORDER.index(self.state):
            raise ValueError(f"job state cannot move back: {self.state} -> {new_state}")
        self.state = new_state

    def to_dict(self) -> dict:
        return {
            "job_id": self.job_id,
            "state": self.state.value,
            "per_source": self.per_source,
            "warnings": self.warnings,
            "error": self.error,
            "outcomes": self.outcomes,
        }


class JobManager:
    """Runs submitted search specs one at a time on a worker thread."""

    def __init__(self, service: "ReviewService"):
        self.service = service
        self.jobs: dict[str, JobStatus] = {}
        self._queue: "queue.Queue[Optional[str]]" = queue.Queue()
        self._specs: dict[str, SearchSpec] = {}
        self._lock = threading.Lock()
        self._worker = threading.Thread(target=self._run, daemon=True)
        self._worker.start()

    def submit(self, spec: SearchSpec) -> str:
        job_id = uuid.uuid4().hex[:12]
        with self._lock:
            self.jobs[job_id] = JobStatus(job_id)
            self._specs[job_id] = spec
        self._queue.put(job_id)
        return job_id

    def get(self, job_id: str) -> Optional[JobStatus]:
        with self._lock:
            return self.jobs.get(job_id)

    def stop(self) -> None:
        self._queue.put(None)
        self._worker.join(timeout=5)

    def _run(self) -> None:
        while True:
            job_id = self._queue.get()
            if job_id is None:
                return
            status = self.jobs[job_id]
            spec = self._specs.pop(job_id)
            try:
                summary = self.service.execute_search(spec, status)
                status.outcomes = summary.outcomes
                status.warnings = summary.warnings
                status.advance(JobState.DONE)
            except Exception as exc:  # job failures are reported, not raised
                status.error = str(exc)
                status.advance(JobState.FAILED)


class ReviewService:
    """Shared state behind the endpoints: graph, sources, enricher."""

    def __init__(
        self,
        registry: SourceRegistry,
        enricher: Enricher,
        data_dir: Optional[Path] = None,
    ):
        self.registry = registry
        self.enricher = enricher
        self.data_dir = Path(data_dir) if data_dir else None
        self.kg: KnowledgeGraph = (
            load_graph(self.data_dir) if self.data_dir else KnowledgeGraph()
        )
        self.last_run: Optional[RunSummary] = (
            load_run_summary(self.data_dir) if self.data_dir else None
        )
        self.jobs = JobManager(self)

    def execute_search(self, spec: SearchSpec, status: JobStatus) -> RunSummary:
        def on_state(state: str):
            status.advance(JobState(state))

        def on_source(sid: str, after_search: int, after_filter: int):
            status.per_source[sid] = {
                "after_search": after_search,
                "after_filter": after_filter,
            }

        summary = run_review(
            spec, self.registry, self.enricher, self.kg, on_state, on_source
        )
        self.last_run = summary
        self.persist()
        if self.data_dir:
            save_run_summary(summary, self.data_dir)
        return summary

    def persist(self) -> None:
        if self.data_dir:
            save_graph(self.kg.snapshot(), self.data_dir)

    def shutdown(self) -> None:
        self.jobs.stop()
        self.persist()


class SearchRequest(BaseModel):
    terms: str
    year_from: int
    year_to: int
    sources: Optional[list[str]] = None
    max_per_source: Optional[int] = None


class QueryRequest(BaseModel):
    q: str


def create_app(
    corpus_dir: Optional[str | Path] = None,
    data_dir: Optional[str | Path] = None,
    taxonomy_path: Optional[str | Path] = None,
    top_keywords: int = 5,
    registry: Optional[SourceRegistry] = None,
    service: Optional[ReviewService] = None,
) -> FastAPI:
    if service is None:
        if registry is None:
            if corpus_dir is None:
                raise ValueError("either a corpus directory or a registry is required")
            registry = fixture_registry(corpus_dir)
        taxonomy = load_taxonomy(taxonomy_path) if taxonomy_path else Taxonomy()
        enricher = KeywordTaxonomyEnricher(taxonomy, top_k=top_keywords)
        service = ReviewService(registry, enricher, Path(data_dir) if data_dir else None)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        yield
        service.shutdown()

    app = FastAPI(title="litgraph", lifespan=lifespan)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.service = service

    @app.post("/search")
    def post_search(request: SearchRequest):
        try:
            expr = parse_search_expr(request.terms)
        except ExpressionError as exc:
            raise HTTPException(
                status_code=400,
                detail={"error": str(exc), "position": exc.position, "field": "terms"},
            )
        spec = SearchSpec(
            expr=expr,
            year_from=request.year_from,
            year_to=request.year_to,
            sources=frozenset(request.sources or service.registry.ids()),
            **(
                {"max_per_source": request.max_per_source}
                if request.max_per_source is not None
                else {}
            ),
        )
        violations = validate_spec(spec, service.registry.ids())
        if violations:
            raise HTTPException(
                status_code=400,
                detail={
                    "error": "invalid search specification",
                    "violations": [
                        {"field": v.field, "rule": v.rule, "detail": v.detail}
                        for v in violations
                    ],
                },
            )
        return {"job_id": service.jobs.submit(spec)}

    @app.get("/jobs/{job_id}")
    def get_job(job_id: str):
        status = service.jobs.get(job_id)
        if status is None:
            raise HTTPException(status_code=404, detail={"error": "unknown job"})
        return status.to_dict()

    @app.get("/graph")
    def get_graph():
        snapshot = service.kg.snapshot()
        return {
            "nodes": [
                {"id": n.id, "label": n.label.value, "key": n.key, "props": n.props}
                for n in snapshot.nodes()
            ],
            "edges": [
                {"src": e.src, "dst": e.dst, "label": e.label.value, "props": e.props}
                for e in snapshot.edges()
            ],
        }

    @app.get("/clusters/{dimension}")
    def get_clusters(dimension: str):
        if dimension not in CLUSTER_DIMENSIONS:
            raise HTTPException(
                status_code=400,
                detail={"error": f"dimension must be one of {CLUSTER_DIMENSIONS}"},
            )
        clusters = cluster_by(service.kg.snapshot(), dimension)
        return {
            "dimension": clusters.dimension,
            "clusters": {key: list(members) for key, members in clusters.clusters.items()},
        }

    @app.post("/query")
    def post_query(request: QueryRequest):
        try:
            ast = parse_query(request.q)
        except (QuerySyntaxError, UnknownAttributeError, QueryTypeError) as exc:
            raise HTTPException(
                status_code=400,
                detail={"error": str(exc), "position": getattr(exc, "position", None)},
            )
        result = execute(service.kg.snapshot(), ast)
        if isinstance(result, ResultTable):
            return {"columns": list(result.columns), "rows": list(result.rows)}
        assert isinstance(result, ClusterSet)
        return {
            "dimension": result.dimension,
            "clusters": {key: list(members) for key, members in result.clusters.items()},
        }

    @app.get("/eval")
    def get_eval(benchmark: str):
        if service.last_run is None:
            raise HTTPException(
                status_code=409,
                detail={"error": "no completed search run to evaluate; POST /search first"},
            )
        path = Path(benchmark)
        if not path.exists():
            raise HTTPException(
                status_code=400, detail={"error": f"benchmark file not found: {benchmark}"}
            )
        benchmark_set = load_benchmark(path)
        snapshot = service.kg.snapshot()
        report = build_report(
            service.last_run.to_source_counts(),
            graph_field_labels(snapshot),
            benchmark_set,
        )
        payload = report_to_dict(report)
        payload["rendered"] = render_report(report)
        return payload

    @app.get("/stats")
    def get_stats():
        stats = service.kg.snapshot().stats()
        return {
            "node_counts": stats.node_counts,
            "edge_counts": stats.edge_counts,
            "total_nodes": stats.total_nodes,
            "total_edges": stats.total_edges,
        }

    return app
