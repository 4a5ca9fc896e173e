"""End-to-end review pipeline: acquire, enrich, merge, persist.

One function drives the whole flow so the CLI and the HTTP service stay
thin adapters producing identical graphs for identical inputs.  A run
summary (per-source funnel counts and the dedup keys each source
contributed) is persisted next to the graph CSVs; the evaluation
command reads it back to reconstruct the report's "After Search"
column, which the graph alone does not retain.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

from .acquisition import AcquisitionResult, SourceRegistry, run_acquisition
from .evaluation import SourceCounts
from .graph import KnowledgeGraph, export_csv, import_csv
from .search import SearchSpec
from .textproc import Enricher

RUN_SUMMARY_FILE = "run_summary.json"


@dataclass
class SourceRunStats:
    after_search: int
    after_filter: int
    record_keys: list[str] = field(default_factory=list)


@dataclass
class RunSummary:
    per_source: dict[str, SourceRunStats] = field(default_factory=dict)
    outcomes: dict[str, int] = field(
        default_factory=lambda: {"created": 0, "updated": 0, "unchanged": 0}
    )
    warnings: list[str] = field(default_factory=list)

    @property
    def total_records(self) -> int:
        return sum(s.after_filter for s in self.per_source.values())

    def to_source_counts(self) -> dict[str, SourceCounts]:
        return {
            sid: SourceCounts(
                after_search=s.after_search,
                after_filter=s.after_filter,
                auto_keys=frozenset(s.record_keys),
            )
            for sid, s in self.per_source.items()
        }


def run_review(
    spec: SearchSpec,
    registry: SourceRegistry,
    enricher: Enricher,
    kg: KnowledgeGraph,
    on_state: Optional[Callable[[str], None]] = None,
    on_source: Optional[Callable[[str, int, int], None]] = None,
) -> RunSummary:
    """Run acquisition, enrich every record, and merge into the graph."""
    from .graph import dedup_key  # local import keeps module deps one-way

    def notify(state: str):
        if on_state is not None:
            on_state(state)

    notify("fetching")
    acq: AcquisitionResult = run_acquisition(
        spec,
        registry,
        on_source=(
            (lambda sid, sr: on_source(sid, sr.after_search_count, len(sr.records)))
            if on_source
            else None
        ),
    )

    notify("enriching")
    enriched = [(record, enricher.enrich(record)) for record in acq.all_records()]

    notify("merging")
    summary = RunSummary(warnings=list(acq.warnings))
    for sid, sr in acq.per_source.items():
        summary.per_source[sid] = SourceRunStats(
            after_search=sr.after_search_count,
            after_filter=len(sr.records),
            record_keys=[dedup_key(r) for r in sr.records],
        )
    for record, enrichment in enriched:
        _, outcome = kg.upsert_publication(record, enrichment)
        summary.outcomes[outcome.value] += 1
    return summary


# -- data-directory persistence --


def load_graph(data_dir: str | Path) -> KnowledgeGraph:
    """The stored graph, or a fresh one if the directory has none yet."""
    data_dir = Path(data_dir)
    if (data_dir / "nodes.csv").exists() and (data_dir / "edges.csv").exists():
        return import_csv(data_dir)
    return KnowledgeGraph()


def save_graph(kg: KnowledgeGraph, data_dir: str | Path) -> None:
    export_csv(kg, data_dir)


def save_run_summary(summary: RunSummary, data_dir: str | Path) -> Path:
    data_dir = Path(data_dir)
    data_dir.mkdir(parents=True, exist_ok=True)
    path = data_dir / RUN_SUMMARY_FILE
    payload = {
        "per_source": {
            sid: {
                "after_search": s.after_search,
                "after_filter": s.after_filter,
                "record_keys": s.record_keys,
            }
            for sid, s in summary.per_source.items()
        },
        "outcomes": summary.outcomes,
        "warnings": summary.warnings,
    }
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", "utf-8")
    return path


def load_run_summary(data_dir: str | Path) -> Optional[RunSummary]:
    path = Path(data_dir) / RUN_SUMMARY_FILE
    if not path.exists():
        return None
    payload = json.loads(path.read_text("utf-8"))
    summary = RunSummary(
        outcomes=payload.get("outcomes", {}),
        warnings=payload.get("warnings", []),
    )
    for sid, stats in payload.get("per_source", {}).items():
        summary.per_source[sid] = SourceRunStats(
            after_search=stats["after_search"],
            after_filter=stats["after_filter"],
            record_keys=list(stats["record_keys"]),
        )
    return summary


def graph_field_labels(kg: KnowledgeGraph) -> dict[str, str]:
    """Dedup key -> assigned field label, read from APPLIED_IN edges."""
    from .graph import EdgeLabel

    return {
        pub.key: kg.out_target(pub.id, EdgeLabel.APPLIED_IN).key
        for pub in kg.publications()
    }
