"""Benchmark comparison: recall and label agreement against a manual review.

An automated run is scored against a manually curated benchmark in two
ways: extraction recall (what fraction of the benchmark's publications
the run also found) and classification agreement (how often field
labels match on the publications both found).  Per-source rows plus a
pooled TOTAL row mirror the shape of the per-database summary table.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Mapping, Optional, Union

from .acquisition import AcquisitionResult
from .graph import dedup_key
from .textproc import Taxonomy


class BenchmarkError(ValueError):
    """Malformed benchmark file."""


@dataclass(frozen=True)
class BenchmarkEntry:
    dedup_key: str
    field_label: str
    source_id: str


@dataclass(frozen=True)
class BenchmarkSet:
    entries: tuple[BenchmarkEntry, ...]

    def __post_init__(self):
        seen = set()
        for entry in self.entries:
            if entry.dedup_key in seen:
                raise BenchmarkError(f"duplicate dedup_key {entry.dedup_key!r}")
            seen.add(entry.dedup_key)

    def for_source(self, source_id: str) -> dict[str, str]:
        return {
            e.dedup_key: e.field_label
            for e in self.entries
            if e.source_id == source_id
        }


_BENCHMARK_HEADER = ["dedup_key", "field_label", "source_id"]


def load_benchmark(path: str | Path, taxonomy: Optional[Taxonomy] = None) -> BenchmarkSet:
    """Read the benchmark CSV; optionally validate labels against a taxonomy."""
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != _BENCHMARK_HEADER:
            raise BenchmarkError(
                f"expected header {','.join(_BENCHMARK_HEADER)}, got {header}"
            )
        entries = []
        for row_no, row in enumerate(reader, start=2):
            if len(row) != 3:
                raise BenchmarkError(f"row {row_no}: expected 3 fields, got {len(row)}")
            entries.append(BenchmarkEntry(row[0], row[1], row[2]))
    if taxonomy is not None:
        allowed = {lbl.lower() for lbl in taxonomy.labels} | {taxonomy.default_label.lower()}
        for entry in entries:
            if entry.field_label.lower() not in allowed:
                raise BenchmarkError(
                    f"benchmark label {entry.field_label!r} not in taxonomy"
                )
    return BenchmarkSet(tuple(entries))


def extraction_recall(
    auto_keys: set[str], manual_keys: set[str]
) -> Optional[Fraction]:
    """|auto ∩ manual| / |manual| as an exact fraction; None when the
    benchmark side is empty (rendered as N/A)."""
    if not manual_keys:
        return None
    return Fraction(len(auto_keys & manual_keys), len(manual_keys))


def classification_agreement(
    auto: Mapping[str, str], manual: Mapping[str, str]
) -> Optional[Fraction]:
    """Fraction of commonly-found publications with equal labels
    (case-insensitive); None when the two runs share nothing."""
    common = set(auto) & set(manual)
    if not common:
        return None
    agreed = sum(1 for key in common if auto[key].lower() == manual[key].lower())
    return Fraction(agreed, len(common))


def percent(value: Optional[Fraction]) -> str:
    """Render a fraction as an integer percentage, rounding half up."""
    if value is None:
        return "N/A"
    return f"{math.floor(value * 100 + Fraction(1, 2))}%"


@dataclass(frozen=True)
class SourceCounts:
    """What one source contributed to a run, for reporting."""

    after_search: int
    after_filter: int
    auto_keys: frozenset[str]


@dataclass(frozen=True)
class ReportRow:
    source_id: str
    after_search: int
    after_filter: int
    recall: Optional[Fraction]
    agreement: Optional[Fraction]


@dataclass(frozen=True)
class EvalReport:
    rows: tuple[ReportRow, ...]
    total: ReportRow


def counts_from_acquisition(acq: AcquisitionResult) -> dict[str, SourceCounts]:
    return {
        sid: SourceCounts(
            after_search=sr.after_search_count,
            after_filter=len(sr.records),
            auto_keys=frozenset(dedup_key(r) for r in sr.records),
        )
        for sid, sr in acq.per_source.items()
    }


def build_report(
    acquisition: Union[AcquisitionResult, Mapping[str, SourceCounts]],
    enriched: Mapping[str, str],
    benchmark: BenchmarkSet,
) -> EvalReport:
    """Per-source metrics plus a pooled TOTAL row.

    ``enriched`` maps dedup keys to assigned field labels.  Metrics for
    each source are restricted to that source's benchmark entries; the
    TOTAL row pools raw hit/size counts across sources rather than
    averaging percentages.
    """
    if isinstance(acquisition, AcquisitionResult):
        per_source = counts_from_acquisition(acquisition)
    else:
        per_source = dict(acquisition)

    rows = []
    total_search = total_filter = 0
    pooled_hits = pooled_manual = 0
    pooled_agreed = pooled_common = 0
    for sid, counts in per_source.items():
        manual = benchmark.for_source(sid)
        auto_keys = set(counts.auto_keys)
        recall = extraction_recall(auto_keys, set(manual))
        auto_labels = {k: enriched.get(k, "") for k in auto_keys}
        agreement = classification_agreement(auto_labels, manual)
        rows.append(ReportRow(sid, counts.after_search, counts.after_filter, recall, agreement))
        total_search += counts.after_search
        total_filter += counts.after_filter
        hits = auto_keys & set(manual)
        pooled_hits += len(hits)
        pooled_manual += len(manual)
        pooled_common += len(hits)
        pooled_agreed += sum(
            1 for k in hits if auto_labels[k].lower() == manual[k].lower()
        )
    total = ReportRow(
        "TOTAL",
        total_search,
        total_filter,
        Fraction(pooled_hits, pooled_manual) if pooled_manual else None,
        Fraction(pooled_agreed, pooled_common) if pooled_common else None,
    )
    return EvalReport(tuple(rows), total)


_REPORT_COLUMNS = (
    "Source",
    "After Search",
    "After Inclusion/Exclusion",
    "Extraction Recall",
    "Classification Agreement",
)


def render_report(
    report: EvalReport, display_names: Optional[Mapping[str, str]] = None
) -> str:
    """Plain-text table in the summary-report shape; byte-stable."""
    names = display_names or {}
    body = []
    for row in (*report.rows, report.total):
        label = row.source_id
        if label in names:
            label = f"{label} ({names[label]})"
        body.append(
            (
                label,
                str(row.after_search),
                str(row.after_filter),
                percent(row.recall),
                percent(row.agreement),
            )
        )
    widths = [
        max(len(_REPORT_COLUMNS[i]), *(len(r[i]) for r in body))
        for i in range(len(_REPORT_COLUMNS))
    ]
    def fmt(cells) -> str:
        return "  ".join(cell.ljust(widths[i]) for i, cell in enumerate(cells)).rstrip()
    lines = [fmt(_REPORT_COLUMNS), fmt(tuple("-" * w for w in widths))]
    lines.extend(fmt(r) for r in body)
    return "\n".join(lines) + "\n"


def report_to_dict(report: EvalReport) -> dict:
    """JSON-friendly report for the API."""
    def row_dict(row: ReportRow) -> dict:
        return {
            "source_id": row.source_id,
            "after_search": row.after_search,
            "after_filter": row.after_filter,
            "extraction_recall": None if row.recall is None else float(row.recall),
            "extraction_recall_pct": percent(row.recall),
            "classification_agreement": (
                None if row.agreement is None else float(row.agreement)
            ),
            "classification_agreement_pct": percent(row.agreement),
        }

    return {
        "rows": [row_dict(r) for r in report.rows],
        "total": row_dict(report.total),
    }
