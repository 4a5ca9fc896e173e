"""Publication acquisition: source connectors, extraction, filtering.

Live publisher scraping is replaced by a connector abstraction.  A
connector owns a :class:`SourceDescriptor`, fetches raw result pages,
and extracts :class:`PublicationRecord` items from its raw payloads.
The shipped :class:`FixtureConnector` reads newline-delimited JSON from
a local corpus directory, which keeps the whole pipeline deterministic
and desk-testable; a real network connector can be registered without
touching anything downstream.
"""

from __future__ import annotations

import json
import re
import time
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable, Iterable, Optional, Protocol

from .search import DocumentText, SearchSpec, matches, render_search_expr, validate_spec
from urllib.parse import quote


class AcquisitionError(Exception):
    """Base class for acquisition failures."""


class TemplateError(AcquisitionError):
    """A request template kept an unresolved placeholder."""


class SourceUnavailableError(AcquisitionError):
    """The source cannot be reached (for fixtures: corpus file missing)."""


class RateLimitedError(AcquisitionError):
    def __init__(self, message: str, retry_after: float = 0.0):
        super().__init__(message)
        self.retry_after = retry_after


class MalformedPayloadError(AcquisitionError):
    """The source returned a payload that cannot be parsed."""


class MissingTitleError(AcquisitionError):
    """Raw item has no usable title; the record is dropped."""


class MissingYearError(AcquisitionError):
    """Raw item has no usable year; the record is dropped."""


class AllSourcesFailedError(AcquisitionError):
    """Every requested source errored out."""


class PubType(str, Enum):
    JOURNAL = "journal"
    CONFERENCE = "conference"
    BOOK_CHAPTER = "book_chapter"
    OTHER = "other"


_PUB_TYPE_ALIASES = {
    "journal": PubType.JOURNAL,
    "journal article": PubType.JOURNAL,
    "article": PubType.JOURNAL,
    "conference": PubType.CONFERENCE,
    "conference paper": PubType.CONFERENCE,
    "proceedings": PubType.CONFERENCE,
    "book_chapter": PubType.BOOK_CHAPTER,
    "book chapter": PubType.BOOK_CHAPTER,
    "chapter": PubType.BOOK_CHAPTER,
}


def parse_pub_type(value: object) -> PubType:
    if isinstance(value, str):
        return _PUB_TYPE_ALIASES.get(value.strip().lower(), PubType.OTHER)
    return PubType.OTHER


@dataclass(frozen=True)
class SourceDescriptor:
    """Identity and request shape of one literature source."""

    id: str
    display_name: str
    request_template: str
    page_size: int = 20

    def __post_init__(self):
        if not self.id.strip():
            raise ValueError("source id must be non-empty")
        if self.page_size < 1:
            raise ValueError("page_size must be positive")
        if "{terms}" not in self.request_template:
            raise ValueError("request template must contain the {terms} placeholder")


@dataclass(frozen=True)
class SourceRequest:
    source_id: str
    resolved_locator: str
    page: int


_PLACEHOLDER = re.compile(r"\{(\w+)\}")


def build_request(spec: SearchSpec, source: SourceDescriptor, page: int) -> SourceRequest:
    """Substitute the search criteria into the source's request template.

    The rendered expression is percent-encoded; year bounds and page go
    in verbatim.  Deterministic for identical inputs.
    """
    if page < 1:
        raise ValueError("page must be >= 1")
    values = {
        "terms": quote(render_search_expr(spec.expr), safe=""),
        "year_from": str(spec.year_from),
        "year_to": str(spec.year_to),
        "page": str(page),
    }
    locator = source.request_template
    for name, value in values.items():
        locator = locator.replace("{" + name + "}", value)
    leftover = _PLACEHOLDER.search(locator)
    if leftover:
        raise TemplateError(
            f"source {source.id!r}: unresolved placeholder {{{leftover.group(1)}}}"
        )
    return SourceRequest(source.id, locator, page)


@dataclass(frozen=True)
class PublicationRecord:
    """One publication: the seven extracted data items plus provenance."""

    title: str
    authors: tuple[str, ...]
    abstract: str
    year: int
    pub_type: PubType
    keywords: tuple[str, ...]
    citation_count: int
    url: str
    source_id: str
    doi: Optional[str] = None

    def __post_init__(self):
        if not self.title.strip():
            raise ValueError("title must be non-empty")
        if not 1900 <= self.year <= 2100:
            raise ValueError(f"year out of range: {self.year}")
        if self.citation_count < 0:
            raise ValueError("citation_count must be >= 0")
        object.__setattr__(self, "authors", tuple(self.authors))
        object.__setattr__(self, "keywords", tuple(self.keywords))

    def document_text(self) -> DocumentText:
        return DocumentText(self.title, self.abstract, self.keywords)


@dataclass(frozen=True)
class RawResultPage:
    items: tuple[dict, ...]
    has_more: bool


class SourceConnector(Protocol):
    """Connector contract: descriptor, paged fetch, record extraction."""

    @property
    def descriptor(self) -> SourceDescriptor: ...

    def fetch_page(self, request: SourceRequest) -> RawResultPage: ...

    def extract_record(
        self, raw_item: dict, warnings: Optional[list[str]] = None
    ) -> PublicationRecord: ...


def extract_record(
    raw_item: dict,
    source: SourceDescriptor,
    warnings: Optional[list[str]] = None,
) -> PublicationRecord:
    """Extract a record from one corpus-format raw item.

    Missing citations default to 0, missing keywords to the empty list;
    a missing abstract still yields a record plus a warning.  Items
    without a usable title or year raise and are dropped upstream.
    """
    title = str(raw_item.get("title") or "").strip()
    if not title:
        raise MissingTitleError(f"source {source.id!r}: item has no title")
    year_raw = raw_item.get("year")
    try:
        year = int(year_raw)  # type: ignore[arg-type]
    except (TypeError, ValueError):
        raise MissingYearError(
            f"source {source.id!r}: {title!r} has no usable year ({year_raw!r})"
        ) from None
    if not 1900 <= year <= 2100:
        raise MissingYearError(
            f"source {source.id!r}: {title!r} has out-of-range year {year}"
        )
    abstract = raw_item.get("abstract")
    if abstract is None:
        if warnings is not None:
            warnings.append(f"{source.id}: {title!r} has no abstract")
        abstract = ""
    citations = raw_item.get("citations")
    doi = raw_item.get("doi")
    return PublicationRecord(
        title=title,
        authors=tuple(str(a) for a in raw_item.get("authors") or []),
        abstract=str(abstract),
        year=year,
        pub_type=parse_pub_type(raw_item.get("type")),
        keywords=tuple(str(k) for k in raw_item.get("keywords") or []),
        citation_count=int(citations) if citations is not None else 0,
        url=str(raw_item.get("url") or ""),
        source_id=source.id,
        doi=str(doi) if doi else None,
    )


class FixtureConnector:
    """Reads one ``<source_id>.jsonl`` file from a corpus directory."""

    def __init__(self, descriptor: SourceDescriptor, corpus_dir: str | Path):
        self._descriptor = descriptor
        self.corpus_dir = Path(corpus_dir)

    @property
    def descriptor(self) -> SourceDescriptor:
        return self._descriptor

    def _load(self) -> list[dict]:
        path = self.corpus_dir / f"{self._descriptor.id}.jsonl"
        if not path.exists():
            raise SourceUnavailableError(f"no corpus file for {self._descriptor.id!r}: {path}")
        items = []
        for lineno, line in enumerate(path.read_text("utf-8").splitlines(), start=1):
            if not line.strip():
                continue
            try:
                item = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedPayloadError(
                    f"{path.name}:{lineno}: invalid JSON ({exc.msg})"
                ) from exc
            if not isinstance(item, dict):
                raise MalformedPayloadError(f"{path.name}:{lineno}: item is not an object")
            items.append(item)
        return items

    def fetch_page(self, request: SourceRequest) -> RawResultPage:
        items = self._load()
        size = self._descriptor.page_size
        start = (request.page - 1) * size
        page_items = items[start : start + size]
        return RawResultPage(tuple(page_items), has_more=start + size < len(items))

    def extract_record(
        self, raw_item: dict, warnings: Optional[list[str]] = None
    ) -> PublicationRecord:
        return extract_record(raw_item, self._descriptor, warnings)


class SourceRegistry:
    """Ordered registry of connectors, keyed by source id."""

    def __init__(self, connectors: Iterable[SourceConnector] = ()):
        self._connectors: dict[str, SourceConnector] = {}
        for connector in connectors:
            self.register(connector)

    def register(self, connector: SourceConnector) -> None:
        sid = connector.descriptor.id
        if sid in self._connectors:
            raise ValueError(f"source id already registered: {sid!r}")
        self._connectors[sid] = connector

    def get(self, source_id: str) -> SourceConnector:
        try:
            return self._connectors[source_id]
        except KeyError:
            raise KeyError(f"no connector registered for {source_id!r}") from None

    def ids(self) -> list[str]:
        return list(self._connectors)

    def __contains__(self, source_id: str) -> bool:
        return source_id in self._connectors

    def __iter__(self):
        return iter(self._connectors.values())


# The five sources the demo review ran against, in report order.
DEFAULT_SOURCES = (
    ("db1", "IEEEExplore"),
    ("db2", "Springer Link"),
    ("db3", "Science Direct"),
    ("db4", "ACM"),
    ("db5", "Wiley"),
)


def default_descriptors(page_size: int = 20) -> list[SourceDescriptor]:
    return [
        SourceDescriptor(
            id=sid,
            display_name=name,
            request_template=(
                f"https://example.org/{sid}/search"
                "?q={terms}&from={year_from}&to={year_to}&page={page}"
            ),
            page_size=page_size,
        )
        for sid, name in DEFAULT_SOURCES
    ]


def fixture_registry(corpus_dir: str | Path, page_size: int = 20) -> SourceRegistry:
    """Registry of fixture connectors for the five default sources."""
    return SourceRegistry(
        FixtureConnector(desc, corpus_dir) for desc in default_descriptors(page_size)
    )


def apply_criteria(
    records: list[PublicationRecord], spec: SearchSpec
) -> list[PublicationRecord]:
    """Keep records inside the year range whose text matches the expression."""
    return [
        r
        for r in records
        if spec.year_from <= r.year <= spec.year_to
        and matches(spec.expr, r.document_text())
    ]


@dataclass
class SourceResult:
    after_search_count: int
    records: list[PublicationRecord] = field(default_factory=list)


@dataclass
class AcquisitionResult:
    per_source: dict[str, SourceResult] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    @property
    def total_records(self) -> int:
        return sum(len(sr.records) for sr in self.per_source.values())

    def all_records(self) -> list[PublicationRecord]:
        return [r for sr in self.per_source.values() for r in sr.records]


def _fetch_all_pages(
    connector: SourceConnector,
    spec: SearchSpec,
    sleep: Callable[[float], None],
    warnings: list[str],
) -> list[dict]:
    sid = connector.descriptor.id
    raw_items: list[dict] = []
    page = 1
    while True:
        request = build_request(spec, connector.descriptor, page)
        try:
            result = connector.fetch_page(request)
        except RateLimitedError as exc:
            # One retry after the indicated delay, then give up on the page.
            sleep(exc.retry_after)
            try:
                result = connector.fetch_page(request)
            except RateLimitedError as again:
                warnings.append(f"{sid}: still rate-limited after retry: {again}")
                break
        raw_items.extend(result.items)
        if not result.has_more or len(raw_items) >= spec.max_per_source:
            break
        page += 1
    return raw_items


def run_acquisition(
    spec: SearchSpec,
    registry: SourceRegistry,
    sleep: Callable[[float], None] = time.sleep,
    on_source: Optional[Callable[[str, SourceResult], None]] = None,
) -> AcquisitionResult:
    """Fetch, extract, and filter from every requested source.

    Per-source failures downgrade to warnings and the remaining sources
    proceed; only a run in which every source failed raises.  Output
    order is registry order, independent of anything else.
    """
    violations = validate_spec(spec, registry.ids())
    if violations:
        raise ValueError(
            "invalid search spec: " + "; ".join(str(v) for v in violations)
        )
    result = AcquisitionResult()
    failures = 0
    requested = [sid for sid in registry.ids() if sid in spec.sources]
    for sid in requested:
        connector = registry.get(sid)
        try:
            raw_items = _fetch_all_pages(connector, spec, sleep, result.warnings)
            records: list[PublicationRecord] = []
            for item in raw_items:
                try:
                    records.append(connector.extract_record(item, result.warnings))
                except (MissingTitleError, MissingYearError) as exc:
                    result.warnings.append(f"{sid}: dropped record: {exc}")
            retained = apply_criteria(records, spec)[: spec.max_per_source]
            source_result = SourceResult(len(raw_items), retained)
            result.per_source[sid] = source_result
            if on_source is not None:
                on_source(sid, source_result)
        except (SourceUnavailableError, MalformedPayloadError, TemplateError) as exc:
            failures += 1
            result.warnings.append(f"{sid}: source failed: {exc}")
    if requested and failures == len(requested):
        raise AllSourcesFailedError(
            f"all {failures} requested sources failed; warnings: {result.warnings}"
        )
    return result
