import json
import random

import pytest

from litgraph.acquisition import (
    AllSourcesFailedError,
    FixtureConnector,
    MalformedPayloadError,
    MissingTitleError,
    MissingYearError,
    PublicationRecord,
    PubType,
    RateLimitedError,
    RawResultPage,
    SourceDescriptor,
    SourceRegistry,
    SourceRequest,
    SourceUnavailableError,
    TemplateError,
    apply_criteria,
    build_request,
    extract_record,
    run_acquisition,
)
from litgraph.search import And, SearchSpec, Term, matches, parse_search_expr


def descriptor(sid="db1", page_size=20):
    return SourceDescriptor(
        id=sid,
        display_name=sid.upper(),
        request_template=(
            f"https://example.org/{sid}/search"
            "?q={terms}&from={year_from}&to={year_to}&page={page}"
        ),
        page_size=page_size,
    )


def spec_for(sids, terms="context", year_from=2016, year_to=2022, **kwargs):
    return SearchSpec(
        expr=parse_search_expr(terms),
        year_from=year_from,
        year_to=year_to,
        sources=frozenset(sids),
        **kwargs,
    )


def raw_item(title, year=2020, **extra):
    item = {
        "title": title,
        "authors": ["A. One", "B. Two"],
        "abstract": f"A study of context in {title}",
        "year": year,
        "type": "journal",
        "keywords": ["context"],
        "citations": 3,
        "url": f"https://example.org/{title.replace(' ', '-')}",
    }
    item.update(extra)
    return item


def write_corpus(directory, sid, items):
    path = directory / f"{sid}.jsonl"
    path.write_text("\n".join(json.dumps(i) for i in items) + "\n", "utf-8")
    return path


# -- build_request --

def test_build_request_encodes_terms_and_years():
    spec = spec_for(
        {"db1"}, terms="context-awareness AND automation systems"
    )
    request = build_request(spec, descriptor("db1"), 1)
    assert "context-awareness%20AND%20automation%20systems" in request.resolved_locator
    assert "from=2016" in request.resolved_locator
    assert "to=2022" in request.resolved_locator
    assert "{" not in request.resolved_locator


def test_build_request_pages_differ_only_in_page():
    spec = spec_for({"db1"})
    first = build_request(spec, descriptor("db1"), 1)
    second = build_request(spec, descriptor("db1"), 2)
    assert first.resolved_locator.replace("page=1", "page=2") == second.resolved_locator


def test_build_request_deterministic():
    spec = spec_for({"db1"})
    assert build_request(spec, descriptor("db1"), 1) == build_request(spec, descriptor("db1"), 1)


def test_build_request_unresolved_placeholder():
    source = SourceDescriptor(
        id="bad", display_name="Bad", request_template="https://x/{terms}&u={unknown}"
    )
    with pytest.raises(TemplateError):
        build_request(spec_for({"bad"}), source, 1)


def test_descriptor_requires_terms_placeholder():
    with pytest.raises(ValueError):
        SourceDescriptor(id="x", display_name="X", request_template="https://x/search")


# -- fixture connector paging --

def test_fixture_connector_single_short_page(tmp_path):
    write_corpus(tmp_path, "db5", [raw_item(f"wiley paper {i}") for i in range(9)])
    connector = FixtureConnector(descriptor("db5", page_size=20), tmp_path)
    page = connector.fetch_page(SourceRequest("db5", "https://x", 1))
    assert len(page.items) == 9
    assert page.has_more is False


def test_fixture_connector_empty_source(tmp_path):
    write_corpus(tmp_path, "db1", [])
    connector = FixtureConnector(descriptor("db1"), tmp_path)
    page = connector.fetch_page(SourceRequest("db1", "https://x", 1))
    assert page.items == ()
    assert page.has_more is False


def test_fixture_connector_page_beyond_last(tmp_path):
    write_corpus(tmp_path, "db1", [raw_item(f"p{i}") for i in range(5)])
    connector = FixtureConnector(descriptor("db1", page_size=5), tmp_path)
    page = connector.fetch_page(SourceRequest("db1", "https://x", 2))
    assert page.items == ()
    assert page.has_more is False


def test_fixture_connector_paginates(tmp_path):
    write_corpus(tmp_path, "db1", [raw_item(f"p{i}") for i in range(7)])
    connector = FixtureConnector(descriptor("db1", page_size=3), tmp_path)
    sizes = []
    for page_no in range(1, 4):
        page = connector.fetch_page(SourceRequest("db1", "https://x", page_no))
        sizes.append((len(page.items), page.has_more))
    assert sizes == [(3, True), (3, True), (1, False)]


def test_fixture_connector_missing_file(tmp_path):
    connector = FixtureConnector(descriptor("db9"), tmp_path)
    with pytest.raises(SourceUnavailableError):
        connector.fetch_page(SourceRequest("db9", "https://x", 1))


def test_fixture_connector_malformed_line(tmp_path):
    (tmp_path / "db1.jsonl").write_text('{"title": "ok", "year": 2020}\nnot json\n', "utf-8")
    connector = FixtureConnector(descriptor("db1"), tmp_path)
    with pytest.raises(MalformedPayloadError):
        connector.fetch_page(SourceRequest("db1", "https://x", 1))


# -- extract_record --

def test_extract_record_full_item():
    record = extract_record(raw_item("Context study", doi="10.1000/X1"), descriptor())
    assert record.title == "Context study"
    assert record.authors == ("A. One", "B. Two")
    assert record.year == 2020
    assert record.pub_type is PubType.JOURNAL
    assert record.keywords == ("context",)
    assert record.citation_count == 3
    assert record.doi == "10.1000/X1"
    assert record.source_id == "db1"


def test_extract_record_defaults():
    item = {"title": "Sparse", "year": 2019}
    warnings = []
    record = extract_record(item, descriptor(), warnings)
    assert record.citation_count == 0
    assert record.keywords == ()
    assert record.abstract == ""
    assert record.url == ""
    assert record.doi is None
    assert any("abstract" in w for w in warnings)


def test_extract_record_missing_title():
    with pytest.raises(MissingTitleError):
        extract_record({"year": 2020}, descriptor())
    with pytest.raises(MissingTitleError):
        extract_record({"title": "   ", "year": 2020}, descriptor())


def test_extract_record_missing_or_bad_year():
    with pytest.raises(MissingYearError):
        extract_record({"title": "x"}, descriptor())
    with pytest.raises(MissingYearError):
        extract_record({"title": "x", "year": "soon"}, descriptor())
    with pytest.raises(MissingYearError):
        extract_record({"title": "x", "year": 1492}, descriptor())


def test_extract_record_type_aliases():
    for value, expected in [
        ("conference paper", PubType.CONFERENCE),
        ("book chapter", PubType.BOOK_CHAPTER),
        ("weird", PubType.OTHER),
        (None, PubType.OTHER),
    ]:
        record = extract_record(raw_item("t", type=value), descriptor())
        assert record.pub_type is expected


# -- apply_criteria --

def make_record(title, year, abstract="", keywords=()):
    return PublicationRecord(
        title=title,
        authors=(),
        abstract=abstract,
        year=year,
        pub_type=PubType.OTHER,
        keywords=tuple(keywords),
        citation_count=0,
        url="",
        source_id="db1",
    )


def test_apply_criteria_year_bounds():
    spec = spec_for({"db1"}, terms="context")
    records = [make_record("context a", 2015), make_record("context b", 2016)]
    assert apply_criteria(records, spec) == [records[1]]


def test_apply_criteria_empty():
    assert apply_criteria([], spec_for({"db1"})) == []


def test_apply_criteria_matches_brute_force():
    rng = random.Random(7)
    vocab = ["context", "graph", "automation", "survey", "sensor"]
    records = [
        make_record(
            title=" ".join(rng.sample(vocab, 2)),
            year=rng.randint(2010, 2025),
            abstract=" ".join(rng.choices(vocab, k=6)),
        )
        for _ in range(50)
    ]
    expr = And(Term("context"), Term("graph"))
    spec = SearchSpec(expr, 2016, 2022, frozenset({"db1"}))
    expected = []
    for r in records:  # independent filter loop
        blob = f"{r.title} {r.abstract} {' '.join(r.keywords)}".lower()
        if 2016 <= r.year <= 2022 and "context" in blob and "graph" in blob:
            expected.append(r)
    assert apply_criteria(records, spec) == expected


def test_apply_criteria_idempotent():
    rng = random.Random(3)
    records = [make_record(f"context {i}", rng.randint(2014, 2024)) for i in range(30)]
    spec = spec_for({"db1"})
    once = apply_criteria(records, spec)
    assert apply_criteria(once, spec) == once


def test_apply_criteria_narrower_years_subset():
    records = [make_record(f"context {i}", 2010 + i % 14) for i in range(40)]
    wide = apply_criteria(records, spec_for({"db1"}, year_from=2012, year_to=2023))
    narrow = apply_criteria(records, spec_for({"db1"}, year_from=2014, year_to=2020))
    assert set(r.title for r in narrow) <= set(r.title for r in wide)


# -- run_acquisition --

def five_source_corpus(tmp_path, sizes=(45, 53, 29, 17, 9)):
    registry = SourceRegistry()
    for idx, size in enumerate(sizes, start=1):
        sid = f"db{idx}"
        items = [
            raw_item(f"{sid} context paper {i}", year=2016 + i % 7) for i in range(size)
        ]
        write_corpus(tmp_path, sid, items)
        registry.register(FixtureConnector(descriptor(sid), tmp_path))
    return registry


def test_run_acquisition_totals_match_fixture_sizes(tmp_path):
    registry = five_source_corpus(tmp_path)
    spec = spec_for({f"db{i}" for i in range(1, 6)})
    result = run_acquisition(spec, registry)
    assert [sr.after_search_count for sr in result.per_source.values()] == [45, 53, 29, 17, 9]
    assert result.total_records == 153
    assert list(result.per_source) == ["db1", "db2", "db3", "db4", "db5"]


def test_run_acquisition_single_source(tmp_path):
    registry = five_source_corpus(tmp_path)
    result = run_acquisition(spec_for({"db3"}), registry)
    assert list(result.per_source) == ["db3"]


def test_run_acquisition_funnel_never_grows(tmp_path):
    registry = SourceRegistry()
    items = [raw_item(f"context p{i}", year=2000 + i) for i in range(30)]
    items.append({"year": 2020})  # no title: dropped at extraction
    write_corpus(tmp_path, "db1", items)
    registry.register(FixtureConnector(descriptor("db1", page_size=7), tmp_path))
    result = run_acquisition(spec_for({"db1"}), registry)
    sr = result.per_source["db1"]
    assert sr.after_search_count == 31
    assert len(sr.records) <= sr.after_search_count
    assert any("dropped record" in w for w in result.warnings)


def test_run_acquisition_one_failing_source(tmp_path):
    registry = five_source_corpus(tmp_path)
    (tmp_path / "db2.jsonl").unlink()  # db2 becomes unavailable
    spec = spec_for({f"db{i}" for i in range(1, 6)})
    result = run_acquisition(spec, registry)
    assert len(result.per_source) == 4
    assert "db2" not in result.per_source
    assert sum("db2" in w for w in result.warnings) == 1


def test_run_acquisition_all_sources_failed(tmp_path):
    registry = SourceRegistry([FixtureConnector(descriptor("db1"), tmp_path)])
    with pytest.raises(AllSourcesFailedError):
        run_acquisition(spec_for({"db1"}), registry)


def test_run_acquisition_invalid_spec_rejected(tmp_path):
    registry = five_source_corpus(tmp_path)
    with pytest.raises(ValueError):
        run_acquisition(spec_for({"db1"}, year_from=2022, year_to=2016), registry)


def test_run_acquisition_deterministic(tmp_path):
    registry = five_source_corpus(tmp_path)
    spec = spec_for({f"db{i}" for i in range(1, 6)})
    first = run_acquisition(spec, registry)
    second = run_acquisition(spec, registry)
    assert first == second


def test_run_acquisition_respects_max_per_source(tmp_path):
    registry = SourceRegistry()
    write_corpus(tmp_path, "db1", [raw_item(f"context p{i}") for i in range(40)])
    registry.register(FixtureConnector(descriptor("db1", page_size=10), tmp_path))
    result = run_acquisition(spec_for({"db1"}, max_per_source=25), registry)
    sr = result.per_source["db1"]
    assert len(sr.records) <= 25
    assert sr.after_search_count <= 30  # stops paging once the cap is hit


class FlakyConnector:
    """Rate-limits the first fetch of every page, then serves it."""

    def __init__(self, inner):
        self.inner = inner
        self.attempts = 0
        self.delays = []

    @property
    def descriptor(self):
        return self.inner.descriptor

    def fetch_page(self, request):
        self.attempts += 1
        if self.attempts % 2 == 1:
            raise RateLimitedError("slow down", retry_after=0.25)
        return self.inner.fetch_page(request)

    def extract_record(self, raw, warnings=None):
        return self.inner.extract_record(raw, warnings)


def test_rate_limited_retried_once(tmp_path):
    write_corpus(tmp_path, "db1", [raw_item(f"context p{i}") for i in range(3)])
    flaky = FlakyConnector(FixtureConnector(descriptor("db1"), tmp_path))
    registry = SourceRegistry([flaky])
    slept = []
    result = run_acquisition(spec_for({"db1"}), registry, sleep=slept.append)
    assert len(result.per_source["db1"].records) == 3
    assert slept == [0.25]


class AlwaysLimited:
    def __init__(self, desc):
        self._descriptor = desc

    @property
    def descriptor(self):
        return self._descriptor

    def fetch_page(self, request):
        raise RateLimitedError("nope", retry_after=0.1)

    def extract_record(self, raw, warnings=None):
        raise AssertionError("unreachable")


def test_rate_limited_twice_warns_and_continues(tmp_path):
    write_corpus(tmp_path, "db2", [raw_item("context ok")])
    registry = SourceRegistry(
        [AlwaysLimited(descriptor("db1")), FixtureConnector(descriptor("db2"), tmp_path)]
    )
    result = run_acquisition(spec_for({"db1", "db2"}), registry, sleep=lambda _: None)
    assert result.per_source["db1"].after_search_count == 0
    assert len(result.per_source["db2"].records) == 1
    assert any("rate-limited" in w for w in result.warnings)
