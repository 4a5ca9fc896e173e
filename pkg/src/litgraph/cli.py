"""Command-line interface: search, query, cluster, export, import, eval, serve.

Every command is a thin adapter over the pipeline functions, so the CLI
and the HTTP service produce identical graphs for identical inputs.
The graph lives in a data directory (``--data`` / ``LITGRAPH_DATA``) as
the exported CSV pair plus the last run summary; commands import it on
start and export it back after mutating.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .acquisition import AllSourcesFailedError, fixture_registry
from .evaluation import BenchmarkError, build_report, load_benchmark, render_report
from .graph import export_csv, import_csv
from .pipeline import (
    graph_field_labels,
    load_graph,
    load_run_summary,
    run_review,
    save_graph,
    save_run_summary,
)
from .queries import (
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
from .textproc import KeywordTaxonomyEnricher, Taxonomy, load_taxonomy

_FLAG_FOR_FIELD = {
    "year_from/year_to": "--from/--to",
    "sources": "--sources",
    "max_per_source": "--max-per-source",
}


def _fail(message: str, code: int = 2) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _env_default(flag_value: str | None, env: str) -> str | None:
    return flag_value if flag_value is not None else os.environ.get(env)


def _data_dir(args) -> Path:
    value = _env_default(args.data, "LITGRAPH_DATA") or "litgraph-data"
    return Path(value)


def _load_taxonomy(args) -> Taxonomy:
    path = _env_default(getattr(args, "taxonomy", None), "LITGRAPH_TAXONOMY")
    return load_taxonomy(path) if path else Taxonomy()


def _format_table(columns, rows) -> str:
    def cell(value) -> str:
        if isinstance(value, list):
            return "; ".join(str(v) for v in value)
        return str(value)

    body = [[cell(row[c]) for c in columns] for row in rows]
    widths = [max(len(columns[i]), *(len(r[i]) for r in body)) if body else len(columns[i])
              for i in range(len(columns))]
    lines = [
        "  ".join(columns[i].ljust(widths[i]) for i in range(len(columns))).rstrip(),
        "  ".join("-" * w for w in widths),
    ]
    lines.extend(
        "  ".join(r[i].ljust(widths[i]) for i in range(len(columns))).rstrip()
        for r in body
    )
    return "\n".join(lines)


def cmd_search(args) -> int:
    corpus = _env_default(args.corpus, "LITGRAPH_CORPUS")
    if not corpus:
        return _fail("a corpus directory is required (--corpus or LITGRAPH_CORPUS)")
    try:
        expr = parse_search_expr(args.terms)
    except ExpressionError as exc:
        return _fail(f"--terms: {exc}")
    registry = fixture_registry(corpus)
    sources = (
        frozenset(s.strip() for s in args.sources.split(",") if s.strip())
        if args.sources
        else frozenset(registry.ids())
    )
    spec = SearchSpec(
        expr=expr,
        year_from=args.year_from,
        year_to=args.year_to,
        sources=sources,
        max_per_source=args.max_per_source,
    )
    violations = validate_spec(spec, registry.ids())
    if violations:
        for v in violations:
            flag = _FLAG_FOR_FIELD.get(v.field, v.field)
            print(f"error: {flag}: {v.rule}" + (f" ({v.detail})" if v.detail else ""),
                  file=sys.stderr)
        return 2

    try:
        taxonomy = _load_taxonomy(args)
    except OSError as exc:
        return _fail(f"--taxonomy: {exc}")
    enricher = KeywordTaxonomyEnricher(taxonomy, top_k=args.top_keywords)

    data_dir = _data_dir(args)
    kg = load_graph(data_dir)
    try:
        summary = run_review(spec, registry, enricher, kg)
    except AllSourcesFailedError as exc:
        return _fail(str(exc), code=1)
    save_graph(kg, data_dir)
    save_run_summary(summary, data_dir)

    for sid, stats in summary.per_source.items():
        print(f"{sid}: {stats.after_search} found, {stats.after_filter} retained")
    outcomes = ", ".join(f"{k}={v}" for k, v in summary.outcomes.items())
    print(f"merge outcomes: {outcomes}")
    print(f"publications in graph: {len(kg.publications())}")
    for warning in summary.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    return 0


def cmd_query(args) -> int:
    kg = load_graph(_data_dir(args))
    try:
        ast = parse_query(args.text)
    except (QuerySyntaxError, UnknownAttributeError, QueryTypeError) as exc:
        position = getattr(exc, "position", None)
        if position is not None:
            print(args.text, file=sys.stderr)
            print(" " * position + "^", file=sys.stderr)
        return _fail(str(exc))
    result = execute(kg, ast)
    if isinstance(result, ResultTable):
        print(_format_table(result.columns, result.rows))
        print(f"({len(result.rows)} rows)")
    else:
        assert isinstance(result, ClusterSet)
        _print_clusters(result)
    return 0


def _print_clusters(clusters: ClusterSet) -> None:
    print(f"clusters by {clusters.dimension}:")
    for key, members in clusters.clusters.items():
        print(f"  {key}: {len(members)}")


def cmd_cluster(args) -> int:
    kg = load_graph(_data_dir(args))
    _print_clusters(cluster_by(kg, args.by))
    return 0


def cmd_export(args) -> int:
    kg = load_graph(_data_dir(args))
    paths = export_csv(kg, args.out)
    for path in paths:
        print(path)
    return 0


def cmd_import(args) -> int:
    try:
        kg = import_csv(args.source)
    except (ValueError, FileNotFoundError) as exc:
        return _fail(str(exc))
    save_graph(kg, _data_dir(args))
    stats = kg.stats()
    print(f"imported {stats.total_nodes} nodes, {stats.total_edges} edges")
    return 0


def cmd_eval(args) -> int:
    data_dir = _data_dir(args)
    summary = load_run_summary(data_dir)
    if summary is None:
        return _fail(f"no run summary in {data_dir}; run `litgraph search` first", code=1)
    try:
        taxonomy = _load_taxonomy(args)
        benchmark = load_benchmark(
            args.benchmark, taxonomy if args.check_labels else None
        )
    except (BenchmarkError, OSError) as exc:
        return _fail(f"--benchmark: {exc}")
    kg = load_graph(data_dir)
    report = build_report(
        summary.to_source_counts(), graph_field_labels(kg), benchmark
    )
    print(render_report(report), end="")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .api import create_app

    corpus = _env_default(args.corpus, "LITGRAPH_CORPUS")
    if not corpus:
        return _fail("a corpus directory is required (--corpus or LITGRAPH_CORPUS)")
    taxonomy_path = _env_default(args.taxonomy, "LITGRAPH_TAXONOMY")
    try:
        app = create_app(
            corpus_dir=corpus,
            data_dir=_data_dir(args),
            taxonomy_path=taxonomy_path,
            top_keywords=args.top_keywords,
        )
    except Exception as exc:
        return _fail(f"startup failed: {exc}", code=1)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def _add_common(parser: argparse.ArgumentParser, taxonomy: bool = False) -> None:
    parser.add_argument("--data", help="graph data directory (env LITGRAPH_DATA)")
    if taxonomy:
        parser.add_argument(
            "--taxonomy", help="taxonomy JSON file (env LITGRAPH_TAXONOMY)"
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="litgraph",
        description="Run a partially automated literature review over a knowledge graph.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("search", help="run a search and merge results into the graph")
    p.add_argument("--terms", required=True, help="boolean search expression")
    p.add_argument("--from", dest="year_from", type=int, required=True)
    p.add_argument("--to", dest="year_to", type=int, required=True)
    p.add_argument("--sources", help="comma-separated source ids (default: all)")
    p.add_argument("--max-per-source", type=int, default=1000)
    p.add_argument("--top-keywords", type=int, default=5)
    p.add_argument("--corpus", help="fixture corpus directory (env LITGRAPH_CORPUS)")
    _add_common(p, taxonomy=True)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("query", help="run a FIND/CLUSTER query against the graph")
    p.add_argument("text", help='query text, e.g. "FIND PUBLICATIONS ORDER BY citations DESC"')
    _add_common(p)
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("cluster", help="cluster publications along one dimension")
    p.add_argument("--by", required=True, choices=["field", "year", "database"])
    _add_common(p)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("export", help="export the graph as nodes.csv + edges.csv")
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("import", help="import a graph from nodes.csv + edges.csv")
    p.add_argument("--in", dest="source", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_import)

    p = sub.add_parser("eval", help="compare the last run against a manual benchmark")
    p.add_argument("--benchmark", required=True, help="benchmark CSV file")
    p.add_argument(
        "--check-labels",
        action="store_true",
        help="validate benchmark labels against the taxonomy",
    )
    _add_common(p, taxonomy=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("serve", help="start the HTTP API service")
    p.add_argument("--port", type=int, default=8745)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--corpus", help="fixture corpus directory (env LITGRAPH_CORPUS)")
    p.add_argument("--top-keywords", type=int, default=5)
    _add_common(p, taxonomy=True)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
